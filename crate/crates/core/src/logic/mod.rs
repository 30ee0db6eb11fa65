//! Search-based evaluation of sup/inf sentences over a finite-dimensional
//! W*-probability space.
//!
//! Sup estimates are lower bounds realised by stored witnesses. Estimates of
//! `inf sup` sentences and of sup residuals that should vanish are reported as
//! heuristic: the optimizer may miss the true extremum in either direction.

pub mod search;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub use search::{
    local_min_over_rank, rank_tuples, search, search_projections, search_projections_of_rank, search_s1, Domain,
    Objective, OptConfig, RestartTrace, SearchOutcome, Sense,
};

use crate::algebra::{BlockMatrix, CMatrix, WStarSpace, ONE, ZERO};
use crate::error::{Error, Result};
use crate::modular::{project_to_s1, sigma_coeff, sigma_is_trivial};
use crate::rng::derive_seed;

/// Seed of the search attached to a binder at the given nesting depth.
pub fn binder_seed(seed: u64, depth: usize) -> u64 {
    derive_seed(seed, depth as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    /// Realised by the stored witnesses; the true sup is at least this.
    CertifiedLower,
    /// Best value the optimizer reached; no guarantee in either direction.
    HeuristicResidual,
    /// Computed in closed form.
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct SentenceEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub witnesses: Vec<(String, BlockMatrix)>,
    pub diagnostics: Vec<RestartTrace>,
    pub evaluations: usize,
}

impl SentenceEstimate {
    fn exact(value: f64, witnesses: Vec<(String, BlockMatrix)>) -> Self {
        Self { value, kind: EstimateKind::Exact, witnesses, diagnostics: Vec::new(), evaluations: 0 }
    }

    pub fn witness(&self, name: &str) -> Option<&BlockMatrix> {
        self.witnesses.iter().find(|(n, _)| n == name).map(|(_, w)| w)
    }
}

/// Which reading of `ξ` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiVariant {
    /// `√max(0, (‖x‖^#)² - Re(φ(x)²))`; the displayed expression with `φ(x)²`
    /// taken as a complex square.
    RealPart,
    /// `‖x - φ(x)1‖^# = √((‖x‖^#)² - |φ(x)|²)`.
    Centered,
}

/// `ξ(x)`. Panics if `x` does not match the space.
pub fn xi(space: &WStarSpace, x: &BlockMatrix, variant: XiVariant) -> f64 {
    let s = space.sharp_norm(x);
    let z = space.state(x);
    match variant {
        XiVariant::Centered => 0f64.max(s * s - z.re * z.re - z.im * z.im).sqrt(),
        XiVariant::RealPart => 0f64.max(s * s - (z * z).re).sqrt(),
    }
}

/// Lower bound on `β(x) = sup_{y ∈ S1} ‖xy - yx‖^#`.
pub fn beta_lower(space: &WStarSpace, x: &BlockMatrix, cfg: &OptConfig) -> SentenceEstimate {
    beta_at_depth(space, x, cfg, 0)
}

fn beta_at_depth(space: &WStarSpace, x: &BlockMatrix, cfg: &OptConfig, depth: usize) -> SentenceEstimate {
    let f = |y: &BlockMatrix| space.sharp_norm(&x.commutator(y));
    let r = search_s1(space, &f, cfg, binder_seed(cfg.seed, depth), Sense::Sup, false);
    SentenceEstimate {
        value: r.value,
        kind: EstimateKind::CertifiedLower,
        witnesses: vec![("y".into(), r.witness)],
        diagnostics: r.trace,
        evaluations: r.evaluations,
    }
}

/// A nontrivial central projection and its `ξ` value.
#[derive(Clone, Debug)]
pub struct CenterWitness {
    pub projection: BlockMatrix,
    pub block: usize,
    pub xi_value: f64,
}

/// Block projection with the largest `ξ`, or `None` for a single block.
pub fn central_witness(space: &WStarSpace) -> Option<CenterWitness> {
    if space.num_blocks() < 2 {
        return None;
    }
    let mut best: Option<CenterWitness> = None;
    for k in 0..space.num_blocks() {
        let p = space.block_projection(k);
        let v = xi(space, &p, XiVariant::Centered);
        if best.as_ref().is_none_or(|b| v > b.xi_value) {
            best = Some(CenterWitness { projection: p, block: k, xi_value: v });
        }
    }
    best
}

/// The state-preserving conditional expectation onto the center,
/// `⊕_k (φ(p_k x p_k) / φ(p_k)) 1_k`.
pub fn center_expectation(space: &WStarSpace, x: &BlockMatrix) -> Result<BlockMatrix> {
    x.check_dims(&space.dims())?;
    let values: Vec<Complex64> = space
        .density()
        .blocks()
        .iter()
        .zip(x.blocks())
        .map(|(a, xb)| {
            let w = a.trace();
            (a * xb).trace() / w
        })
        .collect();
    Ok(BlockMatrix::block_scalars(&space.dims(), &values))
}

/// Dimension of the center of `⊕ M_{n_k}`, computed numerically as the
/// common null space of `z ↦ [z, e]` over all matrix units `e`.
pub fn center_dimension(dims: &[usize]) -> usize {
    let total: usize = dims.iter().map(|n| n * n).sum();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut offset = 0;
    for &n in dims {
        for a in 0..n {
            for b in 0..n {
                // (z e_ab - e_ab z)_{ij} = z_{ia} δ_{bj} - δ_{ia} z_{bj}
                for i in 0..n {
                    for j in 0..n {
                        let mut row = vec![Complex64::new(0.0, 0.0); total];
                        if b == j {
                            row[offset + a * n + i] += ONE;
                        }
                        if i == a {
                            row[offset + j * n + b] -= ONE;
                        }
                        if row.iter().any(|v| v.norm() > 0.0) {
                            rows.push(row);
                        }
                    }
                }
            }
        }
        offset += n * n;
    }
    if rows.is_empty() {
        return total;
    }
    let m = DMatrix::from_fn(rows.len(), total, |i, j| rows[i][j]);
    let rank = m.singular_values().iter().filter(|&&s| s > 1e-10).count();
    total - rank
}

/// Estimate of `χ_factor = sup_{x ∈ S1} max(0, ξ(x) - β(x))`.
///
/// With more than one block the central witness gives an exact positive
/// lower bound `ξ(p)` (its commutator with anything vanishes). On a single
/// block the sup is searched adversarially; the result is the largest
/// residual found, which should be close to zero.
pub fn chi_factor_estimate(space: &WStarSpace, cfg: &OptConfig) -> SentenceEstimate {
    if let Some(w) = central_witness(space) {
        return SentenceEstimate {
            value: w.xi_value,
            kind: EstimateKind::CertifiedLower,
            witnesses: vec![("x".into(), w.projection)],
            diagnostics: Vec::new(),
            evaluations: 1,
        };
    }
    chi_residual_search(space, cfg)
}

/// The adversarial search used for single blocks; also valid on direct sums.
pub fn chi_residual_search(space: &WStarSpace, cfg: &OptConfig) -> SentenceEstimate {
    let f = |x: &BlockMatrix| {
        let inner = beta_at_depth(space, x, cfg, 1).value;
        0f64.max(xi(space, x, XiVariant::Centered) - inner)
    };
    let r = search_s1(space, &f, cfg, binder_seed(cfg.seed, 0), Sense::Sup, true);
    SentenceEstimate {
        value: r.value,
        kind: EstimateKind::HeuristicResidual,
        witnesses: vec![("x".into(), r.witness)],
        diagnostics: r.trace,
        evaluations: r.evaluations,
    }
}

/// Gap and certificate for `‖x - φ(x)1‖^# <= sup_{y ∈ S1} ‖[x, y]‖^#`.
#[derive(Clone, Debug, Serialize)]
pub struct DixmierGap {
    pub distance_to_scalars: f64,
    pub beta: SentenceEstimate,
    /// `distance_to_scalars - beta.value`; nonpositive when the witness closes the gap.
    pub residual: f64,
}

pub fn dixmier_residual(space: &WStarSpace, x: &BlockMatrix, cfg: &OptConfig) -> Result<DixmierGap> {
    space.require_single_block()?;
    x.check_dims(&space.dims())?;
    let centered = x - &space.identity().scale(space.state(x));
    let distance_to_scalars = space.sharp_norm(&centered);
    let beta = beta_lower(space, x, cfg);
    let residual = distance_to_scalars - beta.value;
    Ok(DixmierGap { distance_to_scalars, beta, residual })
}

/// Estimate of `φ_t = sup_{x ∈ S1} ‖σ_t(x) - x‖^#`; exactly zero when `σ_t` is trivial.
pub fn phi_t_estimate(space: &WStarSpace, t: f64, cfg: &OptConfig) -> SentenceEstimate {
    if sigma_is_trivial(space, t) {
        return SentenceEstimate::exact(0.0, vec![("x".into(), space.identity())]);
    }
    let f = |x: &BlockMatrix| space.sharp_norm(&(&sigma_coeff(space, x, t) - x));
    let r = search_s1(space, &f, cfg, binder_seed(cfg.seed, 0), Sense::Sup, false);
    SentenceEstimate {
        value: r.value,
        kind: EstimateKind::CertifiedLower,
        witnesses: vec![("x".into(), r.witness)],
        diagnostics: r.trace,
        evaluations: r.evaluations,
    }
}

/// The nilpotent Jordan block `J_n`. Its commutant is checked to be
/// `span{1, J, .., J^{n-1}}` (dimension `n`), whose only idempotents are 0 and 1.
pub fn herrero_szarek_witness(n: usize) -> Result<BlockMatrix> {
    if !(2..=32).contains(&n) {
        return Err(Error::BadDimension(n));
    }
    let j = DMatrix::<f64>::from_fn(n, n, |r, c| if c == r + 1 { 1.0 } else { 0.0 });
    // vec(XJ - JX) = (J^T ⊗ I - I ⊗ J) vec(X)
    let id = DMatrix::<f64>::identity(n, n);
    let system = j.transpose().kronecker(&id) - id.kronecker(&j);
    let nullity = system.singular_values().iter().filter(|&&s| s <= 1e-10).count();
    if nullity != n {
        return Err(Error::BadDimension(n));
    }
    Ok(BlockMatrix::from_block(CMatrix::from_fn(n, n, |r, c| if c == r + 1 { ONE } else { ZERO })))
}

/// `max(0, min(‖p‖^#, ‖1-p‖^#) - ‖xp - px‖^#)`.
pub fn theta_integrand(space: &WStarSpace, x: &BlockMatrix, p: &BlockMatrix) -> f64 {
    let one = space.identity();
    let size = space.sharp_norm(p).min(space.sharp_norm(&(&one - p)));
    0f64.max(size - space.sharp_norm(&(&(x * p) - &(p * x))))
}

/// Lower bound on `sup_p max(0, min(‖p‖^#, ‖1-p‖^#) - ‖[x, p]‖^#)` for one `x`.
pub fn theta_inner_sup(space: &WStarSpace, x: &BlockMatrix, cfg: &OptConfig) -> SentenceEstimate {
    theta_inner_at_depth(space, x, cfg, 0)
}

fn theta_inner_at_depth(space: &WStarSpace, x: &BlockMatrix, cfg: &OptConfig, depth: usize) -> SentenceEstimate {
    let f = |p: &BlockMatrix| theta_integrand(space, x, p);
    let r = search_projections(space, &f, cfg, binder_seed(cfg.seed, depth), Sense::Sup, false);
    SentenceEstimate {
        value: r.value,
        kind: EstimateKind::CertifiedLower,
        witnesses: vec![("p".into(), r.witness)],
        diagnostics: r.trace,
        evaluations: r.evaluations,
    }
}

/// Estimate of `θ = inf_{x ∈ S1} sup_p max(0, min(‖p‖^#, ‖1-p‖^#) - ‖[x, p]‖^#)`.
///
/// Candidates for `x` start with the Jordan block scaled into `S1` and
/// continue with random elements refined by a hill climb.
pub fn theta_estimate(space: &WStarSpace, cfg: &OptConfig) -> Result<SentenceEstimate> {
    space.require_single_block()?;
    let f = |x: &BlockMatrix| theta_inner_at_depth(space, x, cfg, 1).value;
    let r = search_s1(space, &f, cfg, binder_seed(cfg.seed, 0), Sense::Inf, true);
    let inner = theta_inner_at_depth(space, &r.witness, cfg, 1);
    let mut witnesses = vec![("x".into(), r.witness)];
    witnesses.extend(inner.witnesses);
    Ok(SentenceEstimate {
        value: r.value,
        kind: EstimateKind::HeuristicResidual,
        witnesses,
        diagnostics: r.trace,
        evaluations: r.evaluations + inner.evaluations,
    })
}

/// The Jordan block of the space's dimension scaled into `S1`.
pub fn scaled_jordan_witness(space: &WStarSpace) -> Result<BlockMatrix> {
    space.require_single_block()?;
    project_to_s1(space, &herrero_szarek_witness(space.total_dim())?)
}
