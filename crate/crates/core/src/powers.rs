//! Powers states, their tensor powers, the T-invariant modulus and
//! type classification of constant-state tensor sequences.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockMatrix, CMatrix, WStarSpace};
use crate::error::{Error, Result};

/// Largest stage dimension built unless a caller asks otherwise.
pub const DEFAULT_DIM_CAP: usize = 4096;
/// Largest continued-fraction denominator tried by the rationality check.
pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Modulus threshold for membership in the T-invariant.
pub const ROOT_TOL: f64 = 1e-9;
/// Relative agreement required of consecutive root gaps.
pub const GAP_TOL: f64 = 1e-4;
/// Coarsest allowed scan step.
pub const MAX_SCAN_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PowersSpec {
    /// `a_λ = diag(λ, 1) / (1 + λ)` on `M_2`, `λ ∈ (0, 1]`.
    Lambda { lambda: f64 },
    /// `a_∞ = diag(λ, μ, 1) / (1 + λ + μ)` on `M_3`, `λ, μ ∈ (0, 1)` with
    /// `ln λ / ln μ` irrational.
    Infinity { lambda: f64, mu: f64 },
}

impl PowersSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PowersSpec::Lambda { lambda } => {
                if !(lambda > 0.0 && lambda <= 1.0) {
                    return Err(Error::BadParameter(format!("λ must lie in (0, 1], got {lambda}")));
                }
            }
            PowersSpec::Infinity { lambda, mu } => {
                for (name, v) in [("λ", lambda), ("μ", mu)] {
                    if !(v > 0.0 && v < 1.0) {
                        return Err(Error::BadParameter(format!("{name} must lie in (0, 1), got {v}")));
                    }
                }
                if let Some((p, q)) = rational_approximation(lambda.ln() / mu.ln()) {
                    return Err(Error::RationalLogRatio { lambda, mu, p, q });
                }
            }
        }
        Ok(())
    }

    /// Density eigenvalues in the order of the diagonal.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match *self {
            PowersSpec::Lambda { lambda } => vec![lambda / (1.0 + lambda), 1.0 / (1.0 + lambda)],
            PowersSpec::Infinity { lambda, mu } => {
                let z = 1.0 + lambda + mu;
                vec![lambda / z, mu / z, 1.0 / z]
            }
        }
    }

    pub fn space(&self) -> Result<WStarSpace> {
        self.validate()?;
        WStarSpace::diagonal(&self.eigenvalues())
    }

    pub fn factor_dim(&self) -> usize {
        match self {
            PowersSpec::Lambda { .. } => 2,
            PowersSpec::Infinity { .. } => 3,
        }
    }
}

/// Finds `p/q` with `q <= MAX_DENOMINATOR` within a few ulps of `r`, if any.
pub fn rational_approximation(r: f64) -> Option<(i64, i64)> {
    let tol = 1e-13 * r.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > MAX_DENOMINATOR as i128 {
            break;
        }
        if (r - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2 as i64, k2 as i64));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

pub fn powers_space(lambda: f64) -> Result<WStarSpace> {
    PowersSpec::Lambda { lambda }.space()
}

pub fn powers_inf_space(lambda: f64, mu: f64) -> Result<WStarSpace> {
    PowersSpec::Infinity { lambda, mu }.space()
}

/// `n`-fold tensor power of the Powers state, refusing dimensions above [`DEFAULT_DIM_CAP`].
pub fn powers_stage(spec: &PowersSpec, n: usize) -> Result<WStarSpace> {
    powers_stage_capped(spec, n, DEFAULT_DIM_CAP)
}

pub fn powers_stage_capped(spec: &PowersSpec, n: usize, cap: usize) -> Result<WStarSpace> {
    if n == 0 {
        return Err(Error::BadParameter("stage index starts at 1".into()));
    }
    let dim = stage_dim(spec.factor_dim(), n);
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    spec.space()?.tensor_power(n)
}

fn stage_dim(d: usize, n: usize) -> usize {
    d.checked_pow(n as u32).unwrap_or(usize::MAX)
}

pub fn validate_eigs(eigs: &[f64]) -> Result<()> {
    if eigs.is_empty() {
        return Err(Error::BadEigs("empty list".into()));
    }
    if let Some(v) = eigs.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::BadEigs(format!("entry {v} is not positive")));
    }
    let s: f64 = eigs.iter().sum();
    if (s - 1.0).abs() > 1e-10 {
        return Err(Error::BadEigs(format!("entries sum to {s}")));
    }
    Ok(())
}

/// `Σ_k e_k^{1+it}` for validated eigenvalues.
fn modulus_sum(eigs: &[f64], t: f64) -> Complex64 {
    eigs.iter().map(|&e| Complex64::cis((t * e.ln()).rem_euclid(TAU)) * e).sum()
}

/// `m(t) = |Σ_k e_k^{1+it}|`; at most 1, equal to 1 exactly when all
/// `e_k^{it}` share one phase.
pub fn tinv_modulus(eigs: &[f64], t: f64) -> Result<f64> {
    validate_eigs(eigs)?;
    Ok(modulus_sum(eigs, t).norm())
}

/// `d/dt |S(t)|^2` with `S(t) = Σ e_k^{1+it}`.
fn modulus_sq_derivative(eigs: &[f64], t: f64) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    for &e in eigs {
        let l = e.ln();
        let z = Complex64::cis((t * l).rem_euclid(TAU)) * e;
        s += z;
        ds += z * Complex64::new(0.0, l);
    }
    2.0 * (s.conj() * ds).re
}

/// Positive generator `2π / |ln λ|` of the lattice `T = (2π / ln λ) ℤ`.
pub fn lattice_period(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::BadParameter(format!("λ must lie in (0, 1), got {lambda}")));
    }
    Ok(TAU / lambda.ln().abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub t_max: f64,
    pub steps: usize,
}

impl ScanConfig {
    pub fn step(&self) -> f64 {
        self.t_max / self.steps as f64
    }

    fn check(&self) -> Result<()> {
        if !(self.t_max > 0.0) || self.steps == 0 {
            return Err(Error::BadParameter("scan needs t_max > 0 and steps > 0".into()));
        }
        let step = self.step();
        if step > MAX_SCAN_STEP * (1.0 + 1e-12) {
            return Err(Error::ScanTooCoarse { step, max_step: MAX_SCAN_STEP });
        }
        Ok(())
    }
}

/// `(t, m(t))` on the grid `t = k t_max / steps`, `k = 0..=steps`.
pub fn tinv_scan(eigs: &[f64], scan: &ScanConfig) -> Result<Vec<(f64, f64)>> {
    validate_eigs(eigs)?;
    if !(scan.t_max > 0.0) || scan.steps == 0 {
        return Err(Error::BadParameter("scan needs t_max > 0 and steps > 0".into()));
    }
    let h = scan.step();
    Ok((0..=scan.steps)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * h;
            (t, modulus_sum(eigs, t).norm())
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum TypeTag {
    #[serde(rename = "tracial_II1")]
    TracialII1,
    #[serde(rename = "III_lambda")]
    IIILambda { lambda: f64 },
    #[serde(rename = "III_1")]
    III1,
    #[serde(rename = "undetermined")]
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeVerdict {
    #[serde(flatten)]
    pub tag: TypeTag,
    /// Points of `[0, t_max]` where the modulus reaches `1 - ROOT_TOL`.
    pub evidence: Vec<f64>,
    pub resolution: f64,
    pub t_max: f64,
    pub gap_tolerance: f64,
}

/// Maximizes `m` on `[lo, hi]` by bisection on the sign of `d m²/dt`, or by
/// golden-section search when the derivative does not change sign.
fn polish_max(eigs: &[f64], lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let (da, db) = (modulus_sq_derivative(eigs, a), modulus_sq_derivative(eigs, b));
    if da > 0.0 && db < 0.0 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if modulus_sq_derivative(eigs, m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| modulus_sum(eigs, t).norm();
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if b - a < 1e-15 * b.abs().max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Points of `[0, t_max]` where `m(t) >= 1 - ROOT_TOL`: `0` plus the polished
/// grid maxima that pass the threshold.
fn find_roots(eigs: &[f64], grid: &[(f64, f64)]) -> Vec<f64> {
    let mut roots = vec![0.0];
    let n = grid.len();
    for k in 1..n {
        let m = grid[k].1;
        if m < 1.0 - 1e-3 {
            continue;
        }
        let left_ok = m >= grid[k - 1].1;
        let right_ok = k + 1 == n || m >= grid[k + 1].1;
        if !(left_ok && right_ok) {
            continue;
        }
        let hi = if k + 1 < n { grid[k + 1].0 } else { grid[k].0 };
        let t = polish_max(eigs, grid[k - 1].0, hi);
        if modulus_sum(eigs, t).norm() >= 1.0 - ROOT_TOL {
            let h = grid[1].0 - grid[0].0;
            if roots.last().is_none_or(|&r| t - r > 2.0 * h) {
                roots.push(t);
            }
        }
    }
    roots
}

/// Classifies the tensor sequence of a constant state from the zero set of
/// the modulus on `[0, t_max]`.
pub fn classify_type(eigs: &[f64], scan: &ScanConfig) -> Result<TypeVerdict> {
    validate_eigs(eigs)?;
    scan.check()?;
    let grid = tinv_scan(eigs, scan)?;
    let base = |tag: TypeTag, evidence: Vec<f64>| TypeVerdict {
        tag,
        evidence,
        resolution: scan.step(),
        t_max: scan.t_max,
        gap_tolerance: GAP_TOL,
    };
    if grid.iter().all(|&(_, m)| m >= 1.0 - ROOT_TOL) {
        return Ok(base(TypeTag::TracialII1, vec![0.0, scan.t_max]));
    }
    let roots = find_roots(eigs, &grid);
    match roots.len() {
        1 => Ok(base(TypeTag::III1, roots)),
        2 => Ok(base(
            TypeTag::Undetermined { reason: "a single nonzero root in range; the period cannot be confirmed".into() },
            roots,
        )),
        _ => {
            let gaps: Vec<f64> = roots.windows(2).map(|w| w[1] - w[0]).collect();
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            if gaps.iter().any(|g| (g - mean).abs() > GAP_TOL * mean) {
                return Ok(base(TypeTag::Undetermined { reason: "irregular spacing between roots".into() }, roots));
            }
            // least-squares slope of t_k against k through the origin
            let (num, den) = roots
                .iter()
                .enumerate()
                .fold((0.0, 0.0), |(a, b), (k, &t)| (a + k as f64 * t, b + (k * k) as f64));
            let g = num / den;
            Ok(base(TypeTag::IIILambda { lambda: (-TAU / g).exp() }, roots))
        }
    }
}

/// Classifies a sequence of stage densities (given by eigenvalue lists).
/// Only constant sequences are decided; otherwise the type depends on the
/// ultrafilter and the verdict is undetermined.
pub fn classify_sequence(densities: &[Vec<f64>], scan: &ScanConfig) -> Result<TypeVerdict> {
    let first = densities.first().ok_or_else(|| Error::BadEigs("empty sequence".into()))?;
    let constant = densities.iter().all(|d| {
        d.len() == first.len() && d.iter().zip(first).all(|(a, b)| (a - b).abs() <= 1e-12)
    });
    if constant {
        return classify_type(first, scan);
    }
    for d in densities {
        validate_eigs(d)?;
    }
    Ok(TypeVerdict {
        tag: TypeTag::Undetermined { reason: "ultrafilter-dependent".into() },
        evidence: Vec::new(),
        resolution: scan.step(),
        t_max: scan.t_max,
        gap_tolerance: GAP_TOL,
    })
}

/// Decay data for `x_{c,n} = (c 1)^{⊗n}` twisted by `a^{it ⊗ n}`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayCurve {
    pub c: f64,
    pub t: f64,
    pub stages: Vec<usize>,
    /// `|φ^{⊗n}(a^{it ⊗ n} x_{c,n})| = (c m(t))^n` from the per-factor product.
    pub values: Vec<f64>,
    /// The same quantity from explicit stage matrices, where the stage is small enough.
    pub direct_values: Vec<Option<f64>>,
    /// `‖a^{it ⊗ n} x_{c,n}‖^# = c^n`; the twist is unitary.
    pub sharp_values: Vec<f64>,
    pub modulus: f64,
    pub per_factor: f64,
    /// `m(t) < 1/c`.
    pub criterion_decays: bool,
    pub threshold: f64,
    /// Largest value over the final quarter of the stages.
    pub tail_max: f64,
    pub decays_to_zero: bool,
}

/// Explicit-matrix evaluation of `φ(a^{it} x_{c,n})` on stage `n`.
pub fn twisted_value_direct(spec: &PowersSpec, c: f64, t: f64, n: usize, cap: usize) -> Result<f64> {
    let stage = powers_stage_capped(spec, n, cap)?;
    let d = spec.factor_dim();
    let factor = CMatrix::identity(d, d) * Complex64::new(c, 0.0);
    let mut x = factor.clone();
    for _ in 1..n {
        x = x.kronecker(&factor);
    }
    // φ(u x) = Tr(a^{1+it} x)
    let w = stage.complex_power(Complex64::new(1.0, t));
    let x = BlockMatrix::from_block(x);
    Ok(trace_of_product(&w, &x).norm())
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &BlockMatrix, b: &BlockMatrix) -> Complex64 {
    assert!(a.same_shape(b));
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.blocks().iter().zip(b.blocks()) {
        let n = x.nrows();
        for i in 0..n {
            for j in 0..n {
                acc += x[(i, j)] * y[(j, i)];
            }
        }
    }
    acc
}

/// Decay curve for stages `1..=max_stage`; stages of dimension at most
/// `direct_cap` are also evaluated with explicit matrices.
pub fn twisted_decay(
    spec: &PowersSpec,
    c: f64,
    t: f64,
    max_stage: usize,
    direct_cap: usize,
    threshold: f64,
) -> Result<DecayCurve> {
    spec.validate()?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::BadParameter(format!("c must lie in (0, 1), got {c}")));
    }
    if max_stage == 0 || !(threshold > 0.0) {
        return Err(Error::BadParameter("need at least one stage and a positive threshold".into()));
    }
    let modulus = modulus_sum(&spec.eigenvalues(), t).norm();
    let per_factor = c * modulus;
    let stages: Vec<usize> = (1..=max_stage).collect();
    let values: Vec<f64> = stages.iter().map(|&n| per_factor.powi(n as i32)).collect();
    let sharp_values: Vec<f64> = stages.iter().map(|&n| c.powi(n as i32)).collect();
    let mut direct_values = Vec::with_capacity(stages.len());
    for &n in &stages {
        if stage_dim(spec.factor_dim(), n) <= direct_cap {
            direct_values.push(Some(twisted_value_direct(spec, c, t, n, direct_cap)?));
        } else {
            direct_values.push(None);
        }
    }
    let tail_start = max_stage - max_stage.div_ceil(4);
    let tail_max = values[tail_start..].iter().cloned().fold(0.0, f64::max);
    Ok(DecayCurve {
        c,
        t,
        stages,
        values,
        direct_values,
        sharp_values,
        modulus,
        per_factor,
        criterion_decays: modulus < 1.0 / c,
        threshold,
        tail_max,
        decays_to_zero: tail_max < threshold,
    })
}
