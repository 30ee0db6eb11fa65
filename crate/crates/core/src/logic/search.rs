//! The shared search engine behind every sup/inf estimate.
//!
//! A search over `S1` runs a fixed catalog of structured elements, a
//! finite-difference ascent from the best catalog entry, and then
//! `restarts` independent rounds. Each round draws random elements from its
//! own seeded stream, ascends from the best of its first few draws and
//! evaluates the rest. Rounds run in parallel and are merged in index order
//! (earliest wins ties), so results do not depend on the thread count and a
//! larger `sample_budget` can only improve a leaf estimate.
//!
//! Projection searches parametrize each block by an orthonormal frame and
//! climb on the Grassmannian with a finite-difference gradient followed by a
//! QR retraction, separately for every tuple of block ranks.
//!
//! When the objective itself contains a search ("nested"), finite-difference
//! gradients are unaffordable and the rounds use a randomized hill climb of
//! `ascent_steps` steps instead.

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    complex_gaussian, ginibre, haar_unitary, orthonormal_frame, random_element, random_hermitian, random_unitary,
    BlockMatrix, CMatrix, WStarSpace, ONE, ZERO,
};
use crate::modular::project_to_s1;
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Search effort and reproducibility settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptConfig {
    /// Random draws per leaf search (per rank tuple for projections).
    pub sample_budget: usize,
    pub restarts: usize,
    pub ascent_steps: usize,
    pub step_size: f64,
    /// Slack used by verdicts built on top of estimates.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self { sample_budget: 2000, restarts: 4, ascent_steps: 25, step_size: 0.25, tol: 0.05, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Sup,
    Inf,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Sup => 1.0,
            Sense::Inf => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    S1,
    Proj,
}

/// Progress of one search round.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartTrace {
    pub round: usize,
    pub start_value: f64,
    pub best_value: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Best objective value found (in the caller's sense, not negated).
    pub value: f64,
    pub witness: BlockMatrix,
    pub evaluations: usize,
    pub trace: Vec<RestartTrace>,
}

pub type Objective<'a> = dyn Fn(&BlockMatrix) -> f64 + Sync + 'a;

/// Best point seen so far, in maximization form (`score = sign * value`).
#[derive(Clone)]
struct Best {
    score: f64,
    x: Option<BlockMatrix>,
    evals: usize,
}

impl Best {
    fn new() -> Self {
        Self { score: f64::NEG_INFINITY, x: None, evals: 0 }
    }

    fn offer(&mut self, x: &BlockMatrix, score: f64) {
        self.evals += 1;
        if score > self.score {
            self.score = score;
            self.x = Some(x.clone());
        }
    }

    fn merge(&mut self, other: Best) {
        self.evals += other.evals;
        if other.score > self.score {
            self.score = other.score;
            self.x = other.x;
        }
    }
}

fn score_of(f: &Objective<'_>, sense: Sense, x: &BlockMatrix) -> f64 {
    let v = sense.sign() * f(x);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn finish(best: Best, sense: Sense, trace: Vec<RestartTrace>, fallback: BlockMatrix) -> SearchOutcome {
    let value = if best.score.is_finite() { sense.sign() * best.score } else { f64::NAN };
    SearchOutcome { value, witness: best.x.unwrap_or(fallback), evaluations: best.evals, trace }
}

fn project(space: &WStarSpace, x: &BlockMatrix) -> BlockMatrix {
    project_to_s1(space, x).expect("shapes agree")
}

/// Embeds a single-block matrix `m` as block `k`, other blocks set to `fill`.
fn embed(dims: &[usize], k: usize, m: CMatrix, fill: Complex64) -> BlockMatrix {
    let blocks = dims
        .iter()
        .enumerate()
        .map(|(i, &n)| if i == k { m.clone() } else { CMatrix::identity(n, n) * fill })
        .collect();
    BlockMatrix::new(blocks).expect("square blocks")
}

fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

fn shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if j == (i + 1) % n { ONE } else { ZERO })
}

fn clock(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::cis(std::f64::consts::TAU * i as f64 / n as f64)
        } else {
            ZERO
        }
    })
}

fn jordan(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if j == i + 1 { ONE } else { ZERO })
}

/// Structured starting points for leaf searches over `S1`: zero, the unit,
/// central projections, eigenbasis matrix units and Hermitian pairs, Jordan
/// shifts, reflections and clock/shift unitaries, all scaled into `S1`.
pub(crate) fn s1_catalog(space: &WStarSpace) -> Vec<BlockMatrix> {
    let dims = space.dims();
    let mut out = vec![space.zeros(), space.identity()];
    if dims.len() > 1 {
        out.extend((0..dims.len()).map(|k| space.block_projection(k)));
    }
    for (k, &n) in dims.iter().enumerate() {
        let e = &space.eigen()[k];
        let eig = |m: CMatrix| e.from_eigenbasis(&m);
        if n > 1 {
            out.push(embed(&dims, k, jordan(n), ZERO));
            out.push(embed(&dims, k, eig(jordan(n)), ZERO));
        }
        let pairs: Vec<(usize, usize)> = if n <= 16 {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
        } else {
            vec![(0, n - 1), (n - 1, 0)]
        };
        for &(i, j) in &pairs {
            out.push(embed(&dims, k, eig(unit(n, i, j)), ZERO));
            if i < j {
                out.push(embed(&dims, k, eig(unit(n, i, j) + unit(n, j, i)), ZERO));
                let im = Complex64::new(0.0, 1.0);
                out.push(embed(&dims, k, eig((unit(n, i, j) - unit(n, j, i)) * im), ZERO));
            }
        }
        if n > 1 {
            for i in 0..n.min(16) {
                out.push(embed(&dims, k, eig(CMatrix::identity(n, n) - unit(n, i, i) * Complex64::new(2.0, 0.0)), ONE));
            }
            let (s, c) = (shift(n), clock(n));
            let powers: Vec<(usize, usize)> = if n <= 6 {
                (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&p| p != (0, 0)).collect()
            } else {
                vec![(1, 0), (0, 1), (1, 1)]
            };
            for (a, b) in powers {
                let mut w = CMatrix::identity(n, n);
                for _ in 0..a {
                    w = &w * &s;
                }
                for _ in 0..b {
                    w = &w * &c;
                }
                out.push(embed(&dims, k, eig(w), ONE));
            }
        }
    }
    out.iter().map(|x| project(space, x)).collect()
}

/// Small catalog for searches whose objective is itself a search.
pub(crate) fn nested_catalog(space: &WStarSpace) -> Vec<BlockMatrix> {
    let dims = space.dims();
    let mut out = Vec::new();
    if dims.len() > 1 {
        out.extend((0..dims.len()).map(|k| space.block_projection(k)));
    }
    for (k, &n) in dims.iter().enumerate() {
        if n > 1 {
            out.push(embed(&dims, k, jordan(n), ZERO));
            let e = &space.eigen()[k];
            let order = eigen_order(&e.values.iter().cloned().collect::<Vec<_>>());
            let (lo, hi) = (order[n - 1], order[0]);
            out.push(embed(&dims, k, e.from_eigenbasis(&unit(n, hi, lo)), ZERO));
        }
    }
    if out.is_empty() {
        out.push(space.identity());
    }
    out.iter().map(|x| project(space, x)).collect()
}

/// Indices sorting `values` in descending order.
fn eigen_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    idx
}

fn random_s1(space: &WStarSpace, k: usize, rng: &mut Rng) -> BlockMatrix {
    let dims = space.dims();
    let x = match k % 4 {
        0 => random_element(&dims, rng),
        1 => random_unitary(&dims, rng),
        2 => random_hermitian(&dims, rng),
        _ => {
            let r: f64 = rng.random();
            random_element(&dims, rng).scale_real(r)
        }
    };
    project(space, &x)
}

/// Finite-difference steepest ascent of `score(project(x))`.
fn ascend(
    space: &WStarSpace,
    f: &Objective<'_>,
    sense: Sense,
    start: &BlockMatrix,
    steps: usize,
    step_size: f64,
    best: &mut Best,
) {
    const H: f64 = 1e-6;
    let dims = space.dims();
    let mut x = start.to_real_vec();
    let mut fx = score_of(f, sense, start);
    best.offer(start, fx);
    let mut eta = step_size;
    for _ in 0..steps {
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let mut y = x.clone();
            y[i] += H;
            let p = project(space, &BlockMatrix::from_real_vec(&dims, &y));
            let fy = score_of(f, sense, &p);
            best.offer(&p, fy);
            grad[i] = (fy - fx) / H;
        }
        let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !(gn > 1e-14) || !gn.is_finite() {
            return;
        }
        loop {
            let y: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + eta * g / gn).collect();
            let p = project(space, &BlockMatrix::from_real_vec(&dims, &y));
            let fy = score_of(f, sense, &p);
            best.offer(&p, fy);
            if fy > fx {
                x = p.to_real_vec();
                fx = fy;
                eta = (eta * 2.0).min(4.0 * step_size);
                break;
            }
            eta *= 0.5;
            if eta < 1e-9 {
                return;
            }
        }
    }
}

/// Randomized hill climb used when each evaluation is expensive.
fn hill_climb(
    space: &WStarSpace,
    f: &Objective<'_>,
    sense: Sense,
    start: &BlockMatrix,
    steps: usize,
    step_size: f64,
    rng: &mut Rng,
    best: &mut Best,
) {
    let dims = space.dims();
    let mut x = start.clone();
    let mut fx = score_of(f, sense, &x);
    best.offer(&x, fx);
    let mut eta = step_size;
    for _ in 0..steps {
        let d = BlockMatrix::new(dims.iter().map(|&n| ginibre(n, n, rng)).collect()).expect("square");
        let dn = d.frobenius_norm();
        let cand = project(space, &(&x + &d.scale_real(eta / dn)));
        let fc = score_of(f, sense, &cand);
        best.offer(&cand, fc);
        if fc > fx {
            x = cand;
            fx = fc;
            eta *= 1.5;
        } else {
            eta *= 0.6;
        }
    }
}

/// sup or inf of `f` over `S1`.
pub fn search_s1(
    space: &WStarSpace,
    f: &Objective<'_>,
    cfg: &OptConfig,
    seed: u64,
    sense: Sense,
    nested: bool,
) -> SearchOutcome {
    let mut best = Best::new();
    let mut trace = Vec::new();
    if nested {
        for x in nested_catalog(space) {
            best.offer(&x, score_of(f, sense, &x));
        }
        trace.push(RestartTrace { round: 0, start_value: best.score, best_value: best.score, evaluations: best.evals });
        let rounds: Vec<Best> = (0..cfg.restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_from_seed(derive_seed(seed, r as u64 + 1));
                let mut b = Best::new();
                let x0 = random_s1(space, 0, &mut rng);
                hill_climb(space, f, sense, &x0, cfg.ascent_steps, cfg.step_size, &mut rng, &mut b);
                b
            })
            .collect();
        merge_rounds(&mut best, &mut trace, rounds, sense);
        return finish(best, sense, trace, space.zeros());
    }

    for x in s1_catalog(space) {
        best.offer(&x, score_of(f, sense, &x));
    }
    let catalog_best = best.x.clone().expect("catalog is nonempty");
    let start_score = best.score;
    ascend(space, f, sense, &catalog_best, cfg.ascent_steps, cfg.step_size, &mut best);
    trace.push(RestartTrace {
        round: 0,
        start_value: sense.sign() * start_score,
        best_value: sense.sign() * best.score,
        evaluations: best.evals,
    });
    if cfg.restarts > 0 {
        let per_round = cfg.sample_budget.div_ceil(cfg.restarts);
        let rounds: Vec<Best> = (0..cfg.restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_from_seed(derive_seed(seed, r as u64 + 1));
                let mut b = Best::new();
                let pool = per_round.min(8);
                for k in 0..pool {
                    let x = random_s1(space, k, &mut rng);
                    b.offer(&x, score_of(f, sense, &x));
                }
                if let Some(x0) = b.x.clone() {
                    ascend(space, f, sense, &x0, cfg.ascent_steps, cfg.step_size, &mut b);
                }
                for k in pool..per_round {
                    let x = random_s1(space, k, &mut rng);
                    b.offer(&x, score_of(f, sense, &x));
                }
                b
            })
            .collect();
        merge_rounds(&mut best, &mut trace, rounds, sense);
    }
    finish(best, sense, trace, space.zeros())
}

fn merge_rounds(best: &mut Best, trace: &mut Vec<RestartTrace>, rounds: Vec<Best>, sense: Sense) {
    for (r, b) in rounds.into_iter().enumerate() {
        trace.push(RestartTrace {
            round: r + 1,
            start_value: sense.sign() * best.score,
            best_value: sense.sign() * b.score,
            evaluations: b.evals,
        });
        best.merge(b);
    }
}

/// All rank tuples `(r_1, .., r_m)` with `0 <= r_k <= n_k`, in lexicographic order.
pub fn rank_tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in dims {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..=n).map(move |r| {
                    let mut p = prefix.clone();
                    p.push(r);
                    p
                })
            })
            .collect();
    }
    out
}

/// Projection with the given per-block frames (frames need not be orthonormal).
fn frames_to_projection(frames: &[CMatrix]) -> (BlockMatrix, Vec<CMatrix>) {
    let mut blocks = Vec::with_capacity(frames.len());
    let mut ortho = Vec::with_capacity(frames.len());
    for q in frames {
        let n = q.nrows();
        if q.ncols() == 0 {
            blocks.push(CMatrix::zeros(n, n));
            ortho.push(q.clone());
            continue;
        }
        let (o, _) = orthonormal_frame(q);
        let p = &o * o.adjoint();
        blocks.push((&p + p.adjoint()) * Complex64::new(0.5, 0.0));
        ortho.push(o);
    }
    (BlockMatrix::new(blocks).expect("square"), ortho)
}

fn frames_to_vec(frames: &[CMatrix]) -> Vec<f64> {
    frames.iter().flat_map(|q| q.iter().flat_map(|z| [z.re, z.im])).collect()
}

fn vec_to_frames(shape: &[(usize, usize)], v: &[f64]) -> Vec<CMatrix> {
    let mut it = v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1]));
    shape
        .iter()
        .map(|&(n, r)| CMatrix::from_iterator(n, r, it.by_ref().take(n * r)))
        .collect()
}

fn random_frames(shape: &[(usize, usize)], rng: &mut Rng) -> Vec<CMatrix> {
    shape
        .iter()
        .map(|&(n, r)| {
            let u = haar_unitary(n, rng);
            u.columns(0, r).into_owned()
        })
        .collect()
}

/// Frames spanned by the top (or bottom) density eigenvectors of each block.
fn eigen_frames(space: &WStarSpace, shape: &[(usize, usize)], top: bool) -> Vec<CMatrix> {
    shape
        .iter()
        .enumerate()
        .map(|(k, &(n, r))| {
            let e = &space.eigen()[k];
            let order = eigen_order(&e.values.iter().cloned().collect::<Vec<_>>());
            let cols: Vec<usize> = if top { order[..r].to_vec() } else { order[n - r..].to_vec() };
            CMatrix::from_fn(n, r, |i, j| e.vectors[(i, cols[j])])
        })
        .collect()
}

/// Grassmannian ascent with finite-difference gradients in frame coordinates;
/// stops after `max_evals` evaluations or when the step collapses.
fn grassmann_ascent(
    f: &Objective<'_>,
    sense: Sense,
    shape: &[(usize, usize)],
    start: Vec<CMatrix>,
    max_evals: usize,
    step_size: f64,
    best: &mut Best,
) {
    const H: f64 = 1e-6;
    let (p0, q0) = frames_to_projection(&start);
    let mut x = frames_to_vec(&q0);
    let mut fx = score_of(f, sense, &p0);
    best.offer(&p0, fx);
    let mut used = 1;
    let mut eta = step_size;
    while used < max_evals && !x.is_empty() {
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let mut y = x.clone();
            y[i] += H;
            let (p, _) = frames_to_projection(&vec_to_frames(shape, &y));
            let fy = score_of(f, sense, &p);
            best.offer(&p, fy);
            grad[i] = (fy - fx) / H;
        }
        used += x.len();
        let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !(gn > 1e-14) || !gn.is_finite() {
            return;
        }
        loop {
            let y: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + eta * g / gn).collect();
            let (p, q) = frames_to_projection(&vec_to_frames(shape, &y));
            let fy = score_of(f, sense, &p);
            best.offer(&p, fy);
            used += 1;
            if fy > fx {
                x = frames_to_vec(&q);
                fx = fy;
                eta = (eta * 2.0).min(4.0 * step_size);
                break;
            }
            eta *= 0.5;
            if eta < 1e-10 || used >= max_evals {
                return;
            }
        }
    }
}

fn frame_hill_climb(
    f: &Objective<'_>,
    sense: Sense,
    shape: &[(usize, usize)],
    start: Vec<CMatrix>,
    steps: usize,
    step_size: f64,
    rng: &mut Rng,
    best: &mut Best,
) {
    let (p0, q0) = frames_to_projection(&start);
    let mut x = frames_to_vec(&q0);
    let mut fx = score_of(f, sense, &p0);
    best.offer(&p0, fx);
    let mut eta = step_size;
    for _ in 0..steps {
        let d: Vec<f64> = (0..x.len()).map(|_| complex_gaussian(rng).re).collect();
        let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + eta * b / dn).collect();
        let (p, q) = frames_to_projection(&vec_to_frames(shape, &y));
        let fy = score_of(f, sense, &p);
        best.offer(&p, fy);
        if fy > fx {
            x = frames_to_vec(&q);
            fx = fy;
            eta *= 1.5;
        } else {
            eta *= 0.6;
        }
    }
}

/// sup or inf of `f` over projections of one fixed rank tuple.
pub fn search_projections_of_rank(
    space: &WStarSpace,
    ranks: &[usize],
    f: &Objective<'_>,
    cfg: &OptConfig,
    seed: u64,
    sense: Sense,
    nested: bool,
) -> SearchOutcome {
    let dims = space.dims();
    assert_eq!(dims.len(), ranks.len());
    let shape: Vec<(usize, usize)> = dims.iter().cloned().zip(ranks.iter().cloned()).collect();
    let mut best = Best::new();
    let mut trace = Vec::new();
    let trivial = shape.iter().all(|&(n, r)| r == 0 || r == n);
    let (p_top, _) = frames_to_projection(&eigen_frames(space, &shape, true));
    best.offer(&p_top, score_of(f, sense, &p_top));
    if trivial {
        return finish(best, sense, trace, p_top);
    }
    let (p_bottom, _) = frames_to_projection(&eigen_frames(space, &shape, false));
    best.offer(&p_bottom, score_of(f, sense, &p_bottom));
    trace.push(RestartTrace { round: 0, start_value: sense.sign() * best.score, best_value: sense.sign() * best.score, evaluations: 2 });
    if cfg.restarts == 0 {
        return finish(best, sense, trace, p_top);
    }
    let per_round = cfg.sample_budget.div_ceil(cfg.restarts).max(1);
    let top_is_better = best.x.as_ref() == Some(&p_top);
    let top_frames = eigen_frames(space, &shape, top_is_better);
    let rounds: Vec<Best> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(derive_seed(seed, r as u64 + 1));
            let mut b = Best::new();
            if nested {
                let start = if r == 0 { top_frames.clone() } else { random_frames(&shape, &mut rng) };
                frame_hill_climb(f, sense, &shape, start, cfg.ascent_steps, cfg.step_size, &mut rng, &mut b);
                return b;
            }
            let pool = per_round.min(8);
            let mut starts: Vec<(f64, Vec<CMatrix>)> = Vec::new();
            for _ in 0..pool {
                let fr = random_frames(&shape, &mut rng);
                let (p, _) = frames_to_projection(&fr);
                let s = score_of(f, sense, &p);
                b.offer(&p, s);
                starts.push((s, fr));
            }
            let mut start = starts
                .into_iter()
                .fold((f64::NEG_INFINITY, None), |acc, (s, fr)| if s > acc.0 { (s, Some(fr)) } else { acc })
                .1
                .unwrap_or_else(|| random_frames(&shape, &mut rng));
            if r == 0 {
                start = top_frames.clone();
            }
            let remaining = per_round.saturating_sub(pool);
            grassmann_ascent(f, sense, &shape, start, remaining.max(1), cfg.step_size, &mut b);
            b
        })
        .collect();
    merge_rounds(&mut best, &mut trace, rounds, sense);
    finish(best, sense, trace, p_top)
}

/// Local minimization of `f` over projections of the given ranks, started
/// from a Haar-random frame drawn from `seed`. Returns the value reached and
/// the projection.
pub fn local_min_over_rank(
    space: &WStarSpace,
    ranks: &[usize],
    f: &Objective<'_>,
    seed: u64,
    max_evals: usize,
) -> (f64, BlockMatrix) {
    let shape: Vec<(usize, usize)> = space.dims().into_iter().zip(ranks.iter().cloned()).collect();
    let mut rng = rng_from_seed(seed);
    let start = random_frames(&shape, &mut rng);
    let mut b = Best::new();
    grassmann_ascent(f, Sense::Inf, &shape, start, max_evals, 0.25, &mut b);
    (-b.score, b.x.expect("at least one evaluation"))
}

/// sup or inf of `f` over all projections, every rank tuple searched in turn.
pub fn search_projections(
    space: &WStarSpace,
    f: &Objective<'_>,
    cfg: &OptConfig,
    seed: u64,
    sense: Sense,
    nested: bool,
) -> SearchOutcome {
    let tuples = rank_tuples(&space.dims());
    let results: Vec<SearchOutcome> = tuples
        .par_iter()
        .enumerate()
        .map(|(i, ranks)| search_projections_of_rank(space, ranks, f, cfg, derive_seed(seed, 1000 + i as u64), sense, nested))
        .collect();
    let mut best_score = f64::NEG_INFINITY;
    let mut out: Option<SearchOutcome> = None;
    let mut evals = 0;
    let mut trace = Vec::new();
    for r in results {
        evals += r.evaluations;
        trace.extend(r.trace.iter().cloned());
        let s = sense.sign() * r.value;
        if s > best_score || out.is_none() {
            best_score = if s.is_nan() { f64::NEG_INFINITY } else { s };
            out = Some(r);
        }
    }
    let mut out = out.expect("at least one rank tuple");
    out.evaluations = evals;
    out.trace = trace;
    out
}

/// Dispatches on the binder domain.
pub fn search(
    space: &WStarSpace,
    domain: Domain,
    f: &Objective<'_>,
    cfg: &OptConfig,
    seed: u64,
    sense: Sense,
    nested: bool,
) -> SearchOutcome {
    match domain {
        Domain::S1 => search_s1(space, f, cfg, seed, sense, nested),
        Domain::Proj => search_projections(space, f, cfg, seed, sense, nested),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::in_s1;

    #[test]
    fn rank_tuples_enumerate_all() {
        assert_eq!(rank_tuples(&[2]), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(rank_tuples(&[1, 2]).len(), 6);
    }

    #[test]
    fn catalog_lies_in_s1() {
        let s = crate::algebra::random_faithful_space(&[3, 2], 4).unwrap();
        for x in s1_catalog(&s) {
            assert!(in_s1(&s, &x, 1e-12).unwrap());
        }
    }

    #[test]
    fn sup_of_sharp_norm_over_tracial_ball_is_one() {
        let s = WStarSpace::tracial(&[3]);
        let f = |x: &BlockMatrix| s.sharp_norm(x);
        let r = search_s1(&s, &f, &OptConfig::default(), 1, Sense::Sup, false);
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = search_s1(&s, &f, &OptConfig::default(), 1, Sense::Inf, false);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn projection_search_finds_rank_one_minimum() {
        // φ(p) ∈ {0, 1/2, 1} for the tracial state on M_2.
        let s = WStarSpace::tracial(&[2]);
        let f = |p: &BlockMatrix| (s.state(p).re - 0.3).abs();
        let r = search_projections(&s, &f, &OptConfig::default(), 0, Sense::Inf, false);
        assert!((r.value - 0.2).abs() < 1e-12);
        assert!(r.witness.is_projection(1e-12));
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let s = crate::algebra::random_faithful_space(&[2], 3).unwrap();
        let x = crate::algebra::sample(&s, &crate::algebra::SampleKind::Element, 1).unwrap();
        let f = |y: &BlockMatrix| s.sharp_norm(&x.commutator(y));
        let cfg = OptConfig { sample_budget: 200, ..OptConfig::default() };
        let a = search_s1(&s, &f, &cfg, 5, Sense::Sup, false);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| search_s1(&s, &f, &cfg, 5, Sense::Sup, false));
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.witness, b.witness);
    }
}
