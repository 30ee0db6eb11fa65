use rayon::prelude::*;
use serde::Serialize;

use super::stage::StageSequence;
use crate::error::{Error, Result};
use crate::logic::{beta_lower, center_dimension, center_expectation, OptConfig};
use crate::rng::derive_seed;

/// A stage counts as witnessed when the commutator bound found is within
/// this much of the distance to the center.
pub const WITNESS_SLACK: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
pub struct CenterStage {
    pub n: usize,
    pub dims: Vec<usize>,
    /// `‖x_n - E_n(x_n)‖^#`.
    pub distance: f64,
    /// Largest `‖[x_n, y]‖^#` found over `S1`.
    pub beta: f64,
    pub witnessed: bool,
    pub center_dim: usize,
    pub center_matches_blocks: bool,
    /// `|φ(E(x)) - φ(x)|`.
    pub state_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterReport {
    pub stages: Vec<CenterStage>,
    pub witnessed_fraction: f64,
    pub slack: f64,
    pub budget: usize,
}

/// Per stage, compares the distance of `x_n` to the center with a searched
/// lower bound on `sup_{y ∈ S1} ‖[x_n, y]‖^#`.
pub fn center_limit_check(seq: &StageSequence, stages: usize, cfg: &OptConfig) -> Result<CenterReport> {
    if stages == 0 {
        return Err(Error::BadParameter("need at least one stage".into()));
    }
    let rows = (1..=stages)
        .into_par_iter()
        .map(|n| {
            let (space, x) = seq.stage(n)?.materialize(seq.dim_cap)?;
            let e = center_expectation(&space, &x)?;
            let distance = space.sharp_norm(&(&x - &e));
            let beta = if distance <= 1e-12 {
                0.0
            } else {
                let stage_cfg = OptConfig { seed: derive_seed(cfg.seed, n as u64), ..cfg.clone() };
                beta_lower(&space, &x, &stage_cfg).value
            };
            let dims = space.dims();
            let center_dim = center_dimension(&dims);
            Ok(CenterStage {
                n,
                center_matches_blocks: center_dim == dims.len(),
                dims,
                distance,
                beta,
                witnessed: beta >= distance - WITNESS_SLACK,
                center_dim,
                state_error: (space.state(&e) - space.state(&x)).norm(),
            })
        })
        .collect::<Result<Vec<CenterStage>>>()?;
    let witnessed_fraction = rows.iter().filter(|r| r.witnessed).count() as f64 / rows.len() as f64;
    Ok(CenterReport { stages: rows, witnessed_fraction, slack: WITNESS_SLACK, budget: cfg.sample_budget })
}
