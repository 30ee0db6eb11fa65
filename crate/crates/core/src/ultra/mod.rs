//! Finite-stage proxies for ultraproduct membership.
//!
//! No ultrafilter is computed. A sequence is evaluated at stages `1..=N` and
//! its limit is replaced by the largest value over the final quarter of the
//! stages; `N` and the threshold are always reported with the verdict.

mod center;
mod repair;
mod stage;

pub use center::{center_limit_check, CenterReport, CenterStage, WITNESS_SLACK};
pub use repair::{perturbed_projection, repair_projection, RepairCutoff, RepairResult};
pub use stage::{FamilySpec, Stage, StageSequence, DEFAULT_STAGE_CAP, FAMILY_NAMES};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest number of stages a proxy verdict is computed from.
pub const MIN_STAGES: usize = 8;
pub const DEFAULT_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct MembershipVerdict {
    pub stages: Vec<usize>,
    /// `‖x_n‖^#` at each stage.
    pub tail_values: Vec<f64>,
    /// Maximum over the final quarter of `tail_values`.
    pub limsup_estimate: f64,
    pub in_ideal: bool,
    pub threshold: f64,
    pub proxy: &'static str,
}

const PROXY_LABEL: &str = "final-quartile limsup over computed stages; no ultrafilter";

fn verdict(values: Vec<f64>, threshold: f64) -> MembershipVerdict {
    let n = values.len();
    let start = n - n.div_ceil(4);
    let limsup_estimate = values[start..].iter().cloned().fold(0.0, f64::max);
    MembershipVerdict {
        stages: (1..=n).collect(),
        tail_values: values,
        limsup_estimate,
        in_ideal: limsup_estimate < threshold,
        threshold,
        proxy: PROXY_LABEL,
    }
}

fn check_stages(stages: usize, threshold: f64) -> Result<()> {
    if stages < MIN_STAGES {
        return Err(Error::BadParameter(format!("need at least {MIN_STAGES} stages, got {stages}")));
    }
    if !(threshold > 0.0) {
        return Err(Error::BadParameter(format!("threshold must be positive, got {threshold}")));
    }
    Ok(())
}

/// Proxy for membership in the ideal of `#`-null sequences.
pub fn i_u_check(seq: &StageSequence, stages: usize, threshold: f64) -> Result<MembershipVerdict> {
    check_stages(stages, threshold)?;
    let values = (1..=stages)
        .into_par_iter()
        .map(|n| Ok(seq.stage(n)?.sharp_norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(verdict(values, threshold))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub probe: String,
    pub probe_verdict: MembershipVerdict,
    /// `‖x_n z_n‖^#`.
    pub left_products: MembershipVerdict,
    /// `‖z_n x_n‖^#`.
    pub right_products: MembershipVerdict,
    pub normalizes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizerReport {
    pub probes: Vec<ProbeReport>,
    /// True when every probe is normalized; relative to the probes only.
    pub normalizes_all: bool,
    pub stages: usize,
    pub threshold: f64,
}

/// Checks `x z` and `z x` against each probe `z` from the ideal.
pub fn normalizer_check(
    seq: &StageSequence,
    probes: &[StageSequence],
    stages: usize,
    threshold: f64,
) -> Result<NormalizerReport> {
    check_stages(stages, threshold)?;
    let mut reports = Vec::with_capacity(probes.len());
    for probe in probes {
        let probe_verdict = i_u_check(probe, stages, threshold)?;
        if !probe_verdict.in_ideal {
            return Err(Error::ProbeNotInIdeal(format!(
                "{} has tail {} above threshold {threshold}",
                probe.family.name(),
                probe_verdict.limsup_estimate
            )));
        }
        let pairs = (1..=stages)
            .into_par_iter()
            .map(|n| {
                let (x, z) = (seq.stage(n)?, probe.stage(n)?);
                Ok((x.mul(&z, seq.dim_cap)?.sharp_norm(), z.mul(&x, seq.dim_cap)?.sharp_norm()))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let (left, right): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (left_products, right_products) = (verdict(left, threshold), verdict(right, threshold));
        let normalizes = left_products.in_ideal && right_products.in_ideal;
        reports.push(ProbeReport {
            probe: probe.family.label(),
            probe_verdict,
            left_products,
            right_products,
            normalizes,
        });
    }
    Ok(NormalizerReport {
        normalizes_all: reports.iter().all(|r| r.normalizes),
        probes: reports,
        stages,
        threshold,
    })
}
