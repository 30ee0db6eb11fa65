//! Tomita–Takesaki data of a finite-dimensional faithful state: the GNS
//! operators, the modular automorphism group, the KMS function and the
//! bounded constant that defines the unit ball used by the sentence searches.

mod bounded;
mod gns;
mod kms;

pub use bounded::{bounded_constant, in_s1, project_to_s1, right_action_norm, BoundednessReport};
pub use gns::{
    gns_embed, left_action, modular_delta_action, modular_j, right_action, tomita_f, tomita_s, GnsVector,
};
pub use kms::{kms_check, kms_function, kms_strip_check, KmsReport, StripReport};

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{BlockMatrix, WStarSpace};
use crate::error::{Error, Result};

/// Modular frequencies below this are treated as zero.
pub const FREQ_TOL: f64 = 1e-10;

/// Cached frequency data: for block `k`, `freq[k][(i, j)] = ln λ_i - ln λ_j`
/// in that block's eigenbasis.
#[derive(Clone, Debug)]
pub struct ModularData {
    pub freq: Vec<DMatrix<f64>>,
    pub delta_spectrum: Vec<f64>,
}

impl ModularData {
    fn compute(space: &WStarSpace) -> Self {
        let freq: Vec<DMatrix<f64>> = space
            .eigen()
            .iter()
            .map(|e| {
                let ln: Vec<f64> = e.values.iter().map(|l| l.ln()).collect();
                DMatrix::from_fn(ln.len(), ln.len(), |i, j| ln[i] - ln[j])
            })
            .collect();
        let mut ratios: Vec<f64> = space
            .eigen()
            .iter()
            .flat_map(|e| {
                let v: Vec<f64> = e.values.iter().cloned().collect();
                let w = v.clone();
                v.into_iter().flat_map(move |a| w.clone().into_iter().map(move |b| a / b))
            })
            .collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut delta_spectrum: Vec<f64> = Vec::new();
        for r in ratios {
            match delta_spectrum.last() {
                Some(&last) if (r - last).abs() <= 1e-10 * r.max(last) => {}
                _ => delta_spectrum.push(r),
            }
        }
        Self { freq, delta_spectrum }
    }

    /// Largest `|ln λ_i - ln λ_j|` over all blocks.
    pub fn max_frequency(&self) -> f64 {
        self.freq.iter().flat_map(|f| f.iter().map(|v| v.abs())).fold(0.0, f64::max)
    }
}

pub fn modular_data(space: &WStarSpace) -> &ModularData {
    space.modular_cache().get_or_init(|| ModularData::compute(space))
}

/// Sorted distinct eigenvalues of the modular operator, `{λ_i / λ_j}` per block.
pub fn delta_spectrum(space: &WStarSpace) -> Vec<f64> {
    modular_data(space).delta_spectrum.clone()
}

/// How [`sigma_t`] evaluates `a^{it} x a^{-it}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaMethod {
    /// Explicit products with `a^{±it}`.
    Conjugation,
    /// Multiplies eigenbasis coefficients by `exp(i t (ln λ_i - ln λ_j))`.
    Coefficient,
}

pub fn sigma_t(space: &WStarSpace, x: &BlockMatrix, t: f64, method: SigmaMethod) -> Result<BlockMatrix> {
    x.check_dims(&space.dims())?;
    Ok(match method {
        SigmaMethod::Conjugation => {
            let u = space.complex_power(Complex64::new(0.0, t));
            &(&u * x) * &u.adjoint()
        }
        SigmaMethod::Coefficient => sigma_coeff(space, x, t),
    })
}

/// Coefficient-method `σ_t`; `σ_0` returns `x` unchanged.
pub(crate) fn sigma_coeff(space: &WStarSpace, x: &BlockMatrix, t: f64) -> BlockMatrix {
    if t == 0.0 {
        return x.clone();
    }
    let data = modular_data(space);
    let blocks = x
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let e = &space.eigen()[k];
            let mut y = e.to_eigenbasis(b);
            let f = &data.freq[k];
            for j in 0..y.ncols() {
                for i in 0..y.nrows() {
                    if f[(i, j)] != 0.0 {
                        y[(i, j)] *= Complex64::cis((t * f[(i, j)]).rem_euclid(TAU));
                    }
                }
            }
            e.from_eigenbasis(&y)
        })
        .collect();
    BlockMatrix::new(blocks).expect("shape preserved")
}

/// True when `σ_t` is the identity to within `1e-10` on every coefficient.
pub fn sigma_is_trivial(space: &WStarSpace, t: f64) -> bool {
    modular_data(space)
        .freq
        .iter()
        .all(|f| f.iter().all(|&v| (Complex64::cis(t * v) - 1.0).norm() <= 1e-10))
}

/// Keeps the eigenbasis coefficients with `|ln λ_i - ln λ_j| <= a_bound`
/// (frequencies within [`FREQ_TOL`] of the bound count as inside).
pub fn spectral_truncate(space: &WStarSpace, x: &BlockMatrix, a_bound: f64) -> Result<BlockMatrix> {
    if !(a_bound >= 0.0) {
        return Err(Error::BadParameter(format!("truncation bound must be >= 0, got {a_bound}")));
    }
    x.check_dims(&space.dims())?;
    let data = modular_data(space);
    let blocks = x
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let e = &space.eigen()[k];
            let mut y = e.to_eigenbasis(b);
            let f = &data.freq[k];
            for j in 0..y.ncols() {
                for i in 0..y.nrows() {
                    if f[(i, j)].abs() > a_bound + FREQ_TOL {
                        y[(i, j)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
            e.from_eigenbasis(&y)
        })
        .collect();
    BlockMatrix::new(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_faithful_space, sample, SampleKind};

    #[test]
    fn delta_spectrum_contains_one_and_inverses() {
        let s = WStarSpace::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let d = delta_spectrum(&s);
        assert_eq!(d.len(), 7);
        assert!(d.iter().any(|&v| (v - 1.0).abs() < 1e-15));
        for &v in &d {
            assert!(d.iter().any(|&w| (w * v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn sigma_methods_agree() {
        let s = random_faithful_space(&[3, 2], 9).unwrap();
        let x = sample(&s, &SampleKind::Element, 2).unwrap();
        for &t in &[0.0, 0.7, -3.1, 40.0] {
            let a = sigma_t(&s, &x, t, SigmaMethod::Conjugation).unwrap();
            let b = sigma_t(&s, &x, t, SigmaMethod::Coefficient).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn truncation_at_zero_keeps_diagonal_part() {
        let s = WStarSpace::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let x = sample(&s, &SampleKind::Element, 1).unwrap();
        let d = spectral_truncate(&s, &x, 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { x.block(0)[(i, j)] } else { Complex64::new(0.0, 0.0) };
                assert_eq!(d.block(0)[(i, j)], expect);
            }
        }
        assert!(spectral_truncate(&s, &x, -1.0).is_err());
    }
}
