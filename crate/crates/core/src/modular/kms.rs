use num_complex::Complex64;
use serde::Serialize;

use super::SigmaMethod;
use crate::algebra::{BlockMatrix, WStarSpace};
use crate::error::{Error, Result};

const STRIP_SLACK: f64 = 1e-12;

/// `F(z) = Tr(a^{1+iz} x a^{-iz} y)` for `0 <= Im z <= 1`.
///
/// On the real line `F(t) = φ(σ_t(x) y)`, on the upper edge `F(t + i) = φ(y σ_t(x))`.
pub fn kms_function(space: &WStarSpace, x: &BlockMatrix, y: &BlockMatrix, z: Complex64) -> Result<Complex64> {
    let dims = space.dims();
    x.check_dims(&dims)?;
    y.check_dims(&dims)?;
    if z.im < -STRIP_SLACK || z.im > 1.0 + STRIP_SLACK {
        return Err(Error::OutsideStrip { re: z.re, im: z.im });
    }
    let i = Complex64::new(0.0, 1.0);
    let left = space.complex_power(1.0 + i * z);
    let right = space.complex_power(-i * z);
    Ok((&(&(&left * x) * &right) * y).trace())
}

/// Comparison of the KMS function with both boundary expressions at one `t`.
#[derive(Clone, Debug, Serialize)]
pub struct KmsReport {
    pub t: f64,
    pub lower_error: f64,
    pub upper_error: f64,
    /// `‖x‖ ‖y‖ Σ_k λ_k^{-1}`.
    pub strip_bound: f64,
    /// Largest `|F(z)|` over the sampled strip points.
    pub strip_max: f64,
    pub strip_points: usize,
    pub tol: f64,
    pub passed: bool,
}

/// Result of evaluating `|F|` against the strip bound on a set of points.
#[derive(Clone, Debug, Serialize)]
pub struct StripReport {
    pub bound: f64,
    pub max_modulus: f64,
    pub points: usize,
    pub within_bound: bool,
}

fn strip_bound(space: &WStarSpace, x: &BlockMatrix, y: &BlockMatrix) -> f64 {
    let inv_sum: f64 = space.eigenvalues().iter().map(|l| 1.0 / l).sum();
    x.op_norm() * y.op_norm() * inv_sum
}

/// Evaluates `|F(z)|` at the given points and compares with the strip bound.
pub fn kms_strip_check(space: &WStarSpace, x: &BlockMatrix, y: &BlockMatrix, points: &[Complex64]) -> Result<StripReport> {
    let bound = strip_bound(space, x, y);
    let mut max_modulus: f64 = 0.0;
    for &z in points {
        max_modulus = max_modulus.max(kms_function(space, x, y, z)?.norm());
    }
    Ok(StripReport { bound, max_modulus, points: points.len(), within_bound: max_modulus <= bound * (1.0 + 1e-12) })
}

/// Checks `F(t) = φ(σ_t(x) y)`, `F(t+i) = φ(y σ_t(x))` and the strip bound on
/// a 9 x 9 grid with real parts in `[t - π, t + π]`.
pub fn kms_check(space: &WStarSpace, x: &BlockMatrix, y: &BlockMatrix, t: f64, tol: f64) -> Result<KmsReport> {
    let sx = super::sigma_t(space, x, t, SigmaMethod::Coefficient)?;
    let lower = kms_function(space, x, y, Complex64::new(t, 0.0))?;
    let upper = kms_function(space, x, y, Complex64::new(t, 1.0))?;
    let lower_error = (lower - space.state(&(&sx * y))).norm();
    let upper_error = (upper - space.state(&(y * &sx))).norm();
    let mut points = Vec::with_capacity(81);
    for a in 0..9 {
        for b in 0..9 {
            let re = t - std::f64::consts::PI + a as f64 * std::f64::consts::PI / 4.0;
            points.push(Complex64::new(re, b as f64 / 8.0));
        }
    }
    let strip = kms_strip_check(space, x, y, &points)?;
    Ok(KmsReport {
        t,
        lower_error,
        upper_error,
        strip_bound: strip.bound,
        strip_max: strip.max_modulus,
        strip_points: strip.points,
        tol,
        passed: lower_error <= tol && upper_error <= tol && strip.within_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_faithful_space, sample, SampleKind};

    #[test]
    fn rejects_points_off_the_strip() {
        let s = WStarSpace::tracial(&[2]);
        let x = s.identity();
        assert!(matches!(
            kms_function(&s, &x, &x, Complex64::new(0.0, 1.5)),
            Err(Error::OutsideStrip { .. })
        ));
        assert!(kms_function(&s, &x, &x, Complex64::new(0.0, 1.0)).is_ok());
    }

    #[test]
    fn boundary_values_on_random_pair() {
        let s = random_faithful_space(&[3, 1], 21).unwrap();
        let x = sample(&s, &SampleKind::Element, 1).unwrap();
        let y = sample(&s, &SampleKind::Element, 2).unwrap();
        let r = kms_check(&s, &x, &y, 0.8, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
