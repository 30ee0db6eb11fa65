use rand::Rng as _;
use serde::Serialize;

use crate::algebra::{
    hermitian_eigenvalues, random_hermitian, random_projection, spectral_projection, BlockMatrix, WStarSpace,
    HERMITIAN_TOL,
};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Which eigenvalues of `y` are kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairCutoff {
    /// `[1/2, ∞)`: every eigenvalue closer to 1 than to 0.
    #[default]
    Midpoint,
    /// `[1 - ε, 1]` with `ε = ‖y - y²‖_φ`, widened by `1e-12` at the top for rounding.
    OneMinusEpsilon,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepairResult {
    /// `‖y - y²‖_φ`.
    pub epsilon: f64,
    pub projection: BlockMatrix,
    /// `‖y - p‖^#`.
    pub residual: f64,
    pub interval: [f64; 2],
    pub cutoff: RepairCutoff,
}

/// Replaces an almost-projection `y >= 0` by a spectral projection of `y`.
pub fn repair_projection(space: &WStarSpace, y: &BlockMatrix, cutoff: RepairCutoff) -> Result<RepairResult> {
    y.check_dims(&space.dims())?;
    let dev = y.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let min_eigenvalue = hermitian_eigenvalues(y).into_iter().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -HERMITIAN_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let epsilon = space.phi_norm(&(y - &(y * y)));
    let interval = match cutoff {
        RepairCutoff::Midpoint => [0.5, f64::INFINITY],
        RepairCutoff::OneMinusEpsilon => [1.0 - epsilon, 1.0 + 1e-12],
    };
    let projection = spectral_projection(y, interval[0], interval[1])?;
    let residual = space.sharp_norm(&(y - &projection));
    Ok(RepairResult { epsilon, projection, residual, interval, cutoff })
}

/// `y = x²` with `x = q + δh`, `q` a random projection and `h` a random
/// Hermitian element of norm 1; returns `(y, q)`. `y` is positive and
/// `‖y - q‖ <= 2δ + δ²`.
pub fn perturbed_projection(dims: &[usize], delta: f64, seed: u64) -> Result<(BlockMatrix, BlockMatrix)> {
    if !(0.0..0.25).contains(&delta) {
        return Err(Error::BadParameter(format!("perturbation size must lie in [0, 1/4), got {delta}")));
    }
    let mut rng = rng_from_seed(seed);
    let ranks: Vec<usize> = dims.iter().map(|&n| rng.random_range(0..=n)).collect();
    let q = random_projection(dims, &ranks, &mut rng)?;
    let h = random_hermitian(dims, &mut rng);
    let x = (&q + &h.scale_real(delta)).hermitian_part();
    Ok(((&x * &x).hermitian_part(), q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exact_projection_is_fixed() {
        let s = WStarSpace::tracial(&[3]);
        let mut rng = rng_from_seed(3);
        let q = random_projection(&[3], &[1], &mut rng).unwrap();
        let r = repair_projection(&s, &q, RepairCutoff::Midpoint).unwrap();
        assert!(r.epsilon < 1e-12);
        assert!(r.projection.max_abs_diff(&q) < 1e-12);
        assert!(r.residual < 1e-12);
        let r = repair_projection(&s, &q, RepairCutoff::OneMinusEpsilon).unwrap();
        assert!(r.projection.max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn diagonal_example() {
        let s = WStarSpace::tracial(&[2]);
        let y = BlockMatrix::from_real_diagonal(&[2], &[0.95, 0.02]);
        let r = repair_projection(&s, &y, RepairCutoff::Midpoint).unwrap();
        assert!(r.projection.max_abs_diff(&BlockMatrix::from_real_diagonal(&[2], &[1.0, 0.0])) < 1e-15);
        let expect = s.sharp_norm(&BlockMatrix::from_real_diagonal(&[2], &[0.05, 0.02]));
        assert!((r.residual - expect).abs() < 1e-15);
        // the literal interval [1 - ε, 1] misses the eigenvalue 0.95 here
        let lit = repair_projection(&s, &y, RepairCutoff::OneMinusEpsilon).unwrap();
        assert!(lit.interval[0] > 0.95);
        assert_eq!(lit.projection.frobenius_norm(), 0.0);
    }

    #[test]
    fn rejects_non_positive() {
        let s = WStarSpace::tracial(&[2]);
        let y = BlockMatrix::from_real_diagonal(&[2], &[1.0, -0.1]);
        assert!(matches!(repair_projection(&s, &y, RepairCutoff::Midpoint), Err(Error::NotPositive { .. })));
        let mut z = BlockMatrix::zeros(&[2]);
        z.blocks_mut()[0][(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(repair_projection(&s, &z, RepairCutoff::Midpoint), Err(Error::NotHermitian { .. })));
    }
}
