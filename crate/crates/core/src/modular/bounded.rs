use serde::Serialize;

use crate::algebra::{block_op_norm, BlockMatrix, CMatrix, WStarSpace};
use crate::error::Result;

/// The three operator norms whose maximum defines the bounded constant
/// `K(x) = max(‖x‖, ‖a^{-1/2} x a^{1/2}‖, ‖a^{-1/2} x* a^{1/2}‖)`.
///
/// The second and third entries are the norms of right multiplication by
/// `x` and `x*` on the GNS space; `x` lies in the unit ball `S1` iff `K(x) <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundednessReport {
    pub k: f64,
    pub op_norm: f64,
    pub right_norm: f64,
    pub right_norm_adjoint: f64,
}

fn conj_by_half(space: &WStarSpace, x: &BlockMatrix) -> BlockMatrix {
    &(space.inv_sqrt_density() * x) * space.sqrt_density()
}

/// Norm of `η(y) ↦ η(y x)`, i.e. `‖a^{-1/2} x a^{1/2}‖`.
pub fn right_action_norm(space: &WStarSpace, x: &BlockMatrix) -> Result<f64> {
    x.check_dims(&space.dims())?;
    Ok(conj_by_half(space, x).op_norm())
}

pub fn bounded_constant(space: &WStarSpace, x: &BlockMatrix) -> Result<BoundednessReport> {
    x.check_dims(&space.dims())?;
    Ok(bounded_unchecked(space, x))
}

pub(crate) fn bounded_unchecked(space: &WStarSpace, x: &BlockMatrix) -> BoundednessReport {
    // In the density eigenbasis conjugation by a^{±1/2} is an entrywise scaling.
    let (mut op_norm, mut right_norm, mut right_norm_adjoint) = (0f64, 0f64, 0f64);
    for (e, b) in space.eigen().iter().zip(x.blocks()) {
        let y = e.to_eigenbasis(b);
        let s: Vec<f64> = e.values.iter().map(|l| l.sqrt()).collect();
        let right = CMatrix::from_fn(y.nrows(), y.ncols(), |i, j| y[(i, j)] * (s[j] / s[i]));
        let right_adj = CMatrix::from_fn(y.nrows(), y.ncols(), |i, j| y[(i, j)] * (s[i] / s[j]));
        op_norm = op_norm.max(block_op_norm(&y));
        right_norm = right_norm.max(block_op_norm(&right));
        right_norm_adjoint = right_norm_adjoint.max(block_op_norm(&right_adj));
    }
    BoundednessReport { k: op_norm.max(right_norm).max(right_norm_adjoint), op_norm, right_norm, right_norm_adjoint }
}

pub fn in_s1(space: &WStarSpace, x: &BlockMatrix, tol: f64) -> Result<bool> {
    Ok(bounded_constant(space, x)?.k <= 1.0 + tol)
}

/// `x / max(1, K(x))`.
pub fn project_to_s1(space: &WStarSpace, x: &BlockMatrix) -> Result<BlockMatrix> {
    x.check_dims(&space.dims())?;
    Ok(project_unchecked(space, x))
}

pub(crate) fn project_unchecked(space: &WStarSpace, x: &BlockMatrix) -> BlockMatrix {
    let k = bounded_unchecked(space, x).k;
    if k > 1.0 {
        x.scale_real(1.0 / k)
    } else {
        x.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_faithful_space, sample, SampleKind, ONE};
    use num_complex::Complex64;

    #[test]
    fn rank_one_projection_off_the_eigenbasis() {
        let s = WStarSpace::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let h = Complex64::new(0.5, 0.0);
        let p = BlockMatrix::from_block(CMatrix::from_row_slice(2, 2, &[h, h, h, h]));
        let r = bounded_constant(&s, &p).unwrap();
        // a^{-1/2} p a^{1/2} has entries 1/2 * sqrt(λ_j / λ_i); its norm is 3/(2 sqrt 2).
        assert!((r.k - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
        let q = project_to_s1(&s, &p).unwrap();
        assert!((bounded_constant(&s, &q).unwrap().k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenbasis_formula_matches_direct_conjugation() {
        let s = random_faithful_space(&[3, 2], 7).unwrap();
        for seed in 0..10 {
            let x = sample(&s, &SampleKind::Element, seed).unwrap();
            let r = bounded_constant(&s, &x).unwrap();
            let direct = conj_by_half(&s, &x).op_norm();
            let direct_adj = conj_by_half(&s, &x.adjoint()).op_norm();
            assert!((r.right_norm - direct).abs() < 1e-12);
            assert!((r.right_norm_adjoint - direct_adj).abs() < 1e-12);
            assert!((r.op_norm - x.op_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_has_constant_one() {
        let s = WStarSpace::diagonal(&[0.1, 0.9]).unwrap();
        let one = BlockMatrix::identity(&[2]);
        assert!((bounded_constant(&s, &one).unwrap().k - 1.0).abs() < 1e-14);
        assert_eq!(one.block(0)[(0, 0)], ONE);
    }
}
