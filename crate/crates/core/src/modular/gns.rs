use num_complex::Complex64;

use crate::algebra::{BlockMatrix, WStarSpace};
use crate::error::Result;

/// Vector of the GNS space `L^2(M, φ)`, represented by a matrix `v`
/// with inner product `Tr(v* w)`. The cyclic vector is `a^{1/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GnsVector {
    pub rep: BlockMatrix,
}

impl GnsVector {
    pub fn inner(&self, other: &Self) -> Complex64 {
        (&self.rep.adjoint() * &other.rep).trace()
    }

    pub fn norm(&self) -> f64 {
        self.rep.frobenius_norm()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.rep - &other.rep).frobenius_norm()
    }
}

/// `η_φ(x) = x a^{1/2}`.
pub fn gns_embed(space: &WStarSpace, x: &BlockMatrix) -> Result<GnsVector> {
    x.check_dims(&space.dims())?;
    Ok(GnsVector { rep: x * space.sqrt_density() })
}

/// `S(v) = a^{-1/2} v* a^{1/2}`, so `S η(x) = η(x*)`.
pub fn tomita_s(space: &WStarSpace, v: &GnsVector) -> GnsVector {
    GnsVector { rep: &(space.inv_sqrt_density() * &v.rep.adjoint()) * space.sqrt_density() }
}

/// `F(v) = a^{1/2} v* a^{-1/2}`, the adjoint of `S`.
pub fn tomita_f(space: &WStarSpace, v: &GnsVector) -> GnsVector {
    GnsVector { rep: &(space.sqrt_density() * &v.rep.adjoint()) * space.inv_sqrt_density() }
}

/// `Δ^s v = a^s v a^{-s}`.
pub fn modular_delta_action(space: &WStarSpace, v: &GnsVector, s: f64) -> GnsVector {
    let p = space.complex_power(Complex64::new(s, 0.0));
    let q = space.complex_power(Complex64::new(-s, 0.0));
    GnsVector { rep: &(&p * &v.rep) * &q }
}

/// `J v = v*`.
pub fn modular_j(v: &GnsVector) -> GnsVector {
    GnsVector { rep: v.rep.adjoint() }
}

/// `π(x) v = x v`.
pub fn left_action(x: &BlockMatrix, v: &GnsVector) -> GnsVector {
    GnsVector { rep: x * &v.rep }
}

/// `v x`; equals `J π(x*) J v`.
pub fn right_action(x: &BlockMatrix, v: &GnsVector) -> GnsVector {
    GnsVector { rep: &v.rep * x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{random_faithful_space, sample, SampleKind};

    #[test]
    fn s_maps_embedding_to_adjoint_embedding() {
        let s = random_faithful_space(&[3], 5).unwrap();
        let x = sample(&s, &SampleKind::Element, 6).unwrap();
        let lhs = tomita_s(&s, &gns_embed(&s, &x).unwrap());
        let rhs = gns_embed(&s, &x.adjoint()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn inner_product_is_state() {
        let s = random_faithful_space(&[2, 2], 1).unwrap();
        let x = sample(&s, &SampleKind::Element, 2).unwrap();
        let y = sample(&s, &SampleKind::Element, 3).unwrap();
        let ip = gns_embed(&s, &x).unwrap().inner(&gns_embed(&s, &y).unwrap());
        let phi = s.state(&(&x.adjoint() * &y));
        assert!((ip - phi).norm() < 1e-13);
    }
}
