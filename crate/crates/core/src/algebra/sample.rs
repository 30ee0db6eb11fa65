use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::block::{BlockMatrix, CMatrix};
use super::space::{BlockEigen, WStarSpace};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// What [`sample`] draws.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleKind {
    /// Ginibre element scaled to operator norm 1.
    Element,
    /// GUE element scaled to operator norm 1.
    Hermitian,
    /// Haar unitary in every block.
    Unitary,
    /// Haar-random projection of the given rank in every block.
    Projection(Vec<usize>),
}

pub fn complex_gaussian(rng: &mut Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre(n: usize, m: usize, rng: &mut Rng) -> CMatrix {
    CMatrix::from_fn(n, m, |_, _| complex_gaussian(rng))
}

/// Haar unitary via QR of a Ginibre matrix with the phase correction on `R`'s diagonal.
pub fn haar_unitary(n: usize, rng: &mut Rng) -> CMatrix {
    let (q, _) = orthonormal_frame(&ginibre(n, n, rng));
    q
}

/// Orthonormalizes the columns of `g` (QR with `diag(R) > 0`). The second
/// value is the smallest `|R_jj|`, which detects rank deficiency.
pub fn orthonormal_frame(g: &CMatrix) -> (CMatrix, f64) {
    let qr = g.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    let mut min_diag = f64::INFINITY;
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let m = d.norm();
        min_diag = min_diag.min(m);
        if m > 0.0 {
            let phase = d / m;
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    (q, min_diag)
}

pub fn random_element(dims: &[usize], rng: &mut Rng) -> BlockMatrix {
    let x = BlockMatrix::from_blocks_unchecked(dims.iter().map(|&n| ginibre(n, n, rng)).collect());
    normalize(x)
}

pub fn random_hermitian(dims: &[usize], rng: &mut Rng) -> BlockMatrix {
    let x = BlockMatrix::from_blocks_unchecked(
        dims.iter()
            .map(|&n| {
                let g = ginibre(n, n, rng);
                (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
            })
            .collect(),
    );
    normalize(x)
}

pub fn random_unitary(dims: &[usize], rng: &mut Rng) -> BlockMatrix {
    BlockMatrix::from_blocks_unchecked(dims.iter().map(|&n| haar_unitary(n, rng)).collect())
}

pub fn random_projection(dims: &[usize], ranks: &[usize], rng: &mut Rng) -> Result<BlockMatrix> {
    if ranks.len() != dims.len() {
        return Err(Error::ShapeMismatch { expected: dims.to_vec(), found: ranks.to_vec() });
    }
    let mut blocks = Vec::with_capacity(dims.len());
    for (&n, &r) in dims.iter().zip(ranks) {
        if r > n {
            return Err(Error::BadRank { rank: r, dim: n });
        }
        let u = haar_unitary(n, rng);
        let q = u.columns(0, r);
        let p = &q * q.adjoint();
        blocks.push((&p + p.adjoint()) * Complex64::new(0.5, 0.0));
    }
    Ok(BlockMatrix::from_blocks_unchecked(blocks))
}

fn normalize(x: BlockMatrix) -> BlockMatrix {
    let n = x.op_norm();
    if n > 0.0 {
        x.scale_real(1.0 / n)
    } else {
        x
    }
}

/// Seeded draw of an element of the given kind.
pub fn sample(space: &WStarSpace, kind: &SampleKind, seed: u64) -> Result<BlockMatrix> {
    let mut rng = rng_from_seed(seed);
    let dims = space.dims();
    Ok(match kind {
        SampleKind::Element => random_element(&dims, &mut rng),
        SampleKind::Hermitian => random_hermitian(&dims, &mut rng),
        SampleKind::Unitary => random_unitary(&dims, &mut rng),
        SampleKind::Projection(ranks) => random_projection(&dims, ranks, &mut rng)?,
    })
}

/// Random faithful state: each block density is `G G*` for a square Ginibre
/// `G`, block weights follow from the traces, and the whole density is
/// normalized to trace one.
pub fn random_faithful_space(dims: &[usize], seed: u64) -> Result<WStarSpace> {
    let mut rng = rng_from_seed(seed);
    let mut blocks = Vec::with_capacity(dims.len());
    let mut total = 0.0;
    for &n in dims {
        let g = ginibre(n, n, &mut rng);
        let w = &g * g.adjoint();
        total += w.trace().re;
        blocks.push(w);
    }
    let blocks: Vec<CMatrix> = blocks
        .into_iter()
        .map(|b| {
            let b = b * Complex64::new(1.0 / total, 0.0);
            (&b + b.adjoint()) * Complex64::new(0.5, 0.0)
        })
        .collect();
    WStarSpace::new(dims, BlockMatrix::from_blocks_unchecked(blocks))
}

/// Random faithful state with prescribed eigenvalues in a Haar-random basis.
pub fn rotated_space(eigenvalues: &[f64], seed: u64) -> Result<WStarSpace> {
    let n = eigenvalues.len();
    let mut rng = rng_from_seed(seed);
    let u = haar_unitary(n, &mut rng);
    let e = BlockEigen {
        values: DVector::from_column_slice(eigenvalues),
        vectors: u,
        diagonal: false,
    };
    let a = e.apply(|l| Complex64::new(l, 0.0));
    WStarSpace::new(&[n], BlockMatrix::from_block((&a + a.adjoint()) * Complex64::new(0.5, 0.0)))
}
