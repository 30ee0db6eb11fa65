use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// An element of a finite direct sum of full matrix algebras, stored as one
/// square complex matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    blocks: Vec<CMatrix>,
}

impl BlockMatrix {
    pub fn new(blocks: Vec<CMatrix>) -> Result<Self> {
        for b in &blocks {
            if b.nrows() != b.ncols() || b.nrows() == 0 {
                return Err(Error::ShapeMismatch {
                    expected: vec![b.nrows()],
                    found: vec![b.ncols()],
                });
            }
        }
        if blocks.is_empty() {
            return Err(Error::BadParameter("element needs at least one block".into()));
        }
        Ok(Self { blocks })
    }

    pub fn from_block(m: CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "block must be square");
        Self { blocks: vec![m] }
    }

    pub(crate) fn from_blocks_unchecked(blocks: Vec<CMatrix>) -> Self {
        Self { blocks }
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { blocks: dims.iter().map(|&n| CMatrix::identity(n, n)).collect() }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        Self { blocks: dims.iter().map(|&n| CMatrix::zeros(n, n)).collect() }
    }

    /// Block diagonal element with the given real diagonal (concatenated over blocks).
    pub fn from_real_diagonal(dims: &[usize], diag: &[f64]) -> Self {
        assert_eq!(dims.iter().sum::<usize>(), diag.len());
        let mut offset = 0;
        let blocks = dims
            .iter()
            .map(|&n| {
                let d = DVector::from_iterator(
                    n,
                    diag[offset..offset + n].iter().map(|&v| Complex64::new(v, 0.0)),
                );
                offset += n;
                CMatrix::from_diagonal(&d)
            })
            .collect();
        Self { blocks }
    }

    /// Central element with value `values[k]` on block `k`.
    pub fn block_scalars(dims: &[usize], values: &[Complex64]) -> Self {
        assert_eq!(dims.len(), values.len());
        Self {
            blocks: dims
                .iter()
                .zip(values)
                .map(|(&n, &v)| CMatrix::identity(n, n) * v)
                .collect(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows()).sum()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [CMatrix] {
        &mut self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.nrows() == b.nrows())
    }

    pub fn check_dims(&self, dims: &[usize]) -> Result<()> {
        let mine = self.dims();
        if mine != dims {
            return Err(Error::ShapeMismatch { expected: dims.to_vec(), found: mine });
        }
        Ok(())
    }

    pub fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self { blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn zip_blocks(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        assert!(self.same_shape(other), "block shapes differ: {:?} vs {:?}", self.dims(), other.dims());
        Self { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_blocks(|b| b * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map_blocks(|b| b * Complex64::new(c, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// `xy - yx`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.zip_blocks(other, |a, b| a * b - b * a)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(block_op_norm).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other));
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self*`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `p = p* = p^2` up to `tol` entrywise.
    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.max_abs_diff(&(self * self)) <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        self.map_blocks(|b| (b + b.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Block-diagonal dense matrix of size `total_dim`.
    pub fn to_dense(&self) -> CMatrix {
        let n = self.total_dim();
        let mut out = CMatrix::zeros(n, n);
        let mut offset = 0;
        for b in &self.blocks {
            let k = b.nrows();
            out.view_mut((offset, offset), (k, k)).copy_from(b);
            offset += k;
        }
        out
    }

    /// Kronecker product; both factors must be single-block.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.blocks.len() != 1 || other.blocks.len() != 1 {
            return Err(Error::MultiBlockUnsupported {
                blocks: self.blocks.len().max(other.blocks.len()),
            });
        }
        Ok(Self::from_block(self.blocks[0].kronecker(&other.blocks[0])))
    }

    /// Flattens to real coordinates (re, im interleaved, column-major per block).
    pub fn to_real_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.blocks.iter().map(|b| b.len()).sum::<usize>());
        for b in &self.blocks {
            for z in b.iter() {
                v.push(z.re);
                v.push(z.im);
            }
        }
        v
    }

    /// Inverse of [`BlockMatrix::to_real_vec`].
    pub fn from_real_vec(dims: &[usize], v: &[f64]) -> Self {
        let mut it = v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1]));
        let blocks = dims
            .iter()
            .map(|&n| CMatrix::from_iterator(n, n, it.by_ref().take(n * n)))
            .collect();
        Self { blocks }
    }
}

/// Largest singular value, from the top eigenvalue of `b* b` (closed form for 2 x 2).
pub(crate) fn block_op_norm(b: &CMatrix) -> f64 {
    match b.nrows() {
        1 => b[(0, 0)].norm(),
        2 => {
            let h = b.adjoint() * b;
            let mean = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
            let half_diff = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
            (mean + half_diff.hypot(h[(0, 1)].norm())).max(0.0).sqrt()
        }
        _ => {
            let h = b.adjoint() * b;
            h.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max).sqrt()
        }
    }
}

impl<'a> Add<&'a BlockMatrix> for &'a BlockMatrix {
    type Output = BlockMatrix;
    fn add(self, rhs: &'a BlockMatrix) -> BlockMatrix {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a BlockMatrix> for &'a BlockMatrix {
    type Output = BlockMatrix;
    fn sub(self, rhs: &'a BlockMatrix) -> BlockMatrix {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a BlockMatrix> for &'a BlockMatrix {
    type Output = BlockMatrix;
    fn mul(self, rhs: &'a BlockMatrix) -> BlockMatrix {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}
