use std::sync::OnceLock;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::block::{BlockMatrix, CMatrix, ONE, ZERO};
use crate::error::{Error, Result};
use crate::modular::ModularData;

/// Hermiticity tolerance applied to user-supplied densities and observables.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Densities with an eigenvalue at or below this are rejected as not faithful.
pub const FAITHFUL_TOL: f64 = 1e-12;
/// Allowed deviation of the density trace from 1.
pub const TRACE_TOL: f64 = 1e-10;

/// Eigen-decomposition of one density block: `a = V diag(values) V*`.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
    /// True when `vectors` is the identity, i.e. the block is diagonal.
    pub diagonal: bool,
}

impl BlockEigen {
    fn of(block: &CMatrix) -> Self {
        let n = block.nrows();
        let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || block[(i, j)] == ZERO));
        if is_diag {
            return Self {
                values: DVector::from_iterator(n, (0..n).map(|i| block[(i, i)].re)),
                vectors: CMatrix::identity(n, n),
                diagonal: true,
            };
        }
        let herm = (block + block.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        Self { values: eig.eigenvalues, vectors: eig.eigenvectors, diagonal: false }
    }

    /// `V diag(f(lambda_i)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let d: Vec<Complex64> = self.values.iter().map(|&l| f(l)).collect();
        if self.diagonal {
            return CMatrix::from_diagonal(&DVector::from_vec(d));
        }
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= d[j];
        }
        scaled * self.vectors.adjoint()
    }

    /// Moves `x` into the eigenbasis: `V* x V`.
    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        if self.diagonal {
            return x.clone();
        }
        self.vectors.adjoint() * x * &self.vectors
    }

    /// Inverse of [`BlockEigen::to_eigenbasis`].
    pub fn from_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        if self.diagonal {
            return x.clone();
        }
        &self.vectors * x * self.vectors.adjoint()
    }
}

#[derive(Clone, Debug)]
struct HalfPowers {
    half: BlockMatrix,
    half_inv: BlockMatrix,
}

/// A finite-dimensional W*-probability space `(⊕ M_{n_k}, φ)` with
/// `φ(x) = Tr(a x)` for a faithful density `a`.
#[derive(Clone, Debug)]
pub struct WStarSpace {
    density: BlockMatrix,
    eigen: Vec<BlockEigen>,
    half_powers: OnceLock<HalfPowers>,
    modular: OnceLock<ModularData>,
}

/// The three norms the laboratory uses side by side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub op_norm: f64,
    pub phi_norm: f64,
    pub sharp_norm: f64,
}

impl WStarSpace {
    /// Validates `density` against `dims` and caches its eigen-decomposition.
    pub fn new(dims: &[usize], density: BlockMatrix) -> Result<Self> {
        density.check_dims(dims)?;
        let scale = density.op_norm().max(1.0);
        let dev = density.hermitian_deviation();
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let trace = density.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let eigen: Vec<BlockEigen> = density.blocks().iter().map(BlockEigen::of).collect();
        let min = eigen.iter().flat_map(|e| e.values.iter().cloned()).fold(f64::INFINITY, f64::min);
        if min <= FAITHFUL_TOL {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        Ok(Self::from_parts(density, eigen))
    }

    pub(crate) fn from_parts(density: BlockMatrix, eigen: Vec<BlockEigen>) -> Self {
        Self { density, eigen, half_powers: OnceLock::new(), modular: OnceLock::new() }
    }

    /// Tracial state `1/N Tr` on `⊕ M_{n_k}`.
    pub fn tracial(dims: &[usize]) -> Self {
        let n: usize = dims.iter().sum();
        let diag = vec![1.0 / n as f64; n];
        Self::new(dims, BlockMatrix::from_real_diagonal(dims, &diag)).expect("tracial density is valid")
    }

    /// Diagonal density on a single block.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(&[values.len()], BlockMatrix::from_real_diagonal(&[values.len()], values))
    }

    pub fn density(&self) -> &BlockMatrix {
        &self.density
    }

    pub fn dims(&self) -> Vec<usize> {
        self.density.dims()
    }

    pub fn total_dim(&self) -> usize {
        self.density.total_dim()
    }

    pub fn num_blocks(&self) -> usize {
        self.density.num_blocks()
    }

    pub fn eigen(&self) -> &[BlockEigen] {
        &self.eigen
    }

    /// All density eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eigen.iter().flat_map(|e| e.values.iter().cloned()).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    pub fn is_single_block(&self) -> bool {
        self.num_blocks() == 1
    }

    pub(crate) fn require_single_block(&self) -> Result<()> {
        if self.num_blocks() != 1 {
            return Err(Error::MultiBlockUnsupported { blocks: self.num_blocks() });
        }
        Ok(())
    }

    pub(crate) fn modular_cache(&self) -> &OnceLock<ModularData> {
        &self.modular
    }

    fn half_powers(&self) -> &HalfPowers {
        self.half_powers.get_or_init(|| HalfPowers {
            half: self.map_eigen(|l| Complex64::new(l.sqrt(), 0.0)),
            half_inv: self.map_eigen(|l| Complex64::new(1.0 / l.sqrt(), 0.0)),
        })
    }

    /// `a^{1/2}`.
    pub fn sqrt_density(&self) -> &BlockMatrix {
        &self.half_powers().half
    }

    /// `a^{-1/2}`.
    pub fn inv_sqrt_density(&self) -> &BlockMatrix {
        &self.half_powers().half_inv
    }

    fn map_eigen(&self, f: impl Fn(f64) -> Complex64) -> BlockMatrix {
        BlockMatrix::from_blocks_unchecked(self.eigen.iter().map(|e| e.apply(&f)).collect())
    }

    /// `a^z = exp(z log a)` through the cached eigenbasis.
    pub fn complex_power(&self, z: Complex64) -> BlockMatrix {
        self.map_eigen(|l| (z * l.ln()).exp())
    }

    /// `φ(x) = Tr(a x)`.
    pub fn state_eval(&self, x: &BlockMatrix) -> Result<Complex64> {
        x.check_dims(&self.dims())?;
        Ok(self.state(x))
    }

    /// Unchecked `φ(x)`; panics on a shape mismatch.
    pub fn state(&self, x: &BlockMatrix) -> Complex64 {
        assert!(self.density.same_shape(x), "shape mismatch in state evaluation");
        let mut acc = ZERO;
        for (k, (a, xb)) in self.density.blocks().iter().zip(x.blocks()).enumerate() {
            let n = a.nrows();
            if self.eigen[k].diagonal {
                for i in 0..n {
                    acc += a[(i, i)] * xb[(i, i)];
                }
            } else {
                for i in 0..n {
                    for j in 0..n {
                        acc += a[(i, j)] * xb[(j, i)];
                    }
                }
            }
        }
        acc
    }

    /// `‖x‖_φ = φ(x* x)^{1/2}`.
    pub fn phi_norm(&self, x: &BlockMatrix) -> f64 {
        self.gram_terms(x).0.sqrt()
    }

    /// `‖x‖^#_φ = ((φ(x* x) + φ(x x*)) / 2)^{1/2}`.
    pub fn sharp_norm(&self, x: &BlockMatrix) -> f64 {
        let (right, left) = self.gram_terms(x);
        (0.5 * (right + left)).sqrt()
    }

    /// `(φ(x* x), φ(x x*))`, computed as squared Frobenius norms so both are
    /// nonnegative by construction.
    fn gram_terms(&self, x: &BlockMatrix) -> (f64, f64) {
        assert!(self.density.same_shape(x), "shape mismatch in norm evaluation");
        let mut right = 0.0;
        let mut left = 0.0;
        let h = self.sqrt_density();
        for (k, xb) in x.blocks().iter().enumerate() {
            let e = &self.eigen[k];
            if e.diagonal {
                let n = xb.nrows();
                for j in 0..n {
                    for i in 0..n {
                        let m = xb[(i, j)].norm_sqr();
                        right += m * e.values[j];
                        left += m * e.values[i];
                    }
                }
            } else {
                let hb = h.block(k);
                right += (xb * hb).norm_squared();
                left += (hb * xb).norm_squared();
            }
        }
        (right, left)
    }

    pub fn norms(&self, x: &BlockMatrix) -> Result<NormReport> {
        x.check_dims(&self.dims())?;
        Ok(NormReport { op_norm: x.op_norm(), phi_norm: self.phi_norm(x), sharp_norm: self.sharp_norm(x) })
    }

    pub fn identity(&self) -> BlockMatrix {
        BlockMatrix::identity(&self.dims())
    }

    pub fn zeros(&self) -> BlockMatrix {
        BlockMatrix::zeros(&self.dims())
    }

    /// Central projection onto block `k`.
    pub fn block_projection(&self, k: usize) -> BlockMatrix {
        let dims = self.dims();
        let values: Vec<Complex64> = (0..dims.len()).map(|i| if i == k { ONE } else { ZERO }).collect();
        BlockMatrix::block_scalars(&dims, &values)
    }

    /// `φ(1_k)` for each block.
    pub fn block_weights(&self) -> Vec<f64> {
        self.density.blocks().iter().map(|b| b.trace().re).collect()
    }

    /// Tensor product state `φ_A ⊗ φ_B` on single-block spaces.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.require_single_block()?;
        other.require_single_block()?;
        let (ea, eb) = (&self.eigen[0], &other.eigen[0]);
        let density = BlockMatrix::from_block(self.density.block(0).kronecker(other.density.block(0)));
        let eigen = BlockEigen {
            values: ea.values.kronecker(&eb.values),
            vectors: if ea.diagonal && eb.diagonal {
                let n = density.total_dim();
                CMatrix::identity(n, n)
            } else {
                ea.vectors.kronecker(&eb.vectors)
            },
            diagonal: ea.diagonal && eb.diagonal,
        };
        Ok(Self::from_parts(density, vec![eigen]))
    }

    /// `n`-fold tensor power.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParameter("tensor power needs n >= 1".into()));
        }
        self.require_single_block()?;
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// `w_A φ_A ⊕ w_B φ_B` on `A ⊕ B`.
    pub fn direct_sum(&self, other: &Self, weights: (f64, f64)) -> Result<Self> {
        let (wa, wb) = weights;
        if !(wa > 0.0 && wb > 0.0) || (wa + wb - 1.0).abs() > 1e-12 {
            return Err(Error::BadWeights(wa, wb));
        }
        let mut blocks = Vec::new();
        let mut eigen = Vec::new();
        for (space, w) in [(self, wa), (other, wb)] {
            let wc = Complex64::new(w, 0.0);
            blocks.extend(space.density.blocks().iter().map(|b| b * wc));
            eigen.extend(space.eigen.iter().map(|e| BlockEigen {
                values: &e.values * w,
                vectors: e.vectors.clone(),
                diagonal: e.diagonal,
            }));
        }
        Ok(Self::from_parts(BlockMatrix::from_blocks_unchecked(blocks), eigen))
    }
}

/// Spectral projection `χ_{[lo, hi]}(y)` of a Hermitian element.
pub fn spectral_projection(y: &BlockMatrix, lo: f64, hi: f64) -> Result<BlockMatrix> {
    let dev = y.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let blocks = y
        .hermitian_part()
        .blocks()
        .iter()
        .map(|b| {
            let eig = SymmetricEigen::new(b.clone());
            let n = b.nrows();
            let mut p = CMatrix::zeros(n, n);
            for (j, &l) in eig.eigenvalues.iter().enumerate() {
                if l >= lo && l <= hi {
                    let v = eig.eigenvectors.column(j);
                    p += &v * v.adjoint();
                }
            }
            (&p + p.adjoint()) * Complex64::new(0.5, 0.0)
        })
        .collect();
    Ok(BlockMatrix::from_blocks_unchecked(blocks))
}

/// Eigenvalues of a Hermitian element, ascending within each block, blocks concatenated.
pub fn hermitian_eigenvalues(y: &BlockMatrix) -> Vec<f64> {
    y.hermitian_part()
        .blocks()
        .iter()
        .flat_map(|b| {
            let mut v: Vec<f64> = SymmetricEigen::new(b.clone()).eigenvalues.iter().cloned().collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_densities() {
        assert!(matches!(WStarSpace::diagonal(&[1.0, 0.0]), Err(Error::NotPositiveDefinite { .. })));
        assert!(matches!(WStarSpace::diagonal(&[1.0, 0.5]), Err(Error::TraceNotOne { .. })));
        let skew = BlockMatrix::from_block(CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]));
        assert!(matches!(WStarSpace::new(&[2], skew), Err(Error::NotHermitian { .. })));
        let d = BlockMatrix::from_real_diagonal(&[2], &[0.5, 0.5]);
        assert!(matches!(WStarSpace::new(&[3], d), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn norms_of_matrix_unit() {
        let s = WStarSpace::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let e12 = BlockMatrix::from_block(CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        let r = s.norms(&e12).unwrap();
        assert!((r.op_norm - 1.0).abs() < 1e-14);
        assert!((r.phi_norm - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((r.sharp_norm - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eigen_cache_reproduces_non_diagonal_density() {
        let a = BlockMatrix::from_block(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), c(0.4)],
        ));
        let s = WStarSpace::new(&[2], a.clone()).unwrap();
        let back = s.complex_power(c(1.0));
        assert!(back.max_abs_diff(&a) < 1e-12);
        let h = s.sqrt_density();
        assert!((h * h).max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn tensor_power_of_diagonal_state() {
        let s = WStarSpace::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let t = s.tensor_power(2).unwrap();
        let expect = [1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 4.0 / 9.0];
        for (i, e) in expect.iter().enumerate() {
            assert!((t.density().block(0)[(i, i)].re - e).abs() < 1e-15);
        }
        assert!(t.eigen()[0].diagonal);
    }

    #[test]
    fn direct_sum_weights_and_blocks() {
        let a = WStarSpace::tracial(&[2]);
        let b = WStarSpace::tracial(&[1]);
        assert!(matches!(a.direct_sum(&b, (0.5, 0.6)), Err(Error::BadWeights(..))));
        let s = a.direct_sum(&b, (0.25, 0.75)).unwrap();
        assert_eq!(s.dims(), vec![2, 1]);
        let p1 = s.block_projection(1);
        assert!((s.state(&p1).re - 0.75).abs() < 1e-15);
        assert!(p1.is_projection(0.0));
    }

    #[test]
    fn spectral_projection_of_near_projection() {
        let y = BlockMatrix::from_real_diagonal(&[2], &[0.95, 0.02]);
        let p = spectral_projection(&y, 0.5, f64::INFINITY).unwrap();
        assert_eq!(p, BlockMatrix::from_real_diagonal(&[2], &[1.0, 0.0]));
    }
}
