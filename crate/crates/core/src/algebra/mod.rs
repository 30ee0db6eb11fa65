//! Finite direct sums of matrix algebras with a faithful state.

mod block;
mod sample;
mod space;

pub use block::{BlockMatrix, CMatrix, ONE, ZERO};
pub(crate) use block::block_op_norm;
pub use sample::{
    complex_gaussian, ginibre, haar_unitary, orthonormal_frame, random_element, random_faithful_space,
    random_hermitian, random_projection, random_unitary, rotated_space, sample, SampleKind,
};
pub use space::{
    hermitian_eigenvalues, spectral_projection, BlockEigen, NormReport, WStarSpace, FAITHFUL_TOL, HERMITIAN_TOL,
    TRACE_TOL,
};
