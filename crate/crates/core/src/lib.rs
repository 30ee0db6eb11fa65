//! Numerical laboratory for finite-dimensional W*-probability spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: direct sums of matrix algebras, faithful states, norms, sampling.
//! * [`modular`]: GNS operators, modular group, KMS function, the unit ball `S1`.
//! * [`logic`]: search-based estimates of sup/inf sentences (`χ`, `β`, `θ`, ...).
//! * [`dsl`]: a small formula language evaluated by the same search engine.
//! * [`powers`]: Powers states, the T-invariant and type classification.
//! * [`ultra`]: finite stages of ultraproduct sequences and membership checks.

pub mod algebra;
pub mod dsl;
pub mod error;
pub mod io;
pub mod logic;
pub mod modular;
pub mod powers;
pub mod rng;
pub mod ultra;

pub use algebra::{BlockMatrix, CMatrix, WStarSpace};
pub use error::{Error, ParseError, Result};
