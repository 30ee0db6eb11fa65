//! A small typed formula language over one W*-probability space.
//!
//! Terms denote elements (`one`, variables, `+ - *`, `adj`, `comm`,
//! `sigma[t]`), reals denote numbers (`sharp`, `re(state(..))`,
//! `im(state(..))`, `abs`, `sqrt`, `max`, `min`, arithmetic) and
//! quantifiers `sup x:S1.` / `inf p:Proj.` bind term variables.

mod ast;
mod eval;
pub mod library;
mod parser;
mod printer;

pub use ast::{Formula, Sort};
pub use eval::eval_ast;
pub use parser::parse;
