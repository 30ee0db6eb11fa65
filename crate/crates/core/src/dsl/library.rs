//! Built-in sentences.

use super::ast::Formula;
use super::parser::parse;

pub const CHI_FACTOR_TEXT: &str = "sup x:S1. max(0, sqrt(max(0, sharp(x) * sharp(x) - re(state(x)) * re(state(x)) - im(state(x)) * im(state(x)))) - (sup y:S1. sharp(comm(x, y))))";

pub const THETA_TEXT: &str =
    "inf x:S1. sup p:Proj. max(0, min(sharp(p), sharp(one - p)) - sharp(x * p - p * x))";

/// `sup_{x ∈ S1} max(0, ‖x - φ(x)1‖^# - sup_{y ∈ S1} ‖[x, y]‖^#)`.
pub fn chi_factor() -> Formula {
    parse(CHI_FACTOR_TEXT).expect("library text parses")
}

/// `sup_{x ∈ S1} ‖σ_t(x) - x‖^#`.
pub fn phi_t(t: f64) -> Formula {
    parse(&format!("sup x:S1. sharp(sigma[{t}](x) - x)")).expect("library text parses")
}

pub fn theta() -> Formula {
    parse(THETA_TEXT).expect("library text parses")
}

/// Library entry by name; `t` is required for `phi_t`.
pub fn builtin(name: &str, t: Option<f64>) -> Option<Formula> {
    match (name, t) {
        ("chi_factor", _) => Some(chi_factor()),
        ("theta", _) => Some(theta()),
        ("phi_t", Some(t)) => Some(phi_t(t)),
        _ => None,
    }
}
