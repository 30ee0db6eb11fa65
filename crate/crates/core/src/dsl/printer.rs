use std::fmt::{self, Display, Write};

use super::ast::Formula;
use crate::logic::{Domain, Sense};

/// Canonical text; `parse(&f.to_string()) == f` for every formula with
/// finite literals.
impl Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

fn is_sum(f: &Formula) -> bool {
    matches!(f, Formula::Add(..) | Formula::Sub(..))
}

fn is_product(f: &Formula) -> bool {
    matches!(f, Formula::Mul(..) | Formula::Scale(..))
}

fn is_bind(f: &Formula) -> bool {
    matches!(f, Formula::Bind { .. })
}

fn operand<W: Write>(f: &Formula, parens: bool, out: &mut W) -> fmt::Result {
    if parens {
        out.write_char('(')?;
        write_formula(f, out)?;
        out.write_char(')')
    } else {
        write_formula(f, out)
    }
}

fn call<W: Write>(name: &str, args: &[&Formula], out: &mut W) -> fmt::Result {
    out.write_str(name)?;
    out.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.write_str(", ")?;
        }
        write_formula(a, out)?;
    }
    out.write_char(')')
}

pub(crate) fn write_formula<W: Write>(f: &Formula, out: &mut W) -> fmt::Result {
    use Formula::*;
    match f {
        Var(v) => out.write_str(v),
        One => out.write_str("one"),
        Num(v) => write!(out, "{v}"),
        Add(a, b) | Sub(a, b) => {
            operand(a, is_bind(a), out)?;
            out.write_str(if matches!(f, Add(..)) { " + " } else { " - " })?;
            operand(b, is_sum(b) || is_bind(b), out)
        }
        Mul(a, b) => {
            operand(a, is_sum(a) || is_bind(a) || matches!(**a, Num(_)), out)?;
            out.write_str(" * ")?;
            operand(b, is_sum(b) || is_product(b) || is_bind(b), out)
        }
        Scale(c, b) => {
            write!(out, "{c} * ")?;
            operand(b, is_sum(b) || is_product(b) || is_bind(b), out)
        }
        Adj(a) => call("adj", &[a], out),
        Comm(a, b) => call("comm", &[a, b], out),
        Sigma(t, a) => call(&format!("sigma[{t}]"), &[a], out),
        Sharp(a) => call("sharp", &[a], out),
        ReState(a) => {
            out.write_str("re(")?;
            call("state", &[a], out)?;
            out.write_char(')')
        }
        ImState(a) => {
            out.write_str("im(")?;
            call("state", &[a], out)?;
            out.write_char(')')
        }
        Abs(a) => call("abs", &[a], out),
        Sqrt(a) => call("sqrt", &[a], out),
        Max(args) => call("max", &args.iter().collect::<Vec<_>>(), out),
        Min(args) => call("min", &args.iter().collect::<Vec<_>>(), out),
        Bind { quant, var, domain, body } => {
            let q = match quant {
                Sense::Sup => "sup",
                Sense::Inf => "inf",
            };
            let d = match domain {
                Domain::S1 => "S1",
                Domain::Proj => "Proj",
            };
            write!(out, "{q} {var}:{d}. ")?;
            write_formula(body, out)
        }
    }
}
