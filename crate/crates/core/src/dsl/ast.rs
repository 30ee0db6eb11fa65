use crate::error::{Error, Result};
use crate::logic::{Domain, Sense};

/// Formula syntax tree. Terms denote algebra elements, reals denote numbers;
/// `Add`, `Sub`, `Mul` and `Scale` work on both sorts.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Var(String),
    One,
    Num(f64),
    Add(Box<Formula>, Box<Formula>),
    Sub(Box<Formula>, Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
    /// Numeric literal times a term or real.
    Scale(f64, Box<Formula>),
    Adj(Box<Formula>),
    Comm(Box<Formula>, Box<Formula>),
    Sigma(f64, Box<Formula>),
    Sharp(Box<Formula>),
    ReState(Box<Formula>),
    ImState(Box<Formula>),
    Abs(Box<Formula>),
    Sqrt(Box<Formula>),
    Max(Vec<Formula>),
    Min(Vec<Formula>),
    Bind { quant: Sense, var: String, domain: Domain, body: Box<Formula> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Term,
    Real,
}

pub(crate) const KEYWORDS: &[&str] = &[
    "one", "adj", "comm", "sigma", "sharp", "re", "im", "state", "abs", "sqrt", "max", "min", "sup", "inf", "S1",
    "Proj",
];

impl Formula {
    /// Sort of the formula under the given bound variables (all of sort term).
    pub fn sort_in(&self, scope: &mut Vec<String>) -> Result<Sort> {
        use Formula::*;
        let expect = |f: &Formula, scope: &mut Vec<String>, want: Sort, what: &str| -> Result<()> {
            let got = f.sort_in(scope)?;
            if got != want {
                return Err(Error::SortError(format!("{what} expects a {want:?} argument, found {got:?}")));
            }
            Ok(())
        };
        match self {
            Var(v) => {
                if scope.iter().any(|s| s == v) {
                    Ok(Sort::Term)
                } else {
                    Err(Error::UnboundVariable(v.clone()))
                }
            }
            One => Ok(Sort::Term),
            Num(_) => Ok(Sort::Real),
            Add(a, b) | Sub(a, b) | Mul(a, b) => {
                let sa = a.sort_in(scope)?;
                let sb = b.sort_in(scope)?;
                if sa != sb {
                    return Err(Error::SortError(format!("binary operation mixes {sa:?} and {sb:?}")));
                }
                Ok(sa)
            }
            Scale(_, a) => a.sort_in(scope),
            Adj(a) | Sigma(_, a) => {
                expect(a, scope, Sort::Term, "adj/sigma")?;
                Ok(Sort::Term)
            }
            Comm(a, b) => {
                expect(a, scope, Sort::Term, "comm")?;
                expect(b, scope, Sort::Term, "comm")?;
                Ok(Sort::Term)
            }
            Sharp(a) | ReState(a) | ImState(a) => {
                expect(a, scope, Sort::Term, "sharp/re/im")?;
                Ok(Sort::Real)
            }
            Abs(a) | Sqrt(a) => {
                expect(a, scope, Sort::Real, "abs/sqrt")?;
                Ok(Sort::Real)
            }
            Max(args) | Min(args) => {
                if args.len() < 2 {
                    return Err(Error::SortError("max/min need at least two arguments".into()));
                }
                for a in args {
                    expect(a, scope, Sort::Real, "max/min")?;
                }
                Ok(Sort::Real)
            }
            Bind { var, body, .. } => {
                if scope.iter().any(|s| s == var) {
                    return Err(Error::SortError(format!("variable `{var}` is bound twice on one path")));
                }
                scope.push(var.clone());
                let r = expect(body, scope, Sort::Real, "a quantifier");
                scope.pop();
                r?;
                Ok(Sort::Real)
            }
        }
    }

    pub fn sort(&self) -> Result<Sort> {
        self.sort_in(&mut Vec::new())
    }

    /// Checks that the formula is a closed real formula.
    pub fn check_sentence(&self) -> Result<()> {
        match self.sort()? {
            Sort::Real => Ok(()),
            Sort::Term => Err(Error::SortError("a sentence must denote a real number".into())),
        }
    }

    pub fn contains_binder(&self) -> bool {
        use Formula::*;
        match self {
            Var(_) | One | Num(_) => false,
            Bind { .. } => true,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Comm(a, b) => a.contains_binder() || b.contains_binder(),
            Scale(_, a) | Adj(a) | Sigma(_, a) | Sharp(a) | ReState(a) | ImState(a) | Abs(a) | Sqrt(a) => {
                a.contains_binder()
            }
            Max(args) | Min(args) => args.iter().any(Formula::contains_binder),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        use Formula::*;
        1 + match self {
            Var(_) | One | Num(_) => 0,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Comm(a, b) => a.size() + b.size(),
            Scale(_, a) | Adj(a) | Sigma(_, a) | Sharp(a) | ReState(a) | ImState(a) | Abs(a) | Sqrt(a) => a.size(),
            Max(args) | Min(args) => args.iter().map(Formula::size).sum(),
            Bind { body, .. } => body.size(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(f: Formula) -> Box<Formula> {
        Box::new(f)
    }

    #[test]
    fn sorts() {
        let x = Formula::Var("x".into());
        let bound = Formula::Bind { quant: Sense::Sup, var: "x".into(), domain: Domain::S1, body: b(Formula::Sharp(b(x.clone()))) };
        assert_eq!(bound.sort().unwrap(), Sort::Real);
        assert!(matches!(Formula::Sharp(b(x.clone())).sort(), Err(Error::UnboundVariable(_))));
        let mixed = Formula::Add(b(Formula::One), b(Formula::Num(1.0)));
        assert!(matches!(mixed.sort(), Err(Error::SortError(_))));
        let shadow = Formula::Bind {
            quant: Sense::Sup,
            var: "x".into(),
            domain: Domain::S1,
            body: b(bound.clone()),
        };
        assert!(matches!(shadow.sort(), Err(Error::SortError(_))));
        assert!(Formula::One.check_sentence().is_err());
    }
}
