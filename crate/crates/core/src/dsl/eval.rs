use num_complex::Complex64;

use super::ast::Formula;
use crate::algebra::{BlockMatrix, WStarSpace};
use crate::error::Result;
use crate::logic::{binder_seed, search, EstimateKind, OptConfig, SentenceEstimate, Sense};
use crate::modular::sigma_coeff;

enum Value {
    Real(f64),
    Term(BlockMatrix),
}

impl Value {
    fn real(self) -> f64 {
        match self {
            Value::Real(v) => v,
            Value::Term(_) => unreachable!("sort-checked formula produced a term where a real was expected"),
        }
    }

    fn term(self) -> BlockMatrix {
        match self {
            Value::Term(t) => t,
            Value::Real(_) => unreachable!("sort-checked formula produced a real where a term was expected"),
        }
    }
}

struct Ctx<'a> {
    space: &'a WStarSpace,
    cfg: &'a OptConfig,
}

fn eval(f: &Formula, ctx: &Ctx<'_>, env: &[(String, BlockMatrix)]) -> Value {
    use Formula::*;
    let space = ctx.space;
    let real = |g: &Formula| eval(g, ctx, env).real();
    let term = |g: &Formula| eval(g, ctx, env).term();
    match f {
        Var(v) => Value::Term(
            env.iter().rev().find(|(n, _)| n == v).map(|(_, x)| x.clone()).expect("bound variable"),
        ),
        One => Value::Term(space.identity()),
        Num(v) => Value::Real(*v),
        Add(a, b) | Sub(a, b) | Mul(a, b) => {
            let (va, vb) = (eval(a, ctx, env), eval(b, ctx, env));
            match (va, vb) {
                (Value::Real(x), Value::Real(y)) => Value::Real(match f {
                    Add(..) => x + y,
                    Sub(..) => x - y,
                    _ => x * y,
                }),
                (Value::Term(x), Value::Term(y)) => Value::Term(match f {
                    Add(..) => &x + &y,
                    Sub(..) => &x - &y,
                    _ => &x * &y,
                }),
                _ => unreachable!("sort-checked binary operation"),
            }
        }
        Scale(c, a) => match eval(a, ctx, env) {
            Value::Real(x) => Value::Real(c * x),
            Value::Term(x) => Value::Term(x.scale(Complex64::new(*c, 0.0))),
        },
        Adj(a) => Value::Term(term(a).adjoint()),
        Comm(a, b) => Value::Term(term(a).commutator(&term(b))),
        Sigma(t, a) => Value::Term(sigma_coeff(space, &term(a), *t)),
        Sharp(a) => Value::Real(space.sharp_norm(&term(a))),
        ReState(a) => Value::Real(space.state(&term(a)).re),
        ImState(a) => Value::Real(space.state(&term(a)).im),
        Abs(a) => Value::Real(real(a).abs()),
        Sqrt(a) => Value::Real(real(a).sqrt()),
        Max(args) => Value::Real(args.iter().map(real).reduce(f64::max).expect("two or more arguments")),
        Min(args) => Value::Real(args.iter().map(real).reduce(f64::min).expect("two or more arguments")),
        Bind { quant, var, domain, body } => Value::Real(bind(ctx, env, *quant, var, *domain, body).value),
    }
}

fn bind(
    ctx: &Ctx<'_>,
    env: &[(String, BlockMatrix)],
    quant: Sense,
    var: &str,
    domain: crate::logic::Domain,
    body: &Formula,
) -> crate::logic::SearchOutcome {
    let objective = |x: &BlockMatrix| {
        let mut inner = env.to_vec();
        inner.push((var.to_string(), x.clone()));
        eval(body, ctx, &inner).real()
    };
    let seed = binder_seed(ctx.cfg.seed, env.len());
    search(ctx.space, domain, &objective, ctx.cfg, seed, quant, body.contains_binder())
}

/// Evaluates a closed real formula. Quantifiers are estimated with the
/// shared search engine; the binder at nesting depth `d` uses the seed
/// stream `d`, which is what makes library formulas reproduce the dedicated
/// estimators exactly.
pub fn eval_ast(ast: &Formula, space: &WStarSpace, cfg: &OptConfig) -> Result<SentenceEstimate> {
    ast.check_sentence()?;
    let ctx = Ctx { space, cfg };
    if let Formula::Bind { quant, var, domain, body } = ast {
        let r = bind(&ctx, &[], *quant, var, *domain, body);
        let kind = if *quant == Sense::Sup && !body.contains_binder() {
            EstimateKind::CertifiedLower
        } else {
            EstimateKind::HeuristicResidual
        };
        return Ok(SentenceEstimate {
            value: r.value,
            kind,
            witnesses: vec![(var.clone(), r.witness)],
            diagnostics: r.trace,
            evaluations: r.evaluations,
        });
    }
    let kind = if ast.contains_binder() { EstimateKind::HeuristicResidual } else { EstimateKind::Exact };
    Ok(SentenceEstimate {
        value: eval(ast, &ctx, &[]).real(),
        kind,
        witnesses: Vec::new(),
        diagnostics: Vec::new(),
        evaluations: 0,
    })
}
