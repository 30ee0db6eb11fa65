//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own norm or power routines.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng as _;
use wstar::dsl::Formula;
use wstar::logic::{Domain, Sense};
use wstar::rng::Rng;
use wstar::{BlockMatrix, CMatrix, WStarSpace};

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `a^p` of a positive definite matrix via a fresh eigen-decomposition.
pub fn pos_power(a: &CMatrix, p: f64) -> CMatrix {
    let e = a.clone().symmetric_eigen();
    let d = CMatrix::from_diagonal(&e.eigenvalues.map(|l| c(l.powf(p))));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// Dense density of a space.
pub fn density(space: &WStarSpace) -> CMatrix {
    space.density().to_dense()
}

/// Matrix of a linear map on `M_n` in the basis of matrix units, column-major.
pub fn superop(n: usize, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for i in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(i, j)] = c(1.0);
            let img = f(&e);
            let col = j * n + i;
            for q in 0..n {
                for p in 0..n {
                    m[(q * n + p, col)] = img[(p, q)];
                }
            }
        }
    }
    m
}

pub fn largest_singular(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn op_norm_dense(m: &CMatrix) -> f64 {
    largest_singular(m)
}

/// `√((Tr(a x*x) + Tr(a x x*))/2)` on dense matrices.
pub fn sharp_dense(a: &CMatrix, x: &CMatrix) -> f64 {
    let l = (a * x.adjoint() * x).trace().re;
    let r = (a * x * x.adjoint()).trace().re;
    (0.5 * (l + r)).max(0.0).sqrt()
}

pub fn dense(x: &BlockMatrix) -> CMatrix {
    x.to_dense()
}

const VARS: [&str; 4] = ["x", "y", "z", "w"];

pub fn literal(rng: &mut Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(0..10) as f64,
        1 => -(rng.random_range(1..100) as f64) / 8.0,
        2 => rng.random_range(-1e3..1e3),
        _ => rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-8..8)),
    }
}

pub fn gen_term(rng: &mut Rng, scope: &mut Vec<String>, depth: usize) -> Formula {
    if depth == 0 || rng.random_range(0..4) == 0 {
        return if scope.is_empty() || rng.random_range(0..3) == 0 {
            Formula::One
        } else {
            Formula::Var(scope[rng.random_range(0..scope.len())].clone())
        };
    }
    let d = depth - 1;
    let b = |rng: &mut Rng, scope: &mut Vec<String>| Box::new(gen_term(rng, scope, d));
    match rng.random_range(0..7) {
        0 => Formula::Add(b(rng, scope), b(rng, scope)),
        1 => Formula::Sub(b(rng, scope), b(rng, scope)),
        2 => Formula::Mul(b(rng, scope), b(rng, scope)),
        3 => Formula::Scale(literal(rng), b(rng, scope)),
        4 => Formula::Adj(b(rng, scope)),
        5 => Formula::Comm(b(rng, scope), b(rng, scope)),
        _ => Formula::Sigma(literal(rng), b(rng, scope)),
    }
}

pub fn gen_real(rng: &mut Rng, scope: &mut Vec<String>, depth: usize) -> Formula {
    if depth == 0 || rng.random_range(0..5) == 0 {
        return Formula::Num(literal(rng));
    }
    let d = depth - 1;
    match rng.random_range(0..12) {
        0 => Formula::Add(Box::new(gen_real(rng, scope, d)), Box::new(gen_real(rng, scope, d))),
        1 => Formula::Sub(Box::new(gen_real(rng, scope, d)), Box::new(gen_real(rng, scope, d))),
        2 => Formula::Mul(Box::new(gen_real(rng, scope, d)), Box::new(gen_real(rng, scope, d))),
        3 => Formula::Scale(literal(rng), Box::new(gen_real(rng, scope, d))),
        4 => Formula::Sharp(Box::new(gen_term(rng, scope, d))),
        5 => Formula::ReState(Box::new(gen_term(rng, scope, d))),
        6 => Formula::ImState(Box::new(gen_term(rng, scope, d))),
        7 => Formula::Abs(Box::new(gen_real(rng, scope, d))),
        8 => Formula::Sqrt(Box::new(gen_real(rng, scope, d))),
        9 | 10 => {
            let k = rng.random_range(2..4);
            let args = (0..k).map(|_| gen_real(rng, scope, d)).collect();
            if rng.random_range(0..2) == 0 {
                Formula::Max(args)
            } else {
                Formula::Min(args)
            }
        }
        _ => {
            let free: Vec<&str> = VARS.iter().cloned().filter(|v| !scope.iter().any(|s| s == v)).collect();
            if free.is_empty() {
                return Formula::Num(literal(rng));
            }
            let var = free[rng.random_range(0..free.len())].to_string();
            scope.push(var.clone());
            let body = gen_real(rng, scope, d);
            scope.pop();
            Formula::Bind {
                quant: if rng.random_range(0..2) == 0 { Sense::Sup } else { Sense::Inf },
                var,
                domain: if rng.random_range(0..2) == 0 { Domain::S1 } else { Domain::Proj },
                body: Box::new(body),
            }
        }
    }
}
