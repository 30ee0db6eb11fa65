//! Recursive-descent parser.
//!
//! ```text
//! expr    := product (("+" | "-") product)*
//! product := atom ("*" atom)*          -- a bare numeric literal on the left makes a Scale node
//! atom    := NUMBER | "-" NUMBER | "one" | VAR | "(" expr ")"
//!          | "adj(" expr ")" | "comm(" expr "," expr ")" | "sigma[" NUMBER "](" expr ")"
//!          | "sharp(" expr ")" | "re(state(" expr "))" | "im(state(" expr "))"
//!          | "abs(" expr ")" | "sqrt(" expr ")" | ("max" | "min") "(" expr ("," expr)+ ")"
//!          | ("sup" | "inf") VAR ":" ("S1" | "Proj") "." expr
//! ```
//!
//! A quantifier body extends as far to the right as possible.

use super::ast::{Formula, KEYWORDS};
use crate::error::ParseError;
use crate::logic::{Domain, Sense};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
    text: String,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError {
                offset: start,
                expected: "number".into(),
                found: text.into(),
            })?;
            out.push(Token { tok: Tok::Num(v), offset: start, text: text.into() });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let text = &src[start..i];
            out.push(Token { tok: Tok::Ident(text.into()), offset: start, text: text.into() });
        } else if "+-*()[],:.@".contains(c) {
            i += 1;
            out.push(Token { tok: Tok::Sym(c), offset: start, text: c.to_string() });
        } else {
            let ch = src[start..].chars().next().expect("nonempty");
            return Err(ParseError { offset: start, expected: "a token".into(), found: ch.to_string() });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(match self.peek() {
            Some(t) => ParseError { offset: t.offset, expected: expected.into(), found: t.text.clone() },
            None => ParseError { offset: self.len, expected: expected.into(), found: "end of input".into() },
        })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.err(&format!("`{c}`"))
        }
    }

    fn expect_ident(&mut self, word: &str) -> Result<(), ParseError> {
        if matches!(self.peek(), Some(Token { tok: Tok::Ident(s), .. }) if s == word) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("`{word}`"))
        }
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let neg = self.eat_sym('-');
        match self.peek() {
            Some(Token { tok: Tok::Num(v), .. }) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("number"),
        }
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat_sym('+') {
                let rhs = self.product()?;
                lhs = Formula::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat_sym('-') {
                let rhs = self.product()?;
                lhs = Formula::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Formula, ParseError> {
        let (mut lhs, mut bare) = self.atom()?;
        while self.eat_sym('*') {
            let (rhs, _) = self.atom()?;
            lhs = match (bare, lhs) {
                (true, Formula::Num(c)) => Formula::Scale(c, Box::new(rhs)),
                (_, l) => Formula::Mul(Box::new(l), Box::new(rhs)),
            };
            bare = false;
        }
        Ok(lhs)
    }

    fn call1(&mut self) -> Result<Box<Formula>, ParseError> {
        self.expect_sym('(')?;
        let a = self.expr()?;
        self.expect_sym(')')?;
        Ok(Box::new(a))
    }

    /// Returns the atom and whether it was a bare numeric literal.
    fn atom(&mut self) -> Result<(Formula, bool), ParseError> {
        let Some(t) = self.peek().cloned() else {
            return self.err("an operand");
        };
        match t.tok {
            Tok::Num(_) => Ok((Formula::Num(self.signed_number()?), true)),
            Tok::Sym('-') => Ok((Formula::Num(self.signed_number()?), true)),
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok((e, false))
            }
            Tok::Ident(ref w) => {
                self.pos += 1;
                let f = match w.as_str() {
                    "one" => Formula::One,
                    "adj" => Formula::Adj(self.call1()?),
                    "sharp" => Formula::Sharp(self.call1()?),
                    "abs" => Formula::Abs(self.call1()?),
                    "sqrt" => Formula::Sqrt(self.call1()?),
                    "comm" => {
                        self.expect_sym('(')?;
                        let a = self.expr()?;
                        self.expect_sym(',')?;
                        let b = self.expr()?;
                        self.expect_sym(')')?;
                        Formula::Comm(Box::new(a), Box::new(b))
                    }
                    "sigma" => {
                        self.expect_sym('[')?;
                        let t = self.signed_number()?;
                        self.expect_sym(']')?;
                        Formula::Sigma(t, self.call1()?)
                    }
                    "re" | "im" => {
                        self.expect_sym('(')?;
                        self.expect_ident("state")?;
                        let a = self.call1()?;
                        self.expect_sym(')')?;
                        if w == "re" {
                            Formula::ReState(a)
                        } else {
                            Formula::ImState(a)
                        }
                    }
                    "max" | "min" => {
                        self.expect_sym('(')?;
                        let mut args = vec![self.expr()?];
                        while self.eat_sym(',') {
                            args.push(self.expr()?);
                        }
                        if args.len() < 2 {
                            return self.err("`,`");
                        }
                        self.expect_sym(')')?;
                        if w == "max" {
                            Formula::Max(args)
                        } else {
                            Formula::Min(args)
                        }
                    }
                    "sup" | "inf" => {
                        let quant = if w == "sup" { Sense::Sup } else { Sense::Inf };
                        let var = match self.peek() {
                            Some(Token { tok: Tok::Ident(v), .. }) if !KEYWORDS.contains(&v.as_str()) => v.clone(),
                            _ => return self.err("a variable name"),
                        };
                        self.pos += 1;
                        self.expect_sym(':')?;
                        let domain = match self.peek() {
                            Some(Token { tok: Tok::Ident(d), .. }) if d == "S1" => Domain::S1,
                            Some(Token { tok: Tok::Ident(d), .. }) if d == "Proj" => Domain::Proj,
                            _ => return self.err("`S1` or `Proj`"),
                        };
                        self.pos += 1;
                        self.expect_sym('.')?;
                        let body = self.expr()?;
                        Formula::Bind { quant, var, domain, body: Box::new(body) }
                    }
                    "state" | "S1" | "Proj" => {
                        self.pos -= 1;
                        return self.err("an operand");
                    }
                    _ => Formula::Var(w.clone()),
                };
                Ok((f, false))
            }
            _ => self.err("an operand"),
        }
    }
}

/// Parses formula text; `@name` and `@phi_t(t)` expand to library formulas.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, len: src.len() };
    if p.eat_sym('@') {
        let name = match p.peek() {
            Some(Token { tok: Tok::Ident(n), .. }) => n.clone(),
            _ => return p.err("a library name"),
        };
        let name_tok = p.peek().cloned().expect("checked");
        p.pos += 1;
        let f = match name.as_str() {
            "chi_factor" => super::library::chi_factor(),
            "theta" => super::library::theta(),
            "phi_t" => {
                p.expect_sym('(')?;
                let t = p.signed_number()?;
                p.expect_sym(')')?;
                super::library::phi_t(t)
            }
            _ => {
                return Err(ParseError {
                    offset: name_tok.offset,
                    expected: "chi_factor, phi_t or theta".into(),
                    found: name,
                })
            }
        };
        if p.peek().is_some() {
            return p.err("end of input");
        }
        return Ok(f);
    }
    let f = p.expr()?;
    if p.peek().is_some() {
        return p.err("end of input");
    }
    Ok(f)
}
