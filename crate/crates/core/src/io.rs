//! JSON exchange formats and number formatting.
//!
//! A space file looks like
//! `{"blocks": [{"dim": 2, "density": [[[re, im], [re, im]], [[re, im], [re, im]]]}]}`
//! and an element file uses the same layout with the key `matrix`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockMatrix, CMatrix, WStarSpace};
use crate::error::{Error, Result};

type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
struct SpaceBlock {
    dim: usize,
    density: Rows,
}

#[derive(Serialize, Deserialize)]
struct SpaceFile {
    blocks: Vec<SpaceBlock>,
}

#[derive(Serialize, Deserialize)]
struct ElementBlock {
    dim: usize,
    matrix: Rows,
}

#[derive(Serialize, Deserialize)]
struct ElementFile {
    blocks: Vec<ElementBlock>,
}

fn rows_to_matrix(dim: usize, rows: &Rows) -> Result<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::ShapeMismatch {
            expected: vec![dim],
            found: vec![rows.len(), rows.first().map_or(0, |r| r.len())],
        });
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn matrix_to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn space_from_json(text: &str) -> Result<WStarSpace> {
    let f: SpaceFile = serde_json::from_str(text).map_err(json_err)?;
    let dims: Vec<usize> = f.blocks.iter().map(|b| b.dim).collect();
    let blocks = f
        .blocks
        .iter()
        .map(|b| rows_to_matrix(b.dim, &b.density))
        .collect::<Result<Vec<_>>>()?;
    WStarSpace::new(&dims, BlockMatrix::new(blocks)?)
}

pub fn space_to_json(space: &WStarSpace) -> String {
    let f = SpaceFile {
        blocks: space
            .density()
            .blocks()
            .iter()
            .map(|b| SpaceBlock { dim: b.nrows(), density: matrix_to_rows(b) })
            .collect(),
    };
    to_json_string(&f)
}

pub fn element_from_json(text: &str) -> Result<BlockMatrix> {
    let f: ElementFile = serde_json::from_str(text).map_err(json_err)?;
    let blocks = f
        .blocks
        .iter()
        .map(|b| rows_to_matrix(b.dim, &b.matrix))
        .collect::<Result<Vec<_>>>()?;
    BlockMatrix::new(blocks)
}

fn element_file(x: &BlockMatrix) -> ElementFile {
    ElementFile {
        blocks: x.blocks().iter().map(|b| ElementBlock { dim: b.nrows(), matrix: matrix_to_rows(b) }).collect(),
    }
}

pub fn element_to_json(x: &BlockMatrix) -> String {
    to_json_string(&element_file(x))
}

/// Serializes in the element file layout.
impl Serialize for BlockMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        element_file(self).serialize(s)
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// `printf("%.17g")`: 17 significant digits, trailing zeros removed, so every
/// finite `f64` round-trips.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Infinity".into() } else { "-Infinity".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if !(-5..17).contains(&exp) {
        let mut m = format!("{}.{}", &digits[..1], &digits[1..]);
        trim_fraction(&mut m);
        return format!("{sign}{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let mut s = if exp >= 0 {
        let int_len = exp as usize + 1;
        format!("{}.{}", &digits[..int_len], &digits[int_len..])
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    trim_fraction(&mut s);
    format!("{sign}{s}")
}

fn trim_fraction(s: &mut String) {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
}

/// JSON formatter that writes floats with [`fmt_g17`]. Non-finite values
/// become `null`.
pub struct G17Formatter;

impl serde_json::ser::Formatter for G17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_g17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value.serialize(&mut ser).expect("serialization into memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt_g17(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0001), "0.0001");
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[0.1, 1.0 / 7.0, 9.064720283654388, 1e-300, 6.02e23, -3.5, f64::MIN_POSITIVE] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn space_json_round_trip() {
        let s = crate::algebra::random_faithful_space(&[2, 1], 4).unwrap();
        let back = space_from_json(&space_to_json(&s)).unwrap();
        assert_eq!(back.density(), s.density());
    }

    #[test]
    fn element_shape_errors() {
        let bad = r#"{"blocks":[{"dim":2,"matrix":[[[1,0]]]}]}"#;
        assert!(matches!(element_from_json(bad), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(element_from_json("{"), Err(Error::Format(_))));
    }
}
