//! JSON polynomial files.
//!
//! ```json
//! {
//!   "format": 1,
//!   "p": 2,
//!   "degree": 2,
//!   "terms": [
//!     {"exponents": [0, 0], "coeff": 1.5000000000000000e0},
//!     {"exponents": [1, 1], "coeff": -2.0000000000000000e0}
//!   ]
//! }
//! ```
//!
//! Terms are written in canonical order with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{MultiIndex, Polynomial};
use crate::error::{Error, Result};
use crate::numfmt::finite_sig17;

pub const POLYNOMIAL_FORMAT: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialFile {
    pub format: u32,
    pub p: usize,
    pub degree: u32,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

impl Polynomial {
    pub fn to_json(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "{{").unwrap();
        writeln!(out, "  \"format\": {POLYNOMIAL_FORMAT},").unwrap();
        writeln!(out, "  \"p\": {},", self.p).unwrap();
        writeln!(out, "  \"degree\": {},", self.degree).unwrap();
        writeln!(out, "  \"terms\": [").unwrap();
        let n = self.coeffs.len();
        for (i, (idx, &c)) in self.coeffs.iter().enumerate() {
            let exps: Vec<String> = idx.exponents().iter().map(u32::to_string).collect();
            let sep = if i + 1 < n { "," } else { "" };
            writeln!(
                out,
                "    {{\"exponents\": [{}], \"coeff\": {}}}{sep}",
                exps.join(", "),
                finite_sig17(c, "polynomial coefficient")?
            )
            .unwrap();
        }
        writeln!(out, "  ]").unwrap();
        writeln!(out, "}}").unwrap();
        Ok(out)
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Polynomial> {
        let parse_err = |message: String| Error::Parse {
            kind: "polynomial",
            path: origin.to_path_buf(),
            message,
        };
        let file: PolynomialFile =
            serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        if file.format != POLYNOMIAL_FORMAT {
            return Err(parse_err(format!(
                "field `format`: unsupported version {}",
                file.format
            )));
        }
        let mut poly =
            Polynomial::zero(file.p, file.degree).map_err(|e| parse_err(e.to_string()))?;
        for (i, t) in file.terms.into_iter().enumerate() {
            poly.add_term(MultiIndex::new(t.exponents), t.coeff)
                .map_err(|e| parse_err(format!("terms[{i}]: {e}")))?;
        }
        Ok(poly)
    }
}

pub fn save_polynomial(poly: &Polynomial, path: &Path) -> Result<()> {
    std::fs::write(path, poly.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_polynomial(path: &Path) -> Result<Polynomial> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Polynomial::from_json(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monomials_up_to;

    #[test]
    fn round_trip_is_bit_exact() {
        let terms = monomials_up_to(3, 2)
            .into_iter()
            .enumerate()
            .map(|(i, m)| (m, (i as f64 + 0.1).sin() * 1e3 / 7.0));
        let poly = Polynomial::from_terms(3, 2, terms).unwrap();
        let back = Polynomial::from_json(&poly.to_json().unwrap(), Path::new("mem")).unwrap();
        assert_eq!(back, poly);
    }

    #[test]
    fn hand_written_file() {
        let text = r#"{"format": 1, "p": 2, "degree": 2,
            "terms": [{"exponents": [1, 0], "coeff": 3}, {"exponents": [0, 2], "coeff": -1.0}]}"#;
        let poly = Polynomial::from_json(text, Path::new("hand.json")).unwrap();
        assert_eq!(poly.evaluate(&[2.0, 1.0]).unwrap(), 5.0);
    }

    #[test]
    fn errors_name_the_problem() {
        let missing = r#"{"format": 1, "p": 2, "terms": []}"#;
        let err = Polynomial::from_json(missing, Path::new("m.json"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("degree"), "{err}");

        let wrong_len =
            r#"{"format": 1, "p": 2, "degree": 1, "terms": [{"exponents": [1], "coeff": 1}]}"#;
        let err = Polynomial::from_json(wrong_len, Path::new("w.json"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("terms[0]"), "{err}");

        let too_high =
            r#"{"format": 1, "p": 1, "degree": 1, "terms": [{"exponents": [2], "coeff": 1}]}"#;
        assert!(Polynomial::from_json(too_high, Path::new("h.json")).is_err());
    }
}
