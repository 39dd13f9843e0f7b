//! Sparse multivariate polynomials over exponent vectors.
//!
//! Terms are kept in graded lexicographic order: by total degree first, then
//! lexicographically descending on the exponent vector, so for two variables
//! the order is `1, x1, x2, x1^2, x1 x2, x2^2, ...`.

mod io;
mod ols;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::combi::binomial;
use crate::error::{Error, Result};

pub use io::{load_polynomial, save_polynomial, PolynomialFile};
pub use ols::{ols_fit, FitReport, TermEstimate};

/// Hard limit on the number of variables.
pub const MAX_VARS: usize = 10;
/// Hard limit on the total degree.
pub const MAX_DEGREE: u32 = 10;

/// Exponent vector of one monomial. The constant term is the all-zeros index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(p: usize) -> Self {
        MultiIndex(vec![0; p])
    }

    /// Builds the exponent vector for a product of variables given as a list of
    /// (1-based) variable labels, e.g. `[1, 2, 2]` is `x1 x2^2`.
    pub fn from_labels(p: usize, labels: &[usize]) -> Result<Self> {
        let mut exps = vec![0u32; p];
        for &l in labels {
            if l == 0 || l > p {
                return Err(Error::InvalidArgument(format!(
                    "variable label {l} outside 1..={p}"
                )));
            }
            exps[l - 1] += 1;
        }
        Ok(MultiIndex(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `prod x_i^{m_i}`; `x` must have the same length as the index.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .fold(1.0, |acc, (&e, &xi)| acc * xi.powi(e as i32))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.total_degree() == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// All exponent vectors in `p` variables with total degree at most `q`, in
/// canonical order. Yields exactly `C(p + q, q)` indices.
pub fn monomials_up_to(p: usize, q: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; p];
    for t in 0..=q {
        fill_degree(&mut current, 0, t, &mut out);
    }
    out
}

// Emits all vectors with exponents summing to `remaining` over positions
// `pos..`, largest leading exponent first.
fn fill_degree(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        current[pos] = 0;
        return;
    }
    if current.is_empty() {
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_degree(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

/// Sparse polynomial `sum beta_m x^m` in `p` variables with total degree
/// bounded by `degree`. A missing key is a zero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    p: usize,
    degree: u32,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(p: usize, degree: u32) -> Result<Self> {
        check_limits(p, degree)?;
        Ok(Polynomial {
            p,
            degree,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn constant(p: usize, value: f64) -> Result<Self> {
        let mut poly = Self::zero(p, 0)?;
        poly.coeffs.insert(MultiIndex::zero(p), value);
        Ok(poly)
    }

    /// Builds a polynomial from terms; repeated indices are summed.
    pub fn from_terms<I>(p: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        let mut poly = Self::zero(p, degree)?;
        for (idx, c) in terms {
            poly.add_term(idx, c)?;
        }
        Ok(poly)
    }

    pub fn add_term(&mut self, idx: MultiIndex, coeff: f64) -> Result<()> {
        if idx.len() != self.p {
            return Err(Error::DimensionMismatch {
                context: "monomial exponent vector",
                expected: self.p,
                actual: idx.len(),
            });
        }
        if idx.total_degree() > self.degree {
            return Err(Error::InvalidArgument(format!(
                "monomial {idx} has degree {} above the bound {}",
                idx.total_degree(),
                self.degree
            )));
        }
        *self.coeffs.entry(idx).or_insert(0.0) += coeff;
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff(&self, idx: &MultiIndex) -> f64 {
        self.coeffs.get(idx).copied().unwrap_or(0.0)
    }

    /// Stored terms in canonical order (may include explicit zeros).
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.coeffs.iter().map(|(k, &v)| (k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Copy without explicitly stored zeros.
    pub fn canonical(&self) -> Polynomial {
        Polynomial {
            p: self.p,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, &c)| c != 0.0)
                .map(|(k, &c)| (k.clone(), c))
                .collect(),
        }
    }

    /// Coefficient vector over `monomials_up_to(p, degree)`.
    pub fn dense_coeffs(&self) -> Vec<f64> {
        monomials_up_to(self.p, self.degree)
            .iter()
            .map(|m| self.coeff(m))
            .collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                context: "polynomial evaluation point",
                expected: self.p,
                actual: x.len(),
            });
        }
        let powers = power_table(x, self.degree);
        let mut acc = 0.0;
        for (idx, &c) in &self.coeffs {
            let mut term = c;
            for (i, &e) in idx.0.iter().enumerate() {
                if e > 0 {
                    term *= powers[i][e as usize];
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Change of variables `x_i = shift_i + scale_i * x'_i`. The result `P'`
    /// satisfies `P'(x') = P(shift + scale * x')`.
    pub fn affine_substitute(&self, shift: &[f64], scale: &[f64]) -> Result<Polynomial> {
        for (v, name) in [(shift, "substitution shift"), (scale, "substitution scale")] {
            if v.len() != self.p {
                return Err(Error::DimensionMismatch {
                    context: name,
                    expected: self.p,
                    actual: v.len(),
                });
            }
        }
        let deg = self.degree as usize;
        // expansions[i][e] = coefficients of (a_i + b_i x)^e in powers of x
        let expansions: Vec<Vec<Vec<f64>>> = (0..self.p)
            .map(|i| {
                (0..=deg)
                    .map(|e| {
                        (0..=e)
                            .map(|k| {
                                let c = binomial(e as u32, k as u32).expect("degree <= 10") as f64;
                                c * shift[i].powi((e - k) as i32) * scale[i].powi(k as i32)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let mut out = Polynomial::zero(self.p, self.degree)?;
        for (idx, &c) in &self.coeffs {
            let factors: Vec<&Vec<f64>> = idx
                .0
                .iter()
                .enumerate()
                .map(|(i, &e)| &expansions[i][e as usize])
                .collect();
            // walk the cartesian product of per-variable expansions
            let mut ks = vec![0usize; self.p];
            loop {
                let mut term = c;
                for (i, f) in factors.iter().enumerate() {
                    term *= f[ks[i]];
                }
                if term != 0.0 {
                    let key = MultiIndex(ks.iter().map(|&k| k as u32).collect());
                    *out.coeffs.entry(key).or_insert(0.0) += term;
                }
                let mut pos = 0;
                while pos < self.p {
                    ks[pos] += 1;
                    if ks[pos] < factors[pos].len() {
                        break;
                    }
                    ks[pos] = 0;
                    pos += 1;
                }
                if pos == self.p {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// `mult * P + add`.
    pub fn output_affine(&self, mult: f64, add: f64) -> Polynomial {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= mult;
        }
        *out.coeffs.entry(MultiIndex::zero(self.p)).or_insert(0.0) += add;
        out
    }

    /// Multiplies all coefficients by `factor`.
    pub fn scaled(&self, factor: f64) -> Polynomial {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= factor;
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, &c) in &self.coeffs {
            if c == 0.0 {
                continue;
            }
            if !first {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            } else if c < 0.0 {
                f.write_str("-")?;
            }
            first = false;
            if idx.total_degree() == 0 {
                write!(f, "{}", c.abs())?;
            } else {
                write!(f, "{}*{idx}", c.abs())?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

pub(crate) fn check_limits(p: usize, degree: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "polynomial needs at least one variable".into(),
        ));
    }
    if p > MAX_VARS {
        return Err(Error::LimitExceeded {
            what: "variable count",
            value: p,
            limit: MAX_VARS,
        });
    }
    if degree > MAX_DEGREE {
        return Err(Error::LimitExceeded {
            what: "degree",
            value: degree as usize,
            limit: MAX_DEGREE as usize,
        });
    }
    Ok(())
}

// powers[i][k] = x_i^k for k in 0..=degree
fn power_table(x: &[f64], degree: u32) -> Vec<Vec<f64>> {
    x.iter()
        .map(|&xi| {
            let mut row = Vec::with_capacity(degree as usize + 1);
            let mut acc = 1.0;
            row.push(acc);
            for _ in 0..degree {
                acc *= xi;
                row.push(acc);
            }
            row
        })
        .collect()
}

/// Coefficient-wise comparison of two polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientDistance {
    /// `|a_m - b_m|` for every monomial stored in either polynomial, canonical order.
    pub per_term: Vec<(MultiIndex, f64)>,
    pub max_abs: f64,
    pub l2: f64,
}

pub fn coefficient_distance(a: &Polynomial, b: &Polynomial) -> Result<CoefficientDistance> {
    if a.p != b.p {
        return Err(Error::DimensionMismatch {
            context: "coefficient comparison",
            expected: a.p,
            actual: b.p,
        });
    }
    let keys: std::collections::BTreeSet<&MultiIndex> =
        a.coeffs.keys().chain(b.coeffs.keys()).collect();
    let per_term: Vec<(MultiIndex, f64)> = keys
        .into_iter()
        .map(|k| (k.clone(), (a.coeff(k) - b.coeff(k)).abs()))
        .collect();
    let max_abs = per_term.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let l2 = per_term.iter().map(|(_, d)| d * d).sum::<f64>().sqrt();
    Ok(CoefficientDistance {
        per_term,
        max_abs,
        l2,
    })
}
