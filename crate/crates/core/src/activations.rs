//! Hidden-layer activation functions and their Maclaurin series.
//!
//! Series coefficients are computed with exact rational recurrences:
//! sigmoid from `s' = s (1 - s)`, tanh from `t' = 1 - t^2`, and softplus by
//! integrating the sigmoid series term by term (its constant term is `ln 2`).

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Highest supported truncation order.
pub const MAX_ORDER: u32 = 10;
/// Default tolerance for [`valid_range`].
pub const DEFAULT_EPSILON: f64 = 0.1;

const SCAN_LIMIT: f64 = 50.0;
const SCAN_STEP: f64 = 1e-3;
const BISECT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Softplus,
    Tanh,
    Sigmoid,
    /// `g(x) = x`, for tests.
    Linear,
}

impl Activation {
    pub const PAPER_SET: [Activation; 3] =
        [Activation::Softplus, Activation::Tanh, Activation::Sigmoid];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Softplus => "softplus",
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Linear => "linear",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Activation::Softplus => x.max(0.0) + (-x.abs()).exp().ln_1p(),
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Linear => x,
        }
    }

    /// First derivative `g'(x)`.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Softplus => sigmoid(x),
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Linear => 1.0,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "softplus" => Ok(Activation::Softplus),
            "tanh" => Ok(Activation::Tanh),
            "sigmoid" | "logistic" => Ok(Activation::Sigmoid),
            "linear" | "identity" => Ok(Activation::Linear),
            other => Err(Error::InvalidArgument(format!(
                "unknown activation `{other}`"
            ))),
        }
    }
}

/// One exact series coefficient. Only the softplus constant term is irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactCoeff {
    Rational(Rational),
    Ln2,
}

impl ExactCoeff {
    pub fn to_f64(&self) -> f64 {
        match self {
            // numerators and denominators stay far below 2^53, so this is one rounding
            ExactCoeff::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            ExactCoeff::Ln2 => std::f64::consts::LN_2,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactCoeff::Rational(r) if r.is_zero())
    }
}

/// Truncated Maclaurin series `sum_{n<=q} c_n x^n` with `c_n = g^(n)(0) / n!`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    activation: Activation,
    exact: Vec<ExactCoeff>,
    coeffs: Vec<f64>,
}

impl TaylorSeries {
    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exact(&self) -> &[ExactCoeff] {
        &self.exact
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

pub fn taylor_coeffs(activation: Activation, order: u32) -> Result<TaylorSeries> {
    if order > MAX_ORDER {
        return Err(Error::LimitExceeded {
            what: "Taylor order",
            value: order as usize,
            limit: MAX_ORDER as usize,
        });
    }
    let exact = exact_series(activation, order);
    let coeffs = exact.iter().map(ExactCoeff::to_f64).collect();
    Ok(TaylorSeries {
        activation,
        exact,
        coeffs,
    })
}

/// Exact coefficients `c_0..=c_order` with no order limit (`i128` is ample
/// well past [`MAX_ORDER`]).
pub(crate) fn exact_series(activation: Activation, order: u32) -> Vec<ExactCoeff> {
    let n = order as usize;
    match activation {
        Activation::Sigmoid => sigmoid_rational(n)
            .into_iter()
            .map(ExactCoeff::Rational)
            .collect(),
        Activation::Tanh => tanh_rational(n)
            .into_iter()
            .map(ExactCoeff::Rational)
            .collect(),
        Activation::Softplus => {
            let mut out = vec![ExactCoeff::Ln2];
            if n > 0 {
                let s = sigmoid_rational(n - 1);
                out.extend(
                    s.into_iter().enumerate().map(|(k, c)| {
                        ExactCoeff::Rational(c / Rational::from_integer(k as i128 + 1))
                    }),
                );
            }
            out
        }
        Activation::Linear => (0..=n)
            .map(|k| {
                ExactCoeff::Rational(if k == 1 {
                    Rational::one()
                } else {
                    Rational::zero()
                })
            })
            .collect(),
    }
}

fn self_convolution(c: &[Rational], n: usize) -> Rational {
    (0..=n).fold(Rational::zero(), |acc, k| acc + c[k] * c[n - k])
}

// (k+1) a_{k+1} = a_k - sum_{i<=k} a_i a_{k-i},  a_0 = 1/2
fn sigmoid_rational(order: usize) -> Vec<Rational> {
    let mut a = vec![Rational::new(1, 2)];
    for k in 0..order {
        let next = (a[k] - self_convolution(&a, k)) / Rational::from_integer(k as i128 + 1);
        a.push(next);
    }
    a
}

// (k+1) t_{k+1} = [k == 0] - sum_{i<=k} t_i t_{k-i},  t_0 = 0
fn tanh_rational(order: usize) -> Vec<Rational> {
    let mut t = vec![Rational::zero()];
    for k in 0..order {
        let delta = if k == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
        let next = (delta - self_convolution(&t, k)) / Rational::from_integer(k as i128 + 1);
        t.push(next);
    }
    t
}

/// Interval around 0 where `|g(x) - T_q(x)| <= epsilon`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidRange {
    pub epsilon: f64,
    pub lo: f64,
    pub hi: f64,
    /// No crossing found down to `-50`.
    pub lo_saturated: bool,
    /// No crossing found up to `50`.
    pub hi_saturated: bool,
}

impl ValidRange {
    pub fn contains(&self, u: f64) -> bool {
        u >= self.lo && u <= self.hi
    }
}

/// Finds the first point on each side of 0 where the truncation error exceeds
/// `epsilon`: a scan with step `1e-3` out to `±50`, refined by bisection to `1e-6`.
pub fn valid_range(activation: Activation, order: u32, epsilon: f64) -> Result<ValidRange> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let series = taylor_coeffs(activation, order)?;
    let err = |x: f64| (activation.eval(x) - series.eval(x)).abs();
    let (hi, hi_saturated) = first_crossing(err, epsilon);
    let (neg_lo, lo_saturated) = first_crossing(|x| err(-x), epsilon);
    Ok(ValidRange {
        epsilon,
        lo: -neg_lo,
        hi,
        lo_saturated,
        hi_saturated,
    })
}

fn first_crossing(err: impl Fn(f64) -> f64, epsilon: f64) -> (f64, bool) {
    let steps = (SCAN_LIMIT / SCAN_STEP).round() as usize;
    let mut prev = 0.0;
    for k in 1..=steps {
        let x = k as f64 * SCAN_STEP;
        if err(x) > epsilon {
            let (mut a, mut b) = (prev, x);
            while b - a > BISECT_TOL {
                let mid = 0.5 * (a + b);
                if err(mid) > epsilon {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return (0.5 * (a + b), false);
        }
        prev = x;
    }
    (SCAN_LIMIT, true)
}
