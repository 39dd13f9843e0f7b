//! Closed-form conversion of network weights into polynomial coefficients.
//!
//! Every hidden unit contributes `v_j T_q(u_j)`, where `T_q` is the order-`q`
//! Maclaurin polynomial of the activation and `u_j` is affine in `x`.
//! Expanding `u_j^n` with the multinomial theorem gives, for a monomial with
//! exponents `m = (m_1..m_p)` and total order `t`,
//!
//! ```text
//! beta_m = [t = 0] v_0
//!        + sum_j v_j sum_{n=t}^{q} g^(n)(0) / ((n - t)! m_1! ... m_p!)
//!                                  * w_{0,j}^(n-t) * prod_i w_{i,j}^(m_i)
//! ```
//!
//! With `c_n = g^(n)(0) / n!` the inner factor is `c_n` times the integer
//! multinomial `n! / ((n - t)! m_1! ... m_p!)`, which is computed exactly.

use crate::activations::{taylor_coeffs, valid_range, Activation, MAX_ORDER};
use crate::combi::multinomial;
use crate::error::{Error, Result};
use crate::nn::NetworkWeights;
use crate::poly::{check_limits, monomials_up_to, MultiIndex, Polynomial};
use crate::scaling::ScalingSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct TranscodeResult {
    /// Polynomial in the network's input space.
    pub poly: Polynomial,
    pub order: u32,
    pub activation: Activation,
    /// Contribution of each hidden unit (without `v_0`), when requested.
    pub per_unit: Option<Vec<Polynomial>>,
}

pub fn nn_to_poly(net: &NetworkWeights, order: u32) -> Result<TranscodeResult> {
    transcode(net, order, false)
}

/// Like [`nn_to_poly`] but also keeps every unit's separate contribution.
pub fn nn_to_poly_with_breakdown(net: &NetworkWeights, order: u32) -> Result<TranscodeResult> {
    transcode(net, order, true)
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Taylor order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    Ok(())
}

fn transcode(net: &NetworkWeights, order: u32, breakdown: bool) -> Result<TranscodeResult> {
    check_order(order)?;
    let p = net.p();
    check_limits(p, order)?;
    let series = taylor_coeffs(net.activation(), order)?;
    let c = series.coeffs();
    let q = order as usize;
    let monomials = monomials_up_to(p, order);

    // factors[k][n - t] = n! / ((n - t)! m_1! ... m_p!) for monomial k
    let factors: Vec<Vec<f64>> = monomials
        .iter()
        .map(|m| {
            let t = m.total_degree();
            (t..=order)
                .map(|n| {
                    let mut parts = Vec::with_capacity(p + 1);
                    parts.push(n - t);
                    parts.extend_from_slice(m.exponents());
                    multinomial(&parts).map(|v| v as f64)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let mut addends: Vec<Vec<f64>> = vec![Vec::new(); monomials.len()];
    addends[0].push(net.v()[0]);
    let mut unit_addends: Vec<Vec<f64>> = vec![Vec::new(); monomials.len()];
    let mut per_unit = Vec::new();

    for j in 0..net.h1() {
        let vj = net.v()[j + 1];
        let col = net.unit_weights(j);
        // pow[i][k] = w_{i,j}^k
        let pow: Vec<Vec<f64>> = col
            .iter()
            .map(|&w| {
                let mut row = vec![1.0; q + 1];
                for k in 1..=q {
                    row[k] = row[k - 1] * w;
                }
                row
            })
            .collect();
        for (k, m) in monomials.iter().enumerate() {
            let t = m.total_degree() as usize;
            let mono: f64 = m
                .exponents()
                .iter()
                .enumerate()
                .map(|(i, &e)| pow[i + 1][e as usize])
                .product();
            for n in t..=q {
                if c[n] == 0.0 {
                    continue;
                }
                let term = vj * c[n] * factors[k][n - t] * pow[0][n - t] * mono;
                addends[k].push(term);
                if breakdown {
                    unit_addends[k].push(term);
                }
            }
        }
        if breakdown {
            let terms = monomials
                .iter()
                .cloned()
                .zip(unit_addends.iter_mut().map(|a| sorted_sum(a)));
            per_unit.push(Polynomial::from_terms(p, order, terms)?);
            unit_addends.iter_mut().for_each(Vec::clear);
        }
    }

    let terms = monomials
        .into_iter()
        .zip(addends.iter_mut().map(|a| sorted_sum(a)));
    let poly = Polynomial::from_terms(p, order, terms)?;
    Ok(TranscodeResult {
        poly,
        order,
        activation: net.activation(),
        per_unit: breakdown.then_some(per_unit),
    })
}

/// Sums after ordering by increasing magnitude; ties keep insertion order.
fn sorted_sum(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    values.iter().sum()
}

/// Network output with every activation replaced by its order-`q` Maclaurin
/// polynomial, evaluated directly on the potentials without any monomial
/// expansion.
pub fn taylor_truncated_output(net: &NetworkWeights, order: u32, x: &[f64]) -> Result<f64> {
    check_order(order)?;
    let series = taylor_coeffs(net.activation(), order)?;
    let u = net.potentials_at(x)?;
    let v = net.v();
    Ok(v[0]
        + u.iter()
            .enumerate()
            .map(|(j, &uj)| v[j + 1] * series.eval(uj))
            .sum::<f64>())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    /// Share of each unit's potentials inside the valid range.
    pub per_unit: Vec<f64>,
    /// Share of all `n * h1` potentials inside the valid range.
    pub overall: f64,
    pub epsilon: f64,
    pub order: u32,
    pub lo: f64,
    pub hi: f64,
}

/// How many synaptic potentials over the samples `xs` fall where the
/// truncated series stays within `epsilon` of the activation.
pub fn coverage(
    net: &NetworkWeights,
    xs: &[Vec<f64>],
    order: u32,
    epsilon: f64,
) -> Result<CoverageReport> {
    check_order(order)?;
    let range = valid_range(net.activation(), order, epsilon)?;
    let pots = net.potentials(xs)?;
    let h1 = net.h1();
    let mut inside = vec![0usize; h1];
    for row in &pots {
        for (j, &u) in row.iter().enumerate() {
            if range.contains(u) {
                inside[j] += 1;
            }
        }
    }
    let n = pots.len();
    let frac = |count: usize, total: usize| {
        if total == 0 {
            1.0
        } else {
            count as f64 / total as f64
        }
    };
    Ok(CoverageReport {
        per_unit: inside.iter().map(|&k| frac(k, n)).collect(),
        overall: frac(inside.iter().sum(), n * h1),
        epsilon,
        order,
        lo: range.lo,
        hi: range.hi,
    })
}

/// Expresses a polynomial fitted in scaled space in the original units:
/// substitutes the feature maps into the inputs and undoes the response map.
pub fn rescale_to_original(result: &TranscodeResult, spec: &ScalingSpec) -> Result<Polynomial> {
    rescale_polynomial(&result.poly, spec)
}

pub fn rescale_polynomial(poly: &Polynomial, spec: &ScalingSpec) -> Result<Polynomial> {
    if spec.p() != poly.p() {
        return Err(Error::DimensionMismatch {
            context: "scaling spec features",
            expected: poly.p(),
            actual: spec.p(),
        });
    }
    spec.validate()?;
    let maps: Vec<_> = (0..spec.p()).map(|i| spec.feature_map(i)).collect();
    if maps.iter().any(|m| !(m.gain.is_finite() && m.gain != 0.0)) {
        return Err(Error::DegenerateScaling("zero input span".into()));
    }
    let shift: Vec<f64> = maps.iter().map(|m| m.offset).collect();
    let gain: Vec<f64> = maps.iter().map(|m| m.gain).collect();
    let in_original = poly.affine_substitute(&shift, &gain)?;
    let r = spec.response_map();
    // y = (z - offset) / gain
    Ok(in_original.output_affine(1.0 / r.gain, -r.offset / r.gain))
}

/// Convenience for tests and reports: the exponent vector written in the
/// index-list notation `beta_{l_1 ... l_t}` (1-based variable labels).
pub fn index_labels(m: &MultiIndex) -> Vec<usize> {
    m.exponents()
        .iter()
        .enumerate()
        .flat_map(|(i, &e)| std::iter::repeat_n(i + 1, e as usize))
        .collect()
}
