//! Least-squares polynomial fitting on the monomial design matrix.

use nalgebra::{DMatrix, DVector};

use super::{check_limits, monomials_up_to, MultiIndex, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TermEstimate {
    pub index: MultiIndex,
    pub estimate: f64,
    /// `NaN` when the fit has no residual degrees of freedom.
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub rss: f64,
    pub n: usize,
    pub estimates: Vec<TermEstimate>,
    /// 2-norm condition number of the column-equilibrated design matrix.
    pub condition: f64,
}

impl FitReport {
    pub fn residual_variance(&self) -> f64 {
        let dof = self.n.saturating_sub(self.estimates.len());
        if dof == 0 {
            f64::NAN
        } else {
            self.rss / dof as f64
        }
    }
}

/// Fits a degree-`q` polynomial to rows of `x` by least squares using a
/// Householder QR factorisation of the column-equilibrated design matrix.
pub fn ols_fit(x: &[Vec<f64>], y: &[f64], q: u32) -> Result<(Polynomial, FitReport)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "ols response length",
            expected: x.len(),
            actual: y.len(),
        });
    }
    let p = x.first().map(Vec::len).unwrap_or(0);
    check_limits(p, q)?;
    if let Some(bad) = x.iter().find(|row| row.len() != p) {
        return Err(Error::DimensionMismatch {
            context: "ols design row",
            expected: p,
            actual: bad.len(),
        });
    }
    let monomials = monomials_up_to(p, q);
    let n = x.len();
    let k = monomials.len();
    if n < k {
        return Err(Error::Underdetermined {
            needed: k,
            terms: k,
            got: n,
        });
    }

    let mut design = DMatrix::<f64>::zeros(n, k);
    for (r, row) in x.iter().enumerate() {
        for (c, m) in monomials.iter().enumerate() {
            design[(r, c)] = m.value_at(row);
        }
    }

    let norms: Vec<f64> = (0..k).map(|c| design.column(c).norm()).collect();
    if norms.iter().any(|s| !s.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares data"));
    }
    if norms.contains(&0.0) {
        return Err(Error::RankDeficient {
            rank: norms.iter().filter(|&&s| s > 0.0).count(),
            columns: k,
            condition: f64::INFINITY,
        });
    }
    for (c, &s) in norms.iter().enumerate() {
        design.column_mut(c).scale_mut(1.0 / s);
    }

    let qr = design.qr();
    let r = qr.r();
    let sv = r.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = smax / smin;
    let tol = smax * (n.max(k) as f64) * f64::EPSILON;
    if !(smin > tol) {
        let rank = sv.iter().filter(|&&s| s > tol).count();
        return Err(Error::RankDeficient {
            rank,
            columns: k,
            condition,
        });
    }

    let mut qty = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut qty);
    let rhs = qty.rows(0, k).into_owned();
    let scaled_coef = r.solve_upper_triangular(&rhs).ok_or(Error::RankDeficient {
        rank: k - 1,
        columns: k,
        condition,
    })?;
    let coef: Vec<f64> = (0..k).map(|c| scaled_coef[c] / norms[c]).collect();

    let poly = Polynomial::from_terms(p, q, monomials.iter().cloned().zip(coef.iter().copied()))?;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let e = yi - poly.evaluate(row).expect("validated dimensions");
            e * e
        })
        .sum();

    // var(beta) = sigma^2 diag(R^-1 R^-T) / s_c^2
    let sigma2 = if n > k {
        rss / (n - k) as f64
    } else {
        f64::NAN
    };
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .expect("nonsingular R");
    let estimates = monomials
        .into_iter()
        .enumerate()
        .map(|(c, index)| {
            let row_norm2 = r_inv.row(c).norm_squared();
            TermEstimate {
                index,
                estimate: coef[c],
                std_error: (sigma2 * row_norm2).sqrt() / norms[c],
            }
        })
        .collect();

    Ok((
        poly,
        FitReport {
            rss,
            n,
            estimates,
            condition,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn sample(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..p).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect()
    }

    #[test]
    fn recovers_noiseless_quadratic() {
        let truth = Polynomial::from_terms(
            2,
            2,
            [
                (mi(&[0, 0]), 1.5),
                (mi(&[1, 0]), -2.0),
                (mi(&[0, 1]), 0.25),
                (mi(&[2, 0]), 3.0),
                (mi(&[1, 1]), -1.0),
                (mi(&[0, 2]), 0.5),
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = sample(&mut rng, 50, 2);
        let y: Vec<f64> = x.iter().map(|r| truth.evaluate(r).unwrap()).collect();
        let (fit, report) = ols_fit(&x, &y, 2).unwrap();
        for m in monomials_up_to(2, 2) {
            assert!((fit.coeff(&m) - truth.coeff(&m)).abs() < 1e-8, "{m}");
        }
        assert!(report.rss >= 0.0 && report.rss < 1e-20);
        assert!(report.condition.is_finite() && report.condition >= 1.0);
    }

    #[test]
    fn constant_response() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = sample(&mut rng, 30, 3);
        let y = vec![4.25; 30];
        let (fit, _) = ols_fit(&x, &y, 2).unwrap();
        for m in monomials_up_to(3, 2) {
            let want = if m.total_degree() == 0 { 4.25 } else { 0.0 };
            assert!((fit.coeff(&m) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn too_few_samples() {
        let x = vec![vec![0.0, 1.0]; 5];
        let y = vec![0.0; 5];
        assert!(matches!(
            ols_fit(&x, &y, 2),
            Err(Error::Underdetermined { .. })
        ));
    }

    #[test]
    fn collinear_design_is_rejected() {
        // second feature duplicates the first
        let x: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64 * 0.1, i as f64 * 0.1])
            .collect();
        let y: Vec<f64> = (0..20).map(|i| i as f64).collect();
        match ols_fit(&x, &y, 1) {
            Err(Error::RankDeficient { rank, columns, .. }) => {
                assert_eq!(columns, 3);
                assert_eq!(rank, 2);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn idempotent_for_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, q) in [(1, 4), (2, 3), (3, 2), (4, 2)] {
            let truth = Polynomial::from_terms(
                p,
                q,
                monomials_up_to(p, q)
                    .into_iter()
                    .map(|m| (m, rng.random_range(-5.0..5.0))),
            )
            .unwrap();
            let x = sample(&mut rng, 120, p);
            let y: Vec<f64> = x.iter().map(|r| truth.evaluate(r).unwrap()).collect();
            let (fit, _) = ols_fit(&x, &y, q).unwrap();
            for m in monomials_up_to(p, q) {
                assert!(
                    (fit.coeff(&m) - truth.coeff(&m)).abs() <= 1e-8,
                    "p={p} q={q} {m}"
                );
            }
        }
    }

    #[test]
    fn standard_errors_cover_noisy_truth() {
        use rand_distr::{Distribution, Normal};
        let truth = Polynomial::from_terms(1, 1, [(mi(&[0]), 1.0), (mi(&[1]), 2.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let x = sample(&mut rng, 200, 1);
        let y: Vec<f64> = x
            .iter()
            .map(|r| truth.evaluate(r).unwrap() + noise.sample(&mut rng))
            .collect();
        let (_, report) = ols_fit(&x, &y, 1).unwrap();
        for est in &report.estimates {
            assert!(est.std_error > 0.0 && est.std_error < 0.05);
            let err = (est.estimate - truth.coeff(&est.index)).abs();
            assert!(err < 5.0 * est.std_error, "{est:?}");
        }
        assert!((report.residual_variance().sqrt() - 0.1).abs() < 0.03);
    }
}
