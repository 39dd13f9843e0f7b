//! Synthetic polynomial regression data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{monomials_up_to, Polynomial};

// independent ChaCha streams per purpose so that changing one consumer
// never shifts another's draws
pub(crate) const STREAM_DATA: u64 = 1;
pub(crate) const STREAM_SPLIT: u64 = 2;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataGenConfig {
    pub n: usize,
    pub p: usize,
    /// Degree of the generating polynomial.
    pub degree: u32,
    /// Each feature mean is drawn uniformly from this interval.
    pub mean_range: [f64; 2],
    pub variance: f64,
    /// Generating coefficients are drawn uniformly from this interval.
    pub coef_range: [f64; 2],
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for DataGenConfig {
    fn default() -> Self {
        DataGenConfig {
            n: 200,
            p: 3,
            degree: 2,
            mean_range: [-10.0, 10.0],
            variance: 1.0,
            coef_range: [-5.0, 5.0],
            noise_sd: 0.1,
            seed: 0,
        }
    }
}

impl DataGenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n < 2 {
            return bad(format!("data needs n >= 2, got {}", self.n));
        }
        crate::poly::check_limits(self.p, self.degree)?;
        if !(self.variance > 0.0) {
            return bad(format!(
                "feature variance must be positive, got {}",
                self.variance
            ));
        }
        if !(self.noise_sd >= 0.0) {
            return bad(format!(
                "noise sd must be non-negative, got {}",
                self.noise_sd
            ));
        }
        for (name, r) in [
            ("mean_range", self.mean_range),
            ("coef_range", self.coef_range),
        ] {
            if !(r[0] <= r[1]) || !r.iter().all(|v| v.is_finite()) {
                return bad(format!(
                    "{name} must be an ordered finite interval, got {r:?}"
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub generator: Polynomial,
    pub means: Vec<f64>,
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..r[1])
    }
}

/// Draws feature means, generating coefficients, features and noise, in that
/// order, from one seeded stream.
pub fn generate_data(cfg: &DataGenConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, STREAM_DATA);
    let means: Vec<f64> = (0..cfg.p)
        .map(|_| uniform(&mut rng, cfg.mean_range))
        .collect();
    let generator = Polynomial::from_terms(
        cfg.p,
        cfg.degree,
        monomials_up_to(cfg.p, cfg.degree)
            .into_iter()
            .map(|m| (m, uniform(&mut rng, cfg.coef_range)))
            .collect::<Vec<_>>(),
    )?;
    let sd = cfg.variance.sqrt();
    let x: Vec<Vec<f64>> = (0..cfg.n)
        .map(|_| {
            means
                .iter()
                .map(|&mu| Normal::new(mu, sd).expect("validated sd").sample(&mut rng))
                .collect()
        })
        .collect();
    let noise = Normal::new(0.0, cfg.noise_sd).expect("validated sd");
    let y = x
        .iter()
        .map(|row| Ok(generator.evaluate(row)? + noise.sample(&mut rng)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Dataset {
        x,
        y,
        generator,
        means,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn rows<T: Clone>(idx: &[usize], data: &[T]) -> Vec<T> {
        idx.iter().map(|&i| data[i].clone()).collect()
    }
}

/// Uniform random permutation into `round(n * fraction)` training rows and the rest.
pub fn split(n: usize, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("cannot split {n} samples")));
    }
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream_rng(seed, STREAM_SPLIT));
    let test = idx.split_off(n_train);
    Ok(Split { train: idx, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ols_fit;

    #[test]
    fn default_matches_reference_setup() {
        let cfg = DataGenConfig::default();
        assert_eq!((cfg.n, cfg.p, cfg.degree), (200, 3, 2));
        assert_eq!(cfg.mean_range, [-10.0, 10.0]);
        assert_eq!(cfg.coef_range, [-5.0, 5.0]);
        assert_eq!((cfg.variance, cfg.noise_sd), (1.0, 0.1));
        let data = generate_data(&cfg).unwrap();
        assert_eq!(data.x.len(), 200);
        assert_eq!(data.generator.num_terms(), 10);
        assert!(data
            .generator
            .terms()
            .all(|(_, c)| (-5.0..5.0).contains(&c)));
        assert!(data.means.iter().all(|m| (-10.0..10.0).contains(m)));
        for (i, &mu) in data.means.iter().enumerate() {
            let mean = data.x.iter().map(|r| r[i]).sum::<f64>() / 200.0;
            assert!((mean - mu).abs() < 0.3);
        }
    }

    #[test]
    fn noiseless_data_lies_on_the_generator() {
        let cfg = DataGenConfig {
            noise_sd: 0.0,
            seed: 5,
            ..Default::default()
        };
        let data = generate_data(&cfg).unwrap();
        let (fit, _) = ols_fit(&data.x, &data.y, 2).unwrap();
        for (m, c) in data.generator.terms() {
            assert!(
                (fit.coeff(m) - c).abs() <= 1e-8,
                "{m}: {} vs {c}",
                fit.coeff(m)
            );
        }
    }

    #[test]
    fn same_seed_same_data() {
        let cfg = DataGenConfig {
            seed: 17,
            ..Default::default()
        };
        assert_eq!(generate_data(&cfg).unwrap(), generate_data(&cfg).unwrap());
        let other = DataGenConfig { seed: 18, ..cfg };
        assert_ne!(
            generate_data(&other).unwrap().y,
            generate_data(&DataGenConfig {
                seed: 17,
                ..Default::default()
            })
            .unwrap()
            .y
        );
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            DataGenConfig {
                n: 1,
                ..Default::default()
            },
            DataGenConfig {
                variance: 0.0,
                ..Default::default()
            },
            DataGenConfig {
                noise_sd: -1.0,
                ..Default::default()
            },
            DataGenConfig {
                coef_range: [1.0, -1.0],
                ..Default::default()
            },
        ] {
            assert!(generate_data(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let s = split(200, 0.75, 3).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (150, 50));
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..200).collect::<Vec<_>>());
        assert_eq!(s, split(200, 0.75, 3).unwrap());
        assert_ne!(s, split(200, 0.75, 4).unwrap());
        assert!(split(200, 1.0, 3).is_err());
        assert!(split(200, 0.0, 3).is_err());
    }
}
