//! Fixed-data coefficient study: several networks trained on one dataset with
//! different seeds, each transcoded and mapped back to the original units,
//! compared with the generating polynomial and a least-squares fit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::data::{generate_data, DataGenConfig, Split};
use super::experiment::PreparedData;
use super::surface::{surface_grid, write_surface, Bounds2, SurfacePoint, EXTENDED_FACTOR};
use crate::activations::Activation;
use crate::error::{Error, Result};
use crate::nn::{train_rprop, NetworkWeights, TrainConfig, TrainTrace};
use crate::numfmt::sig17;
use crate::poly::{monomials_up_to, ols_fit, FitReport, Polynomial};
use crate::scaling::ScaleMode;
use crate::transcode::{nn_to_poly, rescale_polynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub data: DataGenConfig,
    pub activation: Activation,
    pub scaling: ScaleMode,
    pub h1: usize,
    pub order: u32,
    pub train_seeds: Vec<u64>,
    pub train_fraction: f64,
    pub resolution: usize,
    pub extend_factor: f64,
    pub train: TrainConfig,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            data: DataGenConfig {
                p: 2,
                ..Default::default()
            },
            activation: Activation::Softplus,
            scaling: ScaleMode::Symmetric,
            h1: 4,
            order: 2,
            train_seeds: vec![1, 2, 3, 4],
            train_fraction: 0.75,
            resolution: 41,
            extend_factor: EXTENDED_FACTOR,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StudyNet {
    pub seed: u64,
    pub net: NetworkWeights,
    pub trace: TrainTrace,
    pub scaled_poly: Polynomial,
    /// Polynomial in the original feature and response units.
    pub poly: Polynomial,
}

#[derive(Clone, Debug)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub data: PreparedData,
    pub generator: Polynomial,
    pub ols: Polynomial,
    pub ols_report: FitReport,
    pub nets: Vec<StudyNet>,
    pub data_box: Bounds2,
    pub extended_box: Bounds2,
    /// Test rows in original units.
    pub test_x: Vec<Vec<f64>>,
    pub test_y: Vec<f64>,
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    if cfg.data.p != 2 {
        return Err(Error::InvalidArgument(format!(
            "the coefficient study needs p = 2 for surfaces, got {}",
            cfg.data.p
        )));
    }
    if cfg.train_seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "coefficient study needs at least one training seed".into(),
        ));
    }
    let dataset = generate_data(&cfg.data)?;
    let data = PreparedData::new(dataset, cfg.train_fraction, cfg.data.seed, cfg.scaling)?;
    let train_x = Split::rows(&data.split.train, &data.dataset.x);
    let train_y = Split::rows(&data.split.train, &data.dataset.y);
    let (ols, ols_report) = ols_fit(&train_x, &train_y, cfg.data.degree)?;

    let nets = cfg
        .train_seeds
        .iter()
        .map(|&seed| {
            let tc = TrainConfig {
                seed,
                ..cfg.train.clone()
            };
            let (net, trace) =
                train_rprop(&data.train_x, &data.train_y, cfg.h1, cfg.activation, &tc)
                    .map_err(|e| e.context(format!("study network seed {seed}")))?;
            let scaled_poly = nn_to_poly(&net, cfg.order)?.poly;
            let poly = rescale_polynomial(&scaled_poly, &data.scaling)?;
            Ok(StudyNet {
                seed,
                net,
                trace,
                scaled_poly,
                poly,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let data_box = Bounds2::of_data(&data.dataset.x)?;
    Ok(StudyResult {
        config: cfg.clone(),
        generator: data.dataset.generator.clone(),
        test_x: Split::rows(&data.split.test, &data.dataset.x),
        test_y: Split::rows(&data.split.test, &data.dataset.y),
        data,
        ols,
        ols_report,
        nets,
        extended_box: data_box.enlarged(cfg.extend_factor),
        data_box,
    })
}

impl StudyResult {
    /// Named polynomials in plotting order: generator, least squares, networks.
    pub fn polynomials(&self) -> Vec<(String, &Polynomial)> {
        let mut out = vec![
            ("generator".to_string(), &self.generator),
            ("ols".to_string(), &self.ols),
        ];
        for (k, n) in self.nets.iter().enumerate() {
            out.push((format!("nn{}", k + 1), &n.poly));
        }
        out
    }

    pub fn surface(&self, poly: &Polynomial, extended: bool) -> Result<Vec<SurfacePoint>> {
        let b = if extended {
            &self.extended_box
        } else {
            &self.data_box
        };
        surface_grid(poly, b, self.config.resolution)
    }

    /// Writes `coefficients.csv` and one `surface_<name>_<data|extended>.csv` per polynomial.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("coefficients.csv");
        let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        self.write_coefficients(file)?;
        for (name, poly) in self.polynomials() {
            for (label, extended) in [("data", false), ("extended", true)] {
                let path = dir.join(format!("surface_{name}_{label}.csv"));
                let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
                write_surface(&self.surface(poly, extended)?, file)?;
            }
        }
        Ok(())
    }

    pub fn write_coefficients<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "monomial".to_string(),
            "generator".into(),
            "ols".into(),
            "ols_se".into(),
        ];
        header.extend((1..=self.nets.len()).map(|k| format!("nn{k}")));
        w.write_record(&header)?;
        let degree = self.config.order.max(self.config.data.degree);
        for m in monomials_up_to(2, degree) {
            let se = self
                .ols_report
                .estimates
                .iter()
                .find(|e| e.index == m)
                .map(|e| sig17(e.std_error))
                .unwrap_or_default();
            let mut row = vec![
                m.to_string(),
                sig17(self.generator.coeff(&m)),
                sig17(self.ols.coeff(&m)),
                se,
            ];
            row.extend(self.nets.iter().map(|n| sig17(n.poly.coeff(&m))));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("coefficients table", e))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_study_produces_all_outputs() {
        let cfg = StudyConfig {
            train: TrainConfig {
                max_epochs: 300,
                ..Default::default()
            },
            train_seeds: vec![1, 2],
            resolution: 5,
            ..Default::default()
        };
        let res = run_study(&cfg).unwrap();
        assert_eq!(res.nets.len(), 2);
        assert_eq!(res.polynomials().len(), 4);
        assert_eq!(res.test_x.len(), 50);
        // back-scaled polynomial reproduces the network's scaled-space polynomial
        let s = res.data.scaling.scale_x(&res.test_x).unwrap();
        for (x, xs) in res.test_x.iter().zip(&s) {
            let want = res
                .data
                .scaling
                .unscale_y(&[res.nets[0].scaled_poly.evaluate(xs).unwrap()])[0];
            let got = res.nets[0].poly.evaluate(x).unwrap();
            assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
        let dir = tempfile::tempdir().unwrap();
        res.write(dir.path()).unwrap();
        assert!(dir.path().join("coefficients.csv").exists());
        assert!(dir.path().join("surface_nn2_extended.csv").exists());
        let coef = std::fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();
        assert_eq!(coef.lines().count(), 1 + 6);
        assert!(coef.starts_with("monomial,generator,ols,ols_se,nn1,nn2"));
    }

    #[test]
    fn requires_two_variables() {
        let cfg = StudyConfig {
            data: DataGenConfig::default(),
            ..Default::default()
        };
        assert!(run_study(&cfg).is_err());
    }
}
