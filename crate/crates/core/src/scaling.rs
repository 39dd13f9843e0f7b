//! Min-max affine scaling of features and response, fitted on training data.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMode {
    /// Map to `[0, 1]`.
    Unit,
    /// Map to `[-1, 1]`.
    Symmetric,
    None,
}

impl ScaleMode {
    pub fn name(self) -> &'static str {
        match self {
            ScaleMode::Unit => "unit",
            ScaleMode::Symmetric => "symmetric",
            ScaleMode::None => "none",
        }
    }

    fn target(self) -> Option<(f64, f64)> {
        match self {
            ScaleMode::Unit => Some((0.0, 1.0)),
            ScaleMode::Symmetric => Some((-1.0, 1.0)),
            ScaleMode::None => None,
        }
    }
}

impl fmt::Display for ScaleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScaleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" | "[0,1]" | "0,1" => Ok(ScaleMode::Unit),
            "symmetric" | "[-1,1]" | "-1,1" => Ok(ScaleMode::Symmetric),
            "none" => Ok(ScaleMode::None),
            other => Err(Error::InvalidArgument(format!(
                "unknown scaling mode `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedRange {
    pub min: f64,
    pub max: f64,
}

impl ObservedRange {
    fn of(values: impl Iterator<Item = f64>) -> ObservedRange {
        values.fold(
            ObservedRange {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |r, v| ObservedRange {
                min: r.min.min(v),
                max: r.max.max(v),
            },
        )
    }
}

/// Affine map `scaled = offset + gain * original`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub offset: f64,
    pub gain: f64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        offset: 0.0,
        gain: 1.0,
    };

    pub fn apply(&self, x: f64) -> f64 {
        self.offset + self.gain * x
    }

    pub fn invert(&self, s: f64) -> f64 {
        (s - self.offset) / self.gain
    }
}

/// Per-feature and response scaling recorded from the training split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub mode: ScaleMode,
    pub features: Vec<ObservedRange>,
    pub response: ObservedRange,
}

impl ScalingSpec {
    pub fn identity(p: usize) -> ScalingSpec {
        let unit = ObservedRange { min: 0.0, max: 1.0 };
        ScalingSpec {
            mode: ScaleMode::None,
            features: vec![unit; p],
            response: unit,
        }
    }

    pub fn fit(xs: &[Vec<f64>], ys: &[f64], mode: ScaleMode) -> Result<ScalingSpec> {
        let p = xs.first().map(Vec::len).unwrap_or(0);
        if xs.is_empty() || p == 0 {
            return Err(Error::InvalidArgument(
                "scaling needs a non-empty design".into(),
            ));
        }
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                context: "scaling response",
                expected: xs.len(),
                actual: ys.len(),
            });
        }
        let features: Vec<ObservedRange> = (0..p)
            .map(|i| ObservedRange::of(xs.iter().map(|r| r[i])))
            .collect();
        let response = ObservedRange::of(ys.iter().copied());
        let spec = ScalingSpec {
            mode,
            features,
            response,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.features.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == ScaleMode::None {
            return Ok(());
        }
        let check = |r: &ObservedRange, what: String| {
            if r.min.is_finite() && r.max.is_finite() && r.max > r.min {
                Ok(())
            } else {
                Err(Error::DegenerateScaling(format!(
                    "{what} has range [{}, {}]",
                    r.min, r.max
                )))
            }
        };
        for (i, r) in self.features.iter().enumerate() {
            check(r, format!("feature x{}", i + 1))?;
        }
        check(&self.response, "response".into())
    }

    fn map_for(&self, r: &ObservedRange) -> AffineMap {
        match self.mode.target() {
            None => AffineMap::IDENTITY,
            Some((lo, hi)) => {
                let gain = (hi - lo) / (r.max - r.min);
                AffineMap {
                    offset: lo - gain * r.min,
                    gain,
                }
            }
        }
    }

    pub fn feature_map(&self, i: usize) -> AffineMap {
        self.map_for(&self.features[i])
    }

    pub fn response_map(&self) -> AffineMap {
        self.map_for(&self.response)
    }

    fn check_row(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.p() {
            return Err(Error::DimensionMismatch {
                context: "scaled row",
                expected: self.p(),
                actual: row.len(),
            });
        }
        Ok(())
    }

    pub fn scale_x(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let maps: Vec<AffineMap> = (0..self.p()).map(|i| self.feature_map(i)).collect();
        xs.iter()
            .map(|row| {
                self.check_row(row)?;
                Ok(row.iter().zip(&maps).map(|(&x, m)| m.apply(x)).collect())
            })
            .collect()
    }

    pub fn unscale_x(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let maps: Vec<AffineMap> = (0..self.p()).map(|i| self.feature_map(i)).collect();
        xs.iter()
            .map(|row| {
                self.check_row(row)?;
                Ok(row.iter().zip(&maps).map(|(&s, m)| m.invert(s)).collect())
            })
            .collect()
    }

    pub fn scale_y(&self, ys: &[f64]) -> Vec<f64> {
        let m = self.response_map();
        ys.iter().map(|&y| m.apply(y)).collect()
    }

    pub fn unscale_y(&self, ys: &[f64]) -> Vec<f64> {
        let m = self.response_map();
        ys.iter().map(|&s| m.invert(s)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn from_json(text: &str, origin: &std::path::Path) -> Result<ScalingSpec> {
        let spec: ScalingSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            kind: "scaling",
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let xs = vec![vec![1.0, -4.0], vec![3.0, 0.0], vec![2.0, 6.0]];
        (xs, vec![10.0, 20.0, 15.0])
    }

    #[test]
    fn unit_mode_maps_extremes() {
        let (xs, ys) = data();
        let spec = ScalingSpec::fit(&xs, &ys, ScaleMode::Unit).unwrap();
        let s = spec.scale_x(&xs).unwrap();
        assert_eq!(s[0][0], 0.0);
        assert_eq!(s[1][0], 1.0);
        assert_eq!(s[0][1], 0.0);
        assert_eq!(s[2][1], 1.0);
        assert_eq!(spec.scale_y(&ys), vec![0.0, 1.0, 0.5]);
    }

    #[test]
    fn symmetric_mode_maps_extremes() {
        let (xs, ys) = data();
        let spec = ScalingSpec::fit(&xs, &ys, ScaleMode::Symmetric).unwrap();
        let s = spec.scale_x(&xs).unwrap();
        assert_eq!(s[0][0], -1.0);
        assert_eq!(s[1][0], 1.0);
        assert_eq!(spec.scale_y(&ys), vec![-1.0, 1.0, 0.0]);
    }

    #[test]
    fn constant_column_is_rejected() {
        let xs = vec![vec![1.0, 2.0], vec![1.0, 3.0]];
        let err = ScalingSpec::fit(&xs, &[0.0, 1.0], ScaleMode::Unit).unwrap_err();
        assert!(err.to_string().contains("x1"), "{err}");
        assert!(ScalingSpec::fit(&xs, &[0.0, 1.0], ScaleMode::None).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let (xs, ys) = data();
        let spec = ScalingSpec::fit(&xs, &ys, ScaleMode::Symmetric).unwrap();
        let back =
            ScalingSpec::from_json(&spec.to_json().unwrap(), std::path::Path::new("s")).unwrap();
        assert_eq!(back, spec);
    }

    proptest! {
        #[test]
        fn invert_after_apply_is_identity(
            rows in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 2..30),
            mode in prop_oneof![Just(ScaleMode::Unit), Just(ScaleMode::Symmetric), Just(ScaleMode::None)],
        ) {
            let ys: Vec<f64> = rows.iter().map(|r| r[0] * 2.0 - r[2]).collect();
            if let Ok(spec) = ScalingSpec::fit(&rows, &ys, mode) {
                let back = spec.unscale_x(&spec.scale_x(&rows).unwrap()).unwrap();
                for (a, b) in rows.iter().flatten().zip(back.iter().flatten()) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                }
                let yb = spec.unscale_y(&spec.scale_y(&ys));
                for (a, b) in ys.iter().zip(&yb) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
                }
            }
        }
    }
}
