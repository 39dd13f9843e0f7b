//! Whole-study configuration, as read from a config file.

use serde::{Deserialize, Serialize};

use super::batch::GridConfig;
use super::data::DataGenConfig;
use super::experiment::ExperimentConfig;
use super::study::StudyConfig;
use crate::activations::DEFAULT_EPSILON;
use crate::error::{Error, Result};
use crate::nn::TrainConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    /// Repetitions per grid cell.
    pub reps: usize,
    pub seed: u64,
    pub fixed_data: bool,
    pub train_fraction: f64,
    pub epsilon: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            reps: 50,
            seed: 0,
            fixed_data: false,
            train_fraction: 0.75,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub data: DataGenConfig,
    pub grid: GridConfig,
    pub train: TrainConfig,
    pub run: RunSettings,
    pub study: StudyConfig,
}

impl SimulationConfig {
    /// Base experiment; the grid overrides activation, scaling, width and order.
    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            data: self.data.clone(),
            train_fraction: self.run.train_fraction,
            epsilon: self.run.epsilon,
            fixed_data: self.run.fixed_data,
            train: self.train.clone(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.data.validate()?;
        self.grid.validate()?;
        self.train.validate()?;
        if self.run.reps == 0 {
            return Err(Error::InvalidArgument("run.reps must be at least 1".into()));
        }
        if !(self.run.train_fraction > 0.0 && self.run.train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "run.train_fraction must lie in (0, 1), got {}",
                self.run.train_fraction
            )));
        }
        if !(self.run.epsilon > 0.0 && self.run.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "run.epsilon must be positive, got {}",
                self.run.epsilon
            )));
        }
        Ok(())
    }
}
