//! Convert the weights of a single-hidden-layer regression network into an
//! explicit multivariate polynomial, and run the simulation study that
//! measures how faithful that polynomial is.

pub mod activations;
pub mod combi;
pub mod error;
pub mod nn;
pub mod numfmt;
pub mod poly;
pub mod scaling;
pub mod simlab;
pub mod table;
pub mod transcode;

pub use activations::{taylor_coeffs, valid_range, Activation, TaylorSeries, ValidRange};
pub use error::{Error, Result};
pub use nn::{train_rprop, NetworkWeights, TrainConfig, TrainTrace};
pub use poly::{coefficient_distance, monomials_up_to, ols_fit, MultiIndex, Polynomial};
pub use scaling::{ScaleMode, ScalingSpec};
pub use simlab::{run_batch, run_experiment, run_study, ExperimentConfig, SimulationConfig};
pub use transcode::{
    coverage, nn_to_poly, rescale_to_original, taylor_truncated_output, CoverageReport,
    TranscodeResult,
};
