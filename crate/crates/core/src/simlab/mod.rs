//! Simulation study: synthetic polynomial data, scaled and split, fitted by a
//! network, transcoded, and compared.

mod batch;
mod config;
mod data;
mod experiment;
mod study;
mod surface;

pub use batch::{
    median, quantile, run_batch, run_mixed_batch, run_seed, summarize, write_records,
    write_summary, BatchResult, BatchRow, CellSummary, GridConfig, RECORD_COLUMNS, SUMMARY_COLUMNS,
};
pub use config::{RunSettings, SimulationConfig};
pub use data::{generate_data, split, DataGenConfig, Dataset, Split};
pub use experiment::{
    mse, run_experiment, variance, Cell, ExperimentConfig, ExperimentRecord, PreparedData,
    TrainedRun, WeightStats,
};
pub use study::{run_study, StudyConfig, StudyNet, StudyResult};
pub use surface::{
    max_abs_difference, surface_grid, write_surface, Bounds2, SurfacePoint, EXTENDED_FACTOR,
};
