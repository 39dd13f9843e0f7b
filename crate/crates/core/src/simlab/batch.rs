//! Repeated experiments over a grid of cells, with quantile summaries and CSV export.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::{Cell, ExperimentConfig, ExperimentRecord, TrainedRun};
use crate::activations::Activation;
use crate::error::{Error, Result};
use crate::numfmt::sig17;
use crate::scaling::ScaleMode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub activations: Vec<Activation>,
    pub scalings: Vec<ScaleMode>,
    pub hidden: Vec<usize>,
    pub orders: Vec<u32>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            activations: Activation::PAPER_SET.to_vec(),
            scalings: vec![ScaleMode::Unit, ScaleMode::Symmetric],
            hidden: vec![4, 10],
            orders: vec![3, 5, 7],
        }
    }
}

impl GridConfig {
    /// Cells in axis order: activation, scaling, hidden units, Taylor order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &activation in &self.activations {
            for &scaling in &self.scalings {
                for &h1 in &self.hidden {
                    for &order in &self.orders {
                        out.push(Cell {
                            activation,
                            scaling,
                            h1,
                            order,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells().is_empty() {
            return Err(Error::InvalidArgument(
                "experiment grid has no cells".into(),
            ));
        }
        Ok(())
    }
}

/// Seed of repetition `index` in a batch with base seed `base`.
pub fn run_seed(base: u64, index: usize) -> u64 {
    base ^ index as u64
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchRow {
    pub cell: Cell,
    pub rep: usize,
    pub seed: u64,
    /// Failed runs keep their error message; the batch carries on.
    pub outcome: std::result::Result<ExperimentRecord, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub runs: usize,
    pub failed: usize,
    pub mse_q10: f64,
    pub mse_q50: f64,
    pub mse_q90: f64,
    pub median_mse_nn_y: f64,
    pub median_coverage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchResult {
    pub rows: Vec<BatchRow>,
    pub summary: Vec<CellSummary>,
}

impl BatchResult {
    pub fn cell_summary(&self, cell: &Cell) -> Option<&CellSummary> {
        self.summary.iter().find(|s| &s.cell == cell)
    }

    pub fn records(&self) -> impl Iterator<Item = &ExperimentRecord> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().ok())
    }
}

/// Runs `reps` repetitions of every grid cell. Networks are trained once per
/// (activation, scaling, hidden units, repetition) and transcoded at every
/// order, since training does not depend on the Taylor order.
pub fn run_batch(
    base: &ExperimentConfig,
    grid: &GridConfig,
    reps: usize,
    base_seed: u64,
) -> Result<BatchResult> {
    if reps == 0 {
        return Err(Error::InvalidArgument(
            "repetitions must be at least 1".into(),
        ));
    }
    grid.validate()?;
    let cells = grid.cells();
    let mut jobs = Vec::new();
    for &activation in &grid.activations {
        for &scaling in &grid.scalings {
            for &h1 in &grid.hidden {
                for rep in 0..reps {
                    jobs.push((activation, scaling, h1, rep));
                }
            }
        }
    }

    let mut rows: Vec<BatchRow> = jobs
        .par_iter()
        .flat_map_iter(|&(activation, scaling, h1, rep)| {
            let seed = run_seed(base_seed, rep);
            let cfg = ExperimentConfig {
                activation,
                scaling,
                h1,
                ..base.clone()
            };
            let trained = TrainedRun::train(&cfg, seed);
            grid.orders
                .iter()
                .map(|&order| {
                    let cell = Cell {
                        activation,
                        scaling,
                        h1,
                        order,
                    };
                    let outcome = match &trained {
                        Ok(t) => t
                            .measure(scaling, order, cfg.epsilon)
                            .map_err(|e| e.to_string()),
                        Err(e) => Err(e.to_string()),
                    };
                    BatchRow {
                        cell,
                        rep,
                        seed,
                        outcome,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let position = |c: &Cell| cells.iter().position(|k| k == c).unwrap_or(usize::MAX);
    rows.sort_by_key(|r| (position(&r.cell), r.rep));
    let summary = summarize(&cells, &rows);
    Ok(BatchResult { rows, summary })
}

/// `runs` experiments cycling through the grid cells: run `k` uses cell
/// `k mod cells` and seed `base_seed ^ k`.
pub fn run_mixed_batch(
    base: &ExperimentConfig,
    grid: &GridConfig,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<BatchRow>> {
    grid.validate()?;
    let cells = grid.cells();
    Ok((0..runs)
        .into_par_iter()
        .map(|k| {
            let cell = cells[k % cells.len()];
            let seed = run_seed(base_seed, k);
            let outcome = super::experiment::run_experiment(&base.with_cell(cell), seed)
                .map_err(|e| e.to_string());
            BatchRow {
                cell,
                rep: k,
                seed,
                outcome,
            }
        })
        .collect())
}

pub fn summarize(cells: &[Cell], rows: &[BatchRow]) -> Vec<CellSummary> {
    cells
        .iter()
        .map(|cell| {
            let in_cell: Vec<&BatchRow> = rows.iter().filter(|r| &r.cell == cell).collect();
            let ok: Vec<&ExperimentRecord> = in_cell
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok())
                .collect();
            let sorted = |f: fn(&ExperimentRecord) -> f64| {
                let mut v: Vec<f64> = ok.iter().map(|r| f(r)).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            let mse = sorted(|r| r.mse_nn_pr);
            CellSummary {
                cell: *cell,
                runs: in_cell.len(),
                failed: in_cell.len() - ok.len(),
                mse_q10: quantile(&mse, 0.1),
                mse_q50: quantile(&mse, 0.5),
                mse_q90: quantile(&mse, 0.9),
                median_mse_nn_y: quantile(&sorted(|r| r.mse_nn_y), 0.5),
                median_coverage: quantile(&sorted(|r| r.coverage), 0.5),
            }
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data (NaN for empty input).
pub fn quantile(sorted: &[f64], prob: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = prob.clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

pub const RECORD_COLUMNS: [&str; 17] = [
    "activation",
    "scaling",
    "h1",
    "order",
    "rep",
    "seed",
    "mse_nn_pr",
    "mse_nn_y",
    "var_nn",
    "coverage",
    "mean_abs_w",
    "max_abs_w",
    "mean_abs_v",
    "epochs",
    "converged",
    "status",
    "error",
];

/// One row per run. Wall time is left out so that tables are reproducible byte for byte.
pub fn write_records<W: Write>(rows: &[BatchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for row in rows {
        let mut fields = vec![
            row.cell.activation.to_string(),
            row.cell.scaling.to_string(),
            row.cell.h1.to_string(),
            row.cell.order.to_string(),
            row.rep.to_string(),
            row.seed.to_string(),
        ];
        match &row.outcome {
            Ok(r) => {
                fields.extend(
                    [
                        r.mse_nn_pr,
                        r.mse_nn_y,
                        r.var_nn,
                        r.coverage,
                        r.weights.mean_abs_w,
                        r.weights.max_abs_w,
                        r.weights.mean_abs_v,
                    ]
                    .map(sig17),
                );
                fields.push(r.epochs.to_string());
                fields.push(r.converged.to_string());
                fields.push("ok".into());
                fields.push(String::new());
            }
            Err(msg) => {
                fields.extend(std::iter::repeat_n(String::new(), 9));
                fields.push("failed".into());
                fields.push(msg.clone());
            }
        }
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| Error::io("records table", e))?;
    Ok(())
}

pub const SUMMARY_COLUMNS: [&str; 11] = [
    "activation",
    "scaling",
    "h1",
    "order",
    "runs",
    "failed",
    "mse_q10",
    "mse_q50",
    "mse_q90",
    "median_mse_nn_y",
    "median_coverage",
];

pub fn write_summary<W: Write>(summary: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for s in summary {
        let mut fields = vec![
            s.cell.activation.to_string(),
            s.cell.scaling.to_string(),
            s.cell.h1.to_string(),
            s.cell.order.to_string(),
            s.runs.to_string(),
            s.failed.to_string(),
        ];
        fields.extend(
            [
                s.mse_q10,
                s.mse_q50,
                s.mse_q90,
                s.median_mse_nn_y,
                s.median_coverage,
            ]
            .map(|v| {
                if v.is_finite() {
                    sig17(v)
                } else {
                    String::new()
                }
            }),
        );
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| Error::io("summary table", e))?;
    Ok(())
}
