//! Experiment configuration, instance generation and the batch drivers
//! behind the command-line tool.

mod config;
mod generate;
mod suite;
mod sweep;
mod verify;

use thiserror::Error;

pub use config::{EpsilonGrid, ExperimentConfig, Generator, DEFAULT_LP_VOTERS, DEFAULT_SIM_VOTERS};
pub use generate::{
    generate_dirichlet, generate_dirichlet_with, generate_fixed_gap, generate_fixed_gap_with, generate_instances,
    sample_dirichlet_raw, MAX_GENERATION_ATTEMPTS,
};
pub use suite::{
    chernoff_check, oracle_comparisons, verify_suite, Check, ChernoffCheck, OracleComparison, CHERNOFF_DELTA,
    CHERNOFF_TARGET, CHERNOFF_VOTERS,
};
pub use sweep::{
    evaluate_cell, summarize, sweep, write_rows_csv, CurvePoint, RowStatus, SummaryRow, SweepOutput, CSV_HEADER,
};
pub use verify::{report_threshold, verify_sandwich, SandwichReport, SandwichSummary, ThresholdRow, SANDWICH_DELTAS};

use crate::analysis::AnalysisError;
use crate::election::ElectionError;
use crate::lp::LpError;
use crate::mechanism::MechanismError;
use crate::simulation::SimulationError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no instance with m = {m} and gap {phi} after {attempts} attempts")]
    GenerationFailed { m: usize, phi: f64, attempts: usize },
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
