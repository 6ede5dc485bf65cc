use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Generator};
use super::generate::generate_instances;
use super::HarnessError;
use crate::analysis::{evaluate, AnalysisError};
use crate::election::{classical_cost, VotingSystem};
use crate::mechanism::{DesignMatrix, Epsilon, Mechanism};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Ok,
    /// The value was computed but the sign condition does not hold.
    ConditionFailed,
    AttackFree,
    Error,
}

/// One `(instance, mechanism, ε)` cell of a sweep, in CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub instance_id: usize,
    pub mechanism: Mechanism,
    pub m: usize,
    pub n: u64,
    pub phi: f64,
    pub epsilon: f64,
    pub apoldp: Option<f64>,
    pub opt_lp: Option<f64>,
    pub classical_cost: u64,
    pub at_plateau: Option<bool>,
    pub condition_passed: Option<bool>,
    pub status: RowStatus,
}

pub const CSV_HEADER: &str =
    "instance_id,mechanism,m,n,phi,epsilon,apoldp,opt_lp,classical_cost,at_plateau,condition_passed,status";

fn instance_phi(config: &ExperimentConfig, system: &VotingSystem) -> f64 {
    match config.generator {
        Generator::FixedGap { phi } => phi,
        _ => system.gap(),
    }
}

pub fn evaluate_cell(
    instance_id: usize,
    system: &VotingSystem,
    phi: f64,
    mechanism: Mechanism,
    epsilon: f64,
) -> CurvePoint {
    let mut row = CurvePoint {
        instance_id,
        mechanism,
        m: system.candidates(),
        n: system.voters(),
        phi,
        epsilon,
        apoldp: None,
        opt_lp: None,
        classical_cost: classical_cost(system),
        at_plateau: None,
        condition_passed: None,
        status: RowStatus::Error,
    };
    let result = DesignMatrix::build(mechanism, system.candidates(), Epsilon::Finite(epsilon))
        .map_err(AnalysisError::from)
        .and_then(|p| evaluate(system, &p));
    match result {
        Ok(r) => {
            row.apoldp = Some(r.value);
            row.opt_lp = Some(r.opt_lp);
            row.at_plateau = Some(r.at_plateau);
            row.condition_passed = Some(r.condition_passed);
            row.status = if r.condition_passed || system.candidates() == 2 {
                RowStatus::Ok
            } else {
                RowStatus::ConditionFailed
            };
        }
        Err(AnalysisError::AttackFree) => row.status = RowStatus::AttackFree,
        Err(_) => row.status = RowStatus::Error,
    }
    row
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub mechanism: Mechanism,
    pub epsilon: f64,
    /// Rows with a computed value.
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single row.
    pub std: f64,
    /// Percentage of instances whose value is at least 99% of their
    /// ε → 0 value `n / f(S)`.
    pub maximal_percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub config: ExperimentConfig,
    pub rows: Vec<CurvePoint>,
    pub summary: Vec<SummaryRow>,
}

impl SweepOutput {
    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.status != RowStatus::Ok)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), HarnessError> {
        write_rows_csv(&self.rows, out)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), HarnessError> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

/// CSV with a mandatory header, `\n` line endings and shortest round-trip floats.
pub fn write_rows_csv<W: Write>(rows: &[CurvePoint], out: W) -> Result<(), HarnessError> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn summarize(rows: &[CurvePoint], mechanisms: &[Mechanism], grid: &[f64]) -> Vec<SummaryRow> {
    let mut summary = Vec::new();
    for &mechanism in mechanisms {
        for &epsilon in grid {
            let cell: Vec<&CurvePoint> = rows
                .iter()
                .filter(|r| r.mechanism == mechanism && r.epsilon == epsilon && r.apoldp.is_some())
                .collect();
            let values: Vec<f64> = cell.iter().filter_map(|r| r.apoldp).collect();
            let count = values.len();
            let mean = if count == 0 { f64::NAN } else { values.iter().sum::<f64>() / count as f64 };
            let std = if count < 2 {
                0.0
            } else {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
            };
            let maximal = cell
                .iter()
                .filter(|r| {
                    let plateau = r.n as f64 / r.classical_cost as f64;
                    r.apoldp.unwrap_or(0.0) >= 0.99 * plateau
                })
                .count();
            let maximal_percentage = if count == 0 { f64::NAN } else { 100.0 * maximal as f64 / count as f64 };
            summary.push(SummaryRow { mechanism, epsilon, count, mean, std, maximal_percentage });
        }
    }
    summary
}

/// Every instance × mechanism × grid point, in that nesting order.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepOutput, HarnessError> {
    config.validate()?;
    let systems = generate_instances(config)?;
    let grid = config.grid.points();
    let mechanisms = &config.mechanisms;
    let per_instance = mechanisms.len() * grid.len();
    let rows = config.execution.map(systems.len() * per_instance, |k| {
        let instance = k / per_instance;
        let mechanism = mechanisms[(k % per_instance) / grid.len()];
        let epsilon = grid[k % grid.len()];
        let system = &systems[instance];
        evaluate_cell(instance, system, instance_phi(config, system), mechanism, epsilon)
    });
    let summary = summarize(&rows, mechanisms, &grid);
    Ok(SweepOutput { config: config.clone(), rows, summary })
}
