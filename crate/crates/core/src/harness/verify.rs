use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::generate::generate_instances;
use super::HarnessError;
use crate::analysis::{security_threshold, AnalysisError, ThresholdReport};
use crate::election::VotingSystem;
use crate::lp::{build_bounding, build_plain, solve_lp, Side};
use crate::mechanism::{central_realization, posterior_matrix, DesignMatrix, Epsilon, Mechanism};

/// δ values at which the ordering `lower ≤ plain ≤ upper` is checked.
pub const SANDWICH_DELTAS: [f64; 4] = [0.0, 0.001, 0.01, 0.05];

/// Slack on the ordering checks, relative to `n`.
const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichSummary {
    pub mechanism: Mechanism,
    /// `(instance, ε)` cells averaged over (attack-free cells are skipped).
    pub cells: usize,
    /// Mean of `|OPT_upper((1−band)τ̂, δ) − OPT(τ̂)| / OPT(τ̂)`.
    pub upper_deviation: f64,
    /// Mean of `|OPT_lower((1+band)τ̂, δ) − OPT(τ̂)| / OPT(τ̂)`.
    pub lower_deviation: f64,
    /// Cells whose perturbed upper program was infeasible and charged `n`.
    pub upper_infeasible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub delta: f64,
    pub band: f64,
    pub mechanisms: Vec<SandwichSummary>,
    /// Ordering checks performed over instances, ε and [`SANDWICH_DELTAS`].
    pub order_checks: usize,
    /// `(instance, mechanism, ε, δ)` where the ordering failed.
    pub order_violations: Vec<(usize, Mechanism, f64, f64)>,
}

impl SandwichReport {
    pub fn max_deviation(&self) -> f64 {
        self.mechanisms
            .iter()
            .flat_map(|s| [s.upper_deviation, s.lower_deviation])
            .fold(0.0, f64::max)
    }
}

struct Cell {
    upper_dev: f64,
    lower_dev: f64,
    upper_infeasible: bool,
    violations: Vec<f64>,
}

fn sandwich_cell(system: &VotingSystem, mechanism: Mechanism, eps: f64, delta: f64, band: f64) -> Result<Option<Cell>, HarnessError> {
    let n = system.voters() as f64;
    let p = DesignMatrix::build(mechanism, system.candidates(), Epsilon::Finite(eps))?;
    let q = posterior_matrix(&p, system)?;
    let tau_hat = central_realization(&p, system)?.tau_hat;
    let cost = |sol: crate::lp::DeletionSolution| if sol.is_optimal() { sol.objective_value } else { n };

    let plain = solve_lp(&build_plain(system, &q, &tau_hat)?)?;
    if !plain.is_optimal() || plain.objective_value <= 0.0 {
        return Ok(None);
    }
    let base = plain.objective_value;

    let shrunk: Vec<f64> = tau_hat.iter().map(|t| (1.0 - band) * t).collect();
    let grown: Vec<f64> = tau_hat.iter().map(|t| (1.0 + band) * t).collect();
    let upper = solve_lp(&build_bounding(system, &q, &shrunk, delta, Side::Upper)?)?;
    let upper_infeasible = !upper.is_optimal();
    let upper_v = cost(upper);
    let lower_v = cost(solve_lp(&build_bounding(system, &q, &grown, delta, Side::Lower)?)?);

    let mut violations = Vec::new();
    for d in SANDWICH_DELTAS {
        let up = solve_lp(&build_bounding(system, &q, &tau_hat, d, Side::Upper)?)?;
        let lo = solve_lp(&build_bounding(system, &q, &tau_hat, d, Side::Lower)?)?;
        let up_v = if up.is_optimal() { up.objective_value } else { f64::INFINITY };
        let lo_v = if lo.is_optimal() { lo.objective_value } else { f64::INFINITY };
        if lo_v > base + ORDER_TOL * n || base > up_v + ORDER_TOL * n {
            violations.push(d);
        }
    }
    Ok(Some(Cell {
        upper_dev: (upper_v - base).abs() / base,
        lower_dev: (lower_v - base).abs() / base,
        upper_infeasible,
        violations,
    }))
}

/// Compares the strengthened program on `(1−band)τ̂` and the relaxed program
/// on `(1+band)τ̂` with LP(τ̂), over every instance and grid point. An
/// infeasible perturbed program is charged `n`, the cost of deleting everyone.
pub fn verify_sandwich(config: &ExperimentConfig) -> Result<SandwichReport, HarnessError> {
    config.validate()?;
    let systems = generate_instances(config)?;
    let grid = config.grid.points();
    let mut mechanisms = Vec::new();
    let mut order_checks = 0;
    let mut order_violations = Vec::new();
    for &mechanism in &config.mechanisms {
        let cells_per_instance = grid.len();
        let cells = config.execution.map(systems.len() * cells_per_instance, |k| {
            let i = k / cells_per_instance;
            let eps = grid[k % cells_per_instance];
            sandwich_cell(&systems[i], mechanism, eps, config.delta, config.band).map(|c| (i, eps, c))
        });
        let mut summary = SandwichSummary {
            mechanism,
            cells: 0,
            upper_deviation: 0.0,
            lower_deviation: 0.0,
            upper_infeasible: 0,
        };
        for cell in cells {
            let (i, eps, cell) = cell?;
            let Some(cell) = cell else { continue };
            summary.cells += 1;
            summary.upper_deviation += cell.upper_dev;
            summary.lower_deviation += cell.lower_dev;
            summary.upper_infeasible += usize::from(cell.upper_infeasible);
            order_checks += SANDWICH_DELTAS.len();
            order_violations.extend(cell.violations.into_iter().map(|d| (i, mechanism, eps, d)));
        }
        if summary.cells > 0 {
            summary.upper_deviation /= summary.cells as f64;
            summary.lower_deviation /= summary.cells as f64;
        }
        mechanisms.push(summary);
    }
    Ok(SandwichReport { delta: config.delta, band: config.band, mechanisms, order_checks, order_violations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub instance_id: usize,
    pub mechanism: Mechanism,
    pub lambda: Vec<f64>,
    #[serde(flatten)]
    pub report: Option<ThresholdReport>,
    /// `ok`, or the reason no threshold was computed.
    pub status: String,
}

/// One threshold row per instance and mechanism; hypothesis violations
/// become status rows instead of aborting.
pub fn report_threshold(config: &ExperimentConfig) -> Result<Vec<ThresholdRow>, HarnessError> {
    config.validate()?;
    let systems = generate_instances(config)?;
    let mut rows = Vec::new();
    for (instance_id, system) in systems.iter().enumerate() {
        for &mechanism in &config.mechanisms {
            let (report, status) = match security_threshold(system, mechanism) {
                Ok(r) => (Some(r), "ok".to_string()),
                Err(e @ AnalysisError::HypothesisViolated { .. }) => (None, format!("hypothesis-violated: {e}")),
                Err(e) => (None, format!("error: {e}")),
            };
            rows.push(ThresholdRow { instance_id, mechanism, lambda: system.lambda().to_vec(), report, status });
        }
    }
    Ok(rows)
}
