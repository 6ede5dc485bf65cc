//! The deletion programs: LP(τ), the δ-strengthened upper program and the
//! δ-relaxed lower program, over per-reported-type deletion counts `x`.
//!
//! Row `i` (for every non-designated candidate) keeps the expected margin of
//! the designated candidate non-negative after deletions:
//!
//! ```text
//! Σ_j (q_ij − q_1j) x_j ∓ δ Σ_j (q_1j + q_ij) x_j ≥ n (λ_i − λ_1),   0 ≤ x_j ≤ n τ_j
//! ```

mod branch;
mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::election::{VotingSystem, DESIGNATED};
use crate::mechanism::{check_sign_condition, ColumnSign, PosteriorMatrix};

pub use branch::ILP_MAX_VOTERS;

/// Largest candidate count the dense solver accepts.
pub const MAX_CANDIDATES: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("negative bounding parameter δ = {0}")]
    NegativeDelta(f64),
    #[error("{0} candidates exceed the dense solver limit of {MAX_CANDIDATES}")]
    TooLarge(usize),
    #[error("exact integer oracle is limited to n ≤ {ILP_MAX_VOTERS}, got {0}")]
    OracleTooLarge(u64),
    #[error("box bound {value} on x_{index} is not an integer")]
    NonIntegralBounds { index: usize, value: f64 },
    #[error("posterior has {posterior} candidates but the realization has {realization}")]
    DimensionMismatch { posterior: usize, realization: usize },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("optimum failed certification: {0}")]
    Numerical(String),
    #[error("sign condition fails on columns {0:?}")]
    SignCondition(Vec<usize>),
    #[error("robustness constants undefined: q_{row}{column} = q_1{column} on a retained column")]
    UndefinedConstants { row: usize, column: usize },
    #[error("no retained column: every column is all-negative")]
    NoRetainedColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "delta")]
pub enum Variant {
    Plain,
    Upper(f64),
    Lower(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeletionProblem {
    /// One row per non-designated candidate, in candidate order.
    pub coeffs: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// Box `x_j ≤ n τ_j`.
    pub upper: Vec<f64>,
    pub variant: Variant,
}

impl DeletionProblem {
    pub fn vars(&self) -> usize {
        self.upper.len()
    }

    /// Largest constraint violation of `x`, zero when feasible.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let ones = vec![1.0; self.vars()];
        simplex::Program { cost: &ones, rows: &self.coeffs, rhs: &self.rhs, upper: &self.upper }.max_violation(x)
    }

    /// Whether `x` satisfies every row and the box, within the relative
    /// feasibility tolerance of the solver.
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        let ones = vec![1.0; self.vars()];
        let p = simplex::Program { cost: &ones, rows: &self.coeffs, rhs: &self.rhs, upper: &self.upper };
        p.max_violation(x) <= simplex::FEAS_TOL * p.scale() * 10.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeletionSolution {
    /// Empty when infeasible.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub status: Status,
}

impl DeletionSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    fn infeasible() -> Self {
        Self { x: Vec::new(), objective_value: f64::INFINITY, status: Status::Infeasible }
    }
}

fn check_dims(system: &VotingSystem, q: &PosteriorMatrix, tau: &[f64]) -> Result<(), LpError> {
    let m = system.candidates();
    if m > MAX_CANDIDATES {
        return Err(LpError::TooLarge(m));
    }
    if q.candidates() != m || tau.len() != m {
        return Err(LpError::DimensionMismatch { posterior: q.candidates(), realization: tau.len() });
    }
    Ok(())
}

fn build(system: &VotingSystem, q: &PosteriorMatrix, tau: &[f64], variant: Variant) -> DeletionProblem {
    let m = system.candidates();
    let n = system.voters() as f64;
    let lambda = system.lambda();
    let d = DESIGNATED;
    let (sign, delta) = match variant {
        Variant::Plain => (0.0, 0.0),
        Variant::Upper(delta) => (-1.0, delta),
        Variant::Lower(delta) => (1.0, delta),
    };
    let mut coeffs = Vec::with_capacity(m - 1);
    let mut rhs = Vec::with_capacity(m - 1);
    for i in (0..m).filter(|&i| i != d) {
        let row = (0..m)
            .map(|j| {
                let base = q.prob(i, j) - q.prob(d, j);
                if sign == 0.0 {
                    base
                } else {
                    base + sign * delta * (q.prob(d, j) + q.prob(i, j))
                }
            })
            .collect();
        coeffs.push(row);
        rhs.push(n * (lambda[i] - lambda[d]));
    }
    let upper = tau.iter().map(|t| n * t).collect();
    DeletionProblem { coeffs, rhs, upper, variant }
}

/// LP(τ): keep the expected margin of the designated candidate non-negative.
pub fn build_plain(system: &VotingSystem, q: &PosteriorMatrix, tau: &[f64]) -> Result<DeletionProblem, LpError> {
    check_dims(system, q, tau)?;
    Ok(build(system, q, tau, Variant::Plain))
}

/// The δ-strengthened (`Side::Upper`) or δ-relaxed (`Side::Lower`) program.
pub fn build_bounding(
    system: &VotingSystem,
    q: &PosteriorMatrix,
    tau: &[f64],
    delta: f64,
    side: Side,
) -> Result<DeletionProblem, LpError> {
    if !(delta >= 0.0) {
        return Err(LpError::NegativeDelta(delta));
    }
    check_dims(system, q, tau)?;
    let variant = match side {
        Side::Upper => Variant::Upper(delta),
        Side::Lower => Variant::Lower(delta),
    };
    Ok(build(system, q, tau, variant))
}

/// Minimizes `Σ x_j`. The optimum carries a verified dual certificate.
pub fn solve_lp(problem: &DeletionProblem) -> Result<DeletionSolution, LpError> {
    let ones = vec![1.0; problem.vars()];
    solve_weighted(&ones, &problem.coeffs, &problem.rhs, &problem.upper)
}

/// Minimizes `cost·x` over `rows·x ≥ rhs, 0 ≤ x ≤ upper` with the same
/// certified solver; `cost` must be non-negative.
pub fn solve_weighted(cost: &[f64], rows: &[Vec<f64>], rhs: &[f64], upper: &[f64]) -> Result<DeletionSolution, LpError> {
    let program = simplex::Program { cost, rows, rhs, upper };
    Ok(match simplex::solve(&program)? {
        simplex::Outcome::Infeasible => DeletionSolution::infeasible(),
        simplex::Outcome::Optimal(opt) => {
            DeletionSolution { x: opt.x, objective_value: opt.objective, status: Status::Optimal }
        }
    })
}

/// Exact integer optimum by branch and bound (desk-scale oracle only).
pub fn solve_ilp_exact(problem: &DeletionProblem) -> Result<DeletionSolution, LpError> {
    branch::solve(problem)
}

/// Constants of the robustness argument, over the columns kept after
/// removing all-negative ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessConstants {
    pub c0: f64,
    pub c1: f64,
    /// `q_min (λ_max − λ_1)`, with `q_min` the smallest posterior entry.
    pub c: f64,
}

pub fn robustness_constants(q: &PosteriorMatrix, system: &VotingSystem) -> Result<RobustnessConstants, LpError> {
    let m = q.candidates();
    let report = check_sign_condition(q);
    if !report.passed() {
        return Err(LpError::SignCondition(report.offending_columns()));
    }
    let retained: Vec<usize> = (0..m).filter(|&j| report.columns[j] == ColumnSign::AllPositive).collect();
    if retained.is_empty() {
        return Err(LpError::NoRetainedColumn);
    }
    let d = DESIGNATED;
    let mut max_diff = f64::NEG_INFINITY;
    let mut min_diff = f64::INFINITY;
    let mut c1 = f64::NEG_INFINITY;
    for &j in &retained {
        for i in (0..m).filter(|&i| i != d) {
            let diff = q.prob(i, j) - q.prob(d, j);
            if diff == 0.0 {
                return Err(LpError::UndefinedConstants { row: i + 1, column: j + 1 });
            }
            max_diff = max_diff.max(diff);
            min_diff = min_diff.min(diff);
            c1 = c1.max((q.prob(i, j) + q.prob(d, j)) / diff);
        }
    }
    let q_min = q.matrix().rows().iter().flatten().copied().fold(f64::INFINITY, f64::min);
    Ok(RobustnessConstants { c0: max_diff / min_diff, c1, c: q_min * system.gap() })
}

/// Measured robustness ratios at one δ:
/// `(OPT_upper/OPT_plain − 1)/δ` and `(OPT_plain/OPT_lower − 1)/δ`.
/// `None` for a side whose program is infeasible or whose denominator is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichRatios {
    pub delta: f64,
    pub lower: f64,
    pub plain: f64,
    pub upper: Option<f64>,
    pub upper_slope: Option<f64>,
    pub lower_slope: Option<f64>,
}

pub fn sandwich(system: &VotingSystem, q: &PosteriorMatrix, tau: &[f64], delta: f64) -> Result<SandwichRatios, LpError> {
    let plain = solve_lp(&build_plain(system, q, tau)?)?;
    let upper = solve_lp(&build_bounding(system, q, tau, delta, Side::Upper)?)?;
    let lower = solve_lp(&build_bounding(system, q, tau, delta, Side::Lower)?)?;
    let plain_v = plain.objective_value;
    let lower_v = lower.objective_value;
    let upper_v = upper.is_optimal().then_some(upper.objective_value);
    let slope = |num: f64, den: f64| (den > 0.0 && delta > 0.0).then(|| (num / den - 1.0) / delta);
    Ok(SandwichRatios {
        delta,
        lower: lower_v,
        plain: plain_v,
        upper: upper_v,
        upper_slope: upper_v.and_then(|u| slope(u, plain_v)),
        lower_slope: slope(plain_v, lower_v),
    })
}
