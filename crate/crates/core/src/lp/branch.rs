//! Depth-first branch and bound over integer deletion counts.

use super::simplex::{self, Outcome, Program};
use super::{DeletionProblem, DeletionSolution, LpError, Status};

/// Voter-count guard for the exact oracle; above this the tree can blow up.
pub const ILP_MAX_VOTERS: u64 = 10_000;

const INTEGRALITY_TOL: f64 = 1e-7;
const BOUND_ROUNDING_TOL: f64 = 1e-9;

pub(crate) fn solve(problem: &DeletionProblem) -> Result<DeletionSolution, LpError> {
    let total: f64 = problem.upper.iter().sum();
    if total > ILP_MAX_VOTERS as f64 + 0.5 {
        return Err(LpError::OracleTooLarge(total.round() as u64));
    }
    let mut upper = Vec::with_capacity(problem.vars());
    for (index, &value) in problem.upper.iter().enumerate() {
        let r = value.round();
        if (value - r).abs() > BOUND_ROUNDING_TOL * value.abs().max(1.0) {
            return Err(LpError::NonIntegralBounds { index, value });
        }
        upper.push(r.max(0.0));
    }
    let lower = vec![0.0; upper.len()];

    let mut search = Search { problem, best: None };
    let Some(root) = search.relax(&lower, &upper)? else {
        return Ok(DeletionSolution::infeasible());
    };
    // Seed with the ceiling-rounded relaxation when it is feasible.
    let seed: Vec<f64> = root.iter().zip(&upper).map(|(x, u)| (x - INTEGRALITY_TOL).ceil().min(*u)).collect();
    if problem.is_feasible(&seed) {
        search.best = Some((seed.iter().sum(), seed));
    }
    search.branch(lower, upper, root)?;
    Ok(match search.best {
        Some((objective_value, x)) => DeletionSolution { x, objective_value, status: Status::Optimal },
        None => DeletionSolution::infeasible(),
    })
}

struct Search<'a> {
    problem: &'a DeletionProblem,
    best: Option<(f64, Vec<f64>)>,
}

impl Search<'_> {
    /// LP relaxation over `lower ≤ x ≤ upper`, by shifting `x = lower + x'`.
    fn relax(&self, lower: &[f64], upper: &[f64]) -> Result<Option<Vec<f64>>, LpError> {
        let rhs: Vec<f64> = self
            .problem
            .coeffs
            .iter()
            .zip(&self.problem.rhs)
            .map(|(row, b)| b - row.iter().zip(lower).map(|(a, l)| a * l).sum::<f64>())
            .collect();
        let width: Vec<f64> = upper.iter().zip(lower).map(|(u, l)| u - l).collect();
        let ones = vec![1.0; width.len()];
        let program = Program { cost: &ones, rows: &self.problem.coeffs, rhs: &rhs, upper: &width };
        Ok(match simplex::solve(&program)? {
            Outcome::Infeasible => None,
            Outcome::Optimal(opt) => Some(opt.x.iter().zip(lower).map(|(x, l)| x + l).collect()),
        })
    }

    fn branch(&mut self, lower: Vec<f64>, upper: Vec<f64>, relaxed: Vec<f64>) -> Result<(), LpError> {
        let bound: f64 = relaxed.iter().sum();
        if let Some((best, _)) = &self.best {
            // Objective is integral, so a node is useless unless its ceiling improves.
            if (bound - INTEGRALITY_TOL).ceil() >= *best {
                return Ok(());
            }
        }
        let fractional = relaxed
            .iter()
            .enumerate()
            .map(|(j, x)| (j, (x - x.round()).abs()))
            .filter(|(_, f)| *f > INTEGRALITY_TOL)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, _)) = fractional else {
            let x: Vec<f64> = relaxed.iter().map(|x| x.round()).collect();
            if self.problem.is_feasible(&x) {
                let value = x.iter().sum();
                if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
                    self.best = Some((value, x));
                }
            }
            return Ok(());
        };
        let v = relaxed[j];
        let mut down_upper = upper.clone();
        down_upper[j] = v.floor();
        let mut up_lower = lower.clone();
        up_lower[j] = v.ceil();
        for (lo, hi) in [(lower, down_upper), (up_lower, upper)] {
            if lo[j] > hi[j] {
                continue;
            }
            if let Some(child) = self.relax(&lo, &hi)? {
                self.branch(lo, hi, child)?;
            }
        }
        Ok(())
    }
}
