//! APoLDP through the deletion LP at the central realization, the
//! two-candidate closed forms, the multi-candidate security threshold and the
//! collapse of the rescaled program below it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::election::{classical_cost, VotingSystem, DESIGNATED};
use crate::lp::{build_plain, solve_lp, solve_weighted, LpError};
use crate::mechanism::{
    central_realization, check_sign_condition, posterior_matrix, DesignMatrix, Epsilon, Mechanism, MechanismError,
};

/// Relative distance from `n` below which the LP counts as forcing full deletion.
pub const PLATEAU_TOLERANCE: f64 = 1e-9;

/// Tolerance of the weak inequality deciding collapse of the rescaled program.
pub const COLLAPSE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("attack-free system: the designated candidate already co-wins, so the ratio is undefined")]
    AttackFree,
    #[error("sign condition fails on columns {0:?}")]
    ConditionFailed(Vec<usize>),
    #[error("threshold hypothesis violated: λ_{index} = {value} is not above λ_1 = {designated}")]
    HypothesisViolated { index: usize, value: f64, designated: f64 },
    #[error("φ must lie in (0, 1), got {0}")]
    InvalidPhi(f64),
    #[error("deletion LP at the central realization is infeasible")]
    Infeasible,
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApoldpResult {
    pub value: f64,
    pub opt_lp: f64,
    pub classical: u64,
    pub condition_passed: bool,
    pub at_plateau: bool,
}

/// Evaluates `OPT_LP(τ̂) / f(S)` for a given design matrix, recording whether
/// the sign condition holds instead of refusing when it does not.
pub fn evaluate(system: &VotingSystem, p: &DesignMatrix) -> Result<ApoldpResult, AnalysisError> {
    let classical = classical_cost(system);
    if classical == 0 {
        return Err(AnalysisError::AttackFree);
    }
    let q = posterior_matrix(p, system)?;
    let tau_hat = central_realization(p, system)?.tau_hat;
    let condition_passed = check_sign_condition(&q).passed();
    let solution = solve_lp(&build_plain(system, &q, &tau_hat)?)?;
    if !solution.is_optimal() {
        return Err(AnalysisError::Infeasible);
    }
    let n = system.voters() as f64;
    let opt_lp = solution.objective_value.clamp(0.0, n);
    Ok(ApoldpResult {
        value: opt_lp / classical as f64,
        opt_lp,
        classical,
        condition_passed,
        at_plateau: opt_lp >= n * (1.0 - PLATEAU_TOLERANCE),
    })
}

/// Reports are the true types, so the optimum is `f(S)` on the integer
/// counts. Solving the float LP instead would reproduce it only up to the
/// rounding of `n(λ_i − λ_1)`.
fn no_privacy(system: &VotingSystem, p: &DesignMatrix) -> Result<ApoldpResult, AnalysisError> {
    let classical = classical_cost(system);
    if classical == 0 {
        return Err(AnalysisError::AttackFree);
    }
    let q = posterior_matrix(p, system)?;
    let opt_lp = classical as f64;
    Ok(ApoldpResult {
        value: 1.0,
        opt_lp,
        classical,
        condition_passed: check_sign_condition(&q).passed(),
        at_plateau: opt_lp >= system.voters() as f64 * (1.0 - PLATEAU_TOLERANCE),
    })
}

/// APoLDP of `system` under `mechanism` at privacy level `epsilon`.
///
/// Refuses systems that fail the sign condition, except for two candidates
/// (a failing column there is a zero column, covered by the same bounds) and
/// `ε = ∞`, where `Q` is the identity and LP(τ̂) is the classical problem.
pub fn apoldp(system: &VotingSystem, mechanism: Mechanism, epsilon: Epsilon) -> Result<ApoldpResult, AnalysisError> {
    let p = DesignMatrix::build(mechanism, system.candidates(), epsilon)?;
    if epsilon == Epsilon::Infinite {
        return no_privacy(system, &p);
    }
    let result = evaluate(system, &p)?;
    if !result.condition_passed && system.candidates() > 2 {
        let q = posterior_matrix(&p, system)?;
        return Err(AnalysisError::ConditionFailed(check_sign_condition(&q).offending_columns()));
    }
    Ok(result)
}

/// Closed-form APoLDP for two candidates with gap `φ = λ_2 − λ_1`.
pub fn apoldp_closed_form_m2(phi: f64, epsilon: Epsilon, mechanism: Mechanism) -> Result<f64, AnalysisError> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(AnalysisError::InvalidPhi(phi));
    }
    let Epsilon::Finite(eps) = epsilon else {
        return Ok(1.0);
    };
    let (boundary, g) = match mechanism {
        Mechanism::RandomizedResponse => (((1.0 + phi) / (1.0 - phi)).ln(), eps.exp()),
        Mechanism::Laplace => (2.0 * (1.0 / (1.0 - phi)).ln(), (eps / 2.0).exp()),
    };
    if eps <= boundary {
        return Ok(1.0 / phi);
    }
    if g.is_infinite() {
        return Ok(1.0);
    }
    Ok(match mechanism {
        Mechanism::RandomizedResponse => (g + 1.0 + (g - 1.0) * phi) / (g - 1.0 + (g + 1.0) * phi),
        Mechanism::Laplace => (g + (g - 1.0) * phi) / (g - 1.0 + g * phi),
    })
}

/// Two-candidate LP optimum at the central realization: `n` when `θ ≤ φ`,
/// else `nφ(1+θφ)/(θ+φ)`.
pub fn opt_closed_form_m2(n: f64, theta: f64, phi: f64) -> f64 {
    if theta <= phi {
        n
    } else {
        n * phi * (1.0 + theta * phi) / (theta + phi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub epsilon_star: f64,
    /// `1/(1 − Σ_{i≥2}(λ_i − λ_1))`, the published maximum formula, kept for comparison.
    pub stated_max: f64,
    /// `n / f(S)`, the value the collapsed LP actually yields.
    pub lp_max: f64,
    pub agreement: bool,
}

fn check_hypothesis(system: &VotingSystem) -> Result<(), AnalysisError> {
    let lambda = system.lambda();
    let designated = lambda[DESIGNATED];
    for (index, &value) in lambda.iter().enumerate() {
        if index != DESIGNATED && value <= designated {
            return Err(AnalysisError::HypothesisViolated { index: index + 1, value, designated });
        }
    }
    Ok(())
}

/// Privacy level at or below which the deletion LP forces full deletion.
///
/// Randomized response uses `ln(λ_max/λ_1)`; the Laplace threshold has no
/// closed form and is located by bisection on the LP collapse.
pub fn security_threshold(system: &VotingSystem, mechanism: Mechanism) -> Result<ThresholdReport, AnalysisError> {
    check_hypothesis(system)?;
    let lambda = system.lambda();
    let epsilon_star = match mechanism {
        Mechanism::RandomizedResponse => (system.lambda_max() / lambda[DESIGNATED]).ln(),
        Mechanism::Laplace => laplace_threshold(system)?,
    };
    let excess: f64 = lambda.iter().skip(1).map(|l| l - lambda[DESIGNATED]).sum();
    let stated_max = 1.0 / (1.0 - excess);
    let lp_max = system.voters() as f64 / classical_cost(system) as f64;
    let agreement = (stated_max - lp_max).abs() <= 1e-9 * stated_max.abs().max(lp_max.abs());
    Ok(ThresholdReport { epsilon_star, stated_max, lp_max, agreement })
}

fn collapses(system: &VotingSystem, mechanism: Mechanism, eps: f64) -> Result<bool, AnalysisError> {
    let p = DesignMatrix::build(mechanism, system.candidates(), Epsilon::Finite(eps))?;
    Ok(evaluate(system, &p)?.at_plateau)
}

fn laplace_threshold(system: &VotingSystem) -> Result<f64, AnalysisError> {
    let mechanism = Mechanism::Laplace;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while collapses(system, mechanism, hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(f64::INFINITY);
        }
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if collapses(system, mechanism, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Outcome of the rescaled program `y_i = x_i / (n τ̂_i)` under randomized response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub epsilon: f64,
    pub theta: f64,
    /// Some row has `θλ_1/(λ_i − λ_1) ≤ (1−θ)/m`.
    pub collapsed: bool,
    /// `1 − OPT/n` of the rescaled program.
    pub slack: f64,
    /// `min_i {θλ_1/(λ_i − λ_1) − (1−θ)/m}`; non-positive when collapsed.
    pub margin: f64,
    /// `θ(1−θ)·margin/2` when not collapsed.
    pub slack_bound: Option<f64>,
    /// Objective `Σ τ̂_i y'_i` of the explicit point with `y'_1 = 0` that
    /// meets every row with equality.
    pub witness_objective: Option<f64>,
    /// Whether that point also respects `y ≤ 1`; it need not.
    pub witness_feasible: Option<bool>,
}

impl CollapseReport {
    /// The LP agrees with the verdict: full deletion when collapsed, slack
    /// at least the bound otherwise.
    pub fn consistent(&self) -> bool {
        match self.slack_bound {
            None => self.slack.abs() <= PLATEAU_TOLERANCE,
            Some(bound) => self.slack >= bound,
        }
    }
}

/// Rows of the rescaled program, one per non-designated candidate:
/// `(1−θ)/m` on every `y_j`, plus `θλ_i/(λ_i−λ_1)` on `y_i`, minus
/// `θλ_1/(λ_i−λ_1)` on `y_1`, with right-hand side 1.
fn rescaled_rows(lambda: &[f64], theta: f64) -> Vec<Vec<f64>> {
    let m = lambda.len();
    let base = (1.0 - theta) / m as f64;
    let l1 = lambda[DESIGNATED];
    (1..m)
        .map(|i| {
            let gap = lambda[i] - l1;
            let mut row = vec![base; m];
            row[i] += theta * lambda[i] / gap;
            row[DESIGNATED] -= theta * l1 / gap;
            row
        })
        .collect()
}

pub fn feasibility_collapse_check(system: &VotingSystem, epsilon: Epsilon) -> Result<CollapseReport, AnalysisError> {
    check_hypothesis(system)?;
    let m = system.candidates();
    let p = DesignMatrix::randomized_response(m, epsilon)?;
    let theta = p.theta().unwrap_or(1.0);
    let lambda = system.lambda();
    let l1 = lambda[DESIGNATED];
    let tau_hat = central_realization(&p, system)?.tau_hat;
    let base = (1.0 - theta) / m as f64;

    let margin = (1..m)
        .map(|i| theta * l1 / (lambda[i] - l1) - base)
        .fold(f64::INFINITY, f64::min);
    let collapsed = margin <= COLLAPSE_TOLERANCE * base.max(theta);

    let rows = rescaled_rows(lambda, theta);
    let solution = solve_weighted(&tau_hat, &rows, &vec![1.0; m - 1], &vec![1.0; m])?;
    if !solution.is_optimal() {
        return Err(AnalysisError::Infeasible);
    }
    let slack = 1.0 - solution.objective_value;

    let (slack_bound, witness_objective, witness_feasible) = if collapsed {
        (None, None, None)
    } else {
        let s: f64 = (1..m).map(|i| (lambda[i] - l1) / (theta * lambda[i])).sum();
        let t = s / (1.0 + base * s);
        let mut y = vec![0.0; m];
        for i in 1..m {
            y[i] = (1.0 - base * t) * (lambda[i] - l1) / (theta * lambda[i]);
        }
        let feasible = y.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v))
            && rows.iter().all(|r| r.iter().zip(&y).map(|(a, v)| a * v).sum::<f64>() >= 1.0 - 1e-12);
        let objective: f64 = tau_hat.iter().zip(&y).map(|(t, v)| t * v).sum();
        (Some(theta * (1.0 - theta) * margin / 2.0), Some(objective), Some(feasible))
    };

    Ok(CollapseReport {
        epsilon: epsilon.value(),
        theta,
        collapsed,
        slack,
        margin,
        slack_bound,
        witness_objective,
        witness_feasible,
    })
}
