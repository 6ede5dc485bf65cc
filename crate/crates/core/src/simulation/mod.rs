//! Monte Carlo and exact checks of the probabilistic statements behind the
//! LP: concentration of the realization, winning probabilities of LP plans,
//! concentration of the expected optimum, and two-round λ estimation.

mod exact;
mod lambda;
mod realization;
mod rng;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use exact::{exact_win_probability, EXACT_MAX_CANDIDATES, EXACT_MAX_VOTERS};
pub use lambda::{estimate_lambda, project_to_simplex, two_round_estimate, LambdaEstimate, TwoRoundEstimate};
pub use realization::{execute_attack, sample_realization, DeletionPlan, Realization};
pub use rng::SeededRng;

use crate::election::{VotingSystem, DESIGNATED};
use crate::exec::Execution;
use crate::lp::{build_bounding, build_plain, solve_ilp_exact, solve_lp, LpError, Side, ILP_MAX_VOTERS};
use crate::mechanism::{central_realization, posterior_matrix, DesignMatrix, MechanismError, PosteriorMatrix};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("plan deletes {requested} voters of reported type {class} but only {available} exist")]
    PlanExceedsRealization { class: usize, requested: u64, available: u64 },
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exact enumeration is limited to n ≤ {EXACT_MAX_VOTERS} and m ≤ {EXACT_MAX_CANDIDATES}, got n = {n}, m = {m}")]
    OracleTooLarge { n: u64, m: usize },
    #[error("band {band} is below the concentration floor 3√(ln n / n) = {floor}")]
    BandBelowFloor { band: f64, floor: f64 },
    #[error("design matrix is singular; λ cannot be recovered from reports")]
    SingularDesign,
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinEstimate {
    pub probability: f64,
    pub trials: u64,
    /// `1.96 √(p̂(1−p̂)/trials)`.
    pub half_width: f64,
}

impl WinEstimate {
    pub fn from_wins(wins: u64, trials: u64) -> Self {
        let p = wins as f64 / trials as f64;
        Self { probability: p, trials, half_width: Z_95 * (p * (1.0 - p) / trials as f64).sqrt() }
    }

    /// Whether `value` lies in the Wald interval. The 1e-12 slack absorbs
    /// summation error in exactly computed probabilities, which matters
    /// when `p̂ ∈ {0, 1}` collapses the interval to a point.
    pub fn covers(&self, value: f64) -> bool {
        (self.probability - value).abs() <= self.half_width + 1e-12
    }
}

/// How the attacker turns an observed realization into a deletion plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy")]
pub enum PlanPolicy {
    DeleteAll,
    /// The same counts for every realization, capped per class.
    Fixed { plan: DeletionPlan },
    /// Ceiling-rounded optimum of the δ-strengthened program on the observed
    /// τ; everyone is deleted when that program is infeasible.
    UpperRounded { delta: f64 },
    /// The integer optimum of the δ-relaxed program on the observed τ, with
    /// `shortfall` deletions removed from the largest classes. Above the exact
    /// oracle's size the LP optimum rounded up stands in for the integer
    /// optimum (it is never larger). Empty when that program is infeasible.
    LowerShort { delta: f64, shortfall: u64 },
}

const ROUNDING_SLACK: f64 = 1e-7;

impl PlanPolicy {
    pub fn plan(&self, system: &VotingSystem, q: &PosteriorMatrix, r: &Realization) -> Result<DeletionPlan, SimulationError> {
        let plan = match self {
            PlanPolicy::DeleteAll => DeletionPlan::delete_all(r),
            PlanPolicy::Fixed { plan } => plan.clone(),
            PlanPolicy::UpperRounded { delta } => {
                let sol = solve_lp(&build_bounding(system, q, &r.tau(), *delta, Side::Upper)?)?;
                if !sol.is_optimal() {
                    DeletionPlan::delete_all(r)
                } else {
                    DeletionPlan { x: sol.x.iter().map(|x| (x - ROUNDING_SLACK).ceil().max(0.0) as u64).collect() }
                }
            }
            PlanPolicy::LowerShort { delta, shortfall } => {
                let problem = build_bounding(system, q, &r.tau(), *delta, Side::Lower)?;
                let sol = if system.voters() <= ILP_MAX_VOTERS {
                    solve_ilp_exact(&problem)?
                } else {
                    let mut s = solve_lp(&problem)?;
                    s.x.iter_mut().for_each(|x| *x = (*x - ROUNDING_SLACK).ceil().max(0.0));
                    s
                };
                if !sol.is_optimal() {
                    DeletionPlan { x: vec![0; system.candidates()] }
                } else {
                    let mut x: Vec<u64> = sol.x.iter().map(|v| v.round().max(0.0) as u64).collect();
                    for _ in 0..*shortfall {
                        if let Some(j) = (0..x.len()).filter(|&j| x[j] > 0).max_by_key(|&j| (x[j], std::cmp::Reverse(j))) {
                            x[j] -= 1;
                        }
                    }
                    DeletionPlan { x }
                }
            }
        };
        Ok(plan.clamp_to(r))
    }
}

/// Fraction of trials in which the policy's plan leaves the designated
/// candidate a co-winner. Trial `t` draws from stream `t` of `seed`.
pub fn estimate_win_probability(
    system: &VotingSystem,
    p: &DesignMatrix,
    policy: &PlanPolicy,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<WinEstimate, SimulationError> {
    if trials == 0 {
        return Err(SimulationError::NoTrials);
    }
    let q = posterior_matrix(p, system)?;
    let outcomes = exec.map(trials as usize, |t| -> Result<bool, SimulationError> {
        let mut rng = SeededRng::new(seed, t as u64);
        let r = sample_realization(system, p, &mut rng);
        let plan = policy.plan(system, &q, &r)?;
        Ok(execute_attack(&r, &plan, &mut rng)?.is_cowinner(DESIGNATED))
    });
    let mut wins = 0;
    for outcome in outcomes {
        wins += u64::from(outcome?);
    }
    Ok(WinEstimate::from_wins(wins, trials))
}

/// `1 − m e^{−cδ²n/3}`: winning-probability floor of the rounded upper plan.
pub fn upper_plan_bound(m: usize, c: f64, delta: f64, n: u64) -> f64 {
    1.0 - m as f64 * (-c * delta * delta * n as f64 / 3.0).exp()
}

/// `2 e^{−cδ²n/3}`: winning-probability ceiling of any plan short of the
/// lower program's integer optimum.
pub fn short_plan_bound(c: f64, delta: f64, n: u64) -> f64 {
    2.0 * (-c * delta * delta * n as f64 / 3.0).exp()
}

/// `3√(ln n / n)`, the smallest band the expectation argument covers.
pub fn concentration_floor(n: u64) -> f64 {
    let n = n as f64;
    3.0 * (n.ln() / n).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauConcentration {
    pub band: f64,
    pub trials: u64,
    pub pass_rate: f64,
    /// `1 − m e^{−5 band² n / 6}`.
    pub bound: f64,
}

/// Fraction of realizations with every `τ_i` within `(1 ± band) τ̂_i`.
pub fn verify_tau_concentration(
    system: &VotingSystem,
    p: &DesignMatrix,
    band: f64,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<TauConcentration, SimulationError> {
    if trials == 0 {
        return Err(SimulationError::NoTrials);
    }
    let n = system.voters();
    let floor = concentration_floor(n);
    if !(band >= floor) {
        return Err(SimulationError::BandBelowFloor { band, floor });
    }
    let tau_hat = central_realization(p, system)?.tau_hat;
    let inside = exec.map(trials as usize, |t| {
        let r = sample_realization(system, p, &mut SeededRng::new(seed, t as u64));
        r.tau().iter().zip(&tau_hat).all(|(t, h)| (1.0 - band) * h <= *t && *t <= (1.0 + band) * h)
    });
    let passes = inside.iter().filter(|&&b| b).count();
    let m = system.candidates() as f64;
    Ok(TauConcentration {
        band,
        trials,
        pass_rate: passes as f64 / trials as f64,
        bound: 1.0 - m * (-5.0 * band * band * n as f64 / 6.0).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationConcentration {
    pub trials: u64,
    pub central_opt: f64,
    pub mean_opt: f64,
    pub relative_deviation: f64,
    /// Realizations where LP(τ) had no solution and the cost was taken as `n`.
    pub infeasible_trials: u64,
}

/// `|mean OPT_LP(τ) − OPT_LP(τ̂)| / OPT_LP(τ̂)` over sampled realizations.
/// An infeasible LP(τ) is charged `n`, the cost of deleting everyone, which
/// always makes the designated candidate a co-winner.
pub fn verify_expectation_concentration(
    system: &VotingSystem,
    p: &DesignMatrix,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<ExpectationConcentration, SimulationError> {
    if trials == 0 {
        return Err(SimulationError::NoTrials);
    }
    let q = posterior_matrix(p, system)?;
    let tau_hat = central_realization(p, system)?.tau_hat;
    let n = system.voters() as f64;
    let central = solve_lp(&build_plain(system, &q, &tau_hat)?)?;
    let central_opt = if central.is_optimal() { central.objective_value } else { n };
    let opts = exec.map(trials as usize, |t| -> Result<Option<f64>, SimulationError> {
        let r = sample_realization(system, p, &mut SeededRng::new(seed, t as u64));
        let sol = solve_lp(&build_plain(system, &q, &r.tau())?)?;
        Ok(sol.is_optimal().then_some(sol.objective_value))
    });
    let mut sum = 0.0;
    let mut infeasible_trials = 0;
    for opt in opts {
        match opt? {
            Some(v) => sum += v,
            None => {
                sum += n;
                infeasible_trials += 1;
            }
        }
    }
    let mean_opt = sum / trials as f64;
    let relative_deviation = if central_opt > 0.0 {
        (mean_opt - central_opt).abs() / central_opt
    } else {
        mean_opt.abs()
    };
    Ok(ExpectationConcentration { trials, central_opt, mean_opt, relative_deviation, infeasible_trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::Epsilon;

    #[test]
    fn wald_half_width() {
        let e = WinEstimate::from_wins(900, 1000);
        assert!((e.half_width - 1.96 * (0.09f64 / 1000.0).sqrt()).abs() < 1e-15);
        assert_eq!(WinEstimate::from_wins(10, 10).half_width, 0.0);
    }

    #[test]
    fn delete_all_always_wins() {
        let s = VotingSystem::new(200, vec![0.2, 0.3, 0.5]).unwrap();
        let p = DesignMatrix::randomized_response(3, Epsilon::Finite(1.0)).unwrap();
        let e = estimate_win_probability(&s, &p, &PlanPolicy::DeleteAll, 50, 1, Execution::default()).unwrap();
        assert_eq!(e.probability, 1.0);
    }

    #[test]
    fn band_floor_is_enforced() {
        let s = VotingSystem::new(100_000, vec![0.4, 0.6]).unwrap();
        let p = DesignMatrix::two_candidate(0.5);
        assert!(matches!(
            verify_tau_concentration(&s, &p, 0.01, 10, 0, Execution::Sequential),
            Err(SimulationError::BandBelowFloor { .. })
        ));
        let id = DesignMatrix::randomized_response(2, Epsilon::Infinite).unwrap();
        let r = verify_tau_concentration(&s, &id, 0.05, 10, 0, Execution::Sequential).unwrap();
        assert_eq!(r.pass_rate, 1.0);
    }

    #[test]
    fn identity_expectation_has_no_deviation() {
        let s = VotingSystem::new(10_000, vec![0.2, 0.3, 0.5]).unwrap();
        let p = DesignMatrix::randomized_response(3, Epsilon::Infinite).unwrap();
        let r = verify_expectation_concentration(&s, &p, 5, 0, Execution::Sequential).unwrap();
        assert!(r.relative_deviation < 1e-12, "{r:?}");
    }
}
