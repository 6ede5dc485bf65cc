//! The checks behind the `verify` command, each reduced to pass/fail plus
//! the measured numbers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, DEFAULT_SIM_VOTERS};
use super::generate::generate_instances;
use super::verify::verify_sandwich;
use super::HarnessError;
use crate::election::VotingSystem;
use crate::exec::Execution;
use crate::lp::robustness_constants;
use crate::mechanism::{posterior_matrix, DesignMatrix, Epsilon, Mechanism};
use crate::simulation::{
    concentration_floor, estimate_win_probability, exact_win_probability, short_plan_bound, upper_plan_bound,
    verify_expectation_concentration, verify_tau_concentration, DeletionPlan, PlanPolicy, SeededRng, WinEstimate,
};

/// Winning-probability check parameters: large enough δ·√n for the plans to separate.
pub const CHERNOFF_VOTERS: u64 = 10_000;
pub const CHERNOFF_DELTA: f64 = 0.05;
pub const CHERNOFF_TARGET: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub n: u64,
    pub lambda: Vec<f64>,
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub plan: DeletionPlan,
    pub exact: f64,
    pub estimate: WinEstimate,
    pub covered: bool,
}

/// Random small instances (`n ≤ 12`, `m ≤ 3`) with random plans, each
/// estimated by simulation and computed by enumeration.
pub fn oracle_comparisons(count: usize, trials: u64, seed: u64, exec: Execution) -> Result<Vec<OracleComparison>, HarnessError> {
    let mut rng = SeededRng::new(seed, u64::MAX);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let m = rng.random_range(2..=3usize);
        let n = if m == 2 { rng.random_range(2..=12u64) } else { rng.random_range(3..=9u64) };
        let mut counts = vec![0u64; m];
        for _ in 0..n {
            counts[rng.random_range(0..m)] += 1;
        }
        let lambda: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let system = VotingSystem::new(n, lambda.clone())?;
        let mechanism = if rng.random_bool(0.5) { Mechanism::RandomizedResponse } else { Mechanism::Laplace };
        let epsilon = (rng.random_range(0.2..3.0f64) * 100.0).round() / 100.0;
        let p = DesignMatrix::build(mechanism, m, Epsilon::Finite(epsilon))?;
        let plan = DeletionPlan { x: (0..m).map(|_| rng.random_range(0..=n / 2)).collect() };
        let exact = exact_win_probability(&system, &p, &plan)?;
        let estimate =
            estimate_win_probability(&system, &p, &PlanPolicy::Fixed { plan: plan.clone() }, trials, seed ^ k as u64, exec)?;
        out.push(OracleComparison { n, lambda, mechanism, epsilon, plan, exact, covered: estimate.covers(exact), estimate });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernoffCheck {
    pub n: u64,
    pub delta: f64,
    pub c: f64,
    pub upper: WinEstimate,
    pub upper_bound: f64,
    pub short: WinEstimate,
    pub short_bound: f64,
}

impl ChernoffCheck {
    pub fn passed(&self) -> bool {
        self.upper.probability >= CHERNOFF_TARGET
            && self.upper.probability + self.upper.half_width >= self.upper_bound
            && self.short.probability <= self.short_bound + self.short.half_width
    }
}

/// Rounded upper-program plan against a plan one deletion short of the
/// relaxed program's integer optimum.
pub fn chernoff_check(
    system: &VotingSystem,
    p: &DesignMatrix,
    delta: f64,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<ChernoffCheck, HarnessError> {
    let q = posterior_matrix(p, system)?;
    let c = robustness_constants(&q, system)?.c;
    let n = system.voters();
    let upper = estimate_win_probability(system, p, &PlanPolicy::UpperRounded { delta }, trials, seed, exec)?;
    let short =
        estimate_win_probability(system, p, &PlanPolicy::LowerShort { delta, shortfall: 1 }, trials, seed, exec)?;
    Ok(ChernoffCheck {
        n,
        delta,
        c,
        upper,
        upper_bound: upper_plan_bound(system.candidates(), c, delta, n),
        short,
        short_bound: short_plan_bound(c, delta, n),
    })
}

pub fn verify_suite(config: &ExperimentConfig) -> Result<Vec<Check>, HarnessError> {
    config.validate()?;
    let exec = config.execution;
    let mut checks = Vec::new();

    let sandwich = verify_sandwich(config)?;
    checks.push(Check {
        name: "sandwich".into(),
        passed: sandwich.order_violations.is_empty() && sandwich.max_deviation() <= 0.05,
        detail: serde_json::to_value(&sandwich)?,
    });

    let sim_voters = config.n.min(DEFAULT_SIM_VOTERS);
    let base = generate_instances(&ExperimentConfig { instances: 1, n: sim_voters, ..config.clone() })?.remove(0);
    let p = DesignMatrix::build(config.mechanisms[0], base.candidates(), Epsilon::Finite(1.0))?;
    let band = concentration_floor(sim_voters).max(0.05);
    let tau = verify_tau_concentration(&base, &p, band, config.trials, config.seed, exec)?;
    checks.push(Check {
        name: "tau-concentration".into(),
        passed: tau.pass_rate >= 0.99,
        detail: serde_json::to_value(tau)?,
    });

    let expectation = verify_expectation_concentration(&base, &p, config.trials.min(200), config.seed, exec)?;
    checks.push(Check {
        name: "expectation-concentration".into(),
        passed: expectation.relative_deviation <= concentration_floor(sim_voters),
        detail: serde_json::to_value(expectation)?,
    });

    let two = VotingSystem::new(CHERNOFF_VOTERS, vec![0.4, 0.6])?;
    let chernoff = chernoff_check(&two, &DesignMatrix::two_candidate(0.5), CHERNOFF_DELTA, config.trials, config.seed, exec)?;
    checks.push(Check {
        name: "winning-probability".into(),
        passed: chernoff.passed(),
        detail: serde_json::to_value(&chernoff)?,
    });

    let oracle = oracle_comparisons(20, config.trials, config.seed, exec)?;
    let covered = oracle.iter().filter(|o| o.covered).count();
    checks.push(Check {
        name: "oracle-equivalence".into(),
        passed: covered >= 19,
        detail: serde_json::json!({ "covered": covered, "instances": oracle.len(), "comparisons": oracle }),
    });
    Ok(checks)
}
