use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::exec::Execution;
use crate::mechanism::Mechanism;

/// `start:stop:step`, inclusive of `stop` up to rounding; empty when `start > stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for EpsilonGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 5.0, step: 0.01 }
    }
}

impl EpsilonGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self, HarnessError> {
        let grid = Self { start, stop, step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn single(epsilon: f64) -> Self {
        Self { start: epsilon, stop: epsilon, step: 1.0 }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(HarnessError::InvalidConfig(format!("grid step must be positive, got {}", self.step)));
        }
        if !(self.start >= 0.0) || !self.start.is_finite() || self.stop.is_nan() {
            return Err(HarnessError::InvalidConfig(format!(
                "grid needs a finite non-negative start, got {}:{}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Grid points `start + k·step`, rounded to 12 decimals so that decimal
    /// steps print as written.
    pub fn points(&self) -> Vec<f64> {
        if self.start > self.stop {
            return Vec::new();
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| {
                let x = self.start + k as f64 * self.step;
                (x * 1e12).round() / 1e12
            })
            .collect()
    }
}

impl fmt::Display for EpsilonGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl FromStr for EpsilonGrid {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || HarnessError::InvalidConfig(format!("cannot parse grid {s:?} (expected start:stop:step)"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        Self::new(nums[0], nums[1], nums[2])
    }
}

/// How instances are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Generator {
    /// Uniform on the simplex, then pulled toward uniform so that `λ_max − λ_1 = φ`.
    FixedGap { phi: f64 },
    /// Symmetric Dirichlet(2), designated candidate relabelled to the minimum.
    Dirichlet,
    /// One explicit system.
    Explicit { lambda: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mechanisms: Vec<Mechanism>,
    pub m: usize,
    pub n: u64,
    pub generator: Generator,
    pub grid: EpsilonGrid,
    pub xi: f64,
    pub delta: f64,
    /// Relative perturbation of τ̂ in the sandwich comparison.
    pub band: f64,
    pub trials: u64,
    pub instances: usize,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

/// Voter count for LP-only paths, where `n` only scales the program.
pub const DEFAULT_LP_VOTERS: u64 = 100_000_000;
/// Voter count for paths that simulate individual reports.
pub const DEFAULT_SIM_VOTERS: u64 = 100_000;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mechanisms: Mechanism::ALL.to_vec(),
            m: 5,
            n: DEFAULT_LP_VOTERS,
            generator: Generator::FixedGap { phi: 0.2 },
            grid: EpsilonGrid::default(),
            xi: 0.999,
            delta: 0.001,
            band: 0.001,
            trials: 1000,
            instances: 200,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.mechanisms.is_empty() {
            return bad("at least one mechanism is required".into());
        }
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        self.grid.validate()?;
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return bad(format!("xi must lie in (0, 1), got {}", self.xi));
        }
        if !(self.delta >= 0.0) {
            return bad(format!("delta must be non-negative, got {}", self.delta));
        }
        if !(self.band >= 0.0 && self.band < 1.0) {
            return bad(format!("band must lie in [0, 1), got {}", self.band));
        }
        if self.instances == 0 {
            return bad("instances must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        match &self.generator {
            Generator::FixedGap { phi } if !(*phi > 0.0 && *phi < 1.0) => bad(format!("phi must lie in (0, 1), got {phi}")),
            Generator::Explicit { lambda } if lambda.len() != self.m => {
                bad(format!("lambda has {} entries but m = {}", lambda.len(), self.m))
            }
            _ => Ok(()),
        }
    }

    /// Number of instances actually generated (an explicit system is one instance).
    pub fn instance_count(&self) -> usize {
        match self.generator {
            Generator::Explicit { .. } => 1,
            _ => self.instances,
        }
    }
}
