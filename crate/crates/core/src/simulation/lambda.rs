//! Estimating the true-type fractions from reports: the first round of a
//! two-round deployment, run on a small voter subset.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::realization::{multinomial, multivariate_hypergeometric};
use super::SimulationError;
use crate::election::VotingSystem;
use crate::mechanism::DesignMatrix;

/// Relative pivot size below which `P` counts as singular.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    /// `P⁻¹τ` projected onto the probability simplex.
    pub lambda: Vec<f64>,
    /// ∞-norm distance between `P⁻¹τ` and its projection.
    pub residual: f64,
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}` (sort-and-threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if s - t > 0.0 {
            shift = t;
        }
    }
    v.iter().map(|x| (x - shift).max(0.0)).collect()
}

pub fn estimate_lambda(tau_sample: &[f64], p: &DesignMatrix) -> Result<LambdaEstimate, SimulationError> {
    let m = p.candidates();
    if tau_sample.len() != m {
        return Err(SimulationError::DimensionMismatch { expected: m, got: tau_sample.len() });
    }
    if p.epsilon().is_zero() {
        return Err(SimulationError::SingularDesign);
    }
    let a = DMatrix::from_fn(m, m, |r, c| p.prob(r, c));
    let lu = a.lu();
    let u = lu.u();
    let scale = u.diagonal().iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    if u.diagonal().iter().any(|d| d.abs() <= SINGULAR_TOL * scale) {
        return Err(SimulationError::SingularDesign);
    }
    let raw = lu.solve(&DVector::from_column_slice(tau_sample)).ok_or(SimulationError::SingularDesign)?;
    let raw: Vec<f64> = raw.iter().copied().collect();
    let lambda = project_to_simplex(&raw);
    let residual = raw.iter().zip(&lambda).map(|(r, l)| (r - l).abs()).fold(0.0, f64::max);
    Ok(LambdaEstimate { lambda, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoRoundEstimate {
    pub sample_size: u64,
    pub estimate: LambdaEstimate,
    /// `‖λ̂ − λ‖∞` against the system's true fractions.
    pub error: f64,
}

/// Polls `⌈n^exponent⌉` voters drawn without replacement and inverts their
/// report frequencies.
pub fn two_round_estimate<R: Rng + ?Sized>(
    system: &VotingSystem,
    p: &DesignMatrix,
    exponent: f64,
    rng: &mut R,
) -> Result<TwoRoundEstimate, SimulationError> {
    let n = system.voters();
    let sample_size = ((n as f64).powf(exponent).ceil() as u64).clamp(1, n);
    let by_truth = multivariate_hypergeometric(system.counts().as_slice(), sample_size, rng);
    let m = system.candidates();
    let mut reported = vec![0u64; m];
    for (u, &count) in by_truth.iter().enumerate() {
        for (v, k) in multinomial(count, &p.matrix().column(u), rng).into_iter().enumerate() {
            reported[v] += k;
        }
    }
    let tau: Vec<f64> = reported.iter().map(|&c| c as f64 / sample_size as f64).collect();
    let estimate = estimate_lambda(&tau, p)?;
    let error = estimate
        .lambda
        .iter()
        .zip(system.lambda())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(TwoRoundEstimate { sample_size, estimate, error })
}
