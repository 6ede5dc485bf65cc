//! Local differential privacy mechanisms as design matrices, the Bayesian
//! posterior over true types, and the expected report distribution.
//!
//! Convention: `p[(u, v)] = Pr[report = u | true = v]`, so every column of a
//! design matrix is a probability vector. `q[(u, v)] = Pr[true = u | report = v]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::election::{VotingSystem, DESIGNATED};
use crate::matrix::SquareMatrix;

/// Slack allowed on the ε-LDP ratio bound `p_uv ≤ e^ε p_uv' + slack`.
pub const LDP_SLACK: f64 = 1e-9;

/// Differences `q_ij − q_1j` with magnitude at or below this count as zero.
pub const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanismError {
    #[error("a design matrix needs at least 2 candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("privacy parameter must be a non-negative number, got {0}")]
    NegativeEpsilon(f64),
    #[error("the Laplace mechanism needs ε > 0 (its scale (m−1)/ε is undefined at ε = 0)")]
    LaplaceZeroEpsilon,
    #[error("binned Laplace matrix violates ε-LDP: ratio {ratio} exceeds e^ε = {bound}")]
    PrivacyViolated { ratio: f64, bound: f64 },
    #[error("design matrix has {matrix} candidates but the voting system has {system}")]
    DimensionMismatch { matrix: usize, system: usize },
    #[error("reported type {0} has zero probability mass; its posterior is undefined")]
    DegenerateReport(usize),
    #[error("cannot parse mechanism {0:?} (expected `rr` or `laplace`)")]
    UnknownMechanism(String),
    #[error("cannot parse privacy parameter {0:?}")]
    BadEpsilon(String),
}

/// Which randomizer voters run locally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mechanism {
    #[serde(rename = "rr")]
    RandomizedResponse,
    #[serde(rename = "laplace")]
    Laplace,
}

impl Mechanism {
    pub const ALL: [Mechanism; 2] = [Mechanism::RandomizedResponse, Mechanism::Laplace];

    pub fn tag(self) -> &'static str {
        match self {
            Mechanism::RandomizedResponse => "rr",
            Mechanism::Laplace => "laplace",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Mechanism {
    type Err = MechanismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rr" | "randomized-response" | "randomized_response" => Ok(Mechanism::RandomizedResponse),
            "laplace" | "lap" => Ok(Mechanism::Laplace),
            _ => Err(MechanismError::UnknownMechanism(s.to_string())),
        }
    }
}

/// Privacy parameter ε. `Infinite` is the no-privacy limit and is kept
/// symbolic so that `e^ε` is never evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Epsilon {
    Finite(f64),
    Infinite,
}

impl Epsilon {
    pub fn new(value: f64) -> Result<Self, MechanismError> {
        if value.is_nan() || value < 0.0 {
            Err(MechanismError::NegativeEpsilon(value))
        } else if value.is_infinite() {
            Ok(Epsilon::Infinite)
        } else {
            Ok(Epsilon::Finite(value))
        }
    }

    /// Numeric value, `f64::INFINITY` for the symbolic limit.
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Finite(e) => e,
            Epsilon::Infinite => f64::INFINITY,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Epsilon::Finite(0.0)
    }
}

impl From<f64> for Epsilon {
    /// Panics on negative or NaN input; use [`Epsilon::new`] for fallible parsing.
    fn from(value: f64) -> Self {
        Epsilon::new(value).expect("invalid privacy parameter")
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Finite(e) => write!(f, "{e}"),
            Epsilon::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Epsilon {
    type Err = MechanismError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Epsilon::Infinite);
        }
        let v: f64 = t.parse().map_err(|_| MechanismError::BadEpsilon(s.to_string()))?;
        Epsilon::new(v)
    }
}

/// `θ` of the two-candidate symmetric form `P(θ)`, shared by both mechanisms at m = 2.
pub fn two_candidate_theta(mechanism: Mechanism, epsilon: Epsilon) -> f64 {
    match (mechanism, epsilon) {
        (_, Epsilon::Infinite) => 1.0,
        (Mechanism::RandomizedResponse, Epsilon::Finite(e)) => rr_theta(2, e),
        (Mechanism::Laplace, Epsilon::Finite(e)) => -(-e / 2.0).exp_m1(),
    }
}

/// `θ = 1 − m/(m−1+e^ε)`, evaluated as `expm1(ε)/(m + expm1(ε))` for accuracy near 0.
fn rr_theta(m: usize, e: f64) -> f64 {
    let g = e.exp_m1();
    if g.is_infinite() {
        1.0
    } else {
        g / (m as f64 + g)
    }
}

/// Column-stochastic report matrix of an LDP mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    mechanism: Mechanism,
    epsilon: Epsilon,
    theta: Option<f64>,
    p: SquareMatrix,
    max_ratio: f64,
}

impl DesignMatrix {
    /// Randomized response: diagonal `θ + (1−θ)/m`, off-diagonal `(1−θ)/m`.
    pub fn randomized_response(m: usize, epsilon: Epsilon) -> Result<Self, MechanismError> {
        check_m(m)?;
        let theta = match epsilon {
            Epsilon::Infinite => 1.0,
            Epsilon::Finite(e) if e < 0.0 || e.is_nan() => return Err(MechanismError::NegativeEpsilon(e)),
            Epsilon::Finite(e) => rr_theta(m, e),
        };
        let p = rr_matrix(m, theta);
        let max_ratio = max_privacy_ratio(&p);
        Ok(Self { mechanism: Mechanism::RandomizedResponse, epsilon, theta: Some(theta), p, max_ratio })
    }

    /// Laplace noise of scale `(m−1)/ε` added to the true index, rounded to
    /// the nearest candidate; the first and last bins absorb the tails.
    pub fn laplace(m: usize, epsilon: Epsilon) -> Result<Self, MechanismError> {
        check_m(m)?;
        let scale = match epsilon {
            Epsilon::Infinite => {
                return Ok(Self {
                    mechanism: Mechanism::Laplace,
                    epsilon,
                    theta: (m == 2).then_some(1.0),
                    p: SquareMatrix::identity(m),
                    max_ratio: f64::INFINITY,
                })
            }
            Epsilon::Finite(e) if e < 0.0 || e.is_nan() => return Err(MechanismError::NegativeEpsilon(e)),
            Epsilon::Finite(0.0) => return Err(MechanismError::LaplaceZeroEpsilon),
            Epsilon::Finite(e) => (m - 1) as f64 / e,
        };
        // Candidates are numbered 1..=m on the real line.
        let p = SquareMatrix::from_fn(m, |u, v| {
            let mu = (v + 1) as f64;
            let lo = u as f64 + 0.5;
            let hi = u as f64 + 1.5;
            match (u == 0, u == m - 1) {
                (true, _) => laplace_cdf(hi, mu, scale),
                (_, true) => laplace_sf(lo, mu, scale),
                _ => laplace_mass(lo, hi, mu, scale),
            }
        });
        let max_ratio = max_privacy_ratio(&p);
        let bound = epsilon.value().exp();
        if max_ratio > bound * (1.0 + LDP_SLACK) + LDP_SLACK {
            return Err(MechanismError::PrivacyViolated { ratio: max_ratio, bound });
        }
        let theta = (m == 2).then(|| two_candidate_theta(Mechanism::Laplace, epsilon));
        Ok(Self { mechanism: Mechanism::Laplace, epsilon, theta, p, max_ratio })
    }

    /// Builds the design matrix for `mechanism`. At `ε = 0` the Laplace
    /// mechanism is replaced by its perfect-privacy limit, uniform reporting.
    pub fn build(mechanism: Mechanism, m: usize, epsilon: Epsilon) -> Result<Self, MechanismError> {
        match mechanism {
            Mechanism::RandomizedResponse => Self::randomized_response(m, epsilon),
            Mechanism::Laplace if epsilon.is_zero() => {
                check_m(m)?;
                let p = SquareMatrix::from_fn(m, |_, _| 1.0 / m as f64);
                Ok(Self { mechanism, epsilon, theta: (m == 2).then_some(0.0), p, max_ratio: 1.0 })
            }
            Mechanism::Laplace => Self::laplace(m, epsilon),
        }
    }

    /// The symmetric two-candidate matrix `P(θ)` with diagonal `(1+θ)/2`.
    /// `ε` is reported as the randomized-response value with the same θ.
    pub fn two_candidate(theta: f64) -> Self {
        assert!((0.0..=1.0).contains(&theta), "θ must lie in [0, 1]");
        let p = rr_matrix(2, theta);
        let epsilon = if theta >= 1.0 {
            Epsilon::Infinite
        } else {
            Epsilon::Finite(((1.0 + theta) / (1.0 - theta)).ln())
        };
        let max_ratio = max_privacy_ratio(&p);
        Self { mechanism: Mechanism::RandomizedResponse, epsilon, theta: Some(theta), p, max_ratio }
    }

    pub fn mechanism(&self) -> Mechanism {
        self.mechanism
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    /// Defined for randomized response and for the two-candidate Laplace matrix.
    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    pub fn candidates(&self) -> usize {
        self.p.dim()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.p
    }

    /// `Pr[report = u | true = v]`.
    pub fn prob(&self, reported: usize, truth: usize) -> f64 {
        self.p[(reported, truth)]
    }

    /// Achieved `max p_uv / p_uv'` over rows and column pairs (∞ when some
    /// row mixes zero and non-zero entries).
    pub fn max_privacy_ratio(&self) -> f64 {
        self.max_ratio
    }

    /// Checks `p_uv ≤ e^ε p_uv' + slack` for every row and column pair.
    pub fn satisfies_ldp(&self) -> bool {
        match self.epsilon {
            Epsilon::Infinite => true,
            Epsilon::Finite(e) => {
                let bound = e.exp();
                let m = self.p.dim();
                (0..m).all(|u| {
                    let row = self.p.row(u);
                    row.iter().all(|&a| row.iter().all(|&b| a <= bound * b + LDP_SLACK))
                })
            }
        }
    }
}

fn check_m(m: usize) -> Result<(), MechanismError> {
    if m < 2 {
        Err(MechanismError::TooFewCandidates(m))
    } else {
        Ok(())
    }
}

fn rr_matrix(m: usize, theta: f64) -> SquareMatrix {
    let off = (1.0 - theta) / m as f64;
    SquareMatrix::from_fn(m, |u, v| if u == v { theta + off } else { off })
}

fn max_privacy_ratio(p: &SquareMatrix) -> f64 {
    let m = p.dim();
    let mut worst: f64 = 1.0;
    for u in 0..m {
        let row = p.row(u);
        let hi = row.iter().copied().fold(0.0, f64::max);
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(if lo > 0.0 { hi / lo } else if hi > 0.0 { f64::INFINITY } else { 1.0 });
    }
    worst
}

/// Laplace CDF `F_{μ,b}(x)`.
pub fn laplace_cdf(x: f64, mu: f64, b: f64) -> f64 {
    if x < mu {
        0.5 * ((x - mu) / b).exp()
    } else {
        1.0 - 0.5 * (-(x - mu) / b).exp()
    }
}

/// Laplace survival function `1 − F_{μ,b}(x)`, computed without cancellation.
pub fn laplace_sf(x: f64, mu: f64, b: f64) -> f64 {
    if x > mu {
        0.5 * (-(x - mu) / b).exp()
    } else {
        1.0 - 0.5 * ((x - mu) / b).exp()
    }
}

/// `F(hi) − F(lo)` evaluated on whichever tail avoids cancellation.
fn laplace_mass(lo: f64, hi: f64, mu: f64, b: f64) -> f64 {
    if lo >= mu {
        laplace_sf(lo, mu, b) - laplace_sf(hi, mu, b)
    } else if hi <= mu {
        laplace_cdf(hi, mu, b) - laplace_cdf(lo, mu, b)
    } else {
        1.0 - laplace_cdf(lo, mu, b) - laplace_sf(hi, mu, b)
    }
}

/// Posterior `Q` with `q_uv = p_vu λ_u / (λ · p_v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorMatrix {
    q: SquareMatrix,
}

impl PosteriorMatrix {
    pub fn matrix(&self) -> &SquareMatrix {
        &self.q
    }

    /// `Pr[true = u | report = v]`.
    pub fn prob(&self, truth: usize, reported: usize) -> f64 {
        self.q[(truth, reported)]
    }

    pub fn candidates(&self) -> usize {
        self.q.dim()
    }

    /// Wraps a matrix whose columns are already posteriors (identity, test fixtures).
    pub fn from_matrix(q: SquareMatrix) -> Self {
        Self { q }
    }
}

pub fn posterior_matrix(p: &DesignMatrix, system: &VotingSystem) -> Result<PosteriorMatrix, MechanismError> {
    let m = p.candidates();
    if system.candidates() != m {
        return Err(MechanismError::DimensionMismatch { matrix: m, system: system.candidates() });
    }
    let lambda = system.lambda();
    let mass = p.matrix().mul_vec(lambda);
    if let Some(v) = mass.iter().position(|&w| w <= 0.0) {
        return Err(MechanismError::DegenerateReport(v));
    }
    let q = SquareMatrix::from_fn(m, |u, v| p.prob(v, u) * lambda[u] / mass[v]);
    Ok(PosteriorMatrix { q })
}

/// Expected reported-type fractions `τ̂ = P·λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralRealization {
    pub tau_hat: Vec<f64>,
}

pub fn central_realization(p: &DesignMatrix, system: &VotingSystem) -> Result<CentralRealization, MechanismError> {
    if system.candidates() != p.candidates() {
        return Err(MechanismError::DimensionMismatch { matrix: p.candidates(), system: system.candidates() });
    }
    Ok(CentralRealization { tau_hat: p.matrix().mul_vec(system.lambda()) })
}

/// Sign of `q_ij − q_1j` across the non-designated rows of one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnSign {
    AllPositive,
    AllNegative,
    MixedOrZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub columns: Vec<ColumnSign>,
}

impl SignReport {
    /// Passes iff every column is strictly one-signed.
    pub fn passed(&self) -> bool {
        !self.columns.contains(&ColumnSign::MixedOrZero)
    }

    pub fn offending_columns(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == ColumnSign::MixedOrZero)
            .map(|(j, _)| j)
            .collect()
    }
}

pub fn check_sign_condition(q: &PosteriorMatrix) -> SignReport {
    let m = q.candidates();
    let columns = (0..m)
        .map(|j| {
            let base = q.prob(DESIGNATED, j);
            let diffs = (0..m).filter(|&i| i != DESIGNATED).map(|i| q.prob(i, j) - base);
            let (mut pos, mut neg, mut other) = (0, 0, 0);
            for d in diffs {
                if d > SIGN_TOLERANCE {
                    pos += 1;
                } else if d < -SIGN_TOLERANCE {
                    neg += 1;
                } else {
                    other += 1;
                }
            }
            match (pos, neg, other) {
                (_, 0, 0) => ColumnSign::AllPositive,
                (0, _, 0) => ColumnSign::AllNegative,
                _ => ColumnSign::MixedOrZero,
            }
        })
        .collect();
    SignReport { columns }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn system(lambda: &[f64]) -> VotingSystem {
        VotingSystem::new(1000, lambda.to_vec()).unwrap()
    }

    #[test]
    fn randomized_response_examples() {
        let p = DesignMatrix::randomized_response(2, Epsilon::Finite(3f64.ln())).unwrap();
        assert_relative_eq!(p.theta().unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.prob(0, 0), 0.75, epsilon = 1e-15);
        assert_relative_eq!(p.prob(1, 0), 0.25, epsilon = 1e-15);

        let p = DesignMatrix::randomized_response(3, Epsilon::Finite(0.0)).unwrap();
        assert_eq!(p.theta(), Some(0.0));
        assert!(p.matrix().rows().iter().flatten().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));

        let p = DesignMatrix::randomized_response(2, Epsilon::Infinite).unwrap();
        assert_eq!(p.matrix(), &SquareMatrix::identity(2));
    }

    #[test]
    fn randomized_response_rejects_bad_input() {
        assert_eq!(
            DesignMatrix::randomized_response(1, Epsilon::Finite(1.0)),
            Err(MechanismError::TooFewCandidates(1))
        );
        assert!(Epsilon::new(-0.5).is_err());
        assert!(matches!(
            DesignMatrix::randomized_response(3, Epsilon::Finite(-1.0)),
            Err(MechanismError::NegativeEpsilon(_))
        ));
    }

    #[test]
    fn laplace_examples() {
        // F_{1,1/ε}(3/2) = 1 − e^{−ε/2}/2 = 0.75 at ε = 2 ln 2.
        let p = DesignMatrix::laplace(2, Epsilon::Finite(2.0 * 2f64.ln())).unwrap();
        assert_relative_eq!(p.prob(0, 0), 0.75, epsilon = 1e-15);
        assert_relative_eq!(p.prob(1, 0), 0.25, epsilon = 1e-15);
        assert_relative_eq!(p.prob(0, 1), 0.25, epsilon = 1e-15);

        for e in [0.01, 0.3, 1.0, 4.0, 40.0] {
            let p = DesignMatrix::laplace(2, Epsilon::Finite(e)).unwrap();
            let theta = 1.0 - (-e / 2.0).exp();
            assert_relative_eq!(p.theta().unwrap(), theta, max_relative = 1e-14);
            assert_relative_eq!(p.prob(0, 0), (1.0 + theta) / 2.0, epsilon = 1e-15);
        }

        let p = DesignMatrix::laplace(3, Epsilon::Finite(1.0)).unwrap();
        for s in p.matrix().column_sums() {
            assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        }
        assert_eq!(DesignMatrix::laplace(3, Epsilon::Finite(0.0)), Err(MechanismError::LaplaceZeroEpsilon));
    }

    #[test]
    fn laplace_is_private_and_reports_ratio() {
        for m in 2..=8 {
            for e in [0.05, 0.5, 2.0, 6.0] {
                let p = DesignMatrix::laplace(m, Epsilon::Finite(e)).unwrap();
                assert!(p.satisfies_ldp());
                assert!(p.max_privacy_ratio() <= e.exp() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn posterior_two_candidate_example() {
        let p = DesignMatrix::two_candidate(0.5);
        let q = posterior_matrix(&p, &system(&[0.4, 0.6])).unwrap();
        assert_relative_eq!(q.prob(0, 0), 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(q.prob(1, 0), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(q.prob(0, 1), 2.0 / 11.0, epsilon = 1e-15);
        assert_relative_eq!(q.prob(1, 1), 9.0 / 11.0, epsilon = 1e-15);
    }

    #[test]
    fn posterior_limits() {
        let s = system(&[0.2, 0.3, 0.5]);
        let id = DesignMatrix::randomized_response(3, Epsilon::Infinite).unwrap();
        assert_eq!(posterior_matrix(&id, &s).unwrap().matrix(), &SquareMatrix::identity(3));

        let uniform = DesignMatrix::randomized_response(3, Epsilon::Finite(0.0)).unwrap();
        let q = posterior_matrix(&uniform, &s).unwrap();
        for v in 0..3 {
            for (u, l) in s.lambda().iter().enumerate() {
                assert_relative_eq!(q.prob(u, v), *l, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn posterior_rejects_empty_report_class() {
        let s = system(&[0.0, 0.4, 0.6]);
        let id = DesignMatrix::randomized_response(3, Epsilon::Infinite).unwrap();
        assert_eq!(posterior_matrix(&id, &s), Err(MechanismError::DegenerateReport(0)));
    }

    #[test]
    fn central_realization_examples() {
        let s = system(&[0.4, 0.6]);
        let tau = central_realization(&DesignMatrix::two_candidate(0.5), &s).unwrap().tau_hat;
        assert_relative_eq!(tau[0], 0.45, epsilon = 1e-15);
        assert_relative_eq!(tau[1], 0.55, epsilon = 1e-15);
        let id = DesignMatrix::two_candidate(1.0);
        assert_eq!(central_realization(&id, &s).unwrap().tau_hat, vec![0.4, 0.6]);
        let uni = DesignMatrix::two_candidate(0.0);
        assert_eq!(central_realization(&uni, &s).unwrap().tau_hat, vec![0.5, 0.5]);
    }

    #[test]
    fn sign_condition_examples() {
        // Below the smallest per-candidate threshold every column is positive.
        let s = system(&[0.2, 0.3, 0.5]);
        let p = DesignMatrix::randomized_response(3, Epsilon::Finite(0.1)).unwrap();
        let report = check_sign_condition(&posterior_matrix(&p, &s).unwrap());
        assert!(report.columns.iter().all(|c| *c == ColumnSign::AllPositive));

        // m = 2 at θ = λ2 − λ1: column 1 vanishes.
        let s2 = system(&[0.4, 0.6]);
        let q = posterior_matrix(&DesignMatrix::two_candidate(0.2), &s2).unwrap();
        let report = check_sign_condition(&q);
        assert_eq!(report.columns[0], ColumnSign::MixedOrZero);
        assert!(!report.passed());
        assert_eq!(report.offending_columns(), vec![0]);

        let q = posterior_matrix(&DesignMatrix::two_candidate(0.0), &s2).unwrap();
        assert!(check_sign_condition(&q).columns.iter().all(|c| *c == ColumnSign::AllPositive));
    }

    #[test]
    fn first_column_is_mixed_between_candidate_thresholds() {
        // For m ≥ 3 the first column flips sign row by row as ε crosses
        // ln(λ_i/λ_1); between ln 1.5 and ln 2.5 it is mixed.
        let s = system(&[0.2, 0.3, 0.5]);
        let q = |e: f64| {
            let p = DesignMatrix::randomized_response(3, Epsilon::Finite(e)).unwrap();
            check_sign_condition(&posterior_matrix(&p, &s).unwrap())
        };
        assert_eq!(q(0.6).columns[0], ColumnSign::MixedOrZero);
        assert_eq!(q(1.2).columns[0], ColumnSign::AllNegative);
        assert!(q(1.2).passed());
    }

    #[test]
    fn parses_tags() {
        assert_eq!("rr".parse::<Mechanism>().unwrap(), Mechanism::RandomizedResponse);
        assert_eq!("Laplace".parse::<Mechanism>().unwrap(), Mechanism::Laplace);
        assert!("unary".parse::<Mechanism>().is_err());
        assert_eq!("inf".parse::<Epsilon>().unwrap(), Epsilon::Infinite);
        assert_eq!("0.5".parse::<Epsilon>().unwrap(), Epsilon::Finite(0.5));
        assert!("-1".parse::<Epsilon>().is_err());
    }
}
