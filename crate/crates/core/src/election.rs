//! Plurality voting systems, the co-winner rule, and the full-information
//! manipulation cost.
//!
//! Candidate indices are zero-based in code; the designated candidate is
//! always index [`DESIGNATED`]. Generators permute the true-type fractions
//! instead of moving the designated index.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of the candidate the attacker wants to make a co-winner.
pub const DESIGNATED: usize = 0;

/// Tolerance on `Σ λ = 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElectionError {
    #[error("a voting system needs at least 2 candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("a voting system needs at least 1 voter")]
    NoVoters,
    #[error("true-type fraction {index} is {value}, expected a finite non-negative number")]
    InvalidFraction { index: usize, value: f64 },
    #[error("true-type fractions sum to {0}, expected 1")]
    NotNormalized(f64),
}

/// A plurality election with `n` voters whose true votes split as `λ`.
///
/// `lambda` keeps the fractions exactly as supplied (the deletion programs
/// use them as real numbers); `counts` is the canonical integer view, obtained
/// by largest-remainder apportionment of `n·λ` so that it sums to `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingSystem {
    n: u64,
    lambda: Vec<f64>,
    counts: TypeCounts,
}

impl VotingSystem {
    pub fn new(n: u64, lambda: Vec<f64>) -> Result<Self, ElectionError> {
        if lambda.len() < 2 {
            return Err(ElectionError::TooFewCandidates(lambda.len()));
        }
        if n == 0 {
            return Err(ElectionError::NoVoters);
        }
        for (index, &value) in lambda.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ElectionError::InvalidFraction { index, value });
            }
        }
        let total: f64 = lambda.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(ElectionError::NotNormalized(total));
        }
        let counts = TypeCounts(apportion(n, &lambda));
        Ok(Self { n, lambda, counts })
    }

    /// Number of candidates `m`.
    pub fn candidates(&self) -> usize {
        self.lambda.len()
    }

    pub fn voters(&self) -> u64 {
        self.n
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn counts(&self) -> &TypeCounts {
        &self.counts
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `λ_max − λ_1`, the fractional gap between the leader and the designated candidate.
    pub fn gap(&self) -> f64 {
        self.lambda_max() - self.lambda[DESIGNATED]
    }

    /// Same system with a different voter count.
    pub fn with_voters(&self, n: u64) -> Result<Self, ElectionError> {
        Self::new(n, self.lambda.clone())
    }
}

/// Voters per (true or reported) type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeCounts(pub Vec<u64>);

impl TypeCounts {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// Plurality co-winner check: `designated` has a weakly maximal score.
    /// An all-zero profile makes every candidate a co-winner.
    pub fn is_cowinner(&self, designated: usize) -> bool {
        let score = self.0[designated];
        self.0.iter().all(|&c| c <= score)
    }
}

/// Largest-remainder apportionment of `n·λ`; ties go to the lower index.
fn apportion(n: u64, lambda: &[f64]) -> Vec<u64> {
    let total: f64 = lambda.iter().sum();
    let quotas: Vec<f64> = lambda.iter().map(|l| n as f64 * l / total).collect();
    let mut counts: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..lambda.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    if assigned <= n {
        for &i in order.iter().cycle().take((n - assigned) as usize) {
            counts[i] += 1;
        }
    } else {
        // Only reachable through float overshoot on the floors.
        let mut excess = assigned - n;
        for &i in order.iter().rev() {
            if excess == 0 {
                break;
            }
            if counts[i] > 0 {
                counts[i] -= 1;
                excess -= 1;
            }
        }
    }
    counts
}

/// Minimum number of deletions, with full knowledge of true votes, that
/// makes the designated candidate a co-winner: `Σ_{j≥2} max(0, nλ_j − nλ_1)`
/// on the canonical integer counts.
pub fn classical_cost(system: &VotingSystem) -> u64 {
    classical_witness(system).iter().sum()
}

/// The deletion vector (by true type) that attains [`classical_cost`].
pub fn classical_witness(system: &VotingSystem) -> Vec<u64> {
    let counts = system.counts().as_slice();
    let own = counts[DESIGNATED];
    counts
        .iter()
        .enumerate()
        .map(|(j, &c)| if j == DESIGNATED { 0 } else { c.saturating_sub(own) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(n: u64, lambda: &[f64]) -> VotingSystem {
        VotingSystem::new(n, lambda.to_vec()).unwrap()
    }

    #[test]
    fn classical_cost_examples() {
        assert_eq!(classical_cost(&system(100, &[0.4, 0.6])), 20);
        assert_eq!(classical_cost(&system(10, &[0.2, 0.3, 0.5])), 4);
        assert_eq!(classical_cost(&system(50, &[0.5, 0.2, 0.3])), 0);
        assert_eq!(classical_cost(&system(100_000_000, &[0.1, 0.15, 0.2, 0.25, 0.3])), 50_000_000);
    }

    #[test]
    fn cowinner_examples() {
        assert!(TypeCounts(vec![5, 5, 3]).is_cowinner(0));
        assert!(!TypeCounts(vec![4, 5, 3]).is_cowinner(0));
        assert!(TypeCounts(vec![0, 0, 0]).is_cowinner(0));
    }

    #[test]
    fn apportionment_sums_to_n() {
        let s = system(10, &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(s.counts().as_slice(), &[4, 3, 3]);
        let s = system(7, &[0.05, 0.15, 0.8]);
        assert_eq!(s.counts().total(), 7);
        assert_eq!(s.counts().as_slice(), &[0, 1, 6]);
    }

    #[test]
    fn witness_makes_designated_cowinner() {
        let s = system(1000, &[0.12, 0.3, 0.18, 0.4]);
        let remaining: Vec<u64> = s
            .counts()
            .as_slice()
            .iter()
            .zip(classical_witness(&s))
            .map(|(c, d)| c - d)
            .collect();
        assert!(TypeCounts(remaining).is_cowinner(DESIGNATED));
    }

    #[test]
    fn rejects_malformed_systems() {
        assert_eq!(VotingSystem::new(10, vec![1.0]), Err(ElectionError::TooFewCandidates(1)));
        assert_eq!(VotingSystem::new(0, vec![0.5, 0.5]), Err(ElectionError::NoVoters));
        assert!(matches!(
            VotingSystem::new(10, vec![0.5, 0.6]),
            Err(ElectionError::NotNormalized(_))
        ));
        assert!(matches!(
            VotingSystem::new(10, vec![-0.1, 1.1]),
            Err(ElectionError::InvalidFraction { index: 0, .. })
        ));
    }
}
