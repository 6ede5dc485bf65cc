use rand::Rng;
use rand_distr::{Binomial, Distribution, Hypergeometric};
use serde::{Deserialize, Serialize};

use super::SimulationError;
use crate::election::{TypeCounts, VotingSystem};
use crate::mechanism::DesignMatrix;

/// One run of the mechanism over all voters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    /// Voters per reported type.
    pub counts: TypeCounts,
    /// `table[reported][truth]`: joint counts of reported and true types.
    pub table: Vec<Vec<u64>>,
}

impl Realization {
    pub fn voters(&self) -> u64 {
        self.counts.total()
    }

    /// `τ = counts / n`.
    pub fn tau(&self) -> Vec<f64> {
        let n = self.voters() as f64;
        self.counts.as_slice().iter().map(|&c| c as f64 / n).collect()
    }

    /// Voters per true type.
    pub fn true_counts(&self) -> Vec<u64> {
        let m = self.table.len();
        (0..m).map(|u| self.table.iter().map(|row| row[u]).sum()).collect()
    }

    pub fn from_table(table: Vec<Vec<u64>>) -> Self {
        let counts = TypeCounts(table.iter().map(|row| row.iter().sum()).collect());
        Self { counts, table }
    }
}

/// Splits `total` items over `probs` (summing to 1) by sequential binomials.
pub(crate) fn multinomial<R: Rng + ?Sized>(total: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut out = vec![0; probs.len()];
    let mut remaining = total;
    let mut mass = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            out[k] = remaining;
            break;
        }
        let share = if mass <= 0.0 { 0.0 } else { (p / mass).clamp(0.0, 1.0) };
        let draw = if share >= 1.0 {
            remaining
        } else if share <= 0.0 {
            0
        } else {
            Binomial::new(remaining, share).expect("valid binomial").sample(rng)
        };
        out[k] = draw;
        remaining -= draw;
        mass -= p;
    }
    out
}

/// Draws `sample` items without replacement from a population with
/// `groups[u]` members of each kind.
pub(crate) fn multivariate_hypergeometric<R: Rng + ?Sized>(groups: &[u64], sample: u64, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0; groups.len()];
    let mut population: u64 = groups.iter().sum();
    let mut left = sample.min(population);
    for (u, &g) in groups.iter().enumerate() {
        if left == 0 {
            break;
        }
        let draw = if g == population {
            left
        } else if g == 0 {
            0
        } else {
            Hypergeometric::new(population, g, left).expect("valid hypergeometric").sample(rng)
        };
        out[u] = draw;
        left -= draw;
        population -= g;
    }
    out
}

/// Every voter of true type `u` reports independently from column `u` of `P`.
pub fn sample_realization<R: Rng + ?Sized>(system: &VotingSystem, p: &DesignMatrix, rng: &mut R) -> Realization {
    let m = system.candidates();
    let mut table = vec![vec![0u64; m]; m];
    for (u, &count) in system.counts().as_slice().iter().enumerate() {
        let column = p.matrix().column(u);
        for (v, k) in multinomial(count, &column, rng).into_iter().enumerate() {
            table[v][u] = k;
        }
    }
    Realization::from_table(table)
}

/// Deletion counts per reported type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeletionPlan {
    pub x: Vec<u64>,
}

impl DeletionPlan {
    pub fn total(&self) -> u64 {
        self.x.iter().sum()
    }

    /// Caps each class at what the realization holds.
    pub fn clamp_to(&self, realization: &Realization) -> Self {
        let x = self.x.iter().zip(realization.counts.as_slice()).map(|(x, c)| (*x).min(*c)).collect();
        Self { x }
    }

    pub fn delete_all(realization: &Realization) -> Self {
        Self { x: realization.counts.0.clone() }
    }
}

/// Removes `plan.x[i]` voters uniformly without replacement from each
/// reported class and returns the remaining true-type counts.
pub fn execute_attack<R: Rng + ?Sized>(
    realization: &Realization,
    plan: &DeletionPlan,
    rng: &mut R,
) -> Result<TypeCounts, SimulationError> {
    let m = realization.table.len();
    if plan.x.len() != m {
        return Err(SimulationError::DimensionMismatch { expected: m, got: plan.x.len() });
    }
    let mut remaining = realization.true_counts();
    for (i, row) in realization.table.iter().enumerate() {
        let available: u64 = row.iter().sum();
        if plan.x[i] > available {
            return Err(SimulationError::PlanExceedsRealization { class: i, requested: plan.x[i], available });
        }
        for (u, d) in multivariate_hypergeometric(row, plan.x[i], rng).into_iter().enumerate() {
            remaining[u] -= d;
        }
    }
    Ok(TypeCounts(remaining))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::Epsilon;
    use crate::simulation::SeededRng;

    #[test]
    fn identity_reports_are_truthful() {
        let s = VotingSystem::new(1000, vec![0.2, 0.3, 0.5]).unwrap();
        let p = DesignMatrix::randomized_response(3, Epsilon::Infinite).unwrap();
        let r = sample_realization(&s, &p, &mut SeededRng::new(1, 0));
        assert_eq!(r.counts.as_slice(), s.counts().as_slice());
    }

    #[test]
    fn deterministic_attack_under_identity() {
        let r = Realization::from_table(vec![vec![2, 0], vec![0, 4]]);
        let left = execute_attack(&r, &DeletionPlan { x: vec![0, 2] }, &mut SeededRng::new(0, 0)).unwrap();
        assert_eq!(left.as_slice(), &[2, 2]);
        assert!(left.is_cowinner(0));
        let all = execute_attack(&r, &DeletionPlan::delete_all(&r), &mut SeededRng::new(0, 0)).unwrap();
        assert_eq!(all.as_slice(), &[0, 0]);
        assert!(matches!(
            execute_attack(&r, &DeletionPlan { x: vec![3, 0] }, &mut SeededRng::new(0, 0)),
            Err(SimulationError::PlanExceedsRealization { class: 0, .. })
        ));
    }

    #[test]
    fn attack_preserves_totals() {
        let s = VotingSystem::new(500, vec![0.2, 0.3, 0.5]).unwrap();
        let p = DesignMatrix::randomized_response(3, Epsilon::Finite(1.0)).unwrap();
        let mut rng = SeededRng::new(9, 0);
        let r = sample_realization(&s, &p, &mut rng);
        let plan = DeletionPlan { x: r.counts.as_slice().iter().map(|c| c / 3).collect() };
        let left = execute_attack(&r, &plan, &mut rng).unwrap();
        assert_eq!(left.total() + plan.total(), 500);
    }
}
