use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::config::{ExperimentConfig, Generator};
use super::HarnessError;
use crate::election::{VotingSystem, DESIGNATED};
use crate::simulation::SeededRng;

pub const MAX_GENERATION_ATTEMPTS: usize = 10_000;

fn symmetric_dirichlet<R: Rng + ?Sized>(m: usize, alpha: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    loop {
        let draws: Vec<f64> = (0..m).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|d| d / total).collect();
        }
    }
}

/// Moves the smallest coordinate to the designated index.
fn designate_minimum(lambda: &mut [f64]) {
    let argmin = (0..lambda.len()).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap_or(DESIGNATED);
    lambda.swap(DESIGNATED, argmin);
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn generate_fixed_gap_with<R: Rng + ?Sized>(m: usize, phi: f64, n: u64, rng: &mut R) -> Result<VotingSystem, HarnessError> {
    if m < 2 {
        return Err(HarnessError::InvalidConfig(format!("m must be at least 2, got {m}")));
    }
    if !(phi > 0.0 && phi < 1.0) {
        return Err(HarnessError::InvalidConfig(format!("phi must lie in (0, 1), got {phi}")));
    }
    let uniform = 1.0 / m as f64;
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let mut lambda = symmetric_dirichlet(m, 1.0, rng);
        designate_minimum(&mut lambda);
        let spread = max_of(&lambda) - lambda[DESIGNATED];
        if spread <= 0.0 {
            continue;
        }
        // The affine pull toward uniform keeps Σλ = 1 and the ordering.
        let scale = phi / spread;
        let scaled: Vec<f64> = lambda.iter().map(|l| uniform + scale * (l - uniform)).collect();
        if scaled[DESIGNATED] < 0.0 {
            continue;
        }
        return Ok(VotingSystem::new(n, scaled)?);
    }
    Err(HarnessError::GenerationFailed { m, phi, attempts: MAX_GENERATION_ATTEMPTS })
}

/// λ uniform on the simplex with the designated candidate minimal, rescaled
/// so that `λ_max − λ_1 = φ`.
pub fn generate_fixed_gap(m: usize, phi: f64, n: u64, seed: u64) -> Result<VotingSystem, HarnessError> {
    generate_fixed_gap_with(m, phi, n, &mut SeededRng::new(seed, 0))
}

pub fn generate_dirichlet_with<R: Rng + ?Sized>(m: usize, n: u64, rng: &mut R) -> Result<VotingSystem, HarnessError> {
    if m < 2 {
        return Err(HarnessError::InvalidConfig(format!("m must be at least 2, got {m}")));
    }
    loop {
        let mut lambda = symmetric_dirichlet(m, 2.0, rng);
        designate_minimum(&mut lambda);
        if lambda[DESIGNATED] < max_of(&lambda) {
            return Ok(VotingSystem::new(n, lambda)?);
        }
    }
}

/// λ from a symmetric Dirichlet(2), relabelled so the designated candidate is minimal.
pub fn generate_dirichlet(m: usize, n: u64, seed: u64) -> Result<VotingSystem, HarnessError> {
    generate_dirichlet_with(m, n, &mut SeededRng::new(seed, 0))
}

/// The raw Dirichlet(2) draw before relabelling, for distribution checks.
pub fn sample_dirichlet_raw(m: usize, rng: &mut SeededRng) -> Vec<f64> {
    symmetric_dirichlet(m, 2.0, rng)
}

/// Instance `i` draws from stream `i` of the configured seed.
pub fn generate_instances(config: &ExperimentConfig) -> Result<Vec<VotingSystem>, HarnessError> {
    (0..config.instance_count())
        .map(|i| {
            let mut rng = SeededRng::new(config.seed, i as u64);
            match &config.generator {
                Generator::FixedGap { phi } => generate_fixed_gap_with(config.m, *phi, config.n, &mut rng),
                Generator::Dirichlet => generate_dirichlet_with(config.m, config.n, &mut rng),
                Generator::Explicit { lambda } => Ok(VotingSystem::new(config.n, lambda.clone())?),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_candidates_are_determined_by_the_gap() {
        for seed in 0..5 {
            let s = generate_fixed_gap(2, 0.2, 1000, seed).unwrap();
            assert!((s.lambda()[0] - 0.4).abs() < 1e-12 && (s.lambda()[1] - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_gap_is_exact() {
        for seed in 0..20 {
            let s = generate_fixed_gap(5, 0.1, 1000, seed).unwrap();
            assert!((s.gap() - 0.1).abs() < 1e-12);
            assert!(s.lambda().iter().all(|&l| l >= s.lambda()[0]));
        }
    }

    #[test]
    fn dirichlet_is_deterministic_and_designates_minimum() {
        let a = generate_dirichlet(5, 1000, 42).unwrap();
        let b = generate_dirichlet(5, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.lambda()[0] < a.lambda_max());
        assert!((a.lambda().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
