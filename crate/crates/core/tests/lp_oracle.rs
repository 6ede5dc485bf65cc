//! The simplex and branch-and-bound solvers against brute-force oracles:
//! vertex enumeration for the continuous program and full enumeration of
//! the integer box for the integer one.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use poldp::election::VotingSystem;
use poldp::lp::{build_bounding, build_plain, solve_ilp_exact, solve_lp, DeletionProblem, Side};
use poldp::mechanism::{central_realization, posterior_matrix, DesignMatrix, Epsilon, Mechanism};
use poldp::simulation::sample_realization;

/// Every choice of `m` tight constraints among rows, `x ≥ 0` and `x ≤ u`;
/// the box keeps the program bounded, so a feasible optimum is a vertex.
fn vertex_optimum(p: &DeletionProblem) -> Option<f64> {
    let m = p.vars();
    let mut planes: Vec<(Vec<f64>, f64)> = p.coeffs.iter().cloned().zip(p.rhs.iter().copied()).collect();
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        planes.push((e.clone(), 0.0));
        planes.push((e, p.upper[j]));
    }
    let scale = p.upper.iter().chain(&p.rhs).fold(1.0f64, |a, b| a.max(b.abs()));
    let mut best: Option<f64> = None;
    let k = planes.len();
    let mut chosen = vec![0usize; m];
    fn next(chosen: &mut [usize], k: usize) -> bool {
        let m = chosen.len();
        for i in (0..m).rev() {
            if chosen[i] < k - m + i {
                chosen[i] += 1;
                for j in i + 1..m {
                    chosen[j] = chosen[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, c) in chosen.iter_mut().enumerate() {
        *c = i;
    }
    loop {
        let a = DMatrix::from_fn(m, m, |r, c| planes[chosen[r]].0[c]);
        let b = DVector::from_fn(m, |r, _| planes[chosen[r]].1);
        if a.determinant().abs() > 1e-12 {
            if let Some(x) = a.lu().solve(&b) {
                let tol = 1e-7 * scale;
                let in_box = (0..m).all(|j| x[j] >= -tol && x[j] <= p.upper[j] + tol);
                let rows_ok = p.coeffs.iter().zip(&p.rhs).all(|(row, &r)| {
                    row.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() >= r - tol
                });
                if in_box && rows_ok {
                    let obj: f64 = x.iter().sum();
                    best = Some(best.map_or(obj, |b: f64| b.min(obj)));
                }
            }
        }
        if !next(&mut chosen, k) {
            break;
        }
    }
    best
}

fn random_system(rng: &mut ChaCha8Rng, m: usize, n: u64) -> VotingSystem {
    loop {
        let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut lambda: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let argmin = (0..m).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b])).unwrap();
        lambda.swap(0, argmin);
        let s = VotingSystem::new(n, lambda).unwrap();
        if s.gap() > 0.01 {
            return s;
        }
    }
}

fn random_design(rng: &mut ChaCha8Rng, m: usize) -> DesignMatrix {
    let mechanism = if rng.random_bool(0.5) { Mechanism::RandomizedResponse } else { Mechanism::Laplace };
    DesignMatrix::build(mechanism, m, Epsilon::Finite(rng.random_range(0.05..4.0))).unwrap()
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    let mut infeasible = 0;
    for _ in 0..300 {
        let m = rng.random_range(2..=4);
        let system = random_system(&mut rng, m, 1_000_000);
        let p = random_design(&mut rng, m);
        let q = posterior_matrix(&p, &system).unwrap();
        let tau = central_realization(&p, &system).unwrap().tau_hat;
        let problem = match rng.random_range(0..3) {
            0 => build_plain(&system, &q, &tau).unwrap(),
            1 => build_bounding(&system, &q, &tau, rng.random_range(0.0..0.3), Side::Upper).unwrap(),
            _ => build_bounding(&system, &q, &tau, rng.random_range(0.0..0.3), Side::Lower).unwrap(),
        };
        let sol = solve_lp(&problem).unwrap();
        match vertex_optimum(&problem) {
            Some(best) => {
                assert!(sol.is_optimal(), "solver says infeasible, oracle found {best}: {problem:?}");
                assert!((sol.objective_value - best).abs() <= 1e-7 * best.max(1.0), "{} vs {best}", sol.objective_value);
                assert!(problem.is_feasible(&sol.x));
                compared += 1;
            }
            None => {
                assert!(!sol.is_optimal(), "oracle found no vertex, solver returned {sol:?}");
                infeasible += 1;
            }
        }
    }
    assert!(compared > 200, "{compared} optimal, {infeasible} infeasible");
}

fn brute_force_integer(p: &DeletionProblem) -> Option<u64> {
    let bounds: Vec<u64> = p.upper.iter().map(|u| u.round() as u64).collect();
    let mut x = vec![0u64; bounds.len()];
    let mut best: Option<u64> = None;
    loop {
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        if p.violation(&xf) <= 1e-9 {
            let s = x.iter().sum();
            best = Some(best.map_or(s, |b: u64| b.min(s)));
        }
        let mut j = 0;
        loop {
            if j == x.len() {
                return best;
            }
            if x[j] < bounds[j] {
                x[j] += 1;
                break;
            }
            x[j] = 0;
            j += 1;
        }
    }
}

#[test]
fn branch_and_bound_matches_enumeration_and_stays_within_m_of_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..150 {
        let m = rng.random_range(2..=3);
        let n = rng.random_range(5..=25);
        let system = random_system(&mut rng, m, n);
        let p = random_design(&mut rng, m);
        let q = posterior_matrix(&p, &system).unwrap();
        // A realized τ has integral `nτ`, as the oracle requires.
        let tau = sample_realization(&system, &p, &mut rng).tau();
        let problem = build_plain(&system, &q, &tau).unwrap();
        let ilp = solve_ilp_exact(&problem).unwrap();
        let lp = solve_lp(&problem).unwrap();
        match brute_force_integer(&problem) {
            Some(best) => {
                assert!(ilp.is_optimal());
                assert_eq!(ilp.objective_value.round() as u64, best, "{problem:?}");
                assert!(lp.is_optimal());
                let gap = ilp.objective_value - lp.objective_value;
                assert!((-1e-9..=m as f64 + 1e-9).contains(&gap), "gap {gap}");
            }
            None => assert!(!ilp.is_optimal()),
        }
    }
}
