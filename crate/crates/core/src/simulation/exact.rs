//! Exact winning probability by brute force over every report assignment.

use std::collections::BTreeMap;

use super::{DeletionPlan, SimulationError};
use crate::election::{TypeCounts, VotingSystem, DESIGNATED};
use crate::mechanism::DesignMatrix;

pub const EXACT_MAX_VOTERS: u64 = 12;
pub const EXACT_MAX_CANDIDATES: usize = 3;

/// Probability that `plan` (capped per reported class) makes the designated
/// candidate a co-winner, summed over all `mⁿ` report assignments and all
/// uniformly chosen deletion subsets.
pub fn exact_win_probability(system: &VotingSystem, p: &DesignMatrix, plan: &DeletionPlan) -> Result<f64, SimulationError> {
    let n = system.voters();
    let m = system.candidates();
    if n > EXACT_MAX_VOTERS || m > EXACT_MAX_CANDIDATES {
        return Err(SimulationError::OracleTooLarge { n, m });
    }
    if plan.x.len() != m {
        return Err(SimulationError::DimensionMismatch { expected: m, got: plan.x.len() });
    }
    let voters: Vec<usize> = system
        .counts()
        .as_slice()
        .iter()
        .enumerate()
        .flat_map(|(u, &c)| std::iter::repeat_n(u, c as usize))
        .collect();

    // Group assignments by contingency table; BTreeMap keeps the sum order fixed.
    let mut tables: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    let mut reports = vec![0usize; voters.len()];
    loop {
        let mut weight = 1.0;
        let mut table = vec![0u64; m * m];
        for (&truth, &reported) in voters.iter().zip(&reports) {
            weight *= p.prob(reported, truth);
            table[reported * m + truth] += 1;
        }
        if weight > 0.0 {
            *tables.entry(table).or_insert(0.0) += weight;
        }
        // Odometer over report vectors.
        let mut k = 0;
        while k < reports.len() {
            reports[k] += 1;
            if reports[k] < m {
                break;
            }
            reports[k] = 0;
            k += 1;
        }
        if k == reports.len() {
            break;
        }
    }

    let mut total = 0.0;
    for (flat, weight) in tables {
        let table: Vec<Vec<u64>> = flat.chunks(m).map(<[u64]>::to_vec).collect();
        total += weight * win_given_table(&table, plan);
    }
    Ok(total.clamp(0.0, 1.0))
}

fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All deletion compositions of one reported class with their probabilities.
fn compositions(row: &[u64], k: u64) -> Vec<(Vec<u64>, f64)> {
    let population: u64 = row.iter().sum();
    let k = k.min(population);
    let denom = choose(population, k);
    let mut out = Vec::new();
    let mut d = vec![0u64; row.len()];
    fn rec(row: &[u64], u: usize, left: u64, d: &mut Vec<u64>, denom: f64, out: &mut Vec<(Vec<u64>, f64)>) {
        if u + 1 == row.len() {
            if left <= row[u] {
                d[u] = left;
                let w: f64 = row.iter().zip(d.iter()).map(|(&g, &x)| choose(g, x)).product();
                out.push((d.clone(), w / denom));
            }
            return;
        }
        for take in 0..=left.min(row[u]) {
            d[u] = take;
            rec(row, u + 1, left - take, d, denom, out);
        }
    }
    rec(row, 0, k, &mut d, denom, &mut out);
    out
}

fn win_given_table(table: &[Vec<u64>], plan: &DeletionPlan) -> f64 {
    let m = table.len();
    let truth: Vec<u64> = (0..m).map(|u| table.iter().map(|row| row[u]).sum()).collect();
    let classes: Vec<Vec<(Vec<u64>, f64)>> =
        table.iter().zip(&plan.x).map(|(row, &x)| compositions(row, x)).collect();
    let mut acc = 0.0;
    let mut pick = vec![0usize; m];
    loop {
        let mut weight = 1.0;
        let mut left = truth.clone();
        for (class, &choice) in classes.iter().zip(&pick) {
            let (d, w) = &class[choice];
            weight *= w;
            for (l, x) in left.iter_mut().zip(d) {
                *l -= x;
            }
        }
        if TypeCounts(left).is_cowinner(DESIGNATED) {
            acc += weight;
        }
        let mut k = 0;
        while k < m {
            pick[k] += 1;
            if pick[k] < classes[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == m {
            return acc;
        }
    }
}
