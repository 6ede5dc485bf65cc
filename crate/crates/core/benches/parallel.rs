use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use poldp::election::VotingSystem;
use poldp::exec::Execution;
use poldp::harness::{sweep, EpsilonGrid, ExperimentConfig};
use poldp::mechanism::DesignMatrix;
use poldp::simulation::{estimate_win_probability, PlanPolicy};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn sweep_cells(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_m5_20x51");
    group.sample_size(10);
    for (name, execution) in MODES {
        let config = ExperimentConfig {
            instances: 20,
            grid: EpsilonGrid::new(0.0, 5.0, 0.1).unwrap(),
            execution,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &config, |b, config| {
            b.iter(|| black_box(sweep(config).unwrap()))
        });
    }
    group.finish();
}

fn win_probability(c: &mut Criterion) {
    let system = VotingSystem::new(10_000, vec![0.4, 0.6]).unwrap();
    let p = DesignMatrix::two_candidate(0.5);
    let policy = PlanPolicy::UpperRounded { delta: 0.05 };
    let mut group = c.benchmark_group("win_probability_n1e4_1000_trials");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(estimate_win_probability(&system, &p, &policy, 1000, 0, execution).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep_cells, win_probability);
criterion_main!(benches);
