use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use annobias_core::audit::{run_audit, AuditConfig};
use annobias_core::corpus::mention_index;
use annobias_core::glm::{permutation_test, Statistic};
use annobias_core::psychometrics::{fit_rasch_cml, RaschOptions};
use annobias_core::simulate::{simulate_audit_scenario, simulate_rasch, AuditScenarioConfig};
use annobias_core::Execution;

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn audit(c: &mut Criterion) {
    let s = simulate_audit_scenario(&AuditScenarioConfig::default(), 1).unwrap();
    let (mentions, _) = mention_index(&s.posts, &s.lexicon);
    let config = AuditConfig {
        iterations: 20,
        ..AuditConfig::default()
    };
    let mut g = c.benchmark_group("run_audit_2000_items_20_iterations");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                run_audit(
                    &s.annotations,
                    &s.posts,
                    &mentions,
                    &s.embeddings,
                    &config,
                    exec,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

fn permutation(c: &mut Criterion) {
    let a: Vec<f64> = (0..300).map(|i| ((i * 37) % 101) as f64 / 100.0).collect();
    let b: Vec<f64> = (0..300).map(|i| ((i * 53) % 97) as f64 / 90.0).collect();
    let mut g = c.benchmark_group("permutation_test_300x300_20000_draws");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::from_parameter(name), |bch| {
            bch.iter(|| {
                permutation_test(
                    black_box(&a),
                    black_box(&b),
                    Statistic::MeanDiff,
                    20_000,
                    7,
                    exec,
                )
                .unwrap()
            })
        });
    }
    g.finish();
}

fn replicated_recovery(c: &mut Criterion) {
    let mut g = c.benchmark_group("rasch_recovery_16_replicates");
    g.sample_size(10);
    for (name, exec) in STRATEGIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map_range(16, |seed| {
                    let (m, _, _) = simulate_rasch(500, 30, seed as u64).unwrap();
                    fit_rasch_cml(&m, &RaschOptions::default())
                        .unwrap()
                        .difficulties
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, audit, permutation, replicated_recovery);
criterion_main!(benches);
