use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tpagg::analysis::verify_wss_sufficiency;
use tpagg::scenario::sweep_wss_count;
use tpagg::stress::{run_stress, StressConfig};
use tpagg::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn stress(c: &mut Criterion) {
    let cfg = StressConfig {
        sequences: 2_000,
        ..Default::default()
    };
    let mut g = c.benchmark_group("stress_2000_sequences");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(run_stress(&cfg, exec)))
        });
    }
    g.finish();
}

fn sufficiency(c: &mut Criterion) {
    let mut g = c.benchmark_group("sufficiency_n14_m6_k4");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(verify_wss_sufficiency(14, 6, 4, exec)))
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let ks: Vec<u32> = (1..=32).collect();
    let mut g = c.benchmark_group("sweep_n1-10000_k1-32");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(sweep_wss_count(1..=10_000, &ks, 8, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, stress, sufficiency, sweep);
criterion_main!(benches);
