//! Parallel vs sequential Monte Carlo sweep throughput.

use criterion::{criterion_group, criterion_main, Criterion};
use fractal_analog::sim::{run_sweep, run_sweep_serial, CodeSpec, SimConfig};
use std::hint::black_box;

fn golay_cfg(trials: usize) -> SimConfig {
    SimConfig {
        w: 0.75,
        depth: 32,
        planes_per_level: 2,
        stages: 5,
        block_len: 6,
        code: CodeSpec::Registry("golay23".into()),
        snr_grid_db: vec![30.0],
        trials,
        seed: 1,
        genie: false,
    }
}

fn ra_cfg(trials: usize) -> SimConfig {
    SimConfig {
        w: 0.75,
        depth: 16,
        planes_per_level: 2,
        stages: 2,
        block_len: 150,
        code: CodeSpec::Ra {
            repeat: 2,
            grouping: 1,
            iterations: 20,
            interleaver_seed: 1,
        },
        snr_grid_db: vec![14.0],
        trials,
        seed: 1,
        genie: false,
    }
}

fn bench_sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("golay_sweep");
    group.sample_size(10);
    let cfg = golay_cfg(2000);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_sweep(&cfg).unwrap()))
    });
    group.bench_function("serial", |b| {
        b.iter(|| black_box(run_sweep_serial(&cfg).unwrap()))
    });
    group.finish();

    let mut group = c.benchmark_group("ra_sweep");
    group.sample_size(10);
    let cfg = ra_cfg(24);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run_sweep(&cfg).unwrap()))
    });
    group.bench_function("serial", |b| {
        b.iter(|| black_box(run_sweep_serial(&cfg).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_sweeps);
criterion_main!(benches);
