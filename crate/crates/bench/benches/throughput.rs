use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use neuropde::cells::{activation_cycle, Neuron, Synapse};
use neuropde::chain::{build_chain, transition_probabilities, RightBoundary};
use neuropde::rng::stream;
use neuropde::walk::{run_walkers, HardwareSettings, WalkBackend, WalkConfig};

fn walk(c: &mut Criterion) {
    let chain = build_chain(2.0, 50, 0.00038, RightBoundary::Reflecting).unwrap();
    let backend = WalkBackend::software(&chain);
    let cfg = WalkConfig::time_dependent(100_000, 25, 80);
    let mut g = c.benchmark_group("walk");
    g.throughput(Throughput::Elements(100_000 * 80));
    g.sample_size(20);
    g.bench_function("time_dependent_1_worker", |b| {
        b.iter(|| run_walkers(&cfg, &backend, black_box(7), 1).unwrap())
    });
    g.finish();
}

fn probabilities(c: &mut Criterion) {
    c.bench_function("transition_probabilities", |b| {
        b.iter(|| transition_probabilities(black_box(0.04), black_box(0.00038)).unwrap())
    });
}

fn cells(c: &mut Criterion) {
    let hw = HardwareSettings::default();
    let syn = {
        let mut s = Synapse::new(hw.ftj.clone(), hw.r_series());
        s.program(0.4055, &hw.programming).unwrap();
        s
    };
    let mut rng = stream(1);
    c.bench_function("activation_cycle", |b| {
        b.iter_batched(
            || {
                (
                    Neuron::new(0, hw.mtj.clone()),
                    Neuron::active(1, hw.mtj.clone()),
                    Neuron::new(2, hw.mtj.clone()),
                )
            },
            |(mut l, mut m, mut r)| {
                activation_cycle(&mut l, &mut m, &mut r, &syn, &hw.noise, &hw.drive, &mut rng).unwrap()
            },
            BatchSize::SmallInput,
        )
    });

    let chain = build_chain(2.0, 50, 0.00038, RightBoundary::Absorbing).unwrap();
    let small = HardwareSettings {
        history_trials: 10_000,
        ..HardwareSettings::default()
    };
    let mut g = c.benchmark_group("history");
    g.throughput(Throughput::Elements(small.history_trials));
    g.sample_size(10);
    g.bench_function("hardware_table_10k", |b| {
        b.iter(|| WalkBackend::hardware(&chain, &small, black_box(3)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, walk, probabilities, cells);
criterion_main!(benches);
