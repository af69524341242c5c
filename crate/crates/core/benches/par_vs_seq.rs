use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hgcolor::hypergraph::{short_cycle_vertices, short_cycles_with};
use hgcolor::nibble::{estimate_keep, KeepGadget};
use hgcolor::randgen::{decompose_with, generate, GenParams, Model, ThresholdMode};
use hgcolor::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn keep(c: &mut Criterion) {
    let g = KeepGadget { k: 3, l: 12, t: vec![5, 30], alpha: 0.3, star_edges: 4 };
    let mut group = c.benchmark_group("estimate_keep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| estimate_keep(&g, 20_000, 7, exec).unwrap())
        });
    }
    group.finish();
}

fn cycles(c: &mut Criterion) {
    let h = generate(&GenParams::new(3, 20_000, 12.0, Model::Binomial, 3)).unwrap();
    let mut group = c.benchmark_group("short_cycles");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("count", name), |b| b.iter(|| short_cycles_with(&h, 4, 0, exec)));
        group.bench_function(BenchmarkId::new("vertices", name), |b| b.iter(|| short_cycle_vertices(&h, exec)));
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let h = generate(&GenParams::new(3, 20_000, 8.0, Model::Binomial, 5)).unwrap();
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| decompose_with(&h, 0.5, ThresholdMode::Definition, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, keep, cycles, decomposition);
criterion_main!(benches);
