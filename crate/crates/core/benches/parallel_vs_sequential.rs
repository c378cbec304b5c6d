use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hybrid_degen::admissible::{key_estimate, sphere_grid};
use hybrid_degen::berkovich::{na_measure, probe_tree, GreenSolver, ProbeOptions};
use hybrid_degen::cxdyn::{backward_sample_chains, point, specialize};
use hybrid_degen::exec::Exec;
use hybrid_degen::laurent::C64;
use hybrid_degen::parser::parse_family;

const POLICIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn bench_key_estimate(c: &mut Criterion) {
    let family = parse_family("z^2 + 1/t").unwrap();
    let grid = sphere_grid(4000);
    let t = C64::new(0.125, 0.0);
    let mut group = c.benchmark_group("key_estimate");
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| key_estimate(&family, t, black_box(&grid), 6, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_sampler(c: &mut Criterion) {
    let family = parse_family("z^2 + 1/t").unwrap();
    let map = specialize(&family, C64::new(1e-3, 0.0)).unwrap();
    let start = point(C64::new(0.3711, 0.618));
    let mut group = c.benchmark_group("backward_sample_chains");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| backward_sample_chains(&map, 7, 8, 100, 5_000, start, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_na_measure(c: &mut Criterion) {
    let family = parse_family("z^3 + t^-2").unwrap();
    let opts = ProbeOptions {
        q: 3,
        ..ProbeOptions::default()
    };
    let tree = probe_tree(&family, &opts).unwrap();
    let solver = GreenSolver::new(&family, 0.5, 6).unwrap();
    let mut group = c.benchmark_group("na_measure");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| na_measure(&family, tree.clone(), &solver, 6, 1e-6, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_key_estimate, bench_sampler, bench_na_measure);
criterion_main!(benches);
