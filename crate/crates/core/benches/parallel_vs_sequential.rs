use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use onofri_core::axisym::{axisym_scan, LegendreBasis};
use onofri_core::onofri::{alpha_scan, MinimizeOptions};
use onofri_core::shooting::beta_curve;
use onofri_core::sphere::SphereGrid;
use onofri_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_beta_curve(c: &mut Criterion) {
    let mut group = c.benchmark_group("beta_curve_l1_33");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(beta_curve(1.0, -2.0, 6.0, 33, exec).unwrap()))
        });
    }
    group.finish();
}

fn bench_alpha_scan(c: &mut Criterion) {
    let grid = SphereGrid::default_grid();
    let opts = MinimizeOptions::default();
    let alphas = [0.6, 0.7, 0.8, 0.9];
    let mut group = c.benchmark_group("alpha_scan_4x4");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(alpha_scan(&grid, &alphas, 4, 42, &opts, exec).unwrap()))
        });
    }
    group.finish();
}

fn bench_axisym_scan(c: &mut Criterion) {
    let basis = LegendreBasis::default_basis();
    let opts = MinimizeOptions::default();
    let alphas = [0.5, 0.6, 0.7, 0.8];
    let mut group = c.benchmark_group("axisym_scan_4x8");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(axisym_scan(&basis, &alphas, 8, 42, &opts, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_beta_curve, bench_alpha_scan, bench_axisym_scan);
criterion_main!(benches);
