use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use uavcovert::detection::{simulate_detection, total_error};
use uavcovert::link_sim::simulate_link;
use uavcovert::optimizer::{maximize_covert_rate, GridSpec};
use uavcovert::security_height_bound;
use uavcovert_bench::scenario;

fn detection(c: &mut Criterion) {
    let s = scenario(2.0, 5.0, 1000f64.sqrt());
    let mut g = c.benchmark_group("detection");
    g.throughput(Throughput::Elements(100_000));
    g.bench_function("closed_form_grid_1e5", |b| {
        b.iter(|| (0..100_000).map(|i| total_error(i as f64 * 1e-5, black_box(&s)).zeta).sum::<f64>())
    });
    for n in [10_000u64, 100_000] {
        g.throughput(Throughput::Elements(n));
        g.bench_with_input(BenchmarkId::new("monte_carlo", n), &n, |b, &n| {
            b.iter(|| simulate_detection(black_box(&s), 0.03, n, 7).unwrap())
        });
    }
    g.finish();
}

fn link(c: &mut Criterion) {
    let s = scenario(2.0, 5.0, 50.0);
    let mut g = c.benchmark_group("link");
    g.throughput(Throughput::Elements(100_000));
    g.bench_function("simulate_1e5_symbols", |b| b.iter(|| simulate_link(black_box(&s), 100_000, 3).unwrap()));
    g.finish();
}

fn constraints(c: &mut Criterion) {
    let s = scenario(10.0, 5.0, 0.0);
    c.bench_function("security_height_bound", |b| b.iter(|| security_height_bound(black_box(&s), 0.05).unwrap()));
}

fn optimizer(c: &mut Criterion) {
    let s = scenario(50.0, 5.0, 0.0);
    let mut g = c.benchmark_group("optimizer");
    for n in [8usize, 32] {
        let grid = GridSpec::uniform(s.p_max, n, n).unwrap();
        g.throughput(Throughput::Elements((n * n) as u64));
        g.bench_with_input(BenchmarkId::new("grid", n * n), &grid, |b, grid| {
            b.iter(|| maximize_covert_rate(black_box(&s), grid).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, detection, link, constraints, optimizer);
criterion_main!(benches);
