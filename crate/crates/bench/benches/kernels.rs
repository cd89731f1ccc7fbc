use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dirac_sink_bench::{efficiency_peak, noisy_case, site_b};
use dirac_sink_core::dynamics::linspace;
use dirac_sink_core::linalg::expm2;
use dirac_sink_core::noise::mc::{mc_oracle, McConfig};
use dirac_sink_core::spectral::{overlap_criterion_solve, spectrum, st_locate, StGrid};
use dirac_sink_core::{effective_hamiltonian, efficiency_curve, propagate, propagate_noisy, InitialState, IntegratorConfig, C64};

fn spectral(c: &mut Criterion) {
    let p = efficiency_peak();
    c.bench_function("spectrum", |b| b.iter(|| spectrum(black_box(&p))));
    let gen = effective_hamiltonian(&p).non_hermitian() * C64::new(0.0, -0.05);
    c.bench_function("expm2", |b| b.iter(|| expm2(black_box(&gen))));
    c.bench_function("criterion_solve", |b| b.iter(|| overlap_criterion_solve(black_box(2.0), 2.0, 0.0, None)));
    c.bench_function("st_locate", |b| b.iter(|| st_locate(black_box(2.0), 2.0, 0.0, StGrid::for_params(2.0, 2.0))));
}

fn dynamics(c: &mut Criterion) {
    let p = efficiency_peak();
    let rho0 = site_b(&p);
    let cfg = IntegratorConfig::default();
    c.bench_function("propagate_10ps", |b| b.iter(|| propagate(black_box(&p), &rho0, &cfg)));
    let grid = linspace(0.0, 20.0, 201);
    let end = IntegratorConfig::endpoint(10.0);
    c.bench_function("efficiency_curve_201", |b| {
        b.iter(|| efficiency_curve(black_box(&p), &grid, &InitialState::SiteB, &end))
    });
}

fn noise(c: &mut Criterion) {
    let (p, n) = noisy_case();
    let rho0 = site_b(&p);
    let cfg = IntegratorConfig::default();
    c.bench_function("propagate_noisy_10ps", |b| b.iter(|| propagate_noisy(black_box(&p), &n, &rho0, &cfg)));
    let mut group = c.benchmark_group("mc");
    group.sample_size(10);
    let mc = McConfig::seeded(1000, 7);
    group.bench_function("mc_1000_traj", |b| b.iter(|| mc_oracle(black_box(&p), &n, &rho0, &cfg, &mc)));
    group.finish();
}

criterion_group!(benches, spectral, dynamics, noise);
criterion_main!(benches);
