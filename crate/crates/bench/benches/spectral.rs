use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use specasym_bench::{dirichlet, fourth_order, fourth_order_problem, sixth_order, third_order_linear};
use specasym_core::solutions::{birkhoff_fss, default_upsilon_grid, upsilon, BirkhoffSettings};
use specasym_core::spectrum::{char_delta, locate_eigenvalues, weight_numbers, LocateSettings};
use specasym_core::{build_associated_matrix, conjugate_system, diagonal_split, sector_frame, C};

fn regularization(c: &mut Criterion) {
    let spec = sixth_order();
    c.bench_function("associated matrix n=6", |b| b.iter(|| build_associated_matrix(black_box(&spec)).unwrap()));
}

fn delta(c: &mut Criterion) {
    let problem = fourth_order_problem();
    let lambda = C::from_polar(50.0, 0.2).powu(4);
    c.bench_function("Delta n=4 |rho|=50", |b| b.iter(|| char_delta(&problem, black_box(lambda)).unwrap()));
}

fn locate(c: &mut Criterion) {
    let mut g = c.benchmark_group("locate");
    g.sample_size(10);
    let settings = LocateSettings::default();
    let d = dirichlet();
    g.bench_function("Dirichlet l=1..20", |b| b.iter(|| locate_eigenvalues(&d, 1, 20, &settings).unwrap()));
    let t = third_order_linear();
    g.bench_function("third order l=1..10", |b| b.iter(|| locate_eigenvalues(&t, 1, 10, &settings).unwrap()));
    let data = locate_eigenvalues(&d, 1, 10, &settings).unwrap().data;
    g.bench_function("Dirichlet weights l=1..10", |b| b.iter(|| weight_numbers(&d, &data).unwrap()));
    g.finish();
}

fn birkhoff(c: &mut Criterion) {
    let f = build_associated_matrix(&fourth_order()).unwrap();
    let frame = sector_frame(4, 1).unwrap();
    let sys = conjugate_system(&diagonal_split(&f), &frame).unwrap();
    let rho = frame.midpoint_direction() * 50.0;
    let settings = BirkhoffSettings::default();
    let mut g = c.benchmark_group("birkhoff");
    g.sample_size(10);
    g.bench_function("FSS n=4 |rho|=50", |b| b.iter(|| birkhoff_fss(&sys, black_box(rho), &settings).unwrap()));
    g.bench_function("Upsilon n=4 |rho|=50", |b| b.iter(|| upsilon(&sys, black_box(rho), default_upsilon_grid(rho))));
    g.finish();
}

criterion_group!(benches, regularization, delta, locate, birkhoff);
criterion_main!(benches);
