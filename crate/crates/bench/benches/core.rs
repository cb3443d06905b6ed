use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use rabi_core::bargmann::K_MAX;
use rabi_core::oracle::{build_hamiltonian, eigenvalues_sym};
use rabi_core::spectrum::{solve_level, spectrum_sweep};
use rabi_core::verify::spinor_norm;
use rabi_core::{build_eigenfunction, Branch, ModelParams};

fn params(g: f64) -> ModelParams {
    ModelParams::u_plus(1.0, 0.5, g).unwrap()
}

fn jacobi(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi");
    group.sample_size(10);
    for cutoff in [50, 100, 200] {
        let h = build_hamiltonian(&params(0.6), cutoff);
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &h, |b, h| {
            b.iter(|| eigenvalues_sym(black_box(h.matrix())).unwrap())
        });
    }
    group.finish();
}

fn spectrum(c: &mut Criterion) {
    let p = params(0.3);
    c.bench_function("solve_level/upper_n5", |b| {
        b.iter(|| solve_level(black_box(&p), 5, Branch::Upper).unwrap())
    });
    c.bench_function("solve_level/lower_n5", |b| {
        b.iter(|| solve_level(black_box(&p), 5, Branch::Lower).unwrap())
    });
    let grid: Vec<f64> = (1..=39).map(|i| 0.05 * (i + 1) as f64).collect();
    c.bench_function("spectrum_sweep/39x6x2", |b| {
        b.iter(|| spectrum_sweep(black_box(&p), &grid, 5, &Branch::BOTH).unwrap())
    });
}

fn norm(c: &mut Criterion) {
    let p = params(0.3);
    let mut group = c.benchmark_group("spinor_norm");
    for (branch, n) in [(Branch::Upper, 2), (Branch::Upper, 10), (Branch::Lower, 5)] {
        let point = solve_level(&p, n, branch).unwrap()[0];
        let ef = build_eigenfunction(&p, &point).unwrap();
        group.bench_function(format!("{branch}_n{n}"), |b| {
            b.iter(|| spinor_norm(black_box(&ef), K_MAX).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, jacobi, spectrum, norm);
criterion_main!(benches);
