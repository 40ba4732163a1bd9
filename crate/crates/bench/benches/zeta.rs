use criterion::{black_box, criterion_group, criterion_main, Criterion};
use undertone::zeta::{find_zeros, zeta, zeta_eta, RowEvaluator, DEFAULT_TOL};
use undertone::Complex64;

fn single(c: &mut Criterion) {
    let mut g = c.benchmark_group("zeta");
    for (name, s) in [
        ("strip_t100", Complex64::new(0.5, 100.0)),
        ("strip_t480", Complex64::new(0.5, 480.0)),
        ("left_t100", Complex64::new(-3.0, 100.0)),
    ] {
        g.bench_function(name, |b| b.iter(|| zeta(black_box(s), DEFAULT_TOL).unwrap()));
    }
    g.bench_function("eta_t100", |b| b.iter(|| zeta_eta(black_box(Complex64::new(0.5, 100.0))).unwrap()));
    g.finish();
}

fn rows(c: &mut Criterion) {
    let sigmas: Vec<f64> = (0..=400).map(|i| -1.0 + 0.01 * i as f64).collect();
    let eval = RowEvaluator::new(&sigmas, 483.0).unwrap();
    let mut g = c.benchmark_group("row");
    for t in [50.0, 480.0] {
        g.bench_function(format!("401_points_t{t}"), |b| b.iter(|| eval.row(black_box(t))));
    }
    g.finish();
}

fn zeros(c: &mut Criterion) {
    let mut g = c.benchmark_group("find_zeros");
    g.sample_size(10);
    g.bench_function("0_to_100", |b| b.iter(|| find_zeros(0.0, black_box(100.0)).unwrap().len()));
    g.finish();
}

criterion_group!(benches, single, rows, zeros);
criterion_main!(benches);
