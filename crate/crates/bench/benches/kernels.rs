use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fv_bench::{circle_measure, gaussian_field};
use fv_core::restriction::geometric_radii;
use fv_core::{
    apply_diff_poly, average_field, decay_exponent, extend, fourier_transform, make_circle, make_rotation_weight,
    restrict, solve_sumset, CurveChart, DiffPolynomial,
};
use std::sync::Arc;

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier_transform");
    for n in [128usize, 256] {
        let f = gaussian_field(2, 8.0, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| fourier_transform(black_box(f))));
    }
    group.finish();
}

fn restriction(c: &mut Criterion) {
    let f = gaussian_field(2, 6.0, 64);
    let circle = Arc::new(make_circle(1.0, 128).unwrap());
    c.bench_function("restrict_64x64_to_128_nodes", |b| b.iter(|| restrict(black_box(&f), &circle)));
    let zeta = circle_measure(1024);
    let points: Vec<Vec<f64>> = (0..256).map(|k| vec![0.1 * k as f64, 0.05 * k as f64]).collect();
    c.bench_function("extend_1024_nodes_256_points", |b| b.iter(|| extend(black_box(&zeta), &points)));
    let radii = geometric_radii(10.0, 200.0, 12);
    c.bench_function("decay_exponent_circle_4096", |b| {
        let zeta = circle_measure(4096);
        b.iter(|| decay_exponent(black_box(&zeta), &[0.6, 0.8], &radii))
    });
}

fn smoothing(c: &mut Criterion) {
    let g = gaussian_field(2, 8.0, 128);
    let w = make_rotation_weight(2, 8, 64).unwrap();
    c.bench_function("average_field_128", |b| b.iter(|| average_field(black_box(&g), &w)));
}

fn symbols(c: &mut Criterion) {
    let g = gaussian_field(2, 6.0, 128);
    let helmholtz = DiffPolynomial::helmholtz(2);
    c.bench_function("apply_helmholtz_128", |b| b.iter(|| apply_diff_poly(&helmholtz, black_box(&g))));
    let chart = CurveChart::parabola(1.0).unwrap();
    c.bench_function("solve_sumset", |b| b.iter(|| solve_sumset(&chart, black_box(0.3), black_box(0.4))));
}

criterion_group!(benches, transforms, restriction, smoothing, symbols);
criterion_main!(benches);
