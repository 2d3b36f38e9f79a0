use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use distint_core::cesaro::cesaro_sum;
use distint_core::{
    dist_integrate, dist_integrate_with, fourier_coeffs, integrate_abs, parse, phi_field, point_value, recover_value,
    DistRep, Expr, IntegrateOpts, KernelSpec,
};
use std::f64::consts::PI;

fn integrals(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrate");
    for src in ["step(cn=(-1)^n*n*(n+1))", "chirp(alpha=-3, beta=1, sin)", "exp(x) * chirp(a=0.5, alpha=-1.5, beta=1, cos)"] {
        let e = parse(src).unwrap();
        g.bench_with_input(BenchmarkId::new("dist", src), &e, |b, e| b.iter(|| dist_integrate(e, 0.0, 1.0).unwrap()));
    }
    let hake = IntegrateOpts { force_hake: true, ..IntegrateOpts::default() };
    let chirp = parse("chirp(alpha=-3, beta=1, sin)").unwrap();
    g.sample_size(10);
    g.bench_function("hake", |b| b.iter(|| dist_integrate_with(&chirp, 0.0, 1.0, &hake).unwrap()));
    let root = parse("pow(alpha=-0.5) + exp(-x^2)").unwrap();
    g.bench_function("abs", |b| b.iter(|| integrate_abs(&root, 0.0, 1.0, 1e-12).unwrap()));
    g.finish();
}

fn point_values(c: &mut Criterion) {
    let e = parse("chirp(alpha=-1.5, beta=1, sin) + indicator(0, 1)").unwrap();
    c.bench_function("point_value", |b| b.iter(|| point_value(&e, black_box(0.0), 6)));
}

fn cesaro(c: &mut Criterion) {
    let alt: Vec<f64> = (1..=100_000).map(|n| if n % 2 == 0 { n as f64 } else { -(n as f64) }).collect();
    c.bench_function("cesaro_k2", |b| b.iter(|| cesaro_sum(black_box(&alt), 2, 1e-4)));
}

fn transforms(c: &mut Criterion) {
    let saw = Expr::periodic(2.0 * PI, parse(&format!("poly({}, -0.5)", PI / 2.0)).unwrap()).unwrap();
    let mut g = c.benchmark_group("transforms");
    g.sample_size(10);
    g.bench_function("fourier_coeffs_1e3", |b| b.iter(|| fourier_coeffs(&saw, 1000).unwrap()));
    let fd = fourier_coeffs(&saw, 10_000).unwrap();
    g.bench_function("recover_value", |b| b.iter(|| recover_value(&fd, black_box(1.0), &[0.5, 1.0, 2.0]).unwrap()));
    let d = DistRep { fn_part: Some(parse("indicator(-1, 1)").unwrap()), atoms: vec![(1.0, 1, 0.0)] };
    let gx: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    for (name, k) in [("poisson", KernelSpec::poisson()), ("bump", KernelSpec::bump(1.0).unwrap())] {
        g.bench_function(BenchmarkId::new("phi_field", name), |b| b.iter(|| phi_field(&d, &k, &gx, &[1.0, 0.1, 0.01]).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, integrals, point_values, cesaro, transforms);
criterion_main!(benches);
