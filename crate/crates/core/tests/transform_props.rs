use distint_core::phitransform::phi_value;
use distint_core::{
    dist_integrate, fourier_coeffs, parse, phi_field, recover_value, DistRep, Expr, FourierData, KernelSpec, PointStatus,
    Smooth,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng};
use std::f64::consts::PI;

fn sawtooth() -> Expr {
    Expr::periodic(2.0 * PI, parse(&format!("poly({}, -0.5)", PI / 2.0)).unwrap()).unwrap()
}

fn kernels() -> [KernelSpec; 2] {
    [KernelSpec::poisson(), KernelSpec::bump(1.0).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn field_is_linear(p in -2.0f64..2.0, q in -2.0f64..2.0, x0 in -0.5f64..0.5) {
        let d1 = DistRep { fn_part: Some(parse("indicator(-0.5, 0.7)").unwrap()), atoms: vec![(1.0, 0, x0)] };
        let d2 = DistRep { fn_part: Some(parse("chirp(alpha=-0.5, beta=1, sin) + x").unwrap()), atoms: vec![(0.5, 1, 0.2)] };
        let mix = DistRep {
            fn_part: Some(Expr::Sum(vec![Expr::scale(p, d1.fn_part.clone().unwrap()), Expr::scale(q, d2.fn_part.clone().unwrap())])),
            atoms: vec![(p, 0, x0), (0.5 * q, 1, 0.2)],
        };
        let (gx, gt) = ([-0.6, 0.0, 0.35], [0.5, 0.1]);
        for k in kernels() {
            let (f1, f2, fm) = (
                phi_field(&d1, &k, &gx, &gt).unwrap(),
                phi_field(&d2, &k, &gx, &gt).unwrap(),
                phi_field(&mix, &k, &gx, &gt).unwrap(),
            );
            for i in 0..gt.len() {
                for j in 0..gx.len() {
                    let want = p * f1.values[i][j] + q * f2.values[i][j];
                    prop_assert!((fm.values[i][j] - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {want}", fm.values[i][j]);
                }
            }
        }
    }
}

#[test]
fn atom_fields_differentiate_into_each_other() {
    for k in kernels() {
        for m in 0..3 {
            let (lo, hi) = (DistRep::atom(1.0, m, 0.1), DistRep::atom(1.0, m + 1, 0.1));
            for (x, t) in [(-0.3, 0.5), (0.0, 0.8), (0.4, 1.0), (0.2, 0.3)] {
                let h = 1e-5;
                let fd = (phi_value(&lo, &k, x + h, t).unwrap() - phi_value(&lo, &k, x - h, t).unwrap()) / (2.0 * h);
                let exact = phi_value(&hi, &k, x, t).unwrap();
                assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "m = {m}, x = {x}, t = {t}: {fd} vs {exact}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn radial_limit_is_linear_in_t(w in -1.0f64..1.0) {
        let poisson = DistRep::function(parse("sin(2*x + 0.3) + poly(1, -0.5)").unwrap());
        let bump = DistRep::function(Expr::SmoothProduct(
            Box::new(Expr::Smooth(Smooth::Exp(vec![0.0, 0.0, -1.0]))),
            Box::new(parse("cos(3*x)").unwrap()),
        ));
        for (d, k) in [(poisson, KernelSpec::poisson()), (bump, KernelSpec::bump(1.0).unwrap())] {
            let e = d.fn_part.clone().unwrap();
            let target = e.eval_at(w).unwrap();
            let err = |t: f64| (phi_value(&d, &k, w, t).unwrap() - target).abs();
            let ts = [0.08, 0.04, 0.02, 0.01];
            let c = err(ts[0]) / ts[0];
            for t in &ts[1..] {
                prop_assert!(err(*t) <= 1.2 * c * t + 1e-10, "w = {w}, t = {t}");
            }
        }
    }
}

fn direct_coeff(e: &Expr, period: f64, n: i64) -> Complex64 {
    let w = 2.0 * PI * n as f64 / period;
    let base = match e {
        Expr::Periodic { base, .. } => (**base).clone(),
        _ => unreachable!(),
    };
    let part = |s: Smooth| dist_integrate(&Expr::smooth_product(Expr::Smooth(s), base.clone()).unwrap(), 0.0, period).unwrap().value;
    Complex64::new(part(Smooth::Cos(vec![0.0, w])), -part(Smooth::Sin(vec![0.0, w]))) / period
}

#[test]
fn coefficients_are_conjugate_symmetric() {
    let e = Expr::periodic(2.0 * PI, parse("chirp(a=1, alpha=-2, beta=1, sin) + indicator(0.5, 4)").unwrap()).unwrap();
    let fd = fourier_coeffs(&e, 6).unwrap();
    for n in 1..=6i64 {
        let neg = direct_coeff(&e, 2.0 * PI, -n);
        assert!((fd.coeff(-n) - neg).norm() <= 1e-10, "{n}");
        assert!((fd.coeff(n).conj() - neg).norm() <= 1e-10, "{n}");
    }
}

fn energy(fd: &FourierData) -> f64 {
    fd.coeffs.iter().map(|z| z.norm_sqr()).sum()
}

#[test]
fn parseval_on_smooth_and_sawtooth() {
    let smooth = Expr::periodic(2.0 * PI, parse("cos(x) + 0.2").unwrap()).unwrap();
    let smooth = Expr::Sum(vec![smooth, Expr::periodic(2.0 * PI, parse("0.5 * (sin(3*x))").unwrap()).unwrap()]);
    let mean_square = 0.5 + 0.04 + 0.125;
    assert!((energy(&fourier_coeffs(&smooth, 256).unwrap()) / mean_square - 1.0).abs() <= 0.01);
    let saw = energy(&fourier_coeffs(&sawtooth(), 256).unwrap());
    assert!((saw / (PI * PI / 12.0) - 1.0).abs() <= 0.01);
}

#[test]
fn coefficients_are_linear() {
    let f = parse("chirp(a=2, alpha=-1.5, beta=1, cos)").unwrap();
    let g = parse("poly(1, -0.3)").unwrap();
    let (p, q) = (1.5, -0.7);
    let mix = Expr::periodic(3.0, Expr::Sum(vec![Expr::scale(p, f.clone()), Expr::scale(q, g.clone())])).unwrap();
    let (ff, fg, fm) = (
        fourier_coeffs(&Expr::periodic(3.0, f).unwrap(), 8).unwrap(),
        fourier_coeffs(&Expr::periodic(3.0, g).unwrap(), 8).unwrap(),
        fourier_coeffs(&mix, 8).unwrap(),
    );
    for n in -8..=8 {
        assert!((fm.coeff(n) - ff.coeff(n) * p - fg.coeff(n) * q).norm() <= 1e-9, "{n}");
    }
}

#[test]
fn sawtooth_recovered_at_continuity_points() {
    let fd = fourier_coeffs(&sawtooth(), 10_000).unwrap();
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    for _ in 0..20 {
        let theta = rng.random_range(0.3..2.0 * PI - 0.3);
        let p = recover_value(&fd, theta, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(p.status, PointStatus::Exists, "theta = {theta}");
        assert!((p.value - (PI - theta) / 2.0).abs() <= 1e-3, "theta = {theta}: {}", p.value);
    }
}
