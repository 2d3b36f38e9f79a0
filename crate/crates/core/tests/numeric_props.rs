use distint_core::cesaro::{cesaro_sum, local_cesaro_limit, LocalLimitOpts};
use distint_core::reduce::{lateral_value, Lateral};
use distint_core::{chirp_reduce, differentiate, integrate_abs, parse, point_value, Chirp, Expr, PointStatus, Side, Smooth, Trig};
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng};

fn smooth_expr() -> impl Strategy<Value = Expr> {
    let c = || prop::collection::vec(-2.0f64..2.0, 1..4);
    prop_oneof![
        c().prop_map(|v| Expr::Smooth(Smooth::Poly(v))),
        c().prop_map(|v| Expr::Smooth(Smooth::Sin(v))),
        prop::collection::vec(-1.0f64..1.0, 1..3).prop_map(|v| Expr::Smooth(Smooth::Exp(v))),
        (c(), c()).prop_map(|(a, b)| Expr::Sum(vec![Expr::Smooth(Smooth::Cos(a)), Expr::Smooth(Smooth::Poly(b))])),
    ]
}

fn partial_sums(a: &[f64]) -> f64 {
    a.iter().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn abs_integral_is_additive(e in smooth_expr(), a in -2.0f64..0.0, t in 0.05f64..0.95, len in 0.5f64..3.0) {
        let b = a + len;
        let c = a + t * len;
        let whole = integrate_abs(&e, a, b, 1e-12).unwrap();
        let l = integrate_abs(&e, a, c, 1e-12).unwrap();
        let r = integrate_abs(&e, c, b, 1e-12).unwrap();
        let slack = whole.abs_error_estimate + l.abs_error_estimate + r.abs_error_estimate;
        let rounding = 8.0 * f64::EPSILON * (whole.value.abs() + l.value.abs() + r.value.abs());
        prop_assert!((l.value + r.value - whole.value).abs() <= slack + rounding);
    }

    #[test]
    fn abs_integral_orientation_is_exact(e in smooth_expr(), a in -2.0f64..0.0, b in 0.1f64..2.0) {
        let fwd = integrate_abs(&e, a, b, 1e-10).unwrap().value;
        let back = integrate_abs(&e, b, a, 1e-10).unwrap().value;
        prop_assert_eq!(fwd, -back);
    }
}

#[test]
fn error_estimates_are_honest() {
    let e1 = std::f64::consts::E - 1.0;
    let fixtures = [
        ("poly(1, -2, 3, 4)", 0.0, 2.0, 2.0 - 4.0 + 8.0 + 16.0),
        ("pow(alpha=-0.5)", 0.0, 1.0, 2.0),
        ("pow(alpha=-0.5, a=1)", 0.0, 3.0, 2.0 + 2.0 * 2f64.sqrt()),
        ("exp(x)", 0.0, 1.0, e1),
        ("exp(x) * pow(alpha=0.5)", 0.0, 0.0, 0.0),
    ];
    for (src, a, b, exact) in fixtures {
        let r = integrate_abs(&parse(src).unwrap(), a, b, 1e-10).unwrap();
        let err = (r.value - exact).abs();
        // an estimate of zero still leaves the last bits of rounding
        assert!(err <= 10.0 * r.abs_error_estimate + 4.0 * f64::EPSILON * exact.abs(), "{src}: {err} vs {}", r.abs_error_estimate);
    }
}

/// Sums that converge geometrically, so the truncated direct sum is exact.
fn random_series(seed: u64) -> Vec<f64> {
    let mut rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed as u8; 32]);
    let parts: Vec<(f64, f64)> = (0..3).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-0.9..0.9))).collect();
    let head: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    (0..200_000)
        .map(|n| {
            let geo: f64 = parts.iter().map(|(c, r)| c * f64::powi(*r, n as i32)).sum();
            geo + head.get(n).copied().unwrap_or(0.0)
        })
        .collect()
}

#[test]
fn cesaro_is_regular() {
    for seed in 0..200 {
        let a = random_series(seed);
        let direct = partial_sums(&a);
        for k in 1..=3 {
            let v = cesaro_sum(&a, k, 1e-4);
            assert!(v.converged(), "seed {seed}, k {k}");
            assert!((v.value - direct).abs() <= 1e-6, "seed {seed}, k {k}: {} vs {direct}", v.value);
        }
    }
}

#[test]
fn cesaro_orders_are_consistent() {
    let tol = 1e-4;
    let alt: Vec<f64> = (0..200_000).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let alt_n: Vec<f64> = (1..=200_000).map(|n| if n % 2 == 1 { n as f64 } else { -(n as f64) }).collect();
    let cosine: Vec<f64> = (1..=200_000).map(|n| (n as f64 * 0.7).cos()).collect();
    for a in [alt, alt_n, cosine, random_series(7)] {
        for k in 0..3 {
            let v = cesaro_sum(&a, k, tol);
            if v.converged() {
                let w = cesaro_sum(&a, k + 1, tol);
                assert!(w.converged());
                assert!((v.value - w.value).abs() <= 2.0 * tol * v.value.abs().max(1.0), "{} vs {}", v.value, w.value);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cesaro_is_linear(p in -3.0f64..3.0, q in -3.0f64..3.0, r in -0.9f64..0.9) {
        let a: Vec<f64> = (0..100_000).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let b: Vec<f64> = (0..100_000).map(|n| r.powi(n)).collect();
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| p * x + q * y).collect();
        let (va, vb, vm) = (cesaro_sum(&a, 1, 1e-4), cesaro_sum(&b, 1, 1e-4), cesaro_sum(&mix, 1, 1e-4));
        prop_assert!(va.converged() && vb.converged() && vm.converged());
        prop_assert!((vm.value - p * va.value - q * vb.value).abs() <= 1e-4 * (1.0 + p.abs() + q.abs()));
    }

    #[test]
    fn local_limit_of_continuous_function(c in prop::collection::vec(-2.0f64..2.0, 1..4), b in -1.0f64..1.0, from_left in any::<bool>()) {
        let e = Expr::Sum(vec![Expr::Smooth(Smooth::Cos(c.clone())), Expr::Smooth(Smooth::Poly(c))]);
        let f = |x: f64| e.eval_at(x).unwrap();
        let a = if from_left { b - 0.5 } else { b + 0.5 };
        let v = local_cesaro_limit(&f, a, b, &LocalLimitOpts::default());
        prop_assert!(v.converged());
        prop_assert!((v.value - f(b)).abs() <= 1e-8 * f(b).abs().max(1.0), "{} vs {}", v.value, f(b));
    }

    #[test]
    fn reduction_reassembles_the_integrand(
        alpha in -4.0f64..2.0,
        beta in prop::sample::select(vec![0.5f64, 1.0, 2.0]),
        kind in prop_oneof![Just(Trig::Sin), Just(Trig::Cos)],
    ) {
        let f = Expr::Chirp(Chirp { center: 0.0, alpha, beta, kind, side: Side::Right, signed: false });
        let r = chirp_reduce(&f, 0.25).unwrap();
        let dg = differentiate(&r.g).unwrap();
        for i in 1..=1000 {
            let x = i as f64 / 1000.0;
            let (fv, gv, hv) = (f.eval_at(x).unwrap(), dg.eval_at(x).unwrap(), r.h.eval_at(x).unwrap());
            let scale = fv.abs().max(gv.abs()).max(hv.abs()).max(1.0);
            prop_assert!((fv - gv - hv).abs() <= 1e-8 * scale, "x = {x}");
        }
    }

    #[test]
    fn point_value_is_evaluation_on_smooth_input(e in smooth_expr(), x in -2.0f64..2.0) {
        let p = point_value(&e, x, 6);
        prop_assert_eq!(p.status, PointStatus::Exists);
        let v = e.eval_at(x).unwrap();
        prop_assert!((p.value - v).abs() <= 1e-10 * v.abs().max(1.0));
    }
}

#[test]
fn point_value_matches_agreeing_laterals() {
    let fixtures = [
        ("chirp(alpha=-0.5, beta=1, sin)", 0.0),
        ("chirp(alpha=1, beta=1, cos) + poly(2)", 0.0),
        ("pow(alpha=0.5, a=0.3)", 0.3),
        ("indicator(0, 1)", 0.0),
        ("pow(alpha=0, signed=true)", 0.0),
    ];
    for (src, x0) in fixtures {
        let e = parse(src).unwrap();
        let (l, r) = (lateral_value(&e, x0, Lateral::Left, 6), lateral_value(&e, x0, Lateral::Right, 6));
        let p = point_value(&e, x0, 6);
        if l.status == PointStatus::Exists && r.status == PointStatus::Exists && (l.value - r.value).abs() <= 1e-6 {
            assert_eq!(p.status, PointStatus::Exists, "{src}");
            assert!((p.value - l.value).abs() <= 1e-6, "{src}");
        } else {
            assert_ne!(p.status, PointStatus::Exists, "{src}");
        }
    }
}
