use distint_core::{
    dist_integrate, dist_integrate_with, integrate_abs, integrate_against_smooth, parse, Chirp, Expr, IntegralStatus,
    IntegrateOpts, Power, Side, Smooth, Trig,
};
use proptest::prelude::*;

fn member() -> impl Strategy<Value = Expr> {
    let center = || prop::sample::select(vec![0.0f64, 0.25, 0.5, -0.4]);
    prop_oneof![
        (center(), -3.0f64..0.5, prop::sample::select(vec![1.0f64, 2.0]), any::<bool>(), any::<bool>()).prop_map(
            |(center, alpha, beta, sin, both)| {
                let kind = if sin { Trig::Sin } else { Trig::Cos };
                let side = if both { Side::Both } else { Side::Right };
                Expr::Chirp(Chirp { center, alpha, beta, kind, side, signed: false })
            }
        ),
        (center(), -0.9f64..2.0).prop_map(|(center, alpha)| Expr::Power(Power { center, alpha, side: Side::Both, signed: false })),
        (-0.8f64..0.0, 0.1f64..0.8).prop_map(|(lo, w)| Expr::Indicator { lo, hi: lo + w }),
        prop::collection::vec(-2.0f64..2.0, 1..3).prop_map(|c| Expr::Smooth(Smooth::Sin(c))),
    ]
}

fn finite(e: &Expr, a: f64, b: f64) -> Option<(f64, f64)> {
    let r = dist_integrate(e, a, b).ok()?;
    (r.status == IntegralStatus::Finite).then_some((r.value, r.error_estimate))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn integral_is_linear(f in member(), g in member(), p in -2.0f64..2.0, q in -2.0f64..2.0) {
        let mix = Expr::Sum(vec![Expr::scale(p, f.clone()), Expr::scale(q, g.clone())]);
        if let (Some(a), Some(b), Some(m)) = (finite(&f, -1.0, 1.0), finite(&g, -1.0, 1.0), finite(&mix, -1.0, 1.0)) {
            let slack = p.abs() * a.1 + q.abs() * b.1 + m.1 + 1e-12 * (1.0 + m.0.abs());
            prop_assert!((m.0 - p * a.0 - q * b.0).abs() <= slack, "{} vs {}", m.0, p * a.0 + q * b.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn integral_is_additive(f in member(), c in -0.9f64..0.9) {
        if let (Some(w), Some(l), Some(r)) = (finite(&f, -1.0, 1.0), finite(&f, -1.0, c), finite(&f, c, 1.0)) {
            prop_assert!((l.0 + r.0 - w.0).abs() <= 1e-8 * w.0.abs().max(1.0), "{} + {} vs {}", l.0, r.0, w.0);
        }
    }

    #[test]
    fn lebesgue_agreement(alpha in -0.9f64..2.0, c in prop::collection::vec(-2.0f64..2.0, 1..3), center in 0.0f64..1.0) {
        let e = Expr::Sum(vec![
            Expr::SmoothProduct(
                Box::new(Expr::Smooth(Smooth::Cos(c))),
                Box::new(Expr::Power(Power { center, alpha, side: Side::Both, signed: true })),
            ),
            Expr::Chirp(Chirp { center, alpha: alpha + 0.5, beta: 1.0, kind: Trig::Sin, side: Side::Both, signed: false }),
        ]);
        let d = dist_integrate(&e, 0.0, 1.0).unwrap();
        let a = integrate_abs(&e, 0.0, 1.0, 1e-12).unwrap();
        prop_assert_eq!(d.status, IntegralStatus::Finite);
        prop_assert!((d.value - a.value).abs() <= 1e-9 * a.value.abs().max(1e-3), "{} vs {}", d.value, a.value);
    }
}

#[test]
fn null_sets_change_nothing() {
    let base = parse("chirp(alpha=-2, beta=1, sin) + pow(alpha=-0.5, a=0.5)").unwrap();
    // the halves of [0, 1] overlap only in the point 1/2
    let split = Expr::Sum(vec![base.clone(), parse("indicator(0, 0.5) + indicator(0.5, 1) - indicator(0, 1)").unwrap()]);
    let a = dist_integrate(&base, 0.0, 1.0).unwrap().value;
    let b = dist_integrate(&split, 0.0, 1.0).unwrap().value;
    assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
}

#[test]
fn hake_agrees_with_reduction() {
    let hake = IntegrateOpts { force_hake: true, ..IntegrateOpts::default() };
    for src in ["chirp(alpha=-3, beta=1, sin)", "chirp(alpha=-2, beta=1, cos)", "exp(x) * chirp(alpha=-1.2, beta=1, cos)"] {
        let e = parse(src).unwrap();
        let r = dist_integrate(&e, 0.0, 1.0).unwrap();
        let h = dist_integrate_with(&e, 0.0, 1.0, &hake).unwrap();
        assert!(h.trace.iter().any(|t| t.strategy.contains("hake")), "{src}");
        assert!((r.value - h.value).abs() <= 1e-5, "{src}: {} vs {}", r.value, h.value);
    }
}

#[test]
fn bounded_convergence() {
    let chirp = parse("chirp(alpha=-3, beta=1, sin)").unwrap();
    let limit = dist_integrate(&chirp, 0.0, 1.0).unwrap().value;
    let mut gaps = Vec::new();
    for n in [1e3, 1e4, 1e5] {
        let g = Expr::scale(n / (n + 1.0), chirp.clone());
        let v = dist_integrate(&g, 0.0, 1.0).unwrap().value;
        assert!((v - n / (n + 1.0) * limit).abs() <= 1e-10);
        gaps.push((v - limit).abs());
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!(gaps[2] <= 1e-5);
}

fn truncated_root(n: f64) -> Expr {
    let cut = 1.0 / (n * n);
    Expr::Sum(vec![
        Expr::scale(n, Expr::indicator(0.0, cut).unwrap()),
        Expr::restrict(cut, 1.0, parse("pow(alpha=-0.5)").unwrap()).unwrap(),
    ])
}

#[test]
fn monotone_convergence_and_fatou() {
    let mut last = f64::NEG_INFINITY;
    for n in [2.0, 10.0, 100.0, 1000.0, 10_000.0] {
        let v = dist_integrate(&truncated_root(n), 0.0, 1.0).unwrap().value;
        assert!(v >= last - 1e-12);
        last = v;
    }
    assert!((last - 2.0).abs() <= 1e-3);
    let limit = dist_integrate(&parse("pow(alpha=-0.5)").unwrap(), 0.0, 1.0).unwrap().value;
    assert!(limit <= last + 1e-3);
}

#[test]
fn power_weight_keeps_chirp_integrable() {
    let e = Expr::SmoothProduct(
        Box::new(Expr::Smooth(Smooth::Poly(vec![1.0]))),
        Box::new(parse("chirp(alpha=-3, beta=1, sin)").unwrap()),
    );
    let r = distint_core::integrate_power_weighted(&e, 0.0, 1.0, 0.5, distint_core::WeightedEnd::Right).unwrap();
    assert_eq!(r.status, IntegralStatus::Finite);
}

#[test]
fn by_parts_matches_direct() {
    let fs = [
        "chirp(alpha=-3, beta=1, sin)",
        "chirp(alpha=-2, beta=1, cos)",
        "chirp(a=0.5, alpha=-1.5, beta=1, sin)",
        "pow(alpha=-0.5)",
        "indicator(0.2, 0.7)",
    ];
    let psis = ["exp(x)", "cos(2*x)", "poly(1, 2, 3)", "sin(x + 0.5)"];
    for f in fs {
        for psi in psis {
            let (fe, pe) = (parse(f).unwrap(), parse(psi).unwrap());
            let direct = dist_integrate(&Expr::smooth_product(pe.clone(), fe.clone()).unwrap(), 0.0, 1.0).unwrap();
            let parts = integrate_against_smooth(&fe, &pe, 0.0, 1.0).unwrap();
            assert!((direct.value - parts.value).abs() <= 1e-6, "{f} against {psi}: {} vs {}", direct.value, parts.value);
        }
    }
}
