//! End-to-end acceptance checks, one line of output per criterion.

use distint_core::cesaro::cesaro_sum;
use distint_core::fourier::cesaro_partial_sum;
use distint_core::phitransform::{geometric_mesh, VerdictOpts};
use distint_core::quadrature::cheb::gauss_legendre;
use distint_core::reduce::{lateral_value, Lateral};
use distint_core::{
    change_of_variables, dist_integrate, dist_integrate_with, fourier_coeffs, integrate_abs, integrate_against_smooth,
    measure_verdict, mvt_find_xi, parse, phi_field, point_value, poisson_boundary, radial_extremes, recover_value, Approach,
    Chirp, DistError, DistRep, Expr, IntegralStatus, IntegrateOpts, KernelSpec, MvtKind, PointStatus, Power, Side, Smooth,
    Substitution, Trig, Verdict,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn value(e: &Expr, a: f64, b: f64) -> Result<f64, String> {
    let r = dist_integrate(e, a, b).map_err(|err| err.to_string())?;
    ensure(r.status == IntegralStatus::Finite, format!("{e} on [{a}, {b}] is {:?}", r.status))?;
    Ok(r.value)
}

fn p(src: &str) -> Expr {
    parse(src).unwrap()
}

fn step_series() -> Check {
    let e = p("step(cn=(-1)^n*n*(n+1))");
    let r = dist_integrate(&e, 0.0, 1.0).map_err(|err| err.to_string())?;
    ensure(r.status == IntegralStatus::Finite, format!("status {:?}", r.status))?;
    ensure((r.value + 0.5).abs() <= 1e-4, format!("value {}", r.value))?;
    ensure(r.evaluations <= 1_000_000, format!("{} terms", r.evaluations))?;
    Ok(format!("value {:.9}, {} terms", r.value, r.evaluations))
}

/// Abel limit of `int_1^inf t sin t e^{-eps t} dt` by Richardson in `eps`.
fn abel_oracle() -> f64 {
    let (gx, gw) = gauss_legendre(20);
    let damped = |eps: f64| {
        let top = 1.0 + 40.0 / eps;
        let panels = (top - 1.0).ceil() as usize;
        let h = (top - 1.0) / panels as f64;
        (0..panels)
            .map(|k| {
                let m = 1.0 + h * (k as f64 + 0.5);
                gx.iter().zip(&gw).map(|(x, w)| {
                    let t = m + 0.5 * h * x;
                    w * t * t.sin() * (-eps * t).exp()
                }).sum::<f64>() * 0.5 * h
            })
            .sum::<f64>()
    };
    let mut table: Vec<f64> = [0.02, 0.01, 0.005, 0.0025].iter().map(|x| damped(*x)).collect();
    for level in 1..table.len() {
        let f = f64::powi(2.0, level as i32);
        table = table.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
    }
    table[0]
}

fn chirp_integral() -> Check {
    let exact = 1f64.cos() - 1f64.sin();
    let e = p("chirp(alpha=-3, beta=1, sin)");
    let r = dist_integrate(&e, 0.0, 1.0).map_err(|err| err.to_string())?;
    ensure(r.trace.iter().any(|t| t.strategy.contains("reduce")), "reduction not used")?;
    ensure((r.value - exact).abs() <= 1e-6, format!("reduction {}", r.value))?;
    let abel = abel_oracle();
    ensure((abel - r.value).abs() <= 1e-5, format!("Abel oracle {abel}"))?;
    let hake = dist_integrate_with(&e, 0.0, 1.0, &IntegrateOpts { force_hake: true, ..IntegrateOpts::default() })
        .map_err(|err| err.to_string())?;
    ensure(hake.trace.iter().any(|t| t.strategy.contains("hake")), "Hake not used")?;
    ensure((hake.value - r.value).abs() <= 1e-5, format!("Hake {}", hake.value))?;
    Ok(format!("reduce {:.10}, Abel {abel:.8}, Hake {:.8}", r.value, hake.value))
}

fn point_values() -> Check {
    let mut out = Vec::new();
    for alpha in [-0.5, -1.5, -3.0] {
        let e = Expr::Chirp(Chirp { center: 0.0, alpha, beta: 1.0, kind: Trig::Sin, side: Side::Both, signed: false });
        let v = point_value(&e, 0.0, 6);
        ensure(v.status == PointStatus::Exists && v.value.abs() <= 1e-4, format!("alpha {alpha}: {v:?}"))?;
        out.push(format!("{:.1e}", v.value));
    }
    let ind = p("indicator(0, 1)");
    let v = point_value(&ind, 0.0, 6);
    ensure(v.status == PointStatus::NoValue, format!("indicator: {:?}", v.status))?;
    let l = v.left.unwrap_or_else(|| lateral_value(&ind, 0.0, Lateral::Left, 6).value);
    let r = v.right.unwrap_or_else(|| lateral_value(&ind, 0.0, Lateral::Right, 6).value);
    ensure((l - 0.0).abs() <= 1e-6 && (r - 1.0).abs() <= 1e-6, format!("laterals ({l}, {r})"))?;
    Ok(format!("chirp values [{}], indicator laterals ({l}, {r})", out.join(", ")))
}

fn classical_fixture(rng: &mut TestRng) -> (Expr, f64, f64) {
    let a = rng.random_range(-1.0..0.5);
    let b = a + rng.random_range(0.2..2.0);
    let c = rng.random_range(a..b);
    let e = match rng.random_range(0..4) {
        0 => Expr::Smooth(Smooth::Poly((0..4).map(|_| rng.random_range(-3.0..3.0)).collect())),
        1 => Expr::Power(Power { center: c, alpha: -0.5, side: Side::Both, signed: false }),
        2 => Expr::scale(rng.random_range(0.5..2.0), Expr::Smooth(Smooth::Exp(vec![0.0, 0.0, -1.0]))),
        _ => Expr::Chirp(Chirp {
            center: c,
            alpha: rng.random_range(0.0..2.0),
            beta: [0.5, 1.0, 2.0][rng.random_range(0..3)],
            kind: if rng.random() { Trig::Sin } else { Trig::Cos },
            side: Side::Both,
            signed: false,
        }),
    };
    (e, a, b)
}

fn classical_agreement() -> Check {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (e, a, b) = classical_fixture(&mut rng);
        let d = value(&e, a, b)?;
        let q = integrate_abs(&e, a, b, 1e-12).map_err(|err| err.to_string())?.value;
        let rel = (d - q).abs() / q.abs().max(1e-300);
        ensure(rel <= 1e-9 || (d - q).abs() <= 1e-14, format!("{e} on [{a}, {b}]: {d} vs {q}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("50 fixtures, worst relative gap {worst:.1e}"))
}

fn identities() -> Check {
    // linearity and additivity
    let f = p("chirp(alpha=-2.5, beta=1, cos) + pow(a=0.3, alpha=-0.5)");
    let g = p("exp(x) * chirp(a=0.6, alpha=-1.5, beta=1, sin) + indicator(0.1, 0.4)");
    let (x, y) = (1.7, -0.6);
    let mix = Expr::Sum(vec![Expr::scale(x, f.clone()), Expr::scale(y, g.clone())]);
    let lin = (value(&mix, 0.0, 1.0)? - x * value(&f, 0.0, 1.0)? - y * value(&g, 0.0, 1.0)?).abs();
    ensure(lin <= 1e-8, format!("linearity gap {lin:e}"))?;
    let c = 0.437;
    let add = (value(&g, 0.0, c)? + value(&g, c, 1.0)? - value(&g, 0.0, 1.0)?).abs();
    ensure(add <= 1e-8, format!("additivity gap {add:e}"))?;

    // integration by parts
    let fs = [
        "chirp(alpha=-3, beta=1, sin)",
        "chirp(alpha=-2, beta=1, cos)",
        "chirp(a=0.5, alpha=-1.5, beta=1, sin)",
        "pow(alpha=-0.5)",
        "indicator(0.2, 0.7)",
    ];
    let psis = ["exp(x)", "cos(2*x)", "poly(1, 2, 3)", "sin(x + 0.5)"];
    let mut by_parts = 0.0f64;
    for fs in fs {
        for ps in psis {
            let (fe, pe) = (p(fs), p(ps));
            let direct = value(&Expr::smooth_product(pe.clone(), fe.clone()).unwrap(), 0.0, 1.0)?;
            let parts = integrate_against_smooth(&fe, &pe, 0.0, 1.0).map_err(|err| err.to_string())?.value;
            by_parts = by_parts.max((direct - parts).abs());
        }
    }
    ensure(by_parts <= 1e-6, format!("by-parts residual {by_parts:e}"))?;

    // substitutions x = t^a and x = 1/t
    let mut subst = 0.0f64;
    for (src, sub) in [
        ("chirp(alpha=-2, beta=1, sin)", Substitution::Power(2.0)),
        ("pow(alpha=-0.5) + chirp(alpha=-1.5, beta=0.5, cos)", Substitution::Power(3.0)),
        ("chirp(alpha=-3, beta=1, sin)", Substitution::Inverse),
        ("chirp(alpha=-2.5, beta=1, cos)", Substitution::Inverse),
    ] {
        let (_, l, r) = change_of_variables(&p(src), sub, 0.0, 1.0).map_err(|err| err.to_string())?;
        subst = subst.max((l.value - r.value).abs());
    }
    ensure(subst <= 1e-5, format!("substitution gap {subst:e}"))?;

    // mean value theorems, residuals recomputed here
    let mut mvt = 0.0f64;
    let f = p("poly(0, 1, 1)");
    for (kind, psi) in [(MvtKind::First, "exp(x)"), (MvtKind::Second, "poly(2, -1)"), (MvtKind::Bonnet, "exp(x)")] {
        let psi = p(psi);
        let xi = mvt_find_xi(kind, &f, &psi, 0.0, 1.0).map_err(|err| err.to_string())?;
        let target = value(&Expr::smooth_product(psi.clone(), f.clone()).unwrap(), 0.0, 1.0)?;
        let (pa, pb) = (psi.eval_at(0.0).unwrap(), psi.eval_at(1.0).unwrap());
        let res = match kind {
            MvtKind::First => f.eval_at(xi).unwrap() * value(&psi, 0.0, 1.0)? - target,
            MvtKind::Second => pa * value(&f, 0.0, xi)? + pb * value(&f, xi, 1.0)? - target,
            MvtKind::Bonnet => pb * value(&f, xi, 1.0)? - target,
        };
        mvt = mvt.max(res.abs());
    }
    ensure(mvt <= 1e-6, format!("MVT residual {mvt:e}"))?;
    let violated = mvt_find_xi(MvtKind::Bonnet, &f, &p("poly(1, -1)"), 0.0, 1.0);
    ensure(matches!(violated, Err(DistError::HypothesisViolation(_))), "hypothesis check missed a decreasing weight")?;

    // convergence theorems
    let chirp = p("chirp(alpha=-3, beta=1, sin)");
    let limit = value(&chirp, 0.0, 1.0)?;
    let n = 1e5;
    let bounded = (value(&Expr::scale(n / (n + 1.0), chirp), 0.0, 1.0)? - limit).abs();
    ensure(bounded <= 1e-5, format!("bounded convergence gap {bounded:e}"))?;
    let mut last = f64::NEG_INFINITY;
    for n in [10.0f64, 100.0, 1000.0, 10_000.0] {
        let cut = 1.0 / (n * n);
        let g = Expr::Sum(vec![
            Expr::scale(n, Expr::indicator(0.0, cut).unwrap()),
            Expr::restrict(cut, 1.0, p("pow(alpha=-0.5)")).unwrap(),
        ]);
        let v = value(&g, 0.0, 1.0)?;
        ensure(v >= last - 1e-12, "monotone sequence of integrals decreased")?;
        last = v;
    }
    ensure((last - 2.0).abs() <= 1e-3, format!("monotone limit {last}"))?;
    ensure(value(&p("pow(alpha=-0.5)"), 0.0, 1.0)? <= last + 1e-3, "Fatou inequality")?;
    Ok(format!("by-parts {by_parts:.1e}, substitution {subst:.1e}, MVT {mvt:.1e}"))
}

fn cesaro() -> Check {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let parts: Vec<(f64, f64)> = (0..3).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-0.9..0.9))).collect();
        let a: Vec<f64> = (0..100_000).map(|n| parts.iter().map(|(c, r)| c * f64::powi(*r, n)).sum()).collect();
        let direct: f64 = a.iter().sum();
        for k in 1..=3 {
            let v = cesaro_sum(&a, k, 1e-4);
            ensure(v.converged(), format!("regular series not summed at k = {k}"))?;
            worst = worst.max((v.value - direct).abs());
        }
    }
    ensure(worst <= 1e-6, format!("regularity gap {worst:e}"))?;
    let alt: Vec<f64> = (1..=200_000).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let v1 = cesaro_sum(&alt, 1, 1e-4);
    ensure(v1.converged() && (v1.value + 0.5).abs() <= 1e-4, format!("(-1)^n gives {}", v1.value))?;
    let alt_n: Vec<f64> = alt.iter().enumerate().map(|(i, s)| s * (i + 1) as f64).collect();
    // Abel oracle: sum (-1)^n n x^n = -x/(1+x)^2, extrapolated to x = 1
    let abel = |x: f64| -> f64 { (1..200_000).map(|n| f64::powi(-x, n) * n as f64).sum() };
    let (a1, a2) = (abel(0.999), abel(0.9995));
    let oracle = 2.0 * a2 - a1;
    let v2 = cesaro_sum(&alt_n, 2, 1e-4);
    ensure(v2.converged() && (v2.value - oracle).abs() <= 1e-3, format!("(-1)^n n gives {} vs Abel {oracle}", v2.value))?;
    for a in [&alt, &alt_n] {
        for k in 0..3 {
            let v = cesaro_sum(a, k, 1e-4);
            if v.converged() {
                let w = cesaro_sum(a, k + 1, 1e-4);
                ensure(w.converged() && (v.value - w.value).abs() <= 2e-4, format!("order {k} -> {} disagree", k + 1))?;
            }
        }
    }
    Ok(format!("regularity {worst:.1e}, (C,1) {:.6}, (C,2) {:.6}, Abel {oracle:.6}", v1.value, v2.value))
}

fn phi_transform() -> Check {
    let poisson = KernelSpec::poisson();
    let bump = KernelSpec::bump(1.0).unwrap();
    for k in [poisson, bump] {
        let f = phi_field(&DistRep::function(Expr::Const(-1.25)), &k, &[-1.0, 0.0, 0.5], &[1.0, 0.1, 0.001])
            .map_err(|err| err.to_string())?;
        let gap = f.values.iter().flatten().map(|v| (v + 1.25).abs()).fold(0.0, f64::max);
        ensure(gap <= 1e-10, format!("constant field off by {gap:e}"))?;
    }
    let opts = VerdictOpts::default();
    let verdict = |d: &DistRep| measure_verdict(d, &poisson, -1.0, 1.0, &opts).map_err(|err| err.to_string());
    ensure(verdict(&DistRep::atom(1.0, 0, 0.0))? == Verdict::MeasureConsistent, "delta not measure consistent")?;
    ensure(matches!(verdict(&DistRep::atom(-1.0, 0, 0.0))?, Verdict::ViolationAt { .. }), "-delta not flagged")?;
    let minus_dprime = DistRep::atom(-1.0, 1, 0.0);
    let flagged = matches!(verdict(&minus_dprime)?, Verdict::ViolationAt { .. });
    // a kernel with phi'(0) < 0 sends the radial values of -delta' down
    let tilted = KernelSpec::bump_shifted(1.0, -0.5).unwrap();
    let radial = radial_extremes(&minus_dprime, &tilted, 0.0, &geometric_mesh(1.0, 0.5, 30)).map_err(|err| err.to_string())?;
    ensure(flagged && radial.inf == f64::NEG_INFINITY, format!("-delta' verdict flagged {flagged}, radial inf {}", radial.inf))?;
    let box_value = poisson_boundary(&p("indicator(-1, 1)"), 0.3, Approach::Radial).map_err(|err| err.to_string())?;
    ensure((box_value.value - 1.0).abs() <= 1e-3, format!("indicator boundary value {}", box_value.value))?;
    let sgn = poisson_boundary(&p("pow(alpha=0, signed=true)"), 0.0, Approach::Radial).map_err(|err| err.to_string())?;
    ensure(sgn.value.abs() <= 1e-6, format!("sgn boundary value {}", sgn.value))?;
    Ok(format!("indicator {:.9}, sgn {:.1e}", box_value.value, sgn.value))
}

fn fourier() -> Check {
    let saw = Expr::periodic(2.0 * PI, p(&format!("poly({}, -0.5)", PI / 2.0))).unwrap();
    let fd = fourier_coeffs(&saw, 10_000).map_err(|err| err.to_string())?;
    let worst = (1..=10_000i64)
        .flat_map(|n| [n, -n])
        .map(|n| (fd.coeff(n) - Complex64::new(0.0, -0.5 / n as f64)).norm())
        .fold(fd.coeff(0).norm(), f64::max);
    ensure(worst <= 1e-8, format!("coefficient error {worst:e}"))?;
    let mid = cesaro_partial_sum(&fd, PI / 2.0, 1, 1.0, 10_000).map_err(|err| err.to_string())?;
    ensure(mid.converged() && (mid.value - PI / 4.0).abs() <= 1e-3, format!("(C,1) at pi/2 gives {}", mid.value))?;
    let rec = recover_value(&fd, PI / 2.0, &[0.5, 1.0, 2.0]).map_err(|err| err.to_string())?;
    ensure(rec.status == PointStatus::Exists && (rec.value - PI / 4.0).abs() <= 1e-3, format!("recovery at pi/2: {rec:?}"))?;
    let jump = cesaro_partial_sum(&fd, 0.0, 1, 1.0, 10_000).map_err(|err| err.to_string())?;
    ensure(jump.value.abs() <= 1e-3, format!("symmetric sum at the jump {}", jump.value))?;
    let at_jump = recover_value(&fd, 0.0, &[0.5, 1.0, 2.0]).map_err(|err| err.to_string())?;
    ensure(at_jump.status == PointStatus::NoValue, format!("jump status {:?}", at_jump.status))?;
    Ok(format!("coefficient error {worst:.1e}, value at pi/2 {:.6}, jump sum {:.1e}", rec.value, jump.value))
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 8] = [
        ("step series integral", step_series, 5),
        ("chirp integral with oracles", chirp_integral, 10),
        ("point values", point_values, 60),
        ("classical agreement", classical_agreement, 30),
        ("identity suites", identities, 60),
        ("Cesaro engine", cesaro, 10),
        ("phi-transform", phi_transform, 30),
        ("Fourier recovery", fourier, 60),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = run();
        let took = t0.elapsed();
        let out = out.and_then(|msg| {
            if took <= Duration::from_secs(*limit) {
                Ok(msg)
            } else {
                Err(format!("{msg}; over the {limit} s budget"))
            }
        });
        match out {
            Ok(msg) => println!("criterion {}: PASS {name} ({:.2} s) {msg}", i + 1, took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({:.2} s) {msg}", i + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
