//! Integration operations built on the engine.

use super::engine::{combine, integrate_terms};
use super::local::hake;
use super::subst;
use super::terms::{expr_hint, normalize, smooth_hint, Core, Psi};
use super::{dist_integrate, dist_integrate_with, IntegralResult, IntegralStatus, IntegrateOpts, Mode, TraceEntry};
use crate::cesaro::{cesaro_sum_auto, limit_at_infinity_auto, CesaroStatus, CesaroValue};
use crate::error::{DistError, Result};
use crate::expr::{differentiate, Expr, Power, SeqExpr, Side, Smooth};
use crate::jet::{factorial, PowerWeight};
use crate::quadrature::cheb::{gauss_legendre, ChebOpts, ChebTable};
use crate::reduce::{chirp_factors, reduce_until};
use rayon::prelude::*;
use std::sync::Arc;

fn finite_result(value: f64, err: f64, lo: f64, hi: f64, strategy: &str) -> IntegralResult {
    IntegralResult {
        value,
        status: IntegralStatus::Finite,
        error_estimate: err,
        trace: vec![TraceEntry { lo, hi, strategy: strategy.into(), value, diagnostics: err }],
        evaluations: 0,
    }
}

fn with_status(status: IntegralStatus, lo: f64, hi: f64, strategy: &str) -> IntegralResult {
    let value = match status {
        IntegralStatus::PlusInfinity => f64::INFINITY,
        IntegralStatus::MinusInfinity => f64::NEG_INFINITY,
        _ => f64::NAN,
    };
    IntegralResult {
        value,
        status,
        error_estimate: f64::INFINITY,
        trace: vec![TraceEntry { lo, hi, strategy: strategy.into(), value, diagnostics: f64::INFINITY }],
        evaluations: 0,
    }
}

fn summands(e: &Expr) -> Vec<Expr> {
    match e {
        Expr::Sum(v) => v.iter().flat_map(summands).collect(),
        Expr::Scale(k, x) => summands(x).into_iter().map(|t| Expr::scale(*k, t)).collect(),
        Expr::SmoothProduct(s, x) => summands(x)
            .into_iter()
            .map(|t| Expr::SmoothProduct(s.clone(), Box::new(t)))
            .collect(),
        _ => vec![e.clone()],
    }
}

fn step_factors(e: &Expr) -> Option<(f64, f64, &SeqExpr)> {
    match e {
        Expr::StepSeq { center, coeff } => Some((1.0, *center, coeff)),
        Expr::Scale(k, x) => step_factors(x).map(|(k2, c, s)| (k * k2, c, s)),
        _ => None,
    }
}

fn eval(e: &Expr, x: f64) -> f64 {
    e.eval_at(x).unwrap_or(0.0)
}

/// Nodes and weights of a Gauss rule on a mesh graded towards every
/// breakpoint and refined where `hint` asks for narrow panels.
fn graded_rule(breaks: &[f64], hint: &dyn Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(16);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        let (p, q) = (w[0], w[1]);
        let d = q - p;
        let mut pts = vec![p, q];
        for k in 1..=30 {
            let s = d * 0.5f64.powi(k);
            pts.push(p + s);
            pts.push(q - s);
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let mut panels: Vec<(f64, f64)> = pts.windows(2).map(|v| (v[0], v[1])).collect();
        let mut out = Vec::new();
        while let Some((l, r)) = panels.pop() {
            let width = r - l;
            if width > 2.0 * hint(0.5 * (l + r)) && width > 1e-4 * d && out.len() + panels.len() < 100_000 {
                let m = 0.5 * (l + r);
                panels.push((l, m));
                panels.push((m, r));
            } else {
                out.push((l, r));
            }
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (l, r) in out {
            let h = 0.5 * (r - l);
            let m = 0.5 * (l + r);
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(m + h * x);
                weights.push(h * wt);
            }
        }
    }
    (nodes, weights)
}

/// `F(x) = int_a^x e` at sorted `xs`. Each node is integrated from the nearer
/// end of its window in `breaks`, so singular points are always endpoints.
fn indefinite_at(e: &Expr, breaks: &[f64], xs: &[f64], opts: &IntegrateOpts) -> Result<(Vec<f64>, IntegralStatus, f64)> {
    let steps: Vec<IntegralResult> = breaks
        .par_windows(2)
        .map(|w| dist_integrate_with(e, w[0], w[1], opts))
        .collect::<Result<_>>()?;
    let mut at_break = vec![0.0];
    for s in &steps {
        at_break.push(at_break.last().unwrap() + s.value);
    }
    let inc: Vec<(f64, IntegralResult)> = xs
        .par_iter()
        .map(|x| {
            let j = breaks.partition_point(|b| b <= x).clamp(1, breaks.len() - 1) - 1;
            let (p, q) = (breaks[j], breaks[j + 1]);
            if x - p <= q - x {
                dist_integrate_with(e, p, *x, opts).map(|r| (at_break[j], r))
            } else {
                dist_integrate_with(e, q, *x, opts).map(|r| (at_break[j + 1], r))
            }
        })
        .collect::<Result<_>>()?;
    let mut st: Vec<IntegralStatus> = steps.iter().map(|s| s.status).collect();
    let mut err = steps.iter().map(|s| s.error_estimate).sum::<f64>();
    let out = inc
        .into_iter()
        .map(|(base, r)| {
            st.push(r.status);
            err = err.max(r.error_estimate);
            base + r.value
        })
        .collect();
    Ok((out, combine(&st), err))
}

/// `int_a^b F psi'` for a step summand `k * step(c)`, with `F = int_a^x`.
fn step_by_parts(k: f64, c: f64, coeff: &SeqExpr, psi: &Expr, dpsi: &Expr, a: f64, b: f64, opts: &IntegrateOpts) -> Result<f64> {
    let (gx, gw) = gauss_legendre(8);
    // int_l^r (u - l) psi'(c + u) du
    let moment = |l: f64, r: f64| -> f64 {
        let h = 0.5 * (r - l);
        let m = 0.5 * (l + r);
        gx.iter()
            .zip(&gw)
            .map(|(x, w)| {
                let u = m + h * x;
                w * (u - l) * eval(dpsi, c + u)
            })
            .sum::<f64>()
            * h
    };
    let dps = |l: f64, r: f64| eval(psi, c + r) - eval(psi, c + l);
    let ua = (a - c).max(0.0);
    let ub = (b - c).min(1.0);
    let mut total = 0.0;
    let f_end;
    if ua > 0.0 {
        let n_hi = (1.0 / ua).floor() as u64;
        let n_lo = (1.0 / ub).floor().max(1.0) as u64;
        if n_hi.saturating_sub(n_lo) > 20_000_000 {
            return Err(DistError::InvalidInput("step piece spans too many cells".into()));
        }
        let mut f = 0.0;
        for n in (n_lo..=n_hi).rev() {
            let l = ua.max(1.0 / (n as f64 + 1.0));
            let r = ub.min(1.0 / n as f64);
            if r <= l {
                continue;
            }
            let cn = k * coeff.eval(n);
            total += f * dps(l, r) + cn * moment(l, r);
            f += cn * (r - l);
        }
        f_end = f;
    } else {
        let r = 1.0 / ub;
        let n_full = if (r - r.round()).abs() <= 1e-9 * r { r.round() } else { r.ceil() }.max(1.0) as u64;
        let n_terms = opts.series_terms;
        let a_m: Vec<f64> = (0..n_terms as u64)
            .map(|i| {
                let m = (n_full + i) as f64;
                k * coeff.eval(n_full + i) / (m * (m + 1.0))
            })
            .collect();
        let t = cesaro_sum_auto(&a_m, opts.k_max, opts.cesaro_tol);
        if !t.converged() {
            return Err(DistError::Domain("step tail has no Cesàro sum".into()));
        }
        let mut s = 0.0;
        let mut b_n = Vec::with_capacity(n_terms);
        for (i, am) in a_m.iter().enumerate() {
            let n = n_full + i as u64;
            s += am;
            let (l, r) = (1.0 / (n as f64 + 1.0), 1.0 / n as f64);
            b_n.push((t.value - s) * dps(l, r) + k * coeff.eval(n) * moment(l, r));
        }
        let series = cesaro_sum_auto(&b_n, opts.k_max, opts.cesaro_tol);
        if !series.converged() {
            return Err(DistError::Domain("by-parts step series has no Cesàro sum".into()));
        }
        total += series.value;
        let mut f = t.value;
        let l = 1.0 / n_full as f64;
        if n_full >= 2 && l < ub * (1.0 - 1e-12) {
            let cn = k * coeff.eval(n_full - 1);
            total += f * dps(l, ub) + cn * moment(l, ub);
            f += cn * (ub - l);
        }
        f_end = f;
    }
    if b > c + 1.0 {
        total += f_end * (eval(psi, b) - eval(psi, c + 1.0));
    }
    Ok(total)
}

/// Right side of the integration-by-parts identity
/// `int_a^b f psi = F(b) psi(b) - int_a^b F psi'` with `F(x) = int_a^x f`.
pub fn integrate_against_smooth(f: &Expr, psi: &Expr, a: f64, b: f64) -> Result<IntegralResult> {
    if !psi.is_smooth() {
        return Err(DistError::InvalidInput("psi must be smooth".into()));
    }
    if a > b {
        return integrate_against_smooth(f, psi, b, a).map(|r| r.negate());
    }
    let whole = dist_integrate(f, a, b)?;
    if whole.status != IntegralStatus::Finite || a == b {
        return Ok(whole);
    }
    let psi_b = eval(psi, b);
    let dpsi = differentiate(psi)?;
    if matches!(dpsi, Expr::Const(v) if v == 0.0) {
        let mut r = whole;
        r.value *= psi_b;
        r.error_estimate *= psi_b.abs();
        for t in &mut r.trace {
            t.value *= psi_b;
        }
        return Ok(r);
    }
    let opts = IntegrateOpts::default();
    let fine = IntegrateOpts { tol: 1e-13, ..IntegrateOpts::default() };
    let mut tame = Vec::new();
    let mut by_parts = 0.0;
    let mut err = whole.error_estimate * psi_b.abs();
    for s in summands(f) {
        if let Ok((_, _, ch)) = chirp_factors(&s) {
            if ch.center >= a && ch.center <= b {
                // F = G - G(a) + int_a^x h, with G(center) = 0
                let red = reduce_until(&s, 2.0)?;
                let g_a = if ch.center == a { 0.0 } else { eval(&red.g, a) };
                let gp = Expr::smooth_product(dpsi.clone(), red.g.clone())?;
                let ig = dist_integrate_with(&gp, a, b, &opts)?;
                if ig.status != IntegralStatus::Finite {
                    return Ok(ig);
                }
                by_parts += ig.value - g_a * (psi_b - eval(psi, a));
                err += ig.error_estimate;
                tame.push(red.h);
                continue;
            }
        }
        if let Some((k, c, coeff)) = step_factors(&s) {
            if c >= a && c < b {
                by_parts += step_by_parts(k, c, coeff, psi, &dpsi, a, b, &opts)?;
                continue;
            }
        }
        tame.push(s);
    }
    if !tame.is_empty() {
        let te = Expr::sum(tame);
        let mut breaks = vec![a];
        breaks.extend(te.singular_points(a, b).into_iter().filter(|x| *x > a && *x < b));
        breaks.push(b);
        let hint = |x: f64| expr_hint(&te, x).min(smooth_hint(&dpsi, x));
        let (nodes, weights) = graded_rule(&breaks, &hint);
        let (fv, st, e) = indefinite_at(&te, &breaks, &nodes, &fine)?;
        if st != IntegralStatus::Finite {
            return Ok(with_status(st, a, b, "by-parts"));
        }
        by_parts += nodes.iter().zip(&weights).zip(&fv).map(|((x, w), f)| w * f * eval(&dpsi, *x)).sum::<f64>();
        err += e;
    }
    let value = whole.value * psi_b - by_parts;
    Ok(finite_result(value, err, a, b, "by-parts"))
}

/// Which endpoint carries the weight in [`integrate_power_weighted`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightedEnd {
    /// `(x - a)^beta`
    Left,
    /// `(b - x)^beta`
    Right,
}

/// `int_a^b w(x) f(x) dx` with `w = (x - a)^beta` or `(b - x)^beta`, `beta > 0`.
pub fn integrate_power_weighted(f: &Expr, a: f64, b: f64, beta: f64, end: WeightedEnd) -> Result<IntegralResult> {
    if !(a < b) || !(beta > 0.0) {
        return Err(DistError::InvalidInput("need a < b and beta > 0".into()));
    }
    f.validate()?;
    let opts = IntegrateOpts::default();
    let (w_end, other) = match end {
        WeightedEnd::Left => (a, b),
        WeightedEnd::Right => (b, a),
    };
    let eps = 1e-14 * (1.0 + a.abs().max(b.abs()));
    let sing = f.singular_points(a, b);
    let singular_at_end = sing.iter().any(|x| (x - w_end).abs() <= eps);
    let nearest = sing
        .iter()
        .filter(|x| (*x - w_end).abs() > eps)
        .map(|x| (x - w_end).abs())
        .fold((other - w_end).abs(), f64::min);
    let m = match end {
        WeightedEnd::Left => a + 0.5 * nearest,
        WeightedEnd::Right => b - 0.5 * nearest,
    };
    let weight = Arc::new(PowerWeight { endpoint: w_end, beta, towards_left: end == WeightedEnd::Left });
    let (far_lo, far_hi) = match end {
        WeightedEnd::Left => (m, b),
        WeightedEnd::Right => (a, m),
    };
    let mut far = normalize(f, far_lo, far_hi)?;
    for t in &mut far {
        t.psi.push(Psi::from_fn(weight.clone()));
    }
    let far_r = integrate_terms(&far, far_lo, far_hi, &opts, Mode::Dist)?;
    let (near_lo, near_hi) = match end {
        WeightedEnd::Left => (a, m),
        WeightedEnd::Right => (m, b),
    };
    let near_r = if singular_at_end {
        let dir = if end == WeightedEnd::Left { 1.0 } else { -1.0 };
        let fu = |u: f64| u.powf(beta) * eval(f, w_end + dir * u);
        let hint = |u: f64| expr_hint(f, w_end + dir * u);
        let p = hake(&fu, (m - w_end).abs(), Some(&hint), None, &opts);
        let mut r = finite_result(p.value, p.err, near_lo, near_hi, p.strategy);
        r.status = if p.status == IntegralStatus::Finite && !p.converged { IntegralStatus::Inconclusive } else { p.status };
        r
    } else {
        let side = if end == WeightedEnd::Left { Side::Right } else { Side::Left };
        let mut near = normalize(f, near_lo, near_hi)?;
        let w = Core::Power(Power { center: w_end, alpha: beta, side, signed: false });
        for t in &mut near {
            match &t.core {
                Core::One => t.core = w.clone(),
                Core::Power(p) => {
                    t.psi.push(Psi::from_expr(&Expr::Power(*p)));
                    t.core = w.clone();
                }
                Core::Chirp(c) => {
                    t.psi.push(Psi::from_expr(&Expr::Chirp(*c)));
                    t.core = w.clone();
                }
                Core::Step { .. } => t.psi.push(Psi::from_fn(weight.clone())),
            }
        }
        integrate_terms(&near, near_lo, near_hi, &opts, Mode::Dist)?
    };
    let status = combine(&[far_r.status, near_r.status]);
    let mut trace = Vec::new();
    let (first, second) = if end == WeightedEnd::Left { (&near_r, &far_r) } else { (&far_r, &near_r) };
    trace.extend(first.trace.iter().cloned());
    trace.extend(second.trace.iter().cloned());
    Ok(IntegralResult {
        value: far_r.value + near_r.value,
        status,
        error_estimate: far_r.error_estimate + near_r.error_estimate,
        trace,
        evaluations: far_r.evaluations + near_r.evaluations,
    })
}

const IMPROPER_REACH: f64 = 1e4;

fn improper_parts(e: &Expr, a: f64, k_max: usize) -> Result<(IntegralResult, CesaroValue)> {
    e.validate()?;
    let opts = IntegrateOpts::default();
    let x0 = match e.all_singular_points() {
        Some(p) => match p.iter().copied().filter(|x| *x >= a).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x)))) {
            Some(s) => s + 1.0,
            None => a,
        },
        None => a,
    };
    let head = if x0 > a { dist_integrate_with(e, a, x0, &opts)? } else { IntegralResult::zero() };
    let x1 = x0.max(1.0) * IMPROPER_REACH;
    let mut breaks = vec![x0];
    let mut s = 1.0 / 16.0;
    while x0 + s < x1 {
        breaks.push(x0 + s);
        s *= 2.0;
    }
    if e.all_singular_points().is_none() {
        breaks.extend(e.singular_points(x0, x1).into_iter().filter(|x| *x > x0 && *x < x1));
    }
    breaks.push(x1);
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup();
    let f = |x: f64| eval(e, x);
    let hint = |x: f64| expr_hint(e, x);
    let probe = (0..=64)
        .map(|i| f(x0 + (x1 - x0) * (i as f64 / 64.0).powi(3)).abs())
        .fold(1e-300, f64::max);
    let copts = ChebOpts {
        abs_tol: 1e-13 * probe * (x1 - x0),
        rel_tol: 1e-12,
        degree: 16,
        max_evals: opts.max_evals,
        width_hint: Some(&hint),
    };
    let table = ChebTable::build(&f, &breaks, &copts);
    let prim = table.primitive();
    let lim = limit_at_infinity_auto(&prim, k_max, opts.cesaro_tol);
    Ok((head, lim))
}

/// `int_a^inf e` as the `(C, k)` limit of `x -> int_a^x e`, with `k <= k_max`.
pub fn integrate_improper(e: &Expr, a: f64, k_max: usize) -> Result<IntegralResult> {
    let (head, lim) = improper_parts(e, a, k_max)?;
    let x0 = head.trace.last().map_or(a, |t| t.hi);
    let mut trace = head.trace.clone();
    let strategy = format!("cesaro(C,{})", lim.order_k);
    let status = match lim.status {
        CesaroStatus::Converged => IntegralStatus::Finite,
        CesaroStatus::Inconclusive => IntegralStatus::Inconclusive,
        CesaroStatus::Diverged => {
            let tail: Vec<f64> = (1..=64).map(|i| eval(e, x0 * 1e4f64.powf(i as f64 / 64.0) + 1.0)).collect();
            if tail.iter().all(|v| *v >= 0.0) && tail.iter().any(|v| *v > 0.0) {
                IntegralStatus::PlusInfinity
            } else if tail.iter().all(|v| *v <= 0.0) && tail.iter().any(|v| *v < 0.0) {
                IntegralStatus::MinusInfinity
            } else {
                IntegralStatus::NotIntegrable
            }
        }
    };
    trace.push(TraceEntry { lo: x0, hi: f64::INFINITY, strategy, value: lim.value, diagnostics: lim.diagnostics });
    let status = combine(&[head.status, status]);
    let value = match status {
        IntegralStatus::Finite | IntegralStatus::Inconclusive => head.value + lim.value,
        IntegralStatus::PlusInfinity => f64::INFINITY,
        IntegralStatus::MinusInfinity => f64::NEG_INFINITY,
        IntegralStatus::NotIntegrable => f64::NAN,
    };
    Ok(IntegralResult {
        value,
        status,
        error_estimate: head.error_estimate + lim.diagnostics,
        trace,
        evaluations: head.evaluations + lim.terms_used,
    })
}

/// `int x^n e(x) dx` over the line, as the sum of the two one-sided improper integrals.
pub fn moment(e: &Expr, n: u32, k_max: usize) -> Result<CesaroValue> {
    let mut c = vec![0.0; n as usize + 1];
    c[n as usize] = 1.0;
    let xe = if n == 0 { e.clone() } else { Expr::smooth_product(Expr::Smooth(Smooth::Poly(c)), e.clone())? };
    let right = integrate_improper(&xe, 0.0, k_max)?;
    let left = integrate_improper(&xe.reflect()?, 0.0, k_max)?;
    let order = |r: &IntegralResult| {
        r.trace
            .last()
            .and_then(|t| t.strategy.strip_prefix("cesaro(C,"))
            .and_then(|s| s.trim_end_matches(')').parse::<usize>().ok())
            .unwrap_or(0)
    };
    let status = match combine(&[right.status, left.status]) {
        IntegralStatus::Finite => CesaroStatus::Converged,
        IntegralStatus::Inconclusive => CesaroStatus::Inconclusive,
        _ => CesaroStatus::Diverged,
    };
    Ok(CesaroValue {
        value: right.value + left.value,
        imag: 0.0,
        order_k: order(&right).max(order(&left)),
        status,
        diagnostics: right.error_estimate + left.error_estimate,
        terms_used: right.evaluations + left.evaluations,
    })
}

/// Substitution applied by [`change_of_variables`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Substitution {
    /// `x = p t + q`
    Affine { p: f64, q: f64 },
    /// `x = t^a` on `[0, hi]`
    Power(f64),
    /// `x = 1/t` on `(0, hi]`
    Inverse,
}

/// Returns the transformed integrand with the integrals on both sides.
pub fn change_of_variables(e: &Expr, sub: Substitution, lo: f64, hi: f64) -> Result<(Expr, IntegralResult, IntegralResult)> {
    let lhs = dist_integrate(e, lo, hi)?;
    match sub {
        Substitution::Affine { p, q } => {
            if p == 0.0 || !p.is_finite() || !q.is_finite() {
                return Err(DistError::InvalidInput("affine map needs finite p != 0".into()));
            }
            let t = Expr::scale(p, subst::affine(e, p, q)?);
            let rhs = dist_integrate(&t, (lo - q) / p, (hi - q) / p)?;
            Ok((t, lhs, rhs))
        }
        Substitution::Power(a) => {
            if lo != 0.0 || !(hi > 0.0) || !(a > 0.0) {
                return Err(DistError::InvalidInput("power map needs lo = 0 < hi and a > 0".into()));
            }
            let t = Expr::scale(a, subst::mul_power0(&subst::power(e, a)?, a - 1.0)?);
            let rhs = dist_integrate(&t, 0.0, hi.powf(1.0 / a))?;
            Ok((t, lhs, rhs))
        }
        Substitution::Inverse => {
            if lo != 0.0 || !(hi > 0.0) {
                return Err(DistError::InvalidInput("inverse map needs lo = 0 < hi".into()));
            }
            let t = subst::mul_power0(&subst::inverse(e)?, -2.0)?;
            let rhs = integrate_improper(&t, 1.0 / hi, IntegrateOpts::default().k_max)?;
            Ok((t, lhs, rhs))
        }
    }
}

/// Rebuilds `f` from its `n`-th derivative `g` and `f^(j)(a)`, `j < n`:
/// `f(x) = sum_j f^(j)(a) (x-a)^j / j! + int_a^x (x-t)^(n-1)/(n-1)! g(t) dt`.
pub fn reconstruct_from_peano(g: &Expr, inits: &[f64], a: f64, b: f64, grid: &[f64]) -> Result<Vec<(f64, IntegralResult)>> {
    let n = inits.len();
    if n == 0 {
        return Err(DistError::InvalidInput("need at least one initial value".into()));
    }
    if let Some(x) = grid.iter().find(|x| **x < a.min(b) || **x > a.max(b)) {
        return Err(DistError::InvalidInput(format!("grid point {x} outside [{a}, {b}]")));
    }
    grid.par_iter()
        .map(|&x| {
            // (x - t)^(n-1) / (n-1)! as a polynomial in t
            let m = n - 1;
            let kernel: Vec<f64> = (0..=m)
                .map(|k| {
                    let binom = factorial(m) / (factorial(k) * factorial(m - k));
                    binom * x.powi((m - k) as i32) * (-1f64).powi(k as i32) / factorial(m)
                })
                .collect();
            let e = if m == 0 { g.clone() } else { Expr::smooth_product(Expr::Smooth(Smooth::Poly(kernel)), g.clone())? };
            let mut r = dist_integrate(&e, a, x)?;
            let taylor: f64 = inits.iter().enumerate().map(|(j, v)| v * (x - a).powi(j as i32) / factorial(j)).sum();
            r.value += taylor;
            Ok((x, r))
        })
        .collect()
}

/// Mean-value identity solved by [`mvt_find_xi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvtKind {
    /// `int f psi = f(xi) int psi`, `psi > 0`
    First,
    /// `int f psi = psi(a) int_a^xi f + psi(b) int_xi^b f`, `psi` monotone
    Second,
    /// `int f psi = psi(b) int_xi^b f`, `psi` positive and increasing
    Bonnet,
}

const MVT_SCAN: usize = 200;

/// Finds `xi` in `(a, b)` satisfying the identity of `kind`.
pub fn mvt_find_xi(kind: MvtKind, f: &Expr, psi: &Expr, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(DistError::InvalidInput("need a < b".into()));
    }
    if !psi.is_smooth() {
        return Err(DistError::InvalidInput("psi must be smooth".into()));
    }
    let grid: Vec<f64> = (0..=MVT_SCAN).map(|i| a + (b - a) * i as f64 / MVT_SCAN as f64).collect();
    let pv: Vec<f64> = grid.iter().map(|x| eval(psi, *x)).collect();
    let positive = pv.iter().all(|v| *v > 0.0);
    let nondecr = pv.windows(2).all(|w| w[1] >= w[0]);
    let nonincr = pv.windows(2).all(|w| w[1] <= w[0]);
    let ok = match kind {
        MvtKind::First => positive,
        MvtKind::Second => nondecr || nonincr,
        MvtKind::Bonnet => positive && nondecr,
    };
    if !ok {
        return Err(DistError::HypothesisViolation(format!("psi fails the {kind:?} hypotheses on [{a}, {b}]")));
    }
    let target = dist_integrate(&Expr::smooth_product(psi.clone(), f.clone())?, a, b)?;
    if target.status != IntegralStatus::Finite {
        return Err(DistError::Domain("f psi is not integrable".into()));
    }
    let total = dist_integrate(f, a, b)?;
    let (pa, pb) = (eval(psi, a), eval(psi, b));
    let int_psi = dist_integrate(psi, a, b)?.value;
    let residual = |x: f64| -> Result<f64> {
        Ok(match kind {
            MvtKind::First => f.eval_at(x).unwrap_or(f64::NAN) * int_psi - target.value,
            MvtKind::Second => {
                let fx = dist_integrate(f, a, x)?.value;
                pa * fx + pb * (total.value - fx) - target.value
            }
            MvtKind::Bonnet => pb * (total.value - dist_integrate(f, a, x)?.value) - target.value,
        })
    };
    let scan: Vec<f64> = grid[1..MVT_SCAN].par_iter().map(|x| residual(*x)).collect::<Result<_>>()?;
    let tol = 1e-8 * target.value.abs().max(1.0);
    let inner = &grid[1..MVT_SCAN];
    if let Some(i) = scan.iter().position(|r| r.abs() <= tol) {
        return Ok(inner[i]);
    }
    let bracket = scan
        .windows(2)
        .position(|w| w[0].is_finite() && w[1].is_finite() && w[0] * w[1] < 0.0)
        .ok_or_else(|| DistError::ResidualNotBracketed(format!("no sign change of the {kind:?} residual")))?;
    let (mut lo, mut hi) = (inner[bracket], inner[bracket + 1]);
    let mut rlo = scan[bracket];
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let rm = residual(mid)?;
        if rm.abs() <= tol * 1e-2 || hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            lo = mid;
            hi = mid;
            break;
        }
        if (rm < 0.0) == (rlo < 0.0) {
            lo = mid;
            rlo = rm;
        } else {
            hi = mid;
        }
    }
    let xi = 0.5 * (lo + hi);
    let r = residual(xi)?;
    if r.abs() > 1e-6 * target.value.abs().max(1.0) {
        return Err(DistError::ResidualNotBracketed(format!("residual {r:e} at xi = {xi} (jump in the primitive)")));
    }
    Ok(xi)
}
