//! Local strategies at a singular endpoint, in the distance variable `u`.

use super::{IntegralStatus, IntegrateOpts, Mode};
use crate::cesaro::{cesaro_sum, cesaro_sum_auto, local_limit_in_distance, CesaroStatus, LocalLimitOpts};
use crate::error::{DistError, Result};
use crate::expr::{SeqExpr, Trig};
use crate::jet::SmoothRef;
use crate::quadrature::cheb::{gauss_legendre, ChebOpts, ChebTable};
use crate::reduce::{reduce_terms, RTerm};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Outcome of one strategy on one part of a piece.
#[derive(Debug, Clone)]
pub(crate) struct Part {
    pub value: f64,
    pub err: f64,
    pub status: IntegralStatus,
    pub strategy: &'static str,
    pub diag: f64,
    pub evals: usize,
    pub converged: bool,
}

impl Part {
    pub fn finite(value: f64, err: f64, strategy: &'static str, evals: usize, converged: bool) -> Part {
        Part { value, err, status: IntegralStatus::Finite, strategy, diag: err, evals, converged }
    }

    pub fn with_status(status: IntegralStatus, strategy: &'static str, diag: f64, evals: usize) -> Part {
        let value = match status {
            IntegralStatus::PlusInfinity => f64::INFINITY,
            IntegralStatus::MinusInfinity => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        Part { value, err: f64::INFINITY, status, strategy, diag, evals, converged: false }
    }
}

pub(crate) type Hint<'a> = &'a (dyn Fn(f64) -> f64 + Sync);

/// Plain adaptive integral of `f` over `[lo, hi]`.
pub(crate) fn numeric(
    f: &(dyn Fn(f64) -> f64 + Sync),
    breaks: &[f64],
    tol: f64,
    hint: Option<Hint>,
    max_evals: usize,
) -> (f64, f64, usize, bool) {
    let h = hint.map(|h| move |x: f64| h(x));
    let href: Option<&dyn Fn(f64) -> f64> = h.as_ref().map(|h| h as &dyn Fn(f64) -> f64);
    let opts = ChebOpts { abs_tol: tol, rel_tol: 1e-13, degree: 16, max_evals, width_hint: href };
    let t = ChebTable::build(f, breaks, &opts);
    (t.integral(), t.error, t.evaluations, t.converged)
}

/// `coef * phi(u) * u^expo * kind(u^-beta)` for `u > 0`.
pub(crate) struct UTerm {
    pub coef: f64,
    pub phi: SmoothRef,
    pub expo: f64,
    pub kind: Trig,
}

struct Reduced {
    g: Vec<RTerm>,
    h: Vec<RTerm>,
    jmax: usize,
}

fn derivs(phi: &SmoothRef, u: f64, jmax: usize) -> Vec<f64> {
    let j = phi.jet(u, jmax);
    (0..=jmax).map(|k| j.derivative(k)).collect()
}

fn trig(kind: Trig, v: f64) -> f64 {
    kind.apply(v)
}

/// `int_0^l sum(terms)` by repeated integration by parts: the closed-form
/// part is evaluated at `l` (its value at `0+` is the point value 0), the
/// remainder is integrated numerically on `[delta, l]` and bounded on `[0, delta]`.
pub(crate) fn local_chirp(terms: &[UTerm], beta: f64, l: f64, tol: f64, hint: Option<Hint>, max_evals: usize) -> Part {
    let target = 0.25 * tol;
    let mut tau = 3.0 * beta + 1.0;
    let mut reds: Vec<Reduced> = Vec::new();
    let mut delta = l;
    let mut tail_bound = 0.0;
    for attempt in 0..6 {
        reds = terms
            .iter()
            .map(|t| {
                let r = reduce_terms(
                    RTerm { coef: t.coef, deriv: 0, expo: t.expo, kind: t.kind, signed: false },
                    beta,
                    |x| x.expo >= tau,
                    100_000,
                );
                let jmax = r.g.iter().chain(&r.h).map(|x| x.deriv).max().unwrap_or(0);
                Reduced { g: r.g, h: r.h, jmax }
            })
            .collect();
        let tail = |d: f64| -> f64 {
            let mut s = 0.0;
            for (t, r) in terms.iter().zip(&reds) {
                if r.h.is_empty() {
                    continue;
                }
                let samples = [0.0, 0.5 * d, d].map(|u| derivs(&t.phi, u, r.jmax));
                for h in &r.h {
                    let m = samples.iter().map(|v| v[h.deriv].abs()).fold(0.0, f64::max) * 2.0;
                    s += h.coef.abs() * m * d.powf(h.expo + 1.0) / (h.expo + 1.0);
                }
            }
            s
        };
        if tail(l) <= target {
            delta = l;
            tail_bound = tail(l);
        } else {
            let (mut lo, mut hi) = (l * 1e-15, l);
            for _ in 0..60 {
                let mid = (lo * hi).sqrt();
                if tail(mid) <= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            delta = lo;
            tail_bound = tail(lo);
        }
        let panels = (delta.powf(-beta) - l.powf(-beta)) / PI;
        if panels < 3e5 || attempt == 5 {
            break;
        }
        tau += 2.0 * beta;
    }
    let mut g_val = 0.0;
    for (t, r) in terms.iter().zip(&reds) {
        if r.g.is_empty() {
            continue;
        }
        let d = derivs(&t.phi, l, r.jmax);
        let s = l.powf(-beta);
        for g in &r.g {
            g_val += g.coef * d[g.deriv] * l.powf(g.expo) * trig(g.kind, s);
        }
    }
    if delta >= l {
        return Part::finite(g_val, tail_bound, "reduce", 0, true);
    }
    let h_fn = |u: f64| -> f64 {
        let s = u.powf(-beta);
        let (sn, cs) = s.sin_cos();
        let mut acc = 0.0;
        for (t, r) in terms.iter().zip(&reds) {
            if r.h.is_empty() {
                continue;
            }
            let d = derivs(&t.phi, u, r.jmax);
            for h in &r.h {
                let tr = match h.kind {
                    Trig::Sin => sn,
                    Trig::Cos => cs,
                };
                acc += h.coef * d[h.deriv] * u.powf(h.expo) * tr;
            }
        }
        acc
    };
    let osc = |u: f64| -> f64 {
        let w = PI / beta * u.powf(beta + 1.0);
        match hint {
            Some(h) => w.min(h(u)),
            None => w,
        }
    };
    let (v, e, ev, conv) = numeric(&h_fn, &[delta, l], 0.5 * tol, Some(&osc), max_evals);
    Part::finite(g_val + v, tail_bound + e, "reduce", ev, conv)
}

/// `int_0^l phi(u) u^alpha du`; `alpha <= -1` is finite only when the
/// low Taylor coefficients of `phi` vanish, otherwise the sign of the
/// first nonzero one decides the infinity.
pub(crate) fn local_power(
    phi: &SmoothRef,
    alpha: f64,
    l: f64,
    tol: f64,
    mode: Mode,
    hint: Option<Hint>,
    max_evals: usize,
) -> Result<Part> {
    if alpha > -1.0 {
        let p = (2.0 / (1.0 + alpha)).ceil().max(1.0);
        let tmax = l.powf(1.0 / p);
        let f = |t: f64| {
            let u = t.powf(p);
            phi.value(u) * p * t.powf(p * alpha + p - 1.0)
        };
        let th = hint.map(|h| move |t: f64| h(t.powf(p)) / (p * t.powf(p - 1.0)));
        let thr: Option<Hint> = th.as_ref().map(|h| h as Hint);
        let (v, e, ev, conv) = numeric(&f, &[0.0, tmax], 0.5 * tol, thr, max_evals);
        return Ok(Part::finite(v, e, "abs", ev, conv));
    }
    if mode == Mode::Abs {
        return Err(DistError::Domain(format!(
            "power with exponent {alpha} <= -1 is not absolutely integrable at its center"
        )));
    }
    let k = (-1.0 - alpha).floor() as usize;
    let order = k + 24;
    let c = phi.jet(0.0, order).0;
    let lref = l.min(1.0);
    let scale = c
        .iter()
        .enumerate()
        .map(|(i, v)| v.abs() * lref.powi(i as i32))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(Part::finite(0.0, 0.0, "abs", 0, true));
    }
    for (i, v) in c.iter().enumerate().take(k + 1) {
        if v.abs() * lref.powi(i as i32) > 1e-11 * scale {
            let st = if *v > 0.0 { IntegralStatus::PlusInfinity } else { IntegralStatus::MinusInfinity };
            return Ok(Part::with_status(st, "abs", v.abs(), 0));
        }
    }
    let mut us = l.min(0.1);
    for _ in 0..60 {
        let top = c[order].abs() * us.powi(order as i32);
        let big = c.iter().enumerate().map(|(i, v)| v.abs() * us.powi(i as i32)).fold(0.0, f64::max);
        if top <= 1e-16 * big {
            break;
        }
        us *= 0.5;
    }
    let inner: f64 = c
        .iter()
        .enumerate()
        .skip(k + 1)
        .map(|(i, v)| {
            let e = i as f64 + alpha + 1.0;
            v * us.powf(e) / e
        })
        .sum();
    if us >= l {
        return Ok(Part::finite(inner, 1e-15 * inner.abs(), "abs", 0, true));
    }
    let f = |u: f64| phi.value(u) * u.powf(alpha);
    let (v, e, ev, conv) = numeric(&f, &[us, l], 0.5 * tol, hint, max_evals);
    Ok(Part::finite(inner + v, e + 1e-15 * inner.abs(), "abs", ev, conv))
}

/// A step term seen from its accumulation point: `coef * psi(x) * c_n`.
pub(crate) struct StepMember<'a> {
    pub coef: f64,
    pub psi: Vec<&'a super::terms::Psi>,
    pub coeff: &'a SeqExpr,
}

fn cell_weight(m: &StepMember, c: f64, lo: f64, hi: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    if m.psi.is_empty() {
        return hi - lo;
    }
    let (x, w) = gl;
    let mid = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    x.iter()
        .zip(w)
        .map(|(xi, wi)| {
            let t = c + mid + h * xi;
            wi * m.psi.iter().map(|p| p.value(t)).product::<f64>()
        })
        .sum::<f64>()
        * h
}

/// First cell index fully inside `(0, uq]`.
fn first_full_cell(uq: f64) -> u64 {
    let r = 1.0 / uq;
    let n = if (r - r.round()).abs() <= 1e-9 * r { r.round() } else { r.ceil() };
    n.max(1.0) as u64
}

/// Cell integrals `a_n`, `n >= n0`, of the members.
pub(crate) fn step_terms(members: &[StepMember], c: f64, n0: u64, count: usize) -> Vec<f64> {
    let gl = gauss_legendre(8);
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let n = n0 + i;
            let nf = n as f64;
            let (lo, hi) = (1.0 / (nf + 1.0), 1.0 / nf);
            members
                .iter()
                .map(|m| {
                    let w = if m.psi.is_empty() { 1.0 / (nf * (nf + 1.0)) } else { cell_weight(m, c, lo, hi, &gl) };
                    m.coef * m.coeff.eval(n) * w
                })
                .sum()
        })
        .collect()
}

/// Value of the step members at distance `u` from the center.
pub(crate) fn step_value(members: &[StepMember], c: f64, u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let n = (1.0 / u).floor().max(1.0) as u64;
    members
        .iter()
        .map(|m| m.coef * m.coeff.eval(n) * m.psi.iter().map(|p| p.value(c + u)).product::<f64>())
        .sum()
}

pub(crate) fn cell_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let n_lo = (1.0 / hi).ceil().max(1.0) as u64;
    let n_hi = (1.0 / lo.max(1e-300)).floor().min(2e7) as u64;
    (n_lo..=n_hi).map(|n| 1.0 / n as f64).filter(|x| *x > lo && *x < hi).collect()
}

/// Series strategy for step members accumulating at `c`, over `(c, c + uq]`.
pub(crate) fn local_step(members: &[StepMember], c: f64, uq: f64, opts: &IntegrateOpts, mode: Mode) -> Part {
    let gl = gauss_legendre(16);
    let n_full = first_full_cell(uq);
    let mut partial = 0.0;
    if n_full >= 2 && 1.0 / (n_full as f64) < uq * (1.0 - 1e-12) {
        let n = n_full - 1;
        for m in members {
            partial += m.coef * m.coeff.eval(n) * cell_weight(m, c, 1.0 / n_full as f64, uq, &gl);
        }
    }
    let a = step_terms(members, c, n_full, opts.series_terms);
    let evals = a.len() * members.len();
    let cv = match mode {
        Mode::Abs => cesaro_sum(&a, 0, opts.cesaro_tol),
        Mode::Dist => cesaro_sum_auto(&a, opts.k_max, opts.cesaro_tol),
    };
    match cv.status {
        CesaroStatus::Converged => {
            let mut p = Part::finite(partial + cv.value, cv.diagnostics, "series", evals, true);
            p.diag = cv.diagnostics;
            p
        }
        CesaroStatus::Diverged => {
            let half = &a[a.len() / 2..];
            let st = if half.iter().all(|v| *v > 0.0) {
                IntegralStatus::PlusInfinity
            } else if half.iter().all(|v| *v < 0.0) {
                IntegralStatus::MinusInfinity
            } else {
                IntegralStatus::NotIntegrable
            };
            Part::with_status(st, "series", cv.diagnostics, evals)
        }
        CesaroStatus::Inconclusive => Part::with_status(IntegralStatus::Inconclusive, "series", cv.diagnostics, evals),
    }
}

/// Hake-type endpoint limit: the local Cesàro limit of `s -> int_s^l f` as `s -> 0+`.
pub(crate) fn hake(
    f: &(dyn Fn(f64) -> f64 + Sync),
    l: f64,
    hint: Option<Hint>,
    breaks: Option<&(dyn Fn(f64, f64) -> Vec<f64> + Sync)>,
    opts: &IntegrateOpts,
) -> Part {
    let decades = 4.0;
    let max_decades = 5.0;
    let s_min = l * 10f64.powf(-max_decades) * 0.5;
    let mut brk = vec![s_min];
    if let Some(b) = breaks {
        let mut extra: Vec<f64> = b(s_min, l).into_iter().filter(|x| *x > s_min && *x < l).collect();
        extra.sort_by(|x, y| x.partial_cmp(y).unwrap());
        brk.extend(extra);
    }
    brk.push(l);
    if let Some(h) = hint {
        // panels the hint asks for between s_min and l
        let n = 400;
        let r = (l / s_min).ln() / n as f64;
        let panels: f64 = (0..n).map(|i| s_min * (r * (i as f64 + 0.5)).exp()).map(|s| s * r / h(s).max(1e-300)).sum();
        if panels * 17.0 > opts.max_evals as f64 {
            return Part::with_status(IntegralStatus::Inconclusive, "hake", f64::INFINITY, 0);
        }
    }
    let h = hint.map(|h| move |x: f64| h(x));
    let href: Option<&dyn Fn(f64) -> f64> = h.as_ref().map(|h| h as &dyn Fn(f64) -> f64);
    let copts = ChebOpts { abs_tol: 1e-3 * opts.tol, rel_tol: 1e-12, degree: 16, max_evals: opts.max_evals, width_hint: href };
    let table = ChebTable::build(f, &brk, &copts);
    let prim = table.primitive();
    let total = table.integral();
    let g = |s: f64| total - prim.eval(s);
    let lopts = LocalLimitOpts {
        n_max: opts.n_max,
        tol: opts.cesaro_tol,
        decades,
        max_decades,
        width_hint: hint,
        breaks,
        max_evals: opts.max_evals,
    };
    let cv = local_limit_in_distance(&g, l, &lopts);
    let evals = table.evaluations + cv.terms_used;
    match cv.status {
        CesaroStatus::Converged => {
            let mut p = Part::finite(cv.value, cv.diagnostics, "hake", evals, true);
            p.diag = cv.diagnostics;
            p
        }
        CesaroStatus::Diverged => {
            let samples: Vec<f64> = (1..=16).map(|i| f(l * 10f64.powf(-(i as f64) * 0.25))).collect();
            let st = if samples.iter().all(|v| *v > 0.0) {
                IntegralStatus::PlusInfinity
            } else if samples.iter().all(|v| *v < 0.0) {
                IntegralStatus::MinusInfinity
            } else {
                IntegralStatus::NotIntegrable
            };
            Part::with_status(st, "hake", cv.diagnostics, evals)
        }
        CesaroStatus::Inconclusive => Part::with_status(IntegralStatus::Inconclusive, "hake", cv.diagnostics, evals),
    }
}
