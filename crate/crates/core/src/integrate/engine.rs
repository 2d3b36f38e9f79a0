//! Piecewise driver: breakpoints, grouping of endpoint singularities and
//! combination of the per-piece results.

use super::local::{cell_breaks, hake, local_chirp, local_power, local_step, numeric, Hint, Part, StepMember, UTerm};
use super::terms::{group_factor, Core, Term};
use super::{IntegralResult, IntegralStatus, IntegrateOpts, Mode, TraceEntry};
use crate::error::{DistError, Result};
use crate::expr::{SeqExpr, Trig};
use crate::jet::SmoothRef;
use crate::quadrature::closed::ExpPoly;
use rayon::prelude::*;
use std::f64::consts::PI;

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-14 * (1.0 + x.abs().max(y.abs()))
}

fn breakpoints(terms: &[Term], a: f64, b: f64) -> Vec<f64> {
    let mut pts = vec![a, b];
    let inside = |x: f64| x > a && x < b;
    for t in terms {
        for x in [t.lo, t.hi] {
            if inside(x) {
                pts.push(x);
            }
        }
        if let Some(c) = t.core.center() {
            if inside(c) {
                pts.push(c);
            }
        }
        for p in &t.psi {
            if let Some((c, _)) = p.focus {
                if inside(c) {
                    pts.push(c);
                }
            }
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| same(*x, *y));
    pts
}

pub(crate) fn integrate_terms(terms: &[Term], a: f64, b: f64, opts: &IntegrateOpts, mode: Mode) -> Result<IntegralResult> {
    let pts = breakpoints(terms, a, b);
    let pieces: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    let parts: Vec<Result<Vec<Part>>> = pieces.par_iter().map(|(p, q)| piece_parts(terms, *p, *q, opts, mode)).collect();
    let mut value = 0.0;
    let mut err = 0.0;
    let mut evals = 0;
    let mut trace = Vec::with_capacity(pieces.len());
    let mut statuses = Vec::new();
    for ((p, q), r) in pieces.iter().zip(parts) {
        let r = r?;
        let mut names: Vec<&str> = Vec::new();
        let mut v = 0.0;
        let mut diag: f64 = 0.0;
        for part in &r {
            if !names.contains(&part.strategy) {
                names.push(part.strategy);
            }
            v += part.value;
            diag = diag.max(part.diag);
            err += part.err;
            evals += part.evals;
            let st = if part.status == IntegralStatus::Finite && !part.converged {
                IntegralStatus::Inconclusive
            } else {
                part.status
            };
            statuses.push(st);
        }
        value += v;
        trace.push(TraceEntry { lo: *p, hi: *q, strategy: names.join("+"), value: v, diagnostics: diag });
    }
    let status = combine(&statuses);
    let value = match status {
        IntegralStatus::Finite | IntegralStatus::Inconclusive => value,
        IntegralStatus::PlusInfinity => f64::INFINITY,
        IntegralStatus::MinusInfinity => f64::NEG_INFINITY,
        IntegralStatus::NotIntegrable => f64::NAN,
    };
    Ok(IntegralResult { value, status, error_estimate: err, trace, evaluations: evals })
}

pub(crate) fn combine(st: &[IntegralStatus]) -> IntegralStatus {
    use IntegralStatus::*;
    let has = |s| st.contains(&s);
    if has(NotIntegrable) || (has(PlusInfinity) && has(MinusInfinity)) {
        return NotIntegrable;
    }
    if has(Inconclusive) {
        return Inconclusive;
    }
    if has(PlusInfinity) {
        return PlusInfinity;
    }
    if has(MinusInfinity) {
        return MinusInfinity;
    }
    Finite
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Key {
    Power { left: bool, alpha: f64, signed: bool },
    Chirp { left: bool, alpha: f64, beta: f64, kind: Trig, signed: bool },
}

fn piece_parts(terms: &[Term], p: f64, q: f64, opts: &IntegrateOpts, mode: Mode) -> Result<Vec<Part>> {
    let at = |c: f64| {
        if same(c, p) {
            Some(true)
        } else if same(c, q) {
            Some(false)
        } else {
            None
        }
    };
    let mut regular: Vec<&Term> = Vec::new();
    let mut cells: Vec<&Term> = Vec::new();
    let mut steps: Vec<&Term> = Vec::new();
    let mut groups: Vec<(Key, Vec<&Term>)> = Vec::new();
    for t in terms.iter().filter(|t| t.covers(p, q) && !t.core.vanishes_on(p, q)) {
        let key = match &t.core {
            Core::One => None,
            Core::Power(pw) => match at(pw.center) {
                Some(left) if !(pw.alpha >= 0.0 && pw.alpha.fract() == 0.0) => {
                    Some(Key::Power { left, alpha: pw.alpha, signed: pw.signed })
                }
                _ => None,
            },
            Core::Chirp(ch) => at(ch.center).map(|left| Key::Chirp {
                left,
                alpha: ch.alpha,
                beta: ch.beta,
                kind: ch.kind,
                signed: ch.signed,
            }),
            Core::Step { center, .. } => {
                if at(*center) == Some(true) {
                    steps.push(t);
                } else {
                    cells.push(t);
                }
                continue;
            }
        };
        match key {
            None => regular.push(t),
            Some(k) => match groups.iter_mut().find(|(g, _)| *g == k) {
                Some((_, v)) => v.push(t),
                None => groups.push((k, vec![t])),
            },
        }
    }
    let mut out = Vec::new();
    if !regular.is_empty() {
        out.push(regular_part(&regular, p, q, opts));
    }
    if !cells.is_empty() {
        out.push(cell_part(&cells, p, q)?);
    }
    for (k, members) in &groups {
        out.push(group_part(k, members, p, q, opts, mode)?);
    }
    if !steps.is_empty() {
        out.push(step_part(&steps, p, q, opts, mode));
    }
    Ok(out)
}

fn regular_part(ts: &[&Term], p: f64, q: f64, opts: &IntegrateOpts) -> Part {
    let mut closed = ExpPoly::constant(0.0);
    let mut numeric_terms: Vec<&Term> = Vec::new();
    for t in ts {
        let ep = match t.core {
            Core::One => t.psi.iter().try_fold(ExpPoly::constant(t.coef), |acc, ps| {
                ps.sym.as_ref().and_then(ExpPoly::from_smooth).map(|e| acc.mul(&e))
            }),
            _ => None,
        };
        match ep {
            Some(e) => closed = closed.add(&e),
            None => numeric_terms.push(t),
        }
    }
    let mut value = 0.0;
    let mut strategy = "closed";
    match closed.integral(p, q) {
        Some(v) => value += v,
        None => {
            numeric_terms = ts.to_vec();
            value = 0.0;
        }
    }
    if numeric_terms.is_empty() {
        return Part::finite(value, 1e-15 * value.abs(), strategy, 0, true);
    }
    strategy = "abs";
    let f = |x: f64| numeric_terms.iter().map(|t| t.coef * t.core.eval(x) * t.psi_value(x)).sum::<f64>();
    let hint = |x: f64| numeric_terms.iter().map(|t| t.hint(x)).fold(f64::INFINITY, f64::min);
    let (v, e, ev, conv) = numeric(&f, &[p, q], 0.5 * opts.tol, Some(&hint), opts.max_evals);
    Part::finite(value + v, e, strategy, ev, conv)
}

/// Steps whose accumulation point lies outside the piece: finitely many cells.
fn cell_part(ts: &[&Term], p: f64, q: f64) -> Result<Part> {
    let mut value = 0.0;
    let mut evals = 0;
    let (x, w) = crate::quadrature::cheb::gauss_legendre(16);
    for t in ts {
        let Core::Step { center, coeff } = &t.core else { continue };
        let ua = (p - center).max(0.0);
        let ub = (q - center).min(1.0);
        if ub <= ua {
            continue;
        }
        let n_min = (1.0 / ub).floor().max(1.0) as u64;
        let n_max = if ua > 0.0 { (1.0 / ua).floor() } else { f64::INFINITY };
        if n_max - n_min as f64 > 2e7 {
            return Err(DistError::InvalidInput("step piece spans too many cells".into()));
        }
        for n in n_min..=(n_max as u64) {
            let lo = ua.max(1.0 / (n as f64 + 1.0));
            let hi = ub.min(1.0 / n as f64);
            if hi <= lo {
                continue;
            }
            let len = if t.psi.is_empty() {
                hi - lo
            } else {
                let mid = 0.5 * (lo + hi);
                let h = 0.5 * (hi - lo);
                evals += x.len();
                x.iter().zip(&w).map(|(xi, wi)| wi * t.psi_value(center + mid + h * xi)).sum::<f64>() * h
            };
            value += t.coef * coeff.eval(n) * len;
        }
    }
    Ok(Part::finite(value, 1e-14 * value.abs(), "abs", evals, true))
}

fn psi_hint<'a>(members: &'a [&'a Term], c: f64, dir: f64) -> impl Fn(f64) -> f64 + Sync + 'a {
    move |u: f64| {
        let x = c + dir * u;
        members
            .iter()
            .flat_map(|t| t.psi.iter().map(move |p| p.hint(x)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn group_part(k: &Key, members: &[&Term], p: f64, q: f64, opts: &IntegrateOpts, mode: Mode) -> Result<Part> {
    let (left, signed) = match *k {
        Key::Power { left, signed, .. } | Key::Chirp { left, signed, .. } => (left, signed),
    };
    let (c, dir) = if left { (p, 1.0) } else { (q, -1.0) };
    let sigma = if signed && !left { -1.0 } else { 1.0 };
    let l = q - p;
    let with_sigma: Vec<(&Term, f64)> = members.iter().map(|t| (*t, sigma)).collect();
    let phi: SmoothRef = group_factor(&with_sigma, c, dir);
    let ph = psi_hint(members, c, dir);
    match *k {
        Key::Power { alpha, .. } => {
            if opts.force_hake && alpha <= -1.0 && mode == Mode::Dist {
                let f = |u: f64| phi.value(u) * u.powf(alpha);
                return Ok(hake(&f, l, Some(&ph), None, opts));
            }
            local_power(&phi, alpha, l, opts.tol, mode, Some(&ph), opts.max_evals)
        }
        Key::Chirp { alpha, beta, kind, .. } => {
            if mode == Mode::Abs && alpha <= -1.0 {
                return Err(DistError::Domain(format!(
                    "chirp with exponent {alpha} <= -1 is not absolutely integrable at its center"
                )));
            }
            let f = |u: f64| phi.value(u) * u.powf(alpha) * kind.apply(u.powf(-beta));
            let hint = |u: f64| (PI / beta * u.powf(beta + 1.0)).min(ph(u));
            if opts.force_hake && mode == Mode::Dist {
                return Ok(hake(&f, l, Some(&hint), None, opts));
            }
            let l_in = l.min(0.5);
            let uterms = [UTerm { coef: 1.0, phi: phi.clone(), expo: alpha, kind }];
            let ph_ref: Hint = &ph;
            let mut part = local_chirp(&uterms, beta, l_in, opts.tol, Some(ph_ref), opts.max_evals);
            if alpha > -1.0 {
                part.strategy = "abs";
            }
            if l_in < l {
                let (v, e, ev, conv) = numeric(&f, &[l_in, l], 0.5 * opts.tol, Some(&hint), opts.max_evals);
                part.value += v;
                part.err += e;
                part.evals += ev;
                part.converged &= conv;
            }
            Ok(part)
        }
    }
}

fn step_part(ts: &[&Term], p: f64, q: f64, opts: &IntegrateOpts, mode: Mode) -> Part {
    let c = p;
    let uq = (q - p).min(1.0);
    let members: Vec<StepMember> = ts
        .iter()
        .map(|t| {
            let Core::Step { coeff, .. } = &t.core else { unreachable!() };
            StepMember { coef: t.coef, psi: t.psi.iter().collect(), coeff: coeff as &SeqExpr }
        })
        .collect();
    if !opts.force_hake {
        let part = local_step(&members, c, uq, opts, mode);
        if part.status != IntegralStatus::Inconclusive || mode == Mode::Abs {
            return part;
        }
    }
    let f = |u: f64| super::local::step_value(&members, c, u);
    let hint = |u: f64| 0.5 * u * u;
    let brk = |lo: f64, hi: f64| cell_breaks(lo, hi);
    hake(&f, uq, Some(&hint), Some(&brk), opts)
}
