use crate::cesaro::{local_limit_in_distance, CesaroStatus, CesaroValue, LocalLimitOpts};
use crate::expr::Expr;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointStatus {
    Exists,
    NoValue,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointValue {
    pub value: f64,
    pub order_n: usize,
    pub status: PointStatus,
    /// Lateral values, when they were computed.
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl PointValue {
    pub fn exists(value: f64, order_n: usize) -> PointValue {
        PointValue { value, order_n, status: PointStatus::Exists, left: None, right: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lateral {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
pub struct PointOpts {
    pub n_max: usize,
    pub tol: f64,
    pub decades: f64,
    /// Skip the closed-form shortcuts.
    pub force_general: bool,
}

impl Default for PointOpts {
    fn default() -> Self {
        PointOpts { n_max: 6, tol: 1e-6, decades: 4.0, force_general: false }
    }
}

fn is_singular_at(e: &Expr, x0: f64) -> bool {
    let w = 1e-12 * (1.0 + x0.abs());
    !e.singular_points(x0 - w, x0 + w).is_empty()
}

fn fast(e: &Expr, x0: f64) -> Option<f64> {
    if !is_singular_at(e, x0) {
        return e.eval_at(x0);
    }
    match e {
        Expr::Chirp(c) if c.center == x0 => Some(0.0),
        Expr::Power(p) if p.center == x0 && p.alpha > 0.0 => Some(0.0),
        Expr::Sum(v) => v.iter().map(|t| fast(t, x0)).sum(),
        Expr::Scale(k, t) => fast(t, x0).map(|v| k * v),
        Expr::SmoothProduct(s, g) => Some(s.eval_at(x0)? * fast(g, x0)?),
        _ => None,
    }
}

fn collect_chirp_betas(e: &Expr, x0: f64, out: &mut Vec<f64>) {
    match e {
        Expr::Chirp(c) if (c.center - x0).abs() <= 1e-12 * (1.0 + x0.abs()) => out.push(c.beta),
        Expr::Sum(v) => v.iter().for_each(|t| collect_chirp_betas(t, x0, out)),
        Expr::Scale(_, t) | Expr::SmoothProduct(_, t) => collect_chirp_betas(t, x0, out),
        Expr::Restrict { inner, .. } => collect_chirp_betas(inner, x0, out),
        Expr::Periodic { period, base } => {
            let k = (x0 / period).floor();
            collect_chirp_betas(base, x0 - k * period, out);
            collect_chirp_betas(base, x0 - (k + 1.0) * period, out);
        }
        _ => {}
    }
}

fn collect_steps(e: &Expr, out: &mut Vec<f64>) {
    match e {
        Expr::StepSeq { center, .. } => out.push(*center),
        Expr::Sum(v) => v.iter().for_each(|t| collect_steps(t, out)),
        Expr::Scale(_, t) | Expr::SmoothProduct(_, t) => collect_steps(t, out),
        Expr::Restrict { inner, .. } => collect_steps(inner, out),
        _ => {}
    }
}

fn to_point(c: &CesaroValue) -> PointValue {
    let status = match c.status {
        CesaroStatus::Converged => PointStatus::Exists,
        CesaroStatus::Diverged => PointStatus::NoValue,
        CesaroStatus::Inconclusive => PointStatus::Inconclusive,
    };
    PointValue { value: c.value, order_n: c.order_k, status, left: None, right: None }
}

fn lateral_general(e: &Expr, x0: f64, side: Lateral, opts: &PointOpts) -> PointValue {
    let dir = match side {
        Lateral::Left => -1.0,
        Lateral::Right => 1.0,
    };
    let near = e.singular_points(x0 - 2.0, x0 + 2.0);
    let gap = near
        .iter()
        .map(|p| (p - x0) * dir)
        .filter(|d| *d > 1e-12 * (1.0 + x0.abs()))
        .fold(2.0, f64::min);
    let s_max = 0.5 * gap;
    let mut betas = Vec::new();
    collect_chirp_betas(e, x0, &mut betas);
    let mut steps = Vec::new();
    collect_steps(e, &mut steps);
    let hint = move |s: f64| {
        betas
            .iter()
            .map(|b| PI / b * s.powf(b + 1.0))
            .fold(f64::INFINITY, f64::min)
    };
    let breaks = move |lo: f64, hi: f64| -> Vec<f64> {
        let mut out = Vec::new();
        for c in &steps {
            // cell boundaries c + 1/n, seen as distances from x0
            let (xa, xb) = if dir > 0.0 { (x0 + lo, x0 + hi) } else { (x0 - hi, x0 - lo) };
            let ua = (xa - c).max(1e-300);
            let ub = xb - c;
            if ub <= 0.0 {
                continue;
            }
            let n_lo = (1.0 / ub).ceil().max(1.0) as u64;
            let n_hi = (1.0 / ua).floor().min(5e6) as u64;
            for n in n_lo..=n_hi {
                out.push((c + 1.0 / n as f64 - x0) * dir);
            }
        }
        out
    };
    let g = |s: f64| e.eval_at(x0 + dir * s).unwrap_or(f64::NAN);
    let lopts = LocalLimitOpts {
        n_max: opts.n_max,
        tol: opts.tol,
        decades: opts.decades,
        width_hint: Some(&hint),
        breaks: Some(&breaks),
        ..Default::default()
    };
    to_point(&local_limit_in_distance(&g, s_max, &lopts))
}

/// One-sided distributional value at `x0`.
pub fn lateral_value(e: &Expr, x0: f64, side: Lateral, n_max: usize) -> PointValue {
    let opts = PointOpts { n_max, ..Default::default() };
    lateral_value_with(e, x0, side, &opts)
}

pub fn lateral_value_with(e: &Expr, x0: f64, side: Lateral, opts: &PointOpts) -> PointValue {
    if !opts.force_general {
        if let Some(v) = fast(e, x0) {
            return PointValue::exists(v, 0);
        }
    }
    lateral_general(e, x0, side, opts)
}

/// Distributional (Łojasiewicz) point value at `x0`.
pub fn point_value(e: &Expr, x0: f64, n_max: usize) -> PointValue {
    point_value_with(e, x0, &PointOpts { n_max, ..Default::default() })
}

pub fn point_value_with(e: &Expr, x0: f64, opts: &PointOpts) -> PointValue {
    if !opts.force_general {
        if let Some(v) = fast(e, x0) {
            return PointValue::exists(v, 0);
        }
    }
    let l = lateral_general(e, x0, Lateral::Left, opts);
    let r = lateral_general(e, x0, Lateral::Right, opts);
    let mut out = PointValue {
        value: f64::NAN,
        order_n: l.order_n.max(r.order_n),
        status: PointStatus::Inconclusive,
        left: (l.status == PointStatus::Exists).then_some(l.value),
        right: (r.status == PointStatus::Exists).then_some(r.value),
    };
    match (l.status, r.status) {
        (PointStatus::Exists, PointStatus::Exists) => {
            let gap = (l.value - r.value).abs();
            let scale = l.value.abs().max(r.value.abs()).max(1.0);
            if gap <= opts.tol * scale {
                out.value = 0.5 * (l.value + r.value);
                out.status = PointStatus::Exists;
            } else if gap > 10.0 * opts.tol * scale {
                out.status = PointStatus::NoValue;
            }
        }
        (PointStatus::NoValue, _) | (_, PointStatus::NoValue) => out.status = PointStatus::NoValue,
        _ => {}
    }
    out
}
