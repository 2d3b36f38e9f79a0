//! Flattening of expressions into windowed product terms.

use crate::error::{DistError, Result};
use crate::expr::{Chirp, Expr, ExprFn, Power, SeqExpr, Side, Smooth};
use crate::jet::{Jet, SmoothFn, SmoothRef};
use std::sync::Arc;

/// A smooth factor, optionally with its symbolic form.
#[derive(Clone)]
pub struct Psi {
    pub f: SmoothRef,
    pub sym: Option<Expr>,
    /// `(x, w)`: the factor varies on scale `w` near `x` and on scale
    /// `|x' - x|` further out.
    pub focus: Option<(f64, f64)>,
}

impl std::fmt::Debug for Psi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.sym {
            Some(e) => write!(f, "Psi({e})"),
            None => write!(f, "Psi(<fn>)"),
        }
    }
}

impl Psi {
    pub fn from_expr(e: &Expr) -> Psi {
        Psi { f: Arc::new(ExprFn(e.clone())), sym: Some(e.clone()), focus: None }
    }

    pub fn from_fn(f: SmoothRef) -> Psi {
        Psi { f, sym: None, focus: None }
    }

    pub fn value(&self, x: f64) -> f64 {
        match &self.sym {
            Some(e) => e.eval_at(x).unwrap_or(f64::NAN),
            None => self.f.value(x),
        }
    }

    /// Upper bound on a panel width that resolves this factor near `x`.
    pub fn hint(&self, x: f64) -> f64 {
        let mut h = f64::INFINITY;
        if let Some(e) = &self.sym {
            h = smooth_hint(e, x);
        }
        if let Some((c, w)) = self.focus {
            h = h.min(0.5 * (x - c).abs().max(w));
        }
        h
    }
}

fn poly_deriv(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, v)| acc * x + k as f64 * v)
}

/// Half the local period of the oscillatory parts of a smooth expression.
pub fn smooth_hint(e: &Expr, x: f64) -> f64 {
    match e {
        Expr::Smooth(Smooth::Sin(p)) | Expr::Smooth(Smooth::Cos(p)) => {
            let w = poly_deriv(p, x).abs();
            if w > 0.0 {
                std::f64::consts::PI / w
            } else {
                f64::INFINITY
            }
        }
        Expr::Sum(v) => v.iter().map(|t| smooth_hint(t, x)).fold(f64::INFINITY, f64::min),
        Expr::Scale(_, t) => smooth_hint(t, x),
        Expr::SmoothProduct(a, b) => smooth_hint(a, x).min(smooth_hint(b, x)),
        _ => f64::INFINITY,
    }
}

/// Panel width that resolves the oscillation of `e` near `x`.
pub fn expr_hint(e: &Expr, x: f64) -> f64 {
    match e {
        Expr::Smooth(_) => smooth_hint(e, x),
        Expr::Chirp(c) => std::f64::consts::PI / c.beta * (x - c.center).abs().powf(c.beta + 1.0),
        Expr::Sum(v) => v.iter().map(|t| expr_hint(t, x)).fold(f64::INFINITY, f64::min),
        Expr::Scale(_, t) | Expr::Restrict { inner: t, .. } => expr_hint(t, x),
        Expr::SmoothProduct(a, b) => expr_hint(a, x).min(expr_hint(b, x)),
        Expr::Periodic { period, base } => expr_hint(base, x.rem_euclid(*period)),
        _ => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Core {
    One,
    Power(Power),
    Chirp(Chirp),
    Step { center: f64, coeff: SeqExpr },
}

impl Core {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Core::One => 1.0,
            Core::Power(p) => p.eval(x).unwrap_or(f64::NAN),
            Core::Chirp(c) => c.eval(x),
            Core::Step { center, coeff } => {
                let u = x - center;
                if u <= 0.0 || u >= 1.0 {
                    0.0
                } else {
                    coeff.eval((1.0 / u).floor().max(1.0) as u64)
                }
            }
        }
    }

    pub fn center(&self) -> Option<f64> {
        match self {
            Core::One => None,
            Core::Power(p) => Some(p.center),
            Core::Chirp(c) => Some(c.center),
            Core::Step { center, .. } => Some(*center),
        }
    }

    fn side(&self) -> Side {
        match self {
            Core::Power(p) => p.side,
            Core::Chirp(c) => c.side,
            _ => Side::Both,
        }
    }

    /// Zero on the whole open interval `(p, q)`, which lies on one side of the center.
    pub fn vanishes_on(&self, p: f64, q: f64) -> bool {
        match self.center() {
            Some(c) => {
                let u = 0.5 * (p + q) - c;
                self.side().weight(u) == 0.0
            }
            None => false,
        }
    }
}

/// `coef * prod(psi) * core` on the window `(lo, hi)`.
#[derive(Debug, Clone)]
pub struct Term {
    pub coef: f64,
    pub psi: Vec<Psi>,
    pub core: Core,
    pub lo: f64,
    pub hi: f64,
}

impl Term {
    pub fn psi_value(&self, x: f64) -> f64 {
        self.psi.iter().map(|p| p.value(x)).product()
    }

    #[cfg(test)]
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        let c = self.core.eval(x);
        if c == 0.0 {
            return 0.0;
        }
        self.coef * c * self.psi_value(x)
    }

    pub fn hint(&self, x: f64) -> f64 {
        let mut h = self.psi.iter().map(|p| p.hint(x)).fold(f64::INFINITY, f64::min);
        if let Core::Chirp(c) = &self.core {
            let u = (x - c.center).abs();
            h = h.min(std::f64::consts::PI / c.beta * u.powf(c.beta + 1.0));
        }
        h
    }

    pub fn covers(&self, p: f64, q: f64) -> bool {
        let eps = 1e-14 * (1.0 + p.abs().max(q.abs()));
        self.lo <= p + eps && self.hi >= q - eps
    }
}

const MAX_PERIODS: f64 = 200_000.0;

/// Flattens `e` into terms restricted to `[a, b]`.
pub fn normalize(e: &Expr, a: f64, b: f64) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    walk(e, 1.0, &[], a, b, &mut out)?;
    Ok(out)
}

fn push(out: &mut Vec<Term>, coef: f64, psi: &[Psi], core: Core, lo: f64, hi: f64) {
    if coef != 0.0 && lo < hi {
        out.push(Term { coef, psi: psi.to_vec(), core, lo, hi });
    }
}

fn walk(e: &Expr, coef: f64, psi: &[Psi], lo: f64, hi: f64, out: &mut Vec<Term>) -> Result<()> {
    if lo >= hi || coef == 0.0 {
        return Ok(());
    }
    match e {
        Expr::Const(c) => push(out, coef * c, psi, Core::One, lo, hi),
        Expr::Smooth(_) => {
            let mut v = psi.to_vec();
            v.push(Psi::from_expr(e));
            push(out, coef, &v, Core::One, lo, hi);
        }
        Expr::Power(p) => {
            if p.alpha == 0.0 && !p.signed && p.side == Side::Both {
                push(out, coef, psi, Core::One, lo, hi);
            } else {
                push(out, coef, psi, Core::Power(*p), lo, hi);
            }
        }
        Expr::Chirp(c) => push(out, coef, psi, Core::Chirp(*c), lo, hi),
        Expr::StepSeq { center, coeff } => push(
            out,
            coef,
            psi,
            Core::Step { center: *center, coeff: coeff.clone() },
            lo.max(*center),
            hi.min(center + 1.0),
        ),
        Expr::Indicator { lo: l, hi: h } => push(out, coef, psi, Core::One, lo.max(*l), hi.min(*h)),
        Expr::Sum(v) => {
            for t in v {
                walk(t, coef, psi, lo, hi, out)?;
            }
        }
        Expr::Scale(k, t) => walk(t, coef * k, psi, lo, hi, out)?,
        Expr::SmoothProduct(s, g) => match &**s {
            Expr::Const(c) => walk(g, coef * c, psi, lo, hi, out)?,
            _ => {
                let mut v = psi.to_vec();
                v.push(Psi::from_expr(s));
                walk(g, coef, &v, lo, hi, out)?;
            }
        },
        Expr::Restrict { lo: l, hi: h, inner } => walk(inner, coef, psi, lo.max(*l), hi.min(*h), out)?,
        Expr::Periodic { period, base } => {
            let k0 = (lo / period).floor();
            let k1 = (hi / period).ceil();
            if k1 - k0 > MAX_PERIODS {
                return Err(DistError::InvalidInput(format!(
                    "interval spans more than {MAX_PERIODS} periods"
                )));
            }
            let mut k = k0;
            while k < k1 {
                let s = k * period;
                let shifted = base.translate(s)?;
                walk(&shifted, coef, psi, lo.max(s), hi.min(s + period), out)?;
                k += 1.0;
            }
        }
    }
    Ok(())
}

/// `sum_i coef_i * prod_j f_ij(x)`.
pub struct Combo(pub Vec<(f64, Vec<SmoothRef>)>);

impl SmoothFn for Combo {
    fn jet(&self, x: f64, order: usize) -> Jet {
        let mut acc = Jet::constant(0.0, order);
        for (c, fs) in &self.0 {
            let mut p = Jet::constant(*c, order);
            for f in fs {
                p = p.mul(&f.jet(x, order));
            }
            acc = acc.add(&p);
        }
        acc
    }
}

/// `sigma * phi(center + dir * u)` as a function of `u`.
pub struct USpace {
    pub inner: SmoothRef,
    pub center: f64,
    pub dir: f64,
    pub sigma: f64,
}

impl SmoothFn for USpace {
    fn jet(&self, u: f64, order: usize) -> Jet {
        let j = self.inner.jet(self.center + self.dir * u, order);
        let mut s = self.sigma;
        Jet(j
            .0
            .into_iter()
            .map(|c| {
                let v = c * s;
                s *= self.dir;
                v
            })
            .collect())
    }
}

/// Combined smooth factor of several terms, seen from `center` in direction `dir`.
pub fn group_factor(members: &[(&Term, f64)], center: f64, dir: f64) -> SmoothRef {
    let parts = members
        .iter()
        .map(|(t, sigma)| (t.coef * sigma, t.psi.iter().map(|p| p.f.clone()).collect()))
        .collect();
    Arc::new(USpace { inner: Arc::new(Combo(parts)), center, dir, sigma: 1.0 })
}
