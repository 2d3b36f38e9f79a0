//! Rewrites chirp integrands as `G' + h`, with `G` a closed-form primitive
//! part and `h` absolutely integrable near the center; point values.

mod point;

pub use point::{
    lateral_value, lateral_value_with, point_value, point_value_with, Lateral, PointOpts, PointStatus, PointValue,
};

use crate::error::{DistError, Result};
use crate::expr::{differentiate, Chirp, Expr, Trig};
use serde::Serialize;

/// `coef * psi^{(deriv)} * |u|^expo * sgn(u)^signed * kind(|u|^-beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RTerm {
    pub coef: f64,
    pub deriv: usize,
    pub expo: f64,
    pub kind: Trig,
    pub signed: bool,
}

impl RTerm {
    fn same_key(&self, o: &RTerm) -> bool {
        self.deriv == o.deriv
            && self.kind == o.kind
            && self.signed == o.signed
            && (self.expo - o.expo).abs() <= 1e-12 * (1.0 + self.expo.abs())
    }
}

fn push_merge(v: &mut Vec<RTerm>, t: RTerm) {
    if let Some(s) = v.iter_mut().find(|s| s.same_key(&t)) {
        s.coef += t.coef;
    } else {
        v.push(t);
    }
}

/// Term lists of a reduction: `f = (sum G)' + sum h`.
#[derive(Debug, Clone, Default)]
pub struct TermReduction {
    pub g: Vec<RTerm>,
    pub h: Vec<RTerm>,
    pub steps: usize,
}

/// Applies the integration-by-parts identity to every term failing `done`.
pub fn reduce_terms(start: RTerm, beta: f64, done: impl Fn(&RTerm) -> bool, max_steps: usize) -> TermReduction {
    let mut out = TermReduction::default();
    let mut cur = vec![start];
    while !cur.is_empty() {
        let mut next: Vec<RTerm> = Vec::new();
        let mut reduced = false;
        for t in cur {
            if t.coef == 0.0 {
                continue;
            }
            if done(&t) || out.steps >= max_steps {
                push_merge(&mut out.h, t);
                continue;
            }
            reduced = true;
            let m = t.expo + beta + 1.0;
            let a = t.coef / beta;
            let (sg, other) = match t.kind {
                Trig::Sin => (1.0, Trig::Cos),
                Trig::Cos => (-1.0, Trig::Sin),
            };
            push_merge(
                &mut out.g,
                RTerm { coef: sg * a, deriv: t.deriv, expo: m, kind: other, signed: !t.signed },
            );
            push_merge(
                &mut next,
                RTerm { coef: -sg * a, deriv: t.deriv + 1, expo: m, kind: other, signed: !t.signed },
            );
            push_merge(
                &mut next,
                RTerm { coef: -sg * a * m, deriv: t.deriv, expo: m - 1.0, kind: other, signed: t.signed },
            );
        }
        if reduced {
            out.steps += 1;
        }
        cur = next;
    }
    out.g.retain(|t| t.coef != 0.0);
    out.h.retain(|t| t.coef != 0.0);
    out
}

/// Result of [`chirp_reduce`], as expressions in the original variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub g: Expr,
    pub h: Expr,
    pub steps: usize,
    pub center: f64,
}

/// Splits `f = k * psi * chirp` into its factors.
pub(crate) fn chirp_factors(f: &Expr) -> Result<(f64, Option<Expr>, Chirp)> {
    match f {
        Expr::Chirp(c) => Ok((1.0, None, *c)),
        Expr::Scale(k, inner) => {
            let (k2, psi, c) = chirp_factors(inner)?;
            Ok((k * k2, psi, c))
        }
        Expr::SmoothProduct(s, g) => {
            let (k, psi, c) = chirp_factors(g)?;
            let psi = match psi {
                None => (**s).clone(),
                Some(p) => Expr::SmoothProduct(s.clone(), Box::new(p)),
            };
            Ok((k, Some(psi), c))
        }
        _ => Err(DistError::InvalidInput(format!("not a chirp term: {f}"))),
    }
}

fn assemble(terms: &[RTerm], k: f64, derivs: &[Expr], c: &Chirp) -> Expr {
    let parts: Vec<Expr> = terms
        .iter()
        .filter_map(|t| {
            let d = &derivs[t.deriv];
            if matches!(d, Expr::Const(v) if *v == 0.0) {
                return None;
            }
            let leaf = Expr::Chirp(Chirp { alpha: t.expo, kind: t.kind, signed: t.signed, ..*c });
            let (v, body) = match d {
                Expr::Const(v) => (*v, leaf),
                s => (1.0, Expr::SmoothProduct(Box::new(s.clone()), Box::new(leaf))),
            };
            let c = k * t.coef * v;
            Some(if c == 1.0 { body } else { Expr::scale(c, body) })
        })
        .collect();
    match parts.len() {
        0 => Expr::Const(0.0),
        1 => parts.into_iter().next().unwrap(),
        _ => Expr::Sum(parts),
    }
}

/// Rewrites `f` (a chirp, optionally times a smooth factor) as `G' + h`,
/// stopping once every exponent in `h` exceeds `-1 + margin`.
pub fn chirp_reduce(f: &Expr, margin: f64) -> Result<Reduction> {
    if !(0.0..1.0).contains(&margin) {
        return Err(DistError::InvalidInput("margin must lie in [0, 1)".into()));
    }
    reduce_until(f, -1.0 + margin)
}

/// Like [`chirp_reduce`], stopping once every exponent in `h` exceeds `bound`.
pub(crate) fn reduce_until(f: &Expr, bound: f64) -> Result<Reduction> {
    let (k, psi, c) = chirp_factors(f)?;
    let steps = ((bound - c.alpha).max(0.0) / c.beta).ceil() as usize + 2;
    let start = RTerm { coef: 1.0, deriv: 0, expo: c.alpha, kind: c.kind, signed: c.signed };
    let r = reduce_terms(start, c.beta, |t| t.expo > bound, steps);
    let max_d = r.g.iter().chain(&r.h).map(|t| t.deriv).max().unwrap_or(0);
    let mut derivs = vec![psi.clone().unwrap_or(Expr::Const(1.0))];
    for _ in 0..max_d {
        let next = differentiate(derivs.last().unwrap())?;
        derivs.push(next);
    }
    Ok(Reduction { g: assemble(&r.g, k, &derivs, &c), h: assemble(&r.h, k, &derivs, &c), steps: r.steps, center: c.center })
}

/// `true` when every chirp/power exponent in `e` is above `bound`.
pub fn exponents_above(e: &Expr, bound: f64) -> bool {
    match e {
        Expr::Chirp(c) => c.alpha > bound,
        Expr::Power(p) => p.alpha > bound,
        Expr::Sum(v) => v.iter().all(|t| exponents_above(t, bound)),
        Expr::Scale(_, t) => exponents_above(t, bound),
        Expr::SmoothProduct(_, t) => exponents_above(t, bound),
        _ => true,
    }
}
