//! Symbolic integrand family.
//!
//! Every additive term carries at most one non-smooth leaf. Smooth factors
//! enter through [`Expr::SmoothProduct`] and interval restrictions through
//! [`Expr::Restrict`].

mod diff;
mod display;
mod parse;

pub use diff::differentiate;
pub use parse::parse;

use crate::error::{DistError, Result};
use crate::jet::{poly_jet, Jet, SmoothFn};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Both,
    Right,
    Left,
}

impl Side {
    /// 1 on the supported side of the center, 0 elsewhere.
    pub fn weight(self, u: f64) -> f64 {
        match self {
            Side::Both => 1.0,
            Side::Right => (u > 0.0) as i32 as f64,
            Side::Left => (u < 0.0) as i32 as f64,
        }
    }

    pub fn mirrored(self) -> Side {
        match self {
            Side::Both => Side::Both,
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Trig::Sin => v.sin(),
            Trig::Cos => v.cos(),
        }
    }

    pub fn other(self) -> Trig {
        match self {
            Trig::Sin => Trig::Cos,
            Trig::Cos => Trig::Sin,
        }
    }
}

/// `|x-a|^alpha`, optionally times `sgn(x-a)`, optionally one-sided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power {
    pub center: f64,
    pub alpha: f64,
    pub side: Side,
    pub signed: bool,
}

/// `|x-a|^alpha trig(|x-a|^-beta)`, with the same side/sign options as [`Power`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chirp {
    pub center: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kind: Trig,
    pub side: Side,
    pub signed: bool,
}

/// Smooth leaves; the inner argument is a polynomial in `x` (ascending coefficients).
#[derive(Debug, Clone, PartialEq)]
pub enum Smooth {
    Poly(Vec<f64>),
    Sin(Vec<f64>),
    Cos(Vec<f64>),
    Exp(Vec<f64>),
}

/// Coefficient formulas for step functions, in the integer variable `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqExpr {
    N,
    Num(f64),
    Neg(Box<SeqExpr>),
    Add(Box<SeqExpr>, Box<SeqExpr>),
    Sub(Box<SeqExpr>, Box<SeqExpr>),
    Mul(Box<SeqExpr>, Box<SeqExpr>),
    Div(Box<SeqExpr>, Box<SeqExpr>),
    Pow(Box<SeqExpr>, Box<SeqExpr>),
}

impl SeqExpr {
    pub fn eval(&self, n: u64) -> f64 {
        match self {
            SeqExpr::N => n as f64,
            SeqExpr::Num(c) => *c,
            SeqExpr::Neg(a) => -a.eval(n),
            SeqExpr::Add(a, b) => a.eval(n) + b.eval(n),
            SeqExpr::Sub(a, b) => a.eval(n) - b.eval(n),
            SeqExpr::Mul(a, b) => a.eval(n) * b.eval(n),
            SeqExpr::Div(a, b) => a.eval(n) / b.eval(n),
            SeqExpr::Pow(a, b) => {
                let base = a.eval(n);
                let e = b.eval(n);
                if e.fract() == 0.0 && e.abs() < 2.0e9 {
                    base.powi(e as i32)
                } else {
                    base.powf(e)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Power(Power),
    Chirp(Chirp),
    /// `c_n` on `[a + 1/(n+1), a + 1/n)`, zero outside `(a, a+1)`.
    StepSeq {
        center: f64,
        coeff: SeqExpr,
    },
    Indicator {
        lo: f64,
        hi: f64,
    },
    Smooth(Smooth),
    Sum(Vec<Expr>),
    /// Smooth factor times a general factor.
    SmoothProduct(Box<Expr>, Box<Expr>),
    Scale(f64, Box<Expr>),
    Periodic {
        period: f64,
        base: Box<Expr>,
    },
    /// `inner` restricted to `(lo, hi)`.
    Restrict {
        lo: f64,
        hi: f64,
        inner: Box<Expr>,
    },
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

impl Smooth {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Smooth::Poly(c) => horner(c, x),
            Smooth::Sin(p) => horner(p, x).sin(),
            Smooth::Cos(p) => horner(p, x).cos(),
            Smooth::Exp(p) => horner(p, x).exp(),
        }
    }

    pub fn jet(&self, x: f64, order: usize) -> Jet {
        match self {
            Smooth::Poly(c) => poly_jet(c, x, order),
            Smooth::Sin(p) => poly_jet(p, x, order).sin_cos().0,
            Smooth::Cos(p) => poly_jet(p, x, order).sin_cos().1,
            Smooth::Exp(p) => poly_jet(p, x, order).exp(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        match self {
            Smooth::Poly(c) | Smooth::Sin(c) | Smooth::Cos(c) | Smooth::Exp(c) => c,
        }
    }

    fn map_coeffs(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Smooth {
        match self {
            Smooth::Poly(c) => Smooth::Poly(f(c)),
            Smooth::Sin(c) => Smooth::Sin(f(c)),
            Smooth::Cos(c) => Smooth::Cos(f(c)),
            Smooth::Exp(c) => Smooth::Exp(f(c)),
        }
    }
}

impl Power {
    pub fn eval(&self, x: f64) -> Option<f64> {
        let u = x - self.center;
        if u == 0.0 {
            return if self.alpha > 0.0 {
                Some(0.0)
            } else if self.alpha == 0.0 {
                match (self.side, self.signed) {
                    (_, true) => Some(0.0),
                    (Side::Both, false) => Some(1.0),
                    _ => None,
                }
            } else {
                None
            };
        }
        let s = if self.signed { u.signum() } else { 1.0 };
        Some(self.side.weight(u) * s * u.abs().powf(self.alpha))
    }
}

impl Chirp {
    pub fn eval(&self, x: f64) -> f64 {
        let u = x - self.center;
        if u == 0.0 {
            return 0.0;
        }
        let a = u.abs();
        let s = if self.signed { u.signum() } else { 1.0 };
        self.side.weight(u) * s * a.powf(self.alpha) * self.kind.apply(a.powf(-self.beta))
    }

    pub fn with_alpha(&self, alpha: f64) -> Chirp {
        Chirp { alpha, ..*self }
    }
}

fn step_cell(u: f64) -> Option<u64> {
    if u <= 0.0 || u >= 1.0 {
        return None;
    }
    Some((1.0 / u).floor().max(1.0) as u64)
}

impl Expr {
    pub fn power(center: f64, alpha: f64, side: Side, signed: bool) -> Result<Expr> {
        if !center.is_finite() || !alpha.is_finite() {
            return Err(DistError::InvalidInput("power parameters must be finite".into()));
        }
        Ok(Expr::Power(Power { center, alpha, side, signed }))
    }

    pub fn chirp(
        center: f64,
        alpha: f64,
        beta: f64,
        kind: Trig,
        side: Side,
        signed: bool,
    ) -> Result<Expr> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(DistError::InvalidInput(format!("chirp requires beta > 0, got {beta}")));
        }
        if !center.is_finite() || !alpha.is_finite() {
            return Err(DistError::InvalidInput("chirp parameters must be finite".into()));
        }
        Ok(Expr::Chirp(Chirp { center, alpha, beta, kind, side, signed }))
    }

    pub fn indicator(lo: f64, hi: f64) -> Result<Expr> {
        if !(lo < hi) {
            return Err(DistError::InvalidInput(format!(
                "indicator requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Expr::Indicator { lo, hi })
    }

    pub fn restrict(lo: f64, hi: f64, inner: Expr) -> Result<Expr> {
        if !(lo < hi) {
            return Err(DistError::InvalidInput(format!(
                "restriction requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Expr::Restrict { lo, hi, inner: Box::new(inner) })
    }

    pub fn periodic(period: f64, base: Expr) -> Result<Expr> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(DistError::InvalidInput(format!("period must be positive, got {period}")));
        }
        if base.contains_periodic() {
            return Err(DistError::InvalidInput("nested periodic expressions".into()));
        }
        Ok(Expr::Periodic { period, base: Box::new(base) })
    }

    /// Smooth times general. A constant smooth factor becomes a [`Expr::Scale`].
    pub fn smooth_product(smooth: Expr, general: Expr) -> Result<Expr> {
        if !smooth.is_smooth() {
            return Err(DistError::InvalidInput("two non-smooth factors".into()));
        }
        Ok(match smooth {
            Expr::Const(c) => Expr::Scale(c, Box::new(general)),
            s => Expr::SmoothProduct(Box::new(s), Box::new(general)),
        })
    }

    pub fn sum(mut terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::Const(0.0),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn scale(k: f64, e: Expr) -> Expr {
        Expr::Scale(k, Box::new(e))
    }

    pub fn is_smooth(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Smooth(_) => true,
            Expr::Sum(v) => v.iter().all(Expr::is_smooth),
            Expr::Scale(_, e) => e.is_smooth(),
            Expr::SmoothProduct(a, b) => a.is_smooth() && b.is_smooth(),
            _ => false,
        }
    }

    fn contains_periodic(&self) -> bool {
        match self {
            Expr::Periodic { .. } => true,
            Expr::Sum(v) => v.iter().any(Expr::contains_periodic),
            Expr::Scale(_, e) => e.contains_periodic(),
            Expr::SmoothProduct(a, b) => a.contains_periodic() || b.contains_periodic(),
            Expr::Restrict { inner, .. } => inner.contains_periodic(),
            _ => false,
        }
    }

    /// Check the structural invariants of a hand-built tree.
    pub fn validate(&self) -> Result<()> {
        match self {
            Expr::Const(c) if !c.is_finite() => {
                Err(DistError::InvalidInput("non-finite constant".into()))
            }
            Expr::Chirp(c) => Expr::chirp(c.center, c.alpha, c.beta, c.kind, c.side, c.signed).map(|_| ()),
            Expr::Indicator { lo, hi } => Expr::indicator(*lo, *hi).map(|_| ()),
            Expr::Restrict { lo, hi, inner } => {
                Expr::indicator(*lo, *hi)?;
                inner.validate()
            }
            Expr::Sum(v) => v.iter().try_for_each(Expr::validate),
            Expr::Scale(_, e) => e.validate(),
            Expr::SmoothProduct(a, b) => {
                if !a.is_smooth() {
                    return Err(DistError::InvalidInput("two non-smooth factors".into()));
                }
                a.validate()?;
                b.validate()
            }
            Expr::Periodic { period, base } => {
                if !(*period > 0.0) {
                    return Err(DistError::InvalidInput("period must be positive".into()));
                }
                if base.contains_periodic() {
                    return Err(DistError::InvalidInput("nested periodic expressions".into()));
                }
                base.validate()
            }
            Expr::Smooth(s) if s.coeffs().is_empty() => {
                Err(DistError::InvalidInput("empty polynomial".into()))
            }
            _ => Ok(()),
        }
    }

    /// Classical pointwise value; `None` where the formula is undefined.
    pub fn eval_at(&self, x: f64) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Power(p) => p.eval(x),
            Expr::Chirp(c) => Some(c.eval(x)),
            Expr::StepSeq { center, coeff } => {
                Some(step_cell(x - center).map_or(0.0, |n| coeff.eval(n)))
            }
            Expr::Indicator { lo, hi } => indicator_value(*lo, *hi, x),
            Expr::Smooth(s) => Some(s.eval(x)),
            Expr::Sum(v) => v.iter().map(|e| e.eval_at(x)).sum(),
            Expr::SmoothProduct(a, b) => Some(a.eval_at(x)? * b.eval_at(x)?),
            Expr::Scale(k, e) => e.eval_at(x).map(|v| k * v),
            Expr::Periodic { period, base } => base.eval_at(x.rem_euclid(*period)),
            Expr::Restrict { lo, hi, inner } => {
                let w = indicator_value(*lo, *hi, x)?;
                if w == 0.0 {
                    Some(0.0)
                } else {
                    inner.eval_at(x)
                }
            }
        }
    }

    /// Centers, accumulation points, restriction endpoints and period
    /// boundaries inside `[lo, hi]`, sorted and deduplicated.
    pub fn singular_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_singular(lo, hi, &mut out);
        out.retain(|p| *p >= lo && *p <= hi);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
        out
    }

    fn collect_singular(&self, lo: f64, hi: f64, out: &mut Vec<f64>) {
        match self {
            Expr::Const(_) | Expr::Smooth(_) => {}
            Expr::Power(p) => out.push(p.center),
            Expr::Chirp(c) => out.push(c.center),
            Expr::StepSeq { center, .. } => {
                out.push(*center);
                out.push(center + 1.0);
            }
            Expr::Indicator { lo: a, hi: b } => {
                out.push(*a);
                out.push(*b);
            }
            Expr::Sum(v) => v.iter().for_each(|e| e.collect_singular(lo, hi, out)),
            Expr::SmoothProduct(a, b) => {
                a.collect_singular(lo, hi, out);
                b.collect_singular(lo, hi, out);
            }
            Expr::Scale(_, e) => e.collect_singular(lo, hi, out),
            Expr::Restrict { lo: a, hi: b, inner } => {
                out.push(*a);
                out.push(*b);
                inner.collect_singular(lo, hi, out);
            }
            Expr::Periodic { period, base } => {
                let base_pts = base.singular_points(0.0, *period);
                let k0 = (lo / period).floor() as i64;
                let k1 = (hi / period).ceil() as i64;
                for k in k0..=k1 {
                    let shift = k as f64 * period;
                    out.push(shift);
                    out.extend(base_pts.iter().map(|p| p + shift));
                }
            }
        }
    }

    /// All singular points when there are finitely many (no periodic part).
    pub fn all_singular_points(&self) -> Option<Vec<f64>> {
        if self.contains_periodic() {
            return None;
        }
        Some(self.singular_points(f64::NEG_INFINITY, f64::INFINITY))
    }

    /// `self(x - d)`.
    pub fn translate(&self, d: f64) -> Result<Expr> {
        Ok(match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Power(p) => Expr::Power(Power { center: p.center + d, ..*p }),
            Expr::Chirp(c) => Expr::Chirp(Chirp { center: c.center + d, ..*c }),
            Expr::StepSeq { center, coeff } => {
                Expr::StepSeq { center: center + d, coeff: coeff.clone() }
            }
            Expr::Indicator { lo, hi } => Expr::Indicator { lo: lo + d, hi: hi + d },
            Expr::Smooth(s) => Expr::Smooth(s.map_coeffs(|c| shift_poly(c, -d))),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.translate(d)).collect::<Result<_>>()?),
            Expr::SmoothProduct(a, b) => {
                Expr::SmoothProduct(Box::new(a.translate(d)?), Box::new(b.translate(d)?))
            }
            Expr::Scale(k, e) => Expr::Scale(*k, Box::new(e.translate(d)?)),
            Expr::Restrict { lo, hi, inner } => Expr::Restrict {
                lo: lo + d,
                hi: hi + d,
                inner: Box::new(inner.translate(d)?),
            },
            Expr::Periodic { period, base } => {
                let k = d / period;
                if (k - k.round()).abs() > 1e-12 {
                    return Err(DistError::UnsupportedTransform(
                        "translation of a periodic expression by a non-multiple of its period".into(),
                    ));
                }
                Expr::Periodic { period: *period, base: base.clone() }
            }
        })
    }

    /// `self(-x)`.
    pub fn reflect(&self) -> Result<Expr> {
        Ok(match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Power(p) => {
                let r = Expr::Power(Power { center: -p.center, side: p.side.mirrored(), ..*p });
                if p.signed {
                    Expr::scale(-1.0, r)
                } else {
                    r
                }
            }
            Expr::Chirp(c) => {
                let r = Expr::Chirp(Chirp { center: -c.center, side: c.side.mirrored(), ..*c });
                if c.signed {
                    Expr::scale(-1.0, r)
                } else {
                    r
                }
            }
            Expr::StepSeq { .. } => {
                return Err(DistError::UnsupportedTransform(
                    "step sequences are right-oriented and cannot be reflected".into(),
                ))
            }
            Expr::Indicator { lo, hi } => Expr::Indicator { lo: -hi, hi: -lo },
            Expr::Smooth(s) => Expr::Smooth(s.map_coeffs(|c| {
                c.iter()
                    .enumerate()
                    .map(|(k, v)| if k % 2 == 1 { -v } else { *v })
                    .collect()
            })),
            Expr::Sum(v) => Expr::Sum(v.iter().map(Expr::reflect).collect::<Result<_>>()?),
            Expr::SmoothProduct(a, b) => {
                Expr::SmoothProduct(Box::new(a.reflect()?), Box::new(b.reflect()?))
            }
            Expr::Scale(k, e) => Expr::Scale(*k, Box::new(e.reflect()?)),
            Expr::Restrict { lo, hi, inner } => Expr::Restrict {
                lo: -hi,
                hi: -lo,
                inner: Box::new(inner.reflect()?),
            },
            Expr::Periodic { period, base } => Expr::Periodic {
                period: *period,
                base: Box::new(base.reflect()?.translate(*period)?),
            },
        })
    }

    /// Local Taylor expansion at a point where the expression is smooth.
    pub fn jet(&self, x: f64, order: usize) -> Option<Jet> {
        Some(match self {
            Expr::Const(c) => Jet::constant(*c, order),
            Expr::Smooth(s) => s.jet(x, order),
            Expr::Power(p) => {
                let u = x - p.center;
                if u == 0.0 {
                    return None;
                }
                if p.side.weight(u) == 0.0 {
                    return Some(Jet::constant(0.0, order));
                }
                let sg = u.signum();
                let a = Jet::variable(x, order).add_const(-p.center).scale(sg);
                let v = a.powf(p.alpha);
                if p.signed {
                    v.scale(sg)
                } else {
                    v
                }
            }
            Expr::Chirp(c) => {
                let u = x - c.center;
                if u == 0.0 {
                    return None;
                }
                if c.side.weight(u) == 0.0 {
                    return Some(Jet::constant(0.0, order));
                }
                let sg = u.signum();
                let a = Jet::variable(x, order).add_const(-c.center).scale(sg);
                let (s, co) = a.powf(-c.beta).sin_cos();
                let t = match c.kind {
                    Trig::Sin => s,
                    Trig::Cos => co,
                };
                let v = a.powf(c.alpha).mul(&t);
                if c.signed {
                    v.scale(sg)
                } else {
                    v
                }
            }
            Expr::StepSeq { .. } | Expr::Indicator { .. } => Jet::constant(self.eval_at(x)?, order),
            Expr::Sum(v) => {
                let mut acc = Jet::constant(0.0, order);
                for e in v {
                    acc = acc.add(&e.jet(x, order)?);
                }
                acc
            }
            Expr::SmoothProduct(a, b) => a.jet(x, order)?.mul(&b.jet(x, order)?),
            Expr::Scale(k, e) => e.jet(x, order)?.scale(*k),
            Expr::Periodic { period, base } => base.jet(x.rem_euclid(*period), order)?,
            Expr::Restrict { lo, hi, inner } => {
                if indicator_value(*lo, *hi, x)? == 0.0 {
                    Jet::constant(0.0, order)
                } else {
                    inner.jet(x, order)?
                }
            }
        })
    }
}

fn indicator_value(lo: f64, hi: f64, x: f64) -> Option<f64> {
    if x == lo || x == hi {
        None
    } else if x > lo && x < hi {
        Some(1.0)
    } else {
        Some(0.0)
    }
}

/// Coefficients of `p(x + s)`.
pub fn shift_poly(c: &[f64], s: f64) -> Vec<f64> {
    if c.is_empty() {
        return Vec::new();
    }
    poly_jet(c, s, c.len() - 1).0
}

/// Adapter exposing a (locally smooth) expression as a [`SmoothFn`].
#[derive(Debug, Clone)]
pub struct ExprFn(pub Expr);

impl SmoothFn for ExprFn {
    fn jet(&self, x: f64, order: usize) -> Jet {
        self.0
            .jet(x, order)
            .unwrap_or_else(|| Jet(vec![f64::NAN; order + 1]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn chirp(alpha: f64, kind: Trig) -> Expr {
        Expr::chirp(0.0, alpha, 1.0, kind, Side::Both, false).unwrap()
    }

    #[test]
    fn chirp_values() {
        let c = chirp(1.0, Trig::Sin);
        assert_relative_eq!(c.eval_at(2.0 / PI).unwrap(), 2.0 / PI, epsilon = 1e-15);
        assert_eq!(chirp(-3.0, Trig::Sin).eval_at(0.0), Some(0.0));
    }

    #[test]
    fn power_at_center() {
        let p = Expr::power(0.0, -0.5, Side::Both, false).unwrap();
        assert_eq!(p.eval_at(0.0), None);
        let sgn = Expr::power(0.0, 0.0, Side::Both, true).unwrap();
        assert_eq!(sgn.eval_at(-2.0), Some(-1.0));
        assert_eq!(sgn.eval_at(0.0), Some(0.0));
    }

    #[test]
    fn step_cells() {
        let e = Expr::StepSeq { center: 0.0, coeff: SeqExpr::N };
        assert_eq!(e.eval_at(0.75), Some(1.0));
        assert_eq!(e.eval_at(0.4), Some(2.0));
        assert_eq!(e.eval_at(0.0), Some(0.0));
        assert_eq!(e.eval_at(1.2), Some(0.0));
    }

    #[test]
    fn indicator_edges_undefined() {
        let e = Expr::indicator(0.0, 1.0).unwrap();
        assert_eq!(e.eval_at(0.0), None);
        assert_eq!(e.eval_at(0.5), Some(1.0));
        assert!(Expr::indicator(1.0, 1.0).is_err());
    }

    #[test]
    fn singular_point_lists() {
        let c = Expr::chirp(0.5, 0.0, 1.0, Trig::Sin, Side::Both, false).unwrap();
        assert_eq!(c.singular_points(0.0, 1.0), vec![0.5]);
        let s = Expr::Sum(vec![chirp(0.0, Trig::Sin), Expr::indicator(0.2, 0.8).unwrap()]);
        assert_eq!(s.singular_points(0.0, 1.0), vec![0.0, 0.2, 0.8]);
        assert!(Expr::Smooth(Smooth::Sin(vec![0.0, 1.0])).singular_points(0.0, 1.0).is_empty());
    }

    #[test]
    fn periodic_singular_points() {
        let e = Expr::periodic(1.0, Expr::indicator(0.25, 0.5).unwrap()).unwrap();
        assert_eq!(e.singular_points(0.0, 2.0), vec![0.0, 0.25, 0.5, 1.0, 1.25, 1.5, 2.0]);
    }

    #[test]
    fn translate_and_reflect() {
        let e = Expr::Sum(vec![
            Expr::Smooth(Smooth::Poly(vec![1.0, 2.0, 3.0])),
            Expr::power(0.3, 0.5, Side::Right, false).unwrap(),
            Expr::chirp(-0.2, 1.0, 1.0, Trig::Cos, Side::Both, true).unwrap(),
        ]);
        let t = e.translate(0.7).unwrap();
        let r = e.reflect().unwrap();
        for &x in &[-1.3, -0.4, 0.11, 0.9, 2.2] {
            assert_relative_eq!(t.eval_at(x).unwrap(), e.eval_at(x - 0.7).unwrap(), epsilon = 1e-12);
            assert_relative_eq!(r.eval_at(x).unwrap(), e.eval_at(-x).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn jets_match_values() {
        let c = Expr::chirp(0.1, -1.5, 2.0, Trig::Sin, Side::Both, true).unwrap();
        for &x in &[-0.7, 0.4, 1.3] {
            let j = c.jet(x, 2).unwrap();
            assert_relative_eq!(j.value(), c.eval_at(x).unwrap(), epsilon = 1e-13);
            let h = 1e-6;
            let fd = (c.eval_at(x + h).unwrap() - c.eval_at(x - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(j.derivative(1), fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn seq_powers() {
        let alt = SeqExpr::Pow(Box::new(SeqExpr::Num(-1.0)), Box::new(SeqExpr::N));
        assert_eq!(alt.eval(3), -1.0);
        assert_eq!(alt.eval(4), 1.0);
    }
}
