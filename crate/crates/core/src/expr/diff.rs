use super::{Chirp, Expr, Power, Smooth, Trig};
use crate::error::{DistError, Result};

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect()
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 0.0)
}

fn scaled(k: f64, e: Expr) -> Expr {
    if k == 0.0 || is_zero(&e) {
        Expr::Const(0.0)
    } else if k == 1.0 {
        e
    } else {
        Expr::Scale(k, Box::new(e))
    }
}

/// Product of a derivative-of-smooth factor and another factor, simplified.
fn times(s: Expr, g: Expr) -> Expr {
    if is_zero(&s) || is_zero(&g) {
        return Expr::Const(0.0);
    }
    match s {
        Expr::Const(k) => scaled(k, g),
        s => Expr::SmoothProduct(Box::new(s), Box::new(g)),
    }
}

fn sum(terms: Vec<Expr>) -> Expr {
    let terms: Vec<Expr> = terms.into_iter().filter(|t| !is_zero(t)).collect();
    Expr::sum(terms)
}

fn inner_factor(p: &[f64]) -> Expr {
    let d = poly_derivative(p);
    if d.len() == 1 {
        Expr::Const(d[0])
    } else {
        Expr::Smooth(Smooth::Poly(d))
    }
}

fn chirp_derivative(c: &Chirp) -> Expr {
    let flip = |alpha: f64, kind: Trig| {
        Expr::Chirp(Chirp { alpha, kind, signed: !c.signed, ..*c })
    };
    let lead = scaled(c.alpha, flip(c.alpha - 1.0, c.kind));
    let back = flip(c.alpha - c.beta - 1.0, c.kind.other());
    let back = match c.kind {
        Trig::Sin => scaled(-c.beta, back),
        Trig::Cos => scaled(c.beta, back),
    };
    sum(vec![lead, back])
}

/// Symbolic derivative, valid pointwise away from centers.
pub fn differentiate(e: &Expr) -> Result<Expr> {
    Ok(match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Smooth(Smooth::Poly(c)) => {
            let d = poly_derivative(c);
            if d.len() == 1 {
                Expr::Const(d[0])
            } else {
                Expr::Smooth(Smooth::Poly(d))
            }
        }
        Expr::Smooth(Smooth::Sin(p)) => times(inner_factor(p), Expr::Smooth(Smooth::Cos(p.clone()))),
        Expr::Smooth(Smooth::Cos(p)) => scaled(
            -1.0,
            times(inner_factor(p), Expr::Smooth(Smooth::Sin(p.clone()))),
        ),
        Expr::Smooth(Smooth::Exp(p)) => times(inner_factor(p), Expr::Smooth(Smooth::Exp(p.clone()))),
        Expr::Power(p) => {
            if p.alpha == 0.0 {
                Expr::Const(0.0)
            } else {
                scaled(
                    p.alpha,
                    Expr::Power(Power { alpha: p.alpha - 1.0, signed: !p.signed, ..*p }),
                )
            }
        }
        Expr::Chirp(c) => chirp_derivative(c),
        Expr::Sum(v) => sum(v.iter().map(differentiate).collect::<Result<_>>()?),
        Expr::Scale(k, e) => scaled(*k, differentiate(e)?),
        Expr::SmoothProduct(s, g) => sum(vec![
            times(differentiate(s)?, (**g).clone()),
            times((**s).clone(), differentiate(g)?),
        ]),
        Expr::StepSeq { .. } | Expr::Indicator { .. } | Expr::Periodic { .. } | Expr::Restrict { .. } => {
            return Err(DistError::Domain(format!(
                "derivative is not a function for this node: {e}"
            )))
        }
    })
}
