//! Expression rewrites under the substitutions `x = p t + q`, `x = t^a` and `x = 1/t`.

use crate::error::{DistError, Result};
use crate::expr::{shift_poly, Chirp, Expr, Power, Side, Smooth, Trig};

fn unsupported(msg: &str) -> DistError {
    DistError::UnsupportedTransform(msg.into())
}

fn map_smooth(s: &Smooth, f: impl Fn(&[f64]) -> Vec<f64>) -> Smooth {
    match s {
        Smooth::Poly(c) => Smooth::Poly(f(c)),
        Smooth::Sin(c) => Smooth::Sin(f(c)),
        Smooth::Cos(c) => Smooth::Cos(f(c)),
        Smooth::Exp(c) => Smooth::Exp(f(c)),
    }
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `e(p t + q)`.
pub(crate) fn affine(e: &Expr, p: f64, q: f64) -> Result<Expr> {
    let pre = |x: f64| (x - q) / p;
    let flip_side = |s: Side| if p < 0.0 { s.mirrored() } else { s };
    let sign = |signed: bool| if signed && p < 0.0 { -1.0 } else { 1.0 };
    Ok(match e {
        Expr::Const(c) => Expr::Const(*c),
        Expr::Power(pw) => {
            let k = p.abs().powf(pw.alpha) * sign(pw.signed);
            let inner = Expr::Power(Power { center: pre(pw.center), side: flip_side(pw.side), ..*pw });
            if k == 1.0 {
                inner
            } else {
                Expr::scale(k, inner)
            }
        }
        Expr::Chirp(c) => {
            if p.abs() != 1.0 {
                return Err(unsupported("chirps are closed only under affine maps with |p| = 1"));
            }
            let inner = Expr::Chirp(Chirp { center: pre(c.center), side: flip_side(c.side), ..*c });
            if sign(c.signed) == 1.0 {
                inner
            } else {
                Expr::scale(-1.0, inner)
            }
        }
        Expr::StepSeq { center, coeff } => {
            if p != 1.0 {
                return Err(unsupported("step sequences are closed only under translations"));
            }
            Expr::StepSeq { center: center - q, coeff: coeff.clone() }
        }
        Expr::Indicator { lo, hi } => {
            let (lo, hi) = ordered(pre(*lo), pre(*hi));
            Expr::Indicator { lo, hi }
        }
        Expr::Smooth(s) => Expr::Smooth(map_smooth(s, |c| {
            let mut d = shift_poly(c, q);
            let mut f = 1.0;
            for v in d.iter_mut() {
                *v *= f;
                f *= p;
            }
            d
        })),
        Expr::Sum(v) => Expr::Sum(v.iter().map(|t| affine(t, p, q)).collect::<Result<_>>()?),
        Expr::Scale(k, t) => Expr::Scale(*k, Box::new(affine(t, p, q)?)),
        Expr::SmoothProduct(a, b) => Expr::SmoothProduct(Box::new(affine(a, p, q)?), Box::new(affine(b, p, q)?)),
        Expr::Restrict { lo, hi, inner } => {
            let (lo, hi) = ordered(pre(*lo), pre(*hi));
            Expr::Restrict { lo, hi, inner: Box::new(affine(inner, p, q)?) }
        }
        Expr::Periodic { period, base } => {
            if q != 0.0 || p <= 0.0 {
                return Err(unsupported("periodic expressions are closed only under x = p t with p > 0"));
            }
            Expr::Periodic { period: period / p, base: Box::new(affine(base, p, 0.0)?) }
        }
    })
}

/// `e(t^a)` for `t > 0`.
pub(crate) fn power(e: &Expr, a: f64) -> Result<Expr> {
    Ok(match e {
        Expr::Const(c) => Expr::Const(*c),
        Expr::Power(pw) => {
            if pw.center != 0.0 {
                return Err(unsupported("power substitution needs powers centered at 0"));
            }
            if pw.side == Side::Left {
                return Ok(Expr::Const(0.0));
            }
            Expr::Power(Power { center: 0.0, alpha: a * pw.alpha, side: Side::Right, signed: false })
        }
        Expr::Chirp(c) => {
            if c.center != 0.0 {
                return Err(unsupported("power substitution needs chirps centered at 0"));
            }
            if c.side == Side::Left {
                return Ok(Expr::Const(0.0));
            }
            Expr::Chirp(Chirp { center: 0.0, alpha: a * c.alpha, beta: a * c.beta, side: Side::Right, signed: false, ..*c })
        }
        Expr::Smooth(s) => {
            if a.fract() != 0.0 || a < 1.0 {
                return Err(unsupported("smooth factors compose with t^a only for integer a"));
            }
            let k = a as usize;
            Expr::Smooth(map_smooth(s, |c| {
                let mut d = vec![0.0; (c.len() - 1) * k + 1];
                for (i, v) in c.iter().enumerate() {
                    d[i * k] = *v;
                }
                d
            }))
        }
        Expr::Indicator { lo, hi } | Expr::Restrict { lo, hi, .. } => {
            if *hi <= 0.0 {
                return Ok(Expr::Const(0.0));
            }
            let lo = lo.max(0.0).powf(1.0 / a);
            let hi = hi.powf(1.0 / a);
            match e {
                Expr::Restrict { inner, .. } => Expr::Restrict { lo, hi, inner: Box::new(power(inner, a)?) },
                _ => Expr::Indicator { lo, hi },
            }
        }
        Expr::Sum(v) => Expr::Sum(v.iter().map(|t| power(t, a)).collect::<Result<_>>()?),
        Expr::Scale(k, t) => Expr::Scale(*k, Box::new(power(t, a)?)),
        Expr::SmoothProduct(s, g) => Expr::SmoothProduct(Box::new(power(s, a)?), Box::new(power(g, a)?)),
        Expr::StepSeq { .. } => return Err(unsupported("step sequences are not closed under x = t^a")),
        Expr::Periodic { .. } => return Err(unsupported("periodic expressions are not closed under x = t^a")),
    })
}

/// `e(1/t)` for `t > 0`.
pub(crate) fn inverse(e: &Expr) -> Result<Expr> {
    Ok(match e {
        Expr::Const(c) => Expr::Const(*c),
        Expr::Power(pw) if pw.center == 0.0 => {
            if pw.side == Side::Left {
                return Ok(Expr::Const(0.0));
            }
            Expr::Power(Power { center: 0.0, alpha: -pw.alpha, side: Side::Right, signed: false })
        }
        Expr::Chirp(c) if c.center == 0.0 => {
            if c.side == Side::Left {
                return Ok(Expr::Const(0.0));
            }
            if c.beta.fract() != 0.0 {
                return Err(unsupported("inversion of a chirp needs an integer beta"));
            }
            let mut arg = vec![0.0; c.beta as usize + 1];
            arg[c.beta as usize] = 1.0;
            let osc = match c.kind {
                Trig::Sin => Smooth::Sin(arg),
                Trig::Cos => Smooth::Cos(arg),
            };
            let amp = Expr::Power(Power { center: 0.0, alpha: -c.alpha, side: Side::Right, signed: false });
            Expr::SmoothProduct(Box::new(Expr::Smooth(osc)), Box::new(amp))
        }
        Expr::Sum(v) => Expr::Sum(v.iter().map(inverse).collect::<Result<_>>()?),
        Expr::Scale(k, t) => Expr::Scale(*k, Box::new(inverse(t)?)),
        Expr::SmoothProduct(s, g) => match &**s {
            Expr::Const(c) => Expr::Scale(*c, Box::new(inverse(g)?)),
            _ => return Err(unsupported("smooth factors are not closed under x = 1/t")),
        },
        Expr::StepSeq { .. } => return Err(unsupported("step sequences are not closed under x = 1/t")),
        _ => return Err(unsupported("only constants, powers and chirps centered at 0 invert")),
    })
}

/// `e(t) * t^g` for `t > 0`.
pub(crate) fn mul_power0(e: &Expr, g: f64) -> Result<Expr> {
    if g == 0.0 {
        return Ok(e.clone());
    }
    let pw = Expr::Power(Power { center: 0.0, alpha: g, side: Side::Right, signed: false });
    Ok(match e {
        Expr::Const(c) => Expr::scale(*c, pw),
        Expr::Power(p) if p.center == 0.0 => Expr::Power(Power { alpha: p.alpha + g, ..*p }),
        Expr::Chirp(c) if c.center == 0.0 => Expr::Chirp(Chirp { alpha: c.alpha + g, ..*c }),
        Expr::Smooth(_) => Expr::SmoothProduct(Box::new(e.clone()), Box::new(pw)),
        Expr::Sum(v) => Expr::Sum(v.iter().map(|t| mul_power0(t, g)).collect::<Result<_>>()?),
        Expr::Scale(k, t) => Expr::Scale(*k, Box::new(mul_power0(t, g)?)),
        Expr::SmoothProduct(s, t) => Expr::SmoothProduct(s.clone(), Box::new(mul_power0(t, g)?)),
        Expr::Indicator { lo, hi } => Expr::Restrict { lo: *lo, hi: *hi, inner: Box::new(pw) },
        Expr::Restrict { lo, hi, inner } => Expr::Restrict { lo: *lo, hi: *hi, inner: Box::new(mul_power0(inner, g)?) },
        _ => return Err(unsupported("factor t^g does not merge with this expression")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    fn agree(a: &Expr, b: &Expr, pts: &[f64]) {
        for &x in pts {
            let (u, v) = (a.eval_at(x).unwrap(), b.eval_at(x).unwrap());
            assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0), "{x}: {u} vs {v}");
        }
    }

    #[test]
    fn affine_matches_pointwise() {
        let e = parse("exp(x) * pow(a=0.5, alpha=-0.5, signed=true) + indicator(0, 2)").unwrap();
        let t = affine(&e, -1.0, 1.0).unwrap();
        let direct = |t: f64| e.eval_at(1.0 - t).unwrap();
        for x in [-0.7, 0.2, 0.9, 1.3] {
            assert!((t.eval_at(x).unwrap() - direct(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_of_chirp_is_oscillating_power() {
        let e = parse("chirp(alpha=-3, beta=1, sin)").unwrap();
        let t = mul_power0(&inverse(&e).unwrap(), -2.0).unwrap();
        let want = |t: f64| t * t.sin();
        for x in [1.0, 2.5, 10.0] {
            assert!((t.eval_at(x).unwrap() - want(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn power_substitution_merges_exponents() {
        let e = parse("poly(1, 2) * chirp(alpha=-1.5, beta=1, cos)").unwrap();
        let t = power(&e, 2.0).unwrap();
        let direct = parse("poly(1, 0, 2) * chirp(alpha=-3, beta=2, cos)").unwrap();
        agree(&t, &direct, &[0.3, 0.8, 1.7]);
    }
}
