use super::{Expr, SeqExpr, Side, Smooth, Trig};
use std::fmt::{self, Display, Formatter};

impl Display for Side {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Both => "both",
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

impl Display for Trig {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trig::Sin => "sin",
            Trig::Cos => "cos",
        })
    }
}

impl Display for SeqExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            SeqExpr::N => f.write_str("n"),
            SeqExpr::Num(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => write!(f, "({c})"),
            SeqExpr::Num(c) => write!(f, "{c}"),
            SeqExpr::Neg(a) => write!(f, "(-{a})"),
            SeqExpr::Add(a, b) => write!(f, "({a} + {b})"),
            SeqExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            SeqExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            SeqExpr::Div(a, b) => write!(f, "({a} / {b})"),
            SeqExpr::Pow(a, b) => write!(f, "({a} ^ {b})"),
        }
    }
}

fn inner_poly(c: &[f64]) -> String {
    c.iter()
        .enumerate()
        .map(|(k, v)| match k {
            0 => format!("{v}"),
            1 => format!("{v}*x"),
            _ => format!("{v}*x^{k}"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

impl Display for Smooth {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Smooth::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly({})", parts.join(", "))
            }
            Smooth::Sin(p) => write!(f, "sin({})", inner_poly(p)),
            Smooth::Cos(p) => write!(f, "cos({})", inner_poly(p)),
            Smooth::Exp(p) => write!(f, "exp({})", inner_poly(p)),
        }
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Power(p) => write!(
                f,
                "pow(a={}, alpha={}, side={}, signed={})",
                p.center, p.alpha, p.side, p.signed
            ),
            Expr::Chirp(c) => write!(
                f,
                "chirp(a={}, alpha={}, beta={}, side={}, signed={}, {})",
                c.center, c.alpha, c.beta, c.side, c.signed, c.kind
            ),
            Expr::StepSeq { center, coeff } => write!(f, "step(cn={coeff}, a={center})"),
            Expr::Indicator { lo, hi } => write!(f, "indicator({lo}, {hi})"),
            Expr::Smooth(s) => write!(f, "{s}"),
            Expr::Sum(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    if matches!(e, Expr::Sum(_)) {
                        write!(f, "({e})")?;
                    } else {
                        write!(f, "{e}")?;
                    }
                }
                Ok(())
            }
            Expr::SmoothProduct(s, g) => write!(f, "({s}) * ({g})"),
            Expr::Scale(k, e) => write!(f, "{k} * ({e})"),
            Expr::Periodic { period, base } => write!(f, "periodic({period}; {base})"),
            Expr::Restrict { lo, hi, inner } => write!(f, "indicator({lo}, {hi}) * ({inner})"),
        }
    }
}
