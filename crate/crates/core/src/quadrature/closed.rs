//! Exact integrals of sums `sum_i p_i(x) e^{z_i x}`.

use crate::expr::{Expr, Smooth};
use num_complex::Complex64;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpPoly {
    pub terms: Vec<(Complex64, Vec<Complex64>)>,
}

fn real_poly(c: &[f64]) -> Vec<Complex64> {
    c.iter().map(|v| Complex64::new(*v, 0.0)).collect()
}

impl ExpPoly {
    pub fn constant(c: f64) -> ExpPoly {
        ExpPoly { terms: vec![(Complex64::new(0.0, 0.0), vec![Complex64::new(c, 0.0)])] }
    }

    fn single(z: Complex64, p: Vec<Complex64>) -> ExpPoly {
        ExpPoly { terms: vec![(z, p)] }
    }

    /// Conversion of smooth expressions whose transcendental parts have affine arguments.
    pub fn from_smooth(e: &Expr) -> Option<ExpPoly> {
        let i = Complex64::i();
        Some(match e {
            Expr::Const(c) => ExpPoly::constant(*c),
            Expr::Smooth(Smooth::Poly(c)) => ExpPoly::single(Complex64::new(0.0, 0.0), real_poly(c)),
            Expr::Smooth(Smooth::Sin(p)) | Expr::Smooth(Smooth::Cos(p)) | Expr::Smooth(Smooth::Exp(p)) => {
                if p.iter().skip(2).any(|c| *c != 0.0) {
                    return None;
                }
                let p0 = p.first().copied().unwrap_or(0.0);
                let p1 = p.get(1).copied().unwrap_or(0.0);
                match e {
                    Expr::Smooth(Smooth::Exp(_)) => {
                        ExpPoly::single(Complex64::new(p1, 0.0), vec![Complex64::new(p0.exp(), 0.0)])
                    }
                    _ => {
                        let plus = (i * p0).exp();
                        let minus = (-i * p0).exp();
                        let (a, b) = if matches!(e, Expr::Smooth(Smooth::Sin(_))) {
                            (plus / (2.0 * i), -minus / (2.0 * i))
                        } else {
                            (plus / 2.0, minus / 2.0)
                        };
                        ExpPoly { terms: vec![(i * p1, vec![a]), (-i * p1, vec![b])] }.merged()
                    }
                }
            }
            Expr::Sum(v) => {
                let mut acc = ExpPoly::default();
                for t in v {
                    acc = acc.add(&ExpPoly::from_smooth(t)?);
                }
                acc
            }
            Expr::Scale(k, e) => ExpPoly::from_smooth(e)?.scale(*k),
            Expr::SmoothProduct(a, b) => ExpPoly::from_smooth(a)?.mul(&ExpPoly::from_smooth(b)?),
            _ => return None,
        })
    }

    fn merged(mut self) -> ExpPoly {
        let mut out: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
        for (z, p) in self.terms.drain(..) {
            if let Some(slot) = out.iter_mut().find(|(w, _)| *w == z) {
                if slot.1.len() < p.len() {
                    slot.1.resize(p.len(), Complex64::new(0.0, 0.0));
                }
                for (s, v) in slot.1.iter_mut().zip(p) {
                    *s += v;
                }
            } else {
                out.push((z, p));
            }
        }
        ExpPoly { terms: out }
    }

    pub fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        ExpPoly { terms }.merged()
    }

    pub fn scale(&self, k: f64) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(z, p)| (*z, p.iter().map(|c| c * k).collect()))
                .collect(),
        }
    }

    pub fn mul(&self, o: &ExpPoly) -> ExpPoly {
        let mut terms = Vec::new();
        for (z1, p1) in &self.terms {
            for (z2, p2) in &o.terms {
                let mut p = vec![Complex64::new(0.0, 0.0); p1.len() + p2.len() - 1];
                for (i, a) in p1.iter().enumerate() {
                    for (j, b) in p2.iter().enumerate() {
                        p[i + j] += a * b;
                    }
                }
                terms.push((z1 + z2, p));
            }
        }
        ExpPoly { terms }.merged()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(z, p)| horner(p, x) * (z * x).exp())
            .sum()
    }

    /// `int_a^b` of the complex-valued sum, or `None` when the closed form
    /// would lose accuracy (tiny nonzero exponents, overflow).
    pub fn integral_complex(&self, a: f64, b: f64) -> Option<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        let w = b - a;
        for (z, p) in &self.terms {
            if z.re.abs() * a.abs().max(b.abs()) > 600.0 {
                return None;
            }
            if *z == Complex64::new(0.0, 0.0) {
                let prim = |x: f64| -> Complex64 {
                    p.iter()
                        .enumerate()
                        .rev()
                        .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * x + c / (k as f64 + 1.0))
                        * x
                };
                total += prim(b) - prim(a);
                continue;
            }
            if z.norm() * w < 1e-3 {
                return None;
            }
            let prim = |x: f64| -> Complex64 {
                let mut d = p.clone();
                let mut s = Complex64::new(0.0, 0.0);
                let mut zk = *z;
                let mut sign = 1.0;
                while !d.is_empty() {
                    s += horner(&d, x) * sign / zk;
                    d = d.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
                    zk *= z;
                    sign = -sign;
                }
                s * (z * x).exp()
            };
            total += prim(b) - prim(a);
        }
        Some(total)
    }

    pub fn integral(&self, a: f64, b: f64) -> Option<f64> {
        self.integral_complex(a, b).map(|c| c.re)
    }
}

fn horner(p: &[Complex64], x: f64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}
