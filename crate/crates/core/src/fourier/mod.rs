//! Fourier coefficients of periodic integrands and point-value recovery from
//! asymmetric Cesàro partial sums.

use crate::cesaro::{cesaro_complex, CesaroStatus, CesaroValue};
use crate::error::{DistError, Result};
use crate::expr::{Expr, Smooth};
use crate::integrate::{dist_integrate, IntegralStatus};
use crate::reduce::{PointStatus, PointValue};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierData {
    pub period: f64,
    pub n_max: usize,
    /// `a_n` for `n = -n_max ..= n_max`.
    pub coeffs: Vec<Complex64>,
}

impl FourierData {
    pub fn coeff(&self, n: i64) -> Complex64 {
        assert!(n.unsigned_abs() as usize <= self.n_max, "coefficient {n} not computed");
        self.coeffs[(n + self.n_max as i64) as usize]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("coefficients serialize")
    }
}

/// One period of `e` as a list of `(scale, base)` pieces on `[0, period)`.
fn periodic_parts(e: &Expr) -> Result<(f64, Vec<(f64, Expr)>)> {
    match e {
        Expr::Periodic { period, base } => Ok((*period, vec![(1.0, (**base).clone())])),
        Expr::Scale(k, s) => {
            let (p, parts) = periodic_parts(s)?;
            Ok((p, parts.into_iter().map(|(c, b)| (c * k, b)).collect()))
        }
        Expr::Sum(v) => {
            let mut period = None;
            let mut out = Vec::new();
            for s in v {
                let (p, parts) = periodic_parts(s)?;
                if period.is_some_and(|q: f64| (q - p).abs() > 1e-14 * p) {
                    return Err(DistError::InvalidInput("summands have different periods".into()));
                }
                period = Some(p);
                out.extend(parts);
            }
            period.map(|p| (p, out)).ok_or_else(|| DistError::InvalidInput("empty sum".into()))
        }
        _ => Err(DistError::InvalidInput("Fourier coefficients need a periodic expression".into())),
    }
}

fn integral(e: &Expr, p: f64) -> Result<f64> {
    let r = dist_integrate(e, 0.0, p)?;
    match r.status {
        IntegralStatus::Finite => Ok(r.value),
        s => Err(DistError::Domain(format!("coefficient integral is {s:?}"))),
    }
}

/// `a_n = (1/P) int_0^P f(x) exp(-2 pi i n x / P) dx`, `|n| <= n_max`.
pub fn fourier_coeffs(e: &Expr, n_max: usize) -> Result<FourierData> {
    e.validate()?;
    let (period, parts) = periodic_parts(e)?;
    let w = 2.0 * PI / period;
    let one = |n: usize| -> Result<Complex64> {
        let mut z = Complex64::new(0.0, 0.0);
        for (k, base) in &parts {
            if n == 0 {
                z.re += k * integral(base, period)?;
                continue;
            }
            let arg = vec![0.0, w * n as f64];
            let c = Expr::smooth_product(Expr::Smooth(Smooth::Cos(arg.clone())), base.clone())?;
            let s = Expr::smooth_product(Expr::Smooth(Smooth::Sin(arg)), base.clone())?;
            z += Complex64::new(integral(&c, period)?, -integral(&s, period)?) * *k;
        }
        Ok(z / period)
    };
    let half: Vec<Complex64> = (0..=n_max).into_par_iter().map(one).collect::<Result<_>>()?;
    let mut coeffs: Vec<Complex64> = half[1..].iter().rev().map(|z| z.conj()).collect();
    coeffs.extend(half);
    Ok(FourierData { period, n_max, coeffs })
}

/// `(C,k)` limit as `x -> infinity` of `sum_{-x <= n <= a x} a_n e^{i n w theta}`
/// over integer `x <= x_max`.
pub fn cesaro_partial_sum(fd: &FourierData, theta: f64, k: usize, a: f64, x_max: usize) -> Result<CesaroValue> {
    cesaro_partial_sum_tol(fd, theta, k, a, x_max, 1e-4)
}

pub fn cesaro_partial_sum_tol(fd: &FourierData, theta: f64, k: usize, a: f64, x_max: usize, tol: f64) -> Result<CesaroValue> {
    if !(a > 0.0) || x_max == 0 {
        return Err(DistError::InvalidInput("need a > 0 and x_max >= 1".into()));
    }
    let top = (a * x_max as f64).floor() as usize;
    if x_max.max(top) > fd.n_max {
        return Err(DistError::InvalidInput(format!(
            "partial sums up to {} need more than the {} computed coefficients",
            x_max.max(top),
            fd.n_max
        )));
    }
    let w = 2.0 * PI / fd.period;
    let term = |n: i64| fd.coeff(n) * Complex64::from_polar(1.0, w * n as f64 * theta);
    let mut s = term(0);
    let (mut lo, mut hi) = (0i64, 0i64);
    let (mut re, mut im) = (Vec::with_capacity(x_max), Vec::with_capacity(x_max));
    for x in 1..=x_max {
        while lo > -(x as i64) {
            lo -= 1;
            s += term(lo);
        }
        let up = (a * x as f64).floor() as i64;
        while hi < up {
            hi += 1;
            s += term(hi);
        }
        re.push(s.re);
        im.push(s.im);
    }
    Ok(cesaro_complex(&re, &im, k, tol))
}

#[derive(Debug, Clone)]
pub struct RecoverOpts {
    pub ratios: Vec<f64>,
    pub k_max: usize,
    pub tol: f64,
    /// Largest spread between per-ratio limits still counted as agreement.
    pub agree_tol: f64,
}

impl Default for RecoverOpts {
    fn default() -> Self {
        RecoverOpts { ratios: vec![0.5, 1.0, 2.0], k_max: 4, tol: 1e-4, agree_tol: 1e-3 }
    }
}

pub fn recover_value(fd: &FourierData, theta: f64, ratios: &[f64]) -> Result<PointValue> {
    recover_value_with(fd, theta, &RecoverOpts { ratios: ratios.to_vec(), ..RecoverOpts::default() })
}

/// Point value at `theta`: every ratio's partial sums must have a common
/// `(C,k)` limit.
pub fn recover_value_with(fd: &FourierData, theta: f64, opts: &RecoverOpts) -> Result<PointValue> {
    if opts.ratios.is_empty() || opts.ratios.iter().any(|a| !(*a > 0.0)) {
        return Err(DistError::InvalidInput("ratios must be a nonempty list of positive numbers".into()));
    }
    let amax = opts.ratios.iter().copied().fold(1.0, f64::max);
    let x_max = (fd.n_max as f64 / amax).floor() as usize;
    let per_ratio: Vec<CesaroValue> = opts
        .ratios
        .par_iter()
        .map(|&a| {
            let mut last = None;
            for k in 0..=opts.k_max {
                let v = cesaro_partial_sum_tol(fd, theta, k, a, x_max, opts.tol)?;
                if v.converged() {
                    return Ok(v);
                }
                last = Some(v);
            }
            Ok(last.expect("at least one order"))
        })
        .collect::<Result<_>>()?;
    let inconclusive = |v: f64| PointValue { value: v, order_n: 0, status: PointStatus::Inconclusive, left: None, right: None };
    let done: Vec<&CesaroValue> = per_ratio.iter().filter(|v| v.converged()).collect();
    let spread = |vs: &[&CesaroValue]| {
        let mut m = 0.0f64;
        for u in vs {
            for v in vs {
                m = m.max(Complex64::new(u.value - v.value, u.imag - v.imag).norm());
            }
        }
        m
    };
    if done.len() >= 2 && spread(&done) > opts.agree_tol {
        return Ok(PointValue { value: done[0].value, order_n: 0, status: PointStatus::NoValue, left: None, right: None });
    }
    if done.len() < per_ratio.len() {
        let v = per_ratio.iter().find(|v| v.status != CesaroStatus::Converged).map_or(f64::NAN, |v| v.value);
        return Ok(inconclusive(v));
    }
    let k = done.iter().map(|v| v.order_k).max().unwrap_or(0);
    let sym = per_ratio
        .iter()
        .zip(&opts.ratios)
        .find(|(_, a)| **a == 1.0)
        .map_or(done[0].value, |(v, _)| v.value);
    Ok(PointValue::exists(sym, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::integrate_against_smooth;
    use crate::parse;
    use approx::assert_abs_diff_eq;

    fn sawtooth() -> Expr {
        Expr::periodic(2.0 * PI, parse(&format!("poly({}, -0.5)", PI / 2.0)).unwrap()).unwrap()
    }

    #[test]
    fn sawtooth_coefficients() {
        let fd = fourier_coeffs(&sawtooth(), 64).unwrap();
        assert_abs_diff_eq!(fd.coeff(0).norm(), 0.0, epsilon = 1e-12);
        for n in [1i64, 2, 7, 64, -3] {
            let want = Complex64::new(0.0, -1.0 / (2.0 * n as f64));
            assert!((fd.coeff(n) - want).norm() < 1e-10, "{n}: {}", fd.coeff(n));
        }
    }

    #[test]
    fn engine_and_by_parts_agree() {
        let base = parse("chirp(a=1, alpha=-1.5, beta=1, sin)").unwrap();
        let fd = fourier_coeffs(&Expr::periodic(2.0 * PI, base.clone()).unwrap(), 3).unwrap();
        for n in 1..=3 {
            let psi = Expr::Smooth(Smooth::Cos(vec![0.0, n as f64]));
            let v = integrate_against_smooth(&base, &psi, 0.0, 2.0 * PI).unwrap().value / (2.0 * PI);
            assert_abs_diff_eq!(fd.coeff(n).re, v, epsilon = 1e-6);
        }
    }

    #[test]
    fn constant_recovers_exactly() {
        let fd = fourier_coeffs(&Expr::periodic(1.0, Expr::Const(3.0)).unwrap(), 8).unwrap();
        let v = cesaro_partial_sum(&fd, 0.37, 2, 1.7, 4).unwrap();
        assert_eq!(v.value, 3.0);
        let p = recover_value(&fd, 0.1, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(p.status, PointStatus::Exists);
        assert_abs_diff_eq!(p.value, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn jump_has_no_value() {
        let fd = fourier_coeffs(&sawtooth(), 2000).unwrap();
        let s = cesaro_partial_sum(&fd, 0.0, 1, 1.0, 2000).unwrap();
        assert_abs_diff_eq!(s.value, 0.0, epsilon = 1e-12);
        let p = recover_value(&fd, 0.0, &[0.5, 1.0, 2.0]).unwrap();
        assert_eq!(p.status, PointStatus::NoValue);
        let p = recover_value(&fd, PI, &[0.5, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(p.value, 0.0, epsilon = 1e-3);
    }
}
