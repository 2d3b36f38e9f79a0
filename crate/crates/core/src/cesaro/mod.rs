//! Cesàro summability: `(C,k)` means of series, limits at infinity, local
//! limits at finite points, and principal-value / e.v. evaluations.

use crate::error::{DistError, Result};
use crate::expr::SeqExpr;
use crate::jet::factorial;
use crate::quadrature::cheb::{ChebOpts, ChebTable};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Default oscillation tolerance of the convergence detector.
pub const DEFAULT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CesaroStatus {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CesaroValue {
    pub value: f64,
    /// Imaginary part, for complex partial sums.
    pub imag: f64,
    pub order_k: usize,
    pub status: CesaroStatus,
    /// Tail oscillation (max - min of the last means, or the window spread).
    pub diagnostics: f64,
    pub terms_used: usize,
}

impl CesaroValue {
    pub fn converged(&self) -> bool {
        self.status == CesaroStatus::Converged
    }
}

/// `(C,k)` means of the sequence `s`, indexed from 0.
pub fn cesaro_means(s: &[f64], k: usize) -> Vec<f64> {
    let mut acc = s.to_vec();
    for _ in 0..k {
        let mut run = 0.0;
        let mut comp = 0.0;
        for v in acc.iter_mut() {
            let y = *v - comp;
            let t = run + y;
            comp = (t - run) - y;
            run = t;
            *v = run;
        }
    }
    if k == 0 {
        return acc;
    }
    acc.iter()
        .enumerate()
        .map(|(n, v)| {
            let mut b = 1.0;
            for i in 1..=k {
                b *= (n + i) as f64 / i as f64;
            }
            v / b
        })
        .collect()
}

fn partial_sums(a: &[f64]) -> Vec<f64> {
    let mut run = 0.0;
    let mut comp = 0.0;
    a.iter()
        .map(|v| {
            let y = v - comp;
            let t = run + y;
            comp = (t - run) - y;
            run = t;
            run
        })
        .collect()
}

/// Richardson limit of means with an expansion in `1/m`, accepted only when
/// two staggered estimates agree far below `tol`.
fn extrapolate(means: &[f64], tol: f64) -> Option<f64> {
    let m = means.len() / 8 * 8;
    if m < 64 {
        return None;
    }
    let at = |k: usize| means[k - 1];
    let r2 = |m: usize| {
        let r1 = |m: usize| 2.0 * at(m) - at(m / 2);
        (4.0 * r1(m) - r1(m / 2)) / 3.0
    };
    let (a, b) = (r2(m), r2(m / 2));
    ((a - b).abs() <= 1e-3 * tol * a.abs().max(1.0)).then_some(a)
}

fn classify(means: &[f64], tol: f64) -> (CesaroStatus, f64, f64) {
    let n = means.len();
    let v = means[n - 1];
    let w0 = n - (n / 10).max(1);
    let (lo, hi) = means[w0..]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
    let diag = hi - lo;
    if !v.is_finite() || v.abs() > 1e12 {
        return (CesaroStatus::Diverged, v, diag);
    }
    if diag <= tol * v.abs().max(1.0) {
        return (CesaroStatus::Converged, extrapolate(means, tol).unwrap_or(v), diag);
    }
    if n >= 100 {
        let a = means[n - 1];
        let b = means[n / 10 - 1];
        let c = means[n / 100 - 1];
        let monotone = means[w0..].windows(2).all(|w| (w[1] - w[0]) * (a - b) >= 0.0);
        if monotone
            && (a - b) * (b - c) > 0.0
            && (a - b).abs() >= 0.5 * (b - c).abs()
            && (a - b).abs() > tol * a.abs().max(1.0)
        {
            return (CesaroStatus::Diverged, v, diag);
        }
    }
    (CesaroStatus::Inconclusive, v, diag)
}

/// `(C,k)` sum of the finite list `a` (all terms used).
pub fn cesaro_sum(a: &[f64], k: usize, tol: f64) -> CesaroValue {
    if a.is_empty() {
        return CesaroValue {
            value: 0.0,
            imag: 0.0,
            order_k: k,
            status: CesaroStatus::Converged,
            diagnostics: 0.0,
            terms_used: 0,
        };
    }
    let means = cesaro_means(&partial_sums(a), k);
    let (status, value, diagnostics) = classify(&means, tol);
    CesaroValue { value, imag: 0.0, order_k: k, status, diagnostics, terms_used: a.len() }
}

/// `(C,k)` sum of `c_n`, `1 <= n <= n_terms`.
pub fn cesaro_sum_formula(c: &SeqExpr, k: usize, n_terms: usize, tol: f64) -> CesaroValue {
    let a: Vec<f64> = (1..=n_terms as u64).map(|n| c.eval(n)).collect();
    cesaro_sum(&a, k, tol)
}

/// Smallest order `k <= k_max` at which the series converges.
pub fn cesaro_sum_auto(a: &[f64], k_max: usize, tol: f64) -> CesaroValue {
    let mut last = cesaro_sum(a, 0, tol);
    if last.converged() {
        return last;
    }
    let mut diverged_all = last.status == CesaroStatus::Diverged;
    for k in 1..=k_max {
        last = cesaro_sum(a, k, tol);
        if last.converged() {
            return last;
        }
        diverged_all &= last.status == CesaroStatus::Diverged;
    }
    if diverged_all {
        last.status = CesaroStatus::Diverged;
    } else if last.status == CesaroStatus::Diverged {
        last.status = CesaroStatus::Inconclusive;
    }
    last
}

/// Complex `(C,k)` limit of a sequence of partial sums.
pub fn cesaro_complex(re: &[f64], im: &[f64], k: usize, tol: f64) -> CesaroValue {
    let mr = cesaro_means(re, k);
    let mi = cesaro_means(im, k);
    let (sr, vr, dr) = classify(&mr, tol);
    let (si, vi, di) = classify(&mi, tol);
    let status = match (sr, si) {
        (CesaroStatus::Converged, CesaroStatus::Converged) => CesaroStatus::Converged,
        (CesaroStatus::Diverged, _) | (_, CesaroStatus::Diverged) => CesaroStatus::Diverged,
        _ => CesaroStatus::Inconclusive,
    };
    CesaroValue { value: vr, imag: vi, order_k: k, status, diagnostics: dr.max(di), terms_used: re.len() }
}

/// Least-squares fit of `y(tau) ~ sum_{j<=deg} q_j tau^j` on `tau in [t0, 1]`
/// for the `n`-fold primitive `phi`; returns `(n! q_n / hi^n, residual)`
/// with the residual in the same scaling.
fn window_fit(phi: &ChebTable, lo: f64, hi: f64, n: usize, deg: usize) -> (f64, f64) {
    const M: usize = 48;
    let t0 = lo / hi;
    let scale = factorial(n) / hi.powi(n as i32);
    let taus: Vec<f64> = (0..M)
        .map(|i| {
            let c = (std::f64::consts::PI * (i as f64 + 0.5) / M as f64).cos();
            t0 + (1.0 - t0) * 0.5 * (1.0 + c)
        })
        .collect();
    let y = DVector::from_iterator(M, taus.iter().map(|t| phi.eval(hi * t) * scale));
    let a = DMatrix::from_fn(M, deg + 1, |i, j| taus[i].powi(j as i32));
    let svd = a.clone().svd(true, true);
    let q = match svd.solve(&y, 1e-15) {
        Ok(q) => q,
        Err(_) => return (f64::NAN, f64::INFINITY),
    };
    let r = &a * &q - &y;
    (q[n], r.amax())
}

/// Convergence verdict from the window estimates; the last `agree` windows
/// must match.
fn assess(est: &[(f64, f64)], tol: f64, agree: usize) -> (CesaroStatus, f64, f64) {
    let n = est.len();
    let v = est[n - 1].0;
    if n < agree.max(2) || !v.is_finite() {
        return (CesaroStatus::Inconclusive, v, f64::INFINITY);
    }
    let last = &est[n - agree..];
    let (lo, hi) = last
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| (a.min(*x), b.max(*x)));
    let resid = est[n - 1].1;
    let spread = hi - lo;
    let diag = spread.max(resid);
    if diag <= tol * v.abs().max(1.0) {
        return (CesaroStatus::Converged, v, diag);
    }
    if n >= 4 {
        let tail = &est[n - 4..];
        let d: Vec<f64> = tail.windows(2).map(|w| w[1].0 - w[0].0).collect();
        let same_sign = d.iter().all(|x| x * d[0] > 0.0);
        let growing = tail.windows(2).all(|w| w[1].0.abs() > w[0].0.abs());
        let non_decaying = d.windows(2).all(|w| w[1].abs() >= 0.5 * w[0].abs());
        if same_sign && growing && non_decaying && d[d.len() - 1].abs() > tol * v.abs().max(1.0) {
            return (CesaroStatus::Diverged, v, diag);
        }
    }
    (CesaroStatus::Inconclusive, v, diag)
}

/// Cesàro limit at infinity of the function tabulated by `f` on `[x0, X]`,
/// at fixed order `k`.
pub(crate) fn limit_at_infinity_table(f: &ChebTable, k: usize, tol: f64) -> CesaroValue {
    let x0 = f.lo();
    let x = f.hi();
    let mut phi = f.clone();
    for _ in 0..k {
        phi = phi.primitive();
    }
    let mut est = Vec::new();
    for j in (0..5).rev() {
        let hi = x * 10f64.powf(-0.5 * j as f64);
        let lo = hi / 10.0;
        if lo < x0 {
            continue;
        }
        est.push(window_fit(&phi, lo, hi, k, k));
    }
    let (status, value, diagnostics) = if est.is_empty() {
        (CesaroStatus::Inconclusive, f64::NAN, f64::INFINITY)
    } else {
        assess(&est, tol, 3)
    };
    let status = if !f.converged && status == CesaroStatus::Converged {
        CesaroStatus::Inconclusive
    } else {
        status
    };
    CesaroValue { value, imag: 0.0, order_k: k, status, diagnostics, terms_used: f.evaluations }
}

fn table_of(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> ChebTable {
    let probe = [lo, 0.5 * (lo + hi), hi].iter().map(|x| f(*x).abs()).fold(1e-300, f64::max);
    let opts = ChebOpts { abs_tol: 1e-13 * probe * (hi - lo), rel_tol: 1e-12, ..Default::default() };
    ChebTable::build(f, &[lo, hi], &opts)
}

/// `(C,k)` limit of `f(x)` as `x -> infinity`, observed on `[x0, x_max]`.
pub fn cesaro_limit_at_infinity(f: &dyn Fn(f64) -> f64, k: usize, x0: f64, x_max: f64, tol: f64) -> CesaroValue {
    limit_at_infinity_table(&table_of(f, x0, x_max), k, tol)
}

/// Auto-escalating version over `k = 0..=k_max`, from a table of `f`.
pub(crate) fn limit_at_infinity_auto(f: &ChebTable, k_max: usize, tol: f64) -> CesaroValue {
    let mut last = limit_at_infinity_table(f, 0, tol);
    let mut any_diverged = last.status == CesaroStatus::Diverged;
    for k in 1..=k_max {
        if last.converged() {
            return last;
        }
        last = limit_at_infinity_table(f, k, tol);
        any_diverged |= last.status == CesaroStatus::Diverged;
    }
    if !last.converged() && any_diverged && last.status != CesaroStatus::Converged {
        last.status = if last.status == CesaroStatus::Diverged || last.value.abs() > 1e12 {
            CesaroStatus::Diverged
        } else {
            CesaroStatus::Inconclusive
        };
    }
    last
}

pub struct LocalLimitOpts<'a> {
    pub n_max: usize,
    pub tol: f64,
    /// How many decades below `|b - a|` the windows reach at least.
    pub decades: f64,
    /// Deepest reach when no order has converged yet.
    pub max_decades: f64,
    /// Upper bound on panel widths, as a function of the distance to `b`.
    pub width_hint: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
    /// Extra breakpoints (distances to `b`) inside `[lo, hi]`.
    pub breaks: Option<&'a (dyn Fn(f64, f64) -> Vec<f64> + Sync)>,
    pub max_evals: usize,
}

impl Default for LocalLimitOpts<'_> {
    fn default() -> Self {
        LocalLimitOpts {
            n_max: 6,
            tol: 1e-8,
            decades: 4.0,
            max_decades: 7.0,
            width_hint: None, breaks: None,
            max_evals: 5_000_000,
        }
    }
}

/// Local Cesàro limit of `f(c)` as `c -> b` from the side of `a`, with
/// automatic order escalation up to `n_max`.
pub fn local_cesaro_limit(f: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: &LocalLimitOpts) -> CesaroValue {
    let dir = if a < b { -1.0 } else { 1.0 };
    let g = |s: f64| f(b + dir * s);
    local_limit_in_distance(&g, (b - a).abs(), opts)
}

/// Same as [`local_cesaro_limit`], for `g(s)` as `s -> 0+`.
pub fn local_limit_in_distance(g: &dyn Fn(f64) -> f64, s_max: f64, opts: &LocalLimitOpts) -> CesaroValue {
    let steps = (2.0 * opts.decades).round() as usize - 1;
    let max_steps = ((2.0 * opts.max_decades).round() as usize - 1).max(steps);
    let n_max = opts.n_max;
    let mut est: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n_max + 1];
    let mut evals = 0usize;
    let mut tables_ok = true;
    let verdict = |est: &[Vec<(f64, f64)>], evals: usize| -> Option<CesaroValue> {
        let mut last = None;
        for (n, e) in est.iter().enumerate() {
            let (status, value, diagnostics) = assess(e, opts.tol, 2);
            let cv = CesaroValue { value, imag: 0.0, order_k: n, status, diagnostics, terms_used: evals };
            if status == CesaroStatus::Converged {
                return Some(cv);
            }
            last = Some(cv);
        }
        last
    };
    for j in 0..max_steps {
        if j >= steps {
            if let Some(v) = verdict(&est, evals) {
                if v.converged() {
                    break;
                }
            }
        }
        let hi = s_max * 10f64.powf(-0.5 * j as f64);
        let lo = hi / 10.0;
        let mut brk = vec![lo];
        if let Some(b) = opts.breaks {
            let mut extra: Vec<f64> = b(lo, hi).into_iter().filter(|x| *x > lo && *x < hi).collect();
            extra.sort_by(|x, y| x.partial_cmp(y).unwrap());
            brk.extend(extra);
        }
        brk.push(hi);
        let hint = opts.width_hint.map(|h| move |s: f64| h(s));
        let hint_ref: Option<&dyn Fn(f64) -> f64> = hint.as_ref().map(|h| h as &dyn Fn(f64) -> f64);
        let scale = [lo, 0.5 * (lo + hi), hi].iter().map(|s| g(*s).abs()).fold(1e-300, f64::max);
        let remaining = opts.max_evals.saturating_sub(evals);
        if j >= 2 && remaining < 1000 {
            break;
        }
        let copts = ChebOpts {
            abs_tol: 1e-14 * scale * (hi - lo),
            rel_tol: 1e-12,
            degree: 16,
            max_evals: remaining.max(1000),
            width_hint: hint_ref,
        };
        let table = ChebTable::build(g, &brk, &copts);
        evals += table.evaluations;
        if !table.converged && j >= 2 {
            // a bad deep table would only spoil the fits
            break;
        }
        tables_ok &= table.converged;
        let mut phi = table;
        for (n, slot) in est.iter_mut().enumerate() {
            if n > 0 {
                phi = phi.primitive();
            }
            slot.push(window_fit(&phi, lo, hi, n, n + 1));
        }
    }
    let mut cv = verdict(&est, evals).expect("n_max + 1 >= 1 orders");
    if cv.converged() && !tables_ok {
        cv.status = CesaroStatus::Inconclusive;
    }
    cv
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EvalMode {
    Pv,
    Ev,
}

pub struct PvEvOpts {
    pub x0: f64,
    pub x_max: f64,
    pub tol: f64,
}

impl Default for PvEvOpts {
    fn default() -> Self {
        PvEvOpts { x0: 1.0, x_max: 1e4, tol: DEFAULT_TOL }
    }
}

/// Principal-value or e.v. Cesàro evaluation of a two-sided primitive `g`.
pub fn pv_ev_evaluate(
    g: &(dyn Fn(f64) -> f64 + Sync),
    mode: EvalMode,
    k: usize,
    ratios: &[f64],
    opts: &PvEvOpts,
) -> Result<CesaroValue> {
    match mode {
        EvalMode::Pv => {
            let h = |x: f64| g(x) - g(-x);
            Ok(cesaro_limit_at_infinity(&h, k, opts.x0, opts.x_max, opts.tol))
        }
        EvalMode::Ev => {
            if ratios.is_empty() || ratios.iter().any(|r| *r <= 0.0) {
                return Err(DistError::InvalidInput("ratios must be positive and nonempty".into()));
            }
            let vals: Vec<CesaroValue> = ratios
                .iter()
                .map(|a| {
                    let h = |x: f64| g(a * x) - g(-x);
                    cesaro_limit_at_infinity(&h, k, opts.x0, opts.x_max, opts.tol)
                })
                .collect();
            let all_converged = vals.iter().all(|v| v.converged());
            let lo = vals.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
            let hi = vals.iter().map(|v| v.value).fold(f64::NEG_INFINITY, f64::max);
            if !all_converged || hi - lo > opts.tol * hi.abs().max(1.0) {
                if vals.iter().all(|v| v.status == CesaroStatus::Inconclusive) {
                    return Ok(vals[0]);
                }
                return Err(DistError::EvDisagreement {
                    values: ratios
                        .iter()
                        .zip(&vals)
                        .map(|(a, v)| (*a, if v.converged() { v.value } else { f64::NAN }))
                        .collect(),
                });
            }
            let mut out = vals[vals.len() - 1];
            out.diagnostics = vals.iter().map(|v| v.diagnostics).fold(hi - lo, f64::max);
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn alt(n: usize) -> Vec<f64> {
        (1..=n).map(|i| if i % 2 == 1 { -1.0 } else { 1.0 }).collect()
    }

    #[test]
    fn grandi_series() {
        let v = cesaro_sum(&alt(100_000), 1, DEFAULT_TOL);
        assert!(v.converged());
        assert_abs_diff_eq!(v.value, -0.5, epsilon = 1e-4);
    }

    #[test]
    fn basel() {
        let a: Vec<f64> = (1..=1_000_000).map(|n| 1.0 / (n as f64 * n as f64)).collect();
        let v = cesaro_sum(&a, 0, DEFAULT_TOL);
        assert!(v.converged());
        assert_abs_diff_eq!(v.value, std::f64::consts::PI.powi(2) / 6.0, epsilon = 1e-5);
    }

    #[test]
    fn alternating_integers_need_second_order() {
        let a: Vec<f64> = alt(100_000).iter().enumerate().map(|(i, s)| s * (i + 1) as f64).collect();
        assert_eq!(cesaro_sum(&a, 1, DEFAULT_TOL).status, CesaroStatus::Inconclusive);
        let v = cesaro_sum(&a, 2, DEFAULT_TOL);
        assert!(v.converged());
        assert_abs_diff_eq!(v.value, -0.25, epsilon = 1e-3);
    }

    #[test]
    fn divergent_series_detected() {
        let a = vec![1.0; 100_000];
        assert_eq!(cesaro_sum(&a, 1, DEFAULT_TOL).status, CesaroStatus::Diverged);
        let h: Vec<f64> = (1..=100_000).map(|n| 1.0 / n as f64).collect();
        assert_eq!(cesaro_sum_auto(&h, 3, DEFAULT_TOL).status, CesaroStatus::Diverged);
    }

    #[test]
    fn limits_at_infinity() {
        let c = cesaro_limit_at_infinity(&|_| 3.5, 2, 1.0, 1e4, DEFAULT_TOL);
        assert!(c.converged());
        assert_abs_diff_eq!(c.value, 3.5, epsilon = 1e-12);
        let s = cesaro_limit_at_infinity(&|x: f64| x.sin(), 1, 0.0, 1e4, 1e-3);
        assert!(s.converged());
        assert_abs_diff_eq!(s.value, 0.0, epsilon = 1e-3);
        let s2 = cesaro_limit_at_infinity(&|x: f64| x.sin() + 2.0, 1, 0.0, 1e4, 1e-3);
        assert_abs_diff_eq!(s2.value, 2.0, epsilon = 1e-3);
        let osc = cesaro_limit_at_infinity(&|x: f64| 1.0 - x.cos(), 0, 0.0, 1e4, 1e-3);
        assert!(!osc.converged());
    }

    #[test]
    fn local_limits() {
        let opts = LocalLimitOpts::default();
        let v = local_cesaro_limit(&|c| c, 0.0, 1.0, &opts);
        assert!(v.converged());
        assert_eq!(v.order_k, 0);
        assert_abs_diff_eq!(v.value, 1.0, epsilon = 1e-8);

        let hint = |s: f64| 2.0 * std::f64::consts::PI * s * s;
        let opts = LocalLimitOpts { tol: 1e-6, width_hint: Some(&hint), ..Default::default() };
        let v = local_cesaro_limit(&|c: f64| (1.0 / (1.0 - c)).sin(), 0.0, 1.0, &opts);
        assert!(v.converged());
        assert!(v.order_k >= 1);
        assert_abs_diff_eq!(v.value, 0.0, epsilon = 1e-6);

        let v = local_cesaro_limit(&|c: f64| 1.0 / (1.0 - c), 0.0, 1.0, &LocalLimitOpts::default());
        assert_eq!(v.status, CesaroStatus::Diverged);
    }

    #[test]
    fn principal_values() {
        let pv = pv_ev_evaluate(&|x: f64| x.atan(), EvalMode::Pv, 0, &[], &PvEvOpts::default()).unwrap();
        assert_abs_diff_eq!(pv.value, std::f64::consts::PI, epsilon = 1e-3);
        let even = |x: f64| 0.5 * x * x;
        let pv = pv_ev_evaluate(&even, EvalMode::Pv, 0, &[], &PvEvOpts::default()).unwrap();
        assert_abs_diff_eq!(pv.value, 0.0, epsilon = 1e-9);
        let ev = pv_ev_evaluate(&even, EvalMode::Ev, 1, &[0.5, 1.0, 2.0], &PvEvOpts::default());
        assert!(matches!(ev, Err(DistError::EvDisagreement { .. })));
        let g = |x: f64| 1.5 + x.sin() / x;
        let ev = pv_ev_evaluate(&g, EvalMode::Ev, 1, &[1.0, 2.0], &PvEvOpts::default()).unwrap();
        assert_abs_diff_eq!(ev.value, 0.0, epsilon = 1e-3);
    }
}
