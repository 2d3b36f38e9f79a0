//! The phi-transform `F(x, t) = <f(x + t y), phi(y)>` of a distribution,
//! its radial and angular extremes, a heuristic measure test and Poisson
//! boundary values.

use crate::error::{DistError, Result};
use crate::expr::{Expr, Side, Smooth};
use crate::integrate::{integrate_with_factor, IntegralStatus, IntegrateOpts};
use crate::jet::{Jet, SmoothFn, SmoothRef};
use crate::quadrature::cheb::{ChebOpts, ChebTable};
use crate::reduce::{PointStatus, PointValue};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelKind {
    /// `1 / (pi (1 + y^2))`
    Poisson,
    /// `C exp(-1 / (1 - s^2))`, `s = (y - shift) / r`
    Bump { r: f64, shift: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub normalized: bool,
    /// Positive, normalized and `O(|y|^a)` at infinity for some `a < -1`.
    pub in_t0: bool,
    /// In addition `y phi'(y) <= 0`.
    pub in_t1: bool,
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        let f = |s: f64| if s.abs() >= 1.0 { 0.0 } else { (-1.0 / (1.0 - s * s)).exp() };
        let opts = ChebOpts { abs_tol: 1e-16, rel_tol: 1e-15, ..Default::default() };
        ChebTable::build(&f, &[-1.0, 0.0, 1.0], &opts).integral()
    })
}

impl KernelSpec {
    pub fn poisson() -> KernelSpec {
        KernelSpec { kind: KernelKind::Poisson, normalized: true, in_t0: true, in_t1: true }
    }

    /// Centered bump supported on `[-r, r]`.
    pub fn bump(r: f64) -> Result<KernelSpec> {
        KernelSpec::bump_shifted(r, 0.0)
    }

    /// Bump supported on `[shift - r, shift + r]`; monotone on both sides of
    /// the origin only when `shift = 0`.
    pub fn bump_shifted(r: f64, shift: f64) -> Result<KernelSpec> {
        if !(r > 0.0) || !r.is_finite() || !shift.is_finite() {
            return Err(DistError::InvalidInput(format!("bump needs r > 0, got {r}")));
        }
        Ok(KernelSpec { kind: KernelKind::Bump { r, shift }, normalized: true, in_t0: true, in_t1: shift == 0.0 })
    }

    /// `phi` applied to a jet argument.
    pub fn phi_jet(&self, y: &Jet) -> Jet {
        let order = y.order();
        match self.kind {
            KernelKind::Poisson => y.mul(y).add_const(1.0).recip().scale(1.0 / PI),
            KernelKind::Bump { r, shift } => {
                let s = y.add_const(-shift).scale(1.0 / r);
                if s.value().abs() >= 1.0 {
                    return Jet::constant(0.0, order);
                }
                let g = s.mul(&s).scale(-1.0).add_const(1.0);
                g.recip().scale(-1.0).exp().scale(1.0 / (r * bump_mass()))
            }
        }
    }

    pub fn phi(&self, y: f64) -> f64 {
        self.phi_jet(&Jet::variable(y, 0)).value()
    }

    /// `phi^(m)(y)`.
    pub fn derivative(&self, y: f64, m: usize) -> f64 {
        self.phi_jet(&Jet::variable(y, m)).derivative(m)
    }

    fn support(&self) -> Option<(f64, f64)> {
        match self.kind {
            KernelKind::Poisson => None,
            KernelKind::Bump { r, shift } => Some((shift - r, shift + r)),
        }
    }
}

/// `z -> phi((z - x) / t) / t`.
struct Scaled {
    kernel: KernelSpec,
    x: f64,
    t: f64,
}

impl SmoothFn for Scaled {
    fn jet(&self, z: f64, order: usize) -> Jet {
        let y = Jet::variable(z, order).add_const(-self.x).scale(1.0 / self.t);
        self.kernel.phi_jet(&y).scale(1.0 / self.t)
    }
}

/// A function part plus finitely many atoms `c delta^(m)(x - x0)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistRep {
    pub fn_part: Option<Expr>,
    pub atoms: Vec<(f64, usize, f64)>,
}

impl DistRep {
    pub fn function(e: Expr) -> DistRep {
        DistRep { fn_part: Some(e), atoms: Vec::new() }
    }

    pub fn atom(c: f64, m: usize, x0: f64) -> DistRep {
        DistRep { fn_part: None, atoms: vec![(c, m, x0)] }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiField {
    pub kernel: KernelSpec,
    pub grid_x: Vec<f64>,
    pub grid_t: Vec<f64>,
    /// `values[i_t][i_x]`
    pub values: Vec<Vec<f64>>,
    /// Nodes whose integral did not come out finite.
    pub flagged: Vec<(usize, usize)>,
}

impl PhiField {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,t,F\n");
        for (it, t) in self.grid_t.iter().enumerate() {
            for (ix, x) in self.grid_x.iter().enumerate() {
                s.push_str(&format!("{x},{t},{}\n", self.values[it][ix]));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("field serializes")
    }
}

fn closed_poisson(e: &Expr, x: f64, t: f64) -> Option<f64> {
    let at = |c: f64| ((x - c) / t).atan();
    match e {
        Expr::Const(c) => Some(*c),
        Expr::Scale(k, s) => closed_poisson(s, x, t).map(|v| k * v),
        Expr::Indicator { lo, hi } => Some((at(*lo) - at(*hi)) / PI),
        Expr::Power(p) if p.alpha == 0.0 => Some(match (p.side, p.signed) {
            (Side::Both, false) => 1.0,
            (Side::Both, true) => 2.0 / PI * at(p.center),
            (Side::Right, _) => 0.5 + at(p.center) / PI,
            (Side::Left, s) => (0.5 - at(p.center) / PI) * if s { -1.0 } else { 1.0 },
        }),
        Expr::Smooth(Smooth::Poly(c)) if c.len() <= 2 => Some(c[0] + c.get(1).map_or(0.0, |b| b * x)),
        Expr::Smooth(Smooth::Exp(c)) if c.len() == 1 => Some(c[0].exp()),
        Expr::Smooth(s @ (Smooth::Sin(c) | Smooth::Cos(c))) if c.len() <= 2 => {
            let w = c.get(1).copied().unwrap_or(0.0);
            Some((-w.abs() * t).exp() * s.eval(x))
        }
        _ => None,
    }
}

fn support_of(e: &Expr) -> Option<(f64, f64)> {
    match e {
        Expr::Indicator { lo, hi } | Expr::Restrict { lo, hi, .. } => Some((*lo, *hi)),
        Expr::StepSeq { center, .. } => Some((*center, center + 1.0)),
        Expr::Scale(_, s) | Expr::SmoothProduct(_, s) => support_of(s),
        Expr::Sum(v) => v.iter().try_fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| {
            support_of(s).map(|(a, b)| (l.min(a), h.max(b)))
        }),
        _ => None,
    }
}

fn summands(e: &Expr) -> Vec<Expr> {
    match e {
        Expr::Sum(v) => v.iter().flat_map(summands).collect(),
        Expr::Scale(k, x) => summands(x).into_iter().map(|s| Expr::scale(*k, s)).collect(),
        _ => vec![e.clone()],
    }
}

fn status_of(r: &crate::integrate::IntegralResult) -> Result<f64> {
    if r.status == IntegralStatus::Finite {
        Ok(r.value)
    } else {
        Err(DistError::Domain(format!("kernel integral is {:?}", r.status)))
    }
}

/// `int f(z) P_t(x - z) dz` over the tail `z > zr` (`right`) or `z < zr`,
/// in the angle variable `z = x + t tan(theta)`.
fn poisson_tail(e: &Expr, x: f64, t: f64, zr: f64, right: bool) -> Result<f64> {
    let th0 = ((zr - x) / t).atan();
    let (lo, hi) = if right { (th0, FRAC_PI_2) } else { (-FRAC_PI_2, th0) };
    if hi - lo <= 0.0 {
        return Ok(0.0);
    }
    let f = |th: f64| e.eval_at(x + t * th.tan()).unwrap_or(0.0) / PI;
    let mut breaks = vec![lo, hi];
    for k in 1..40 {
        let s = (hi - lo) * 0.5f64.powi(k);
        breaks.push(if right { hi - s } else { lo + s });
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let opts = ChebOpts { abs_tol: 1e-12, rel_tol: 1e-12, max_evals: 2_000_000, ..Default::default() };
    let table = ChebTable::build(&f, &breaks, &opts);
    if !table.integral().is_finite() {
        return Err(DistError::Domain("tail of the Poisson integral diverges".into()));
    }
    Ok(table.integral())
}

/// `int f(x + t y) phi(y) dy` for the function part.
fn fn_part_value(e: &Expr, kernel: &KernelSpec, x: f64, t: f64) -> Result<f64> {
    let opts = IntegrateOpts::default();
    let factor: SmoothRef = Arc::new(Scaled { kernel: *kernel, x, t });
    if let Some((ylo, yhi)) = kernel.support() {
        let r = integrate_with_factor(e, factor, Some((x + t * 0.5 * (ylo + yhi), t)), x + t * ylo, x + t * yhi, &opts)?;
        return status_of(&r);
    }
    let mut total = 0.0;
    let mut rest = Vec::new();
    for s in summands(e) {
        if let Some(v) = closed_poisson(&s, x, t) {
            total += v;
        } else if let Some((lo, hi)) = support_of(&s) {
            let r = integrate_with_factor(&s, factor.clone(), Some((x, t)), lo, hi, &opts)?;
            total += status_of(&r)?;
        } else {
            rest.push(s);
        }
    }
    if rest.is_empty() {
        return Ok(total);
    }
    let rest = Expr::sum(rest);
    let pts = rest
        .all_singular_points()
        .ok_or_else(|| DistError::UnsupportedTransform("Poisson integral of a periodic singular part".into()))?;
    let lo = pts.iter().copied().fold(x, f64::min) - 1.0 - t;
    let hi = pts.iter().copied().fold(x, f64::max) + 1.0 + t;
    let r = integrate_with_factor(&rest, factor, Some((x, t)), lo, hi, &opts)?;
    total += status_of(&r)?;
    total += poisson_tail(&rest, x, t, hi, true)?;
    total += poisson_tail(&rest, x, t, lo, false)?;
    Ok(total)
}

/// `F(x, t)`.
pub fn phi_value(d: &DistRep, kernel: &KernelSpec, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(DistError::InvalidInput(format!("t must be positive, got {t}")));
    }
    let mut v = match &d.fn_part {
        Some(e) => fn_part_value(e, kernel, x, t)?,
        None => 0.0,
    };
    for &(c, m, x0) in &d.atoms {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        v += c * sign * kernel.derivative((x0 - x) / t, m) / t.powi(m as i32 + 1);
    }
    Ok(v)
}

pub fn phi_field(d: &DistRep, kernel: &KernelSpec, grid_x: &[f64], grid_t: &[f64]) -> Result<PhiField> {
    if grid_t.iter().any(|t| !(*t > 0.0)) {
        return Err(DistError::InvalidInput("grid_t must be positive".into()));
    }
    if grid_t.windows(2).any(|w| w[1] >= w[0]) {
        return Err(DistError::InvalidInput("grid_t must decrease strictly".into()));
    }
    if grid_x.windows(2).any(|w| w[1] < w[0]) {
        return Err(DistError::InvalidInput("grid_x must be sorted".into()));
    }
    let nodes: Vec<(usize, usize)> = (0..grid_t.len()).flat_map(|i| (0..grid_x.len()).map(move |j| (i, j))).collect();
    let vals: Vec<Option<f64>> = nodes
        .par_iter()
        .map(|&(i, j)| match phi_value(d, kernel, grid_x[j], grid_t[i]) {
            Ok(v) if v.is_finite() => Some(v),
            _ => None,
        })
        .collect();
    let mut values = vec![vec![f64::NAN; grid_x.len()]; grid_t.len()];
    let mut flagged = Vec::new();
    for (&(i, j), v) in nodes.iter().zip(vals) {
        match v {
            Some(v) => values[i][j] = v,
            None => flagged.push((i, j)),
        }
    }
    Ok(PhiField { kernel: *kernel, grid_x: grid_x.to_vec(), grid_t: grid_t.to_vec(), values, flagged })
}

/// Geometric mesh `t0 * ratio^k`, `k = 0..n`.
pub fn geometric_mesh(t0: f64, ratio: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t0 * ratio.powi(k as i32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremes {
    /// `+inf` when the values run off upwards.
    pub sup: f64,
    /// `-inf` when the values run off downwards.
    pub inf: f64,
}

fn runs_off(v: &[f64]) -> Option<f64> {
    let n = v.len();
    let last = *v.last()?;
    if last.abs() > 1e12 {
        return Some(last.signum());
    }
    if n < 5 {
        return None;
    }
    let d: Vec<f64> = v[n - 5..].windows(2).map(|w| w[1] - w[0]).collect();
    let same = d.iter().all(|x| x * d[0] > 0.0);
    let growing = d.windows(2).all(|w| w[1].abs() >= 0.95 * w[0].abs());
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    if same && growing && d[0].abs() > 1e-9 * scale {
        Some(d[0].signum())
    } else {
        None
    }
}

/// Upper and lower limits of `F(x0 + slope t, t)` as `t -> 0+`, estimated on
/// the last third of `t_mesh`.
pub fn angular_extremes(d: &DistRep, kernel: &KernelSpec, x0: f64, slope: f64, t_mesh: &[f64]) -> Result<Extremes> {
    if t_mesh.len() < 3 {
        return Err(DistError::InvalidInput("need at least three mesh points".into()));
    }
    let v: Vec<f64> = t_mesh
        .par_iter()
        .map(|t| phi_value(d, kernel, x0 + slope * t, *t))
        .collect::<Result<_>>()?;
    let tail = &v[v.len() - (v.len() / 3).max(2)..];
    let mut sup = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut inf = tail.iter().copied().fold(f64::INFINITY, f64::min);
    match runs_off(&v) {
        Some(s) if s > 0.0 => sup = f64::INFINITY,
        Some(_) => inf = f64::NEG_INFINITY,
        None => {}
    }
    Ok(Extremes { sup, inf })
}

pub fn radial_extremes(d: &DistRep, kernel: &KernelSpec, x0: f64, t_mesh: &[f64]) -> Result<Extremes> {
    angular_extremes(d, kernel, x0, 0.0, t_mesh)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Verdict {
    MeasureConsistent,
    ViolationAt { x: f64, t: f64, value: f64 },
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct VerdictOpts {
    pub n_x: usize,
    pub t_mesh: Vec<f64>,
    /// Values below `-m_max` count as drifting to minus infinity.
    pub m_max: f64,
    /// Share of mesh samples that must drift before a violation is reported.
    pub fraction: f64,
    /// Cone slope of the angular approach.
    pub slope: f64,
}

impl Default for VerdictOpts {
    fn default() -> Self {
        VerdictOpts { n_x: 41, t_mesh: geometric_mesh(1.0, 0.5, 32), m_max: 1e6, fraction: 0.05, slope: 1.0 }
    }
}

/// Heuristic test of the lower bound `F > -infinity` required of measures:
/// `MeasureConsistent` is evidence, not proof.
pub fn measure_verdict(d: &DistRep, kernel: &KernelSpec, lo: f64, hi: f64, opts: &VerdictOpts) -> Result<Verdict> {
    if !kernel.in_t1 {
        return Err(DistError::InvalidInput("measure test needs a kernel with y phi'(y) <= 0".into()));
    }
    if !(lo < hi) || opts.t_mesh.len() < 3 {
        return Err(DistError::InvalidInput("need lo < hi and a mesh of at least three points".into()));
    }
    let n = opts.n_x.max(2);
    let mut samples: Vec<(f64, bool)> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64, false)).collect();
    samples.extend(d.atoms.iter().filter(|a| a.2 >= lo && a.2 <= hi).map(|a| (a.2, true)));
    let offsets = [0.0, -opts.slope, opts.slope];
    let results: Vec<(f64, bool, Option<(f64, f64)>, bool)> = samples
        .par_iter()
        .map(|&(x, atom)| {
            let mut worst: Option<(f64, f64)> = None;
            let mut weak = false;
            for off in offsets {
                let v: Vec<f64> = opts
                    .t_mesh
                    .iter()
                    .map(|t| phi_value(d, kernel, x + off * t, *t).unwrap_or(f64::NAN))
                    .collect();
                let k = v.len();
                let tail = &v[k - (k / 3).max(2)..];
                let (i_min, vmin) = tail
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |(im, m), (i, x)| if *x < m { (i, *x) } else { (im, m) });
                let downward = v[k - 1] < v[2 * k / 3];
                if vmin < -opts.m_max && downward {
                    let t = opts.t_mesh[k - tail.len() + i_min];
                    if worst.map_or(true, |w| vmin < w.1) {
                        worst = Some((t, vmin));
                    }
                } else if vmin < -1e-3 * opts.m_max {
                    weak = true;
                }
            }
            (x, atom, worst, weak)
        })
        .collect();
    if let Some((x, _, Some((t, v)), _)) = results.iter().find(|r| r.1 && r.2.is_some()) {
        return Ok(Verdict::ViolationAt { x: *x, t: *t, value: *v });
    }
    let mesh: Vec<_> = results.iter().filter(|r| !r.1).collect();
    let bad: Vec<_> = mesh.iter().filter(|r| r.2.is_some()).collect();
    if !bad.is_empty() && bad.len() as f64 >= opts.fraction * mesh.len() as f64 {
        let (x, _, w, _) = bad[0];
        let (t, v) = w.unwrap();
        return Ok(Verdict::ViolationAt { x: *x, t, value: v });
    }
    if !bad.is_empty() || results.iter().any(|r| r.3) {
        return Ok(Verdict::Inconclusive);
    }
    Ok(Verdict::MeasureConsistent)
}

/// Path along which [`poisson_boundary`] approaches the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Approach {
    Radial,
    /// Along `x = w + slope * t`.
    Angular(f64),
}

/// Limit of the Poisson integral of `e` at `(w, 0)`.
pub fn poisson_boundary(e: &Expr, w: f64, approach: Approach) -> Result<PointValue> {
    let slope = match approach {
        Approach::Radial => 0.0,
        Approach::Angular(m) => m,
    };
    let d = DistRep::function(e.clone());
    let kernel = KernelSpec::poisson();
    let tol = 1e-9;
    let mut prev_v: Option<f64> = None;
    let mut prev_r: Option<f64> = None;
    let mut stable = 0;
    let mut last = f64::NAN;
    for k in 1..=40 {
        let t = 0.5f64.powi(k);
        let v = phi_value(&d, &kernel, w + slope * t, t)?;
        let r = prev_v.map(|p| 2.0 * v - p);
        if let (Some(r), Some(pr)) = (r, prev_r) {
            last = r;
            if (r - pr).abs() <= tol * r.abs().max(1.0) {
                stable += 1;
                if stable >= 3 {
                    return Ok(PointValue::exists(r, 0));
                }
            } else {
                stable = 0;
            }
        }
        prev_v = Some(v);
        prev_r = r;
    }
    Ok(PointValue { value: last, order_n: 0, status: PointStatus::Inconclusive, left: None, right: None })
}
