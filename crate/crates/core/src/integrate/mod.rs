//! Distributional integration over finite and infinite intervals.

mod engine;
mod local;
mod ops;
mod subst;
pub(crate) mod terms;

use crate::error::Result;
use crate::expr::Expr;
use serde::{Deserialize, Serialize};

pub use ops::{
    change_of_variables, integrate_against_smooth, integrate_improper, integrate_power_weighted, moment,
    mvt_find_xi, reconstruct_from_peano, MvtKind, Substitution, WeightedEnd,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegralStatus {
    Finite,
    PlusInfinity,
    MinusInfinity,
    NotIntegrable,
    Inconclusive,
}

impl IntegralStatus {
    pub fn is_finite(self) -> bool {
        self == IntegralStatus::Finite
    }
}

/// One piece between consecutive breakpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub lo: f64,
    pub hi: f64,
    /// Strategies used on the piece, joined with `+`.
    pub strategy: String,
    pub value: f64,
    pub diagnostics: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub status: IntegralStatus,
    pub error_estimate: f64,
    pub trace: Vec<TraceEntry>,
    pub evaluations: usize,
}

impl IntegralResult {
    fn zero() -> IntegralResult {
        IntegralResult {
            value: 0.0,
            status: IntegralStatus::Finite,
            error_estimate: 0.0,
            trace: Vec::new(),
            evaluations: 0,
        }
    }

    fn negate(mut self) -> IntegralResult {
        self.value = -self.value;
        self.status = match self.status {
            IntegralStatus::PlusInfinity => IntegralStatus::MinusInfinity,
            IntegralStatus::MinusInfinity => IntegralStatus::PlusInfinity,
            s => s,
        };
        for t in &mut self.trace {
            t.value = -t.value;
        }
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegrateOpts {
    /// Absolute tolerance of the regular parts.
    pub tol: f64,
    /// Route every endpoint singularity through the Cesàro endpoint limit.
    pub force_hake: bool,
    pub k_max: usize,
    /// Highest order of the local Cesàro limit.
    pub n_max: usize,
    pub cesaro_tol: f64,
    /// Number of cells summed for step series.
    pub series_terms: usize,
    pub max_evals: usize,
    /// Distance from a chirp center used by the reduction.
    pub margin: f64,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        IntegrateOpts {
            tol: 1e-10,
            force_hake: false,
            k_max: 6,
            n_max: 6,
            cesaro_tol: 1e-6,
            series_terms: 200_000,
            max_evals: 10_000_000,
            margin: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Dist,
    Abs,
}

pub(crate) fn run(e: &Expr, a: f64, b: f64, opts: &IntegrateOpts, mode: Mode) -> Result<IntegralResult> {
    e.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(crate::DistError::InvalidInput(
            "bounds must be finite; use integrate_improper for infinite intervals".into(),
        ));
    }
    if a == b {
        return Ok(IntegralResult::zero());
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let t = terms::normalize(e, lo, hi)?;
    let r = engine::integrate_terms(&t, lo, hi, opts, mode)?;
    Ok(if a < b { r } else { r.negate() })
}

/// Integral of `e` over `[a, b]` in the distributional sense; `a > b` flips the sign.
pub fn dist_integrate(e: &Expr, a: f64, b: f64) -> Result<IntegralResult> {
    dist_integrate_with(e, a, b, &IntegrateOpts::default())
}

pub fn dist_integrate_with(e: &Expr, a: f64, b: f64, opts: &IntegrateOpts) -> Result<IntegralResult> {
    run(e, a, b, opts, Mode::Dist)
}

/// Values of `x -> int_base^x e` on `grid`.
pub fn indefinite(e: &Expr, base: f64, grid: &[f64]) -> Result<Vec<IntegralResult>> {
    use rayon::prelude::*;
    grid.par_iter().map(|x| dist_integrate(e, base, *x)).collect()
}

/// `int_a^b e * factor` for `a < b`, where `factor` is smooth on `[a, b]`
/// and varies on scale `focus.1` near `focus.0`.
pub(crate) fn integrate_with_factor(
    e: &Expr,
    factor: crate::jet::SmoothRef,
    focus: Option<(f64, f64)>,
    a: f64,
    b: f64,
    opts: &IntegrateOpts,
) -> Result<IntegralResult> {
    e.validate()?;
    if a >= b {
        return Ok(IntegralResult::zero());
    }
    let mut t = terms::normalize(e, a, b)?;
    for term in &mut t {
        term.psi.push(terms::Psi { f: factor.clone(), sym: None, focus });
    }
    engine::integrate_terms(&t, a, b, opts, Mode::Dist)
}
