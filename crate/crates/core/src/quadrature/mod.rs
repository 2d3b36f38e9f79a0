//! Absolute numerical integration backbone.

pub mod cheb;
pub mod closed;

use crate::error::{DistError, Result};
use crate::expr::Expr;
use crate::integrate::{run, IntegralStatus, IntegrateOpts, Mode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    /// The estimate meets `tol * (1 + |value|)`.
    pub converged: bool,
}

/// Lebesgue integral of `e` over `[lo, hi]`; `lo > hi` flips the sign.
///
/// Fails with [`DistError::Domain`] when a power or chirp with exponent
/// `<= -1` sits at a center inside the interval.
pub fn integrate_abs(e: &Expr, lo: f64, hi: f64, tol: f64) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return Err(DistError::InvalidInput("tolerance must be positive".into()));
    }
    let opts = IntegrateOpts { tol, ..IntegrateOpts::default() };
    let r = run(e, lo, hi, &opts, Mode::Abs)?;
    match r.status {
        IntegralStatus::Finite | IntegralStatus::Inconclusive => {
            let err = r.error_estimate.abs();
            Ok(QuadResult {
                value: r.value,
                abs_error_estimate: err,
                evaluations: r.evaluations,
                converged: r.status == IntegralStatus::Finite && err <= tol * (1.0 + r.value.abs()),
            })
        }
        s => Err(DistError::Domain(format!("integrand is not absolutely integrable ({s:?})"))),
    }
}

/// `F(x) = integrate_abs(e, base, x)` at every grid point, with `F(base) = 0`.
pub fn indefinite_samples(e: &Expr, base: f64, grid: &[f64], tol: f64) -> Result<Vec<(f64, QuadResult)>> {
    let mut pts: Vec<f64> = grid.to_vec();
    pts.push(base);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let steps: Vec<QuadResult> = pts
        .par_windows(2)
        .map(|w| integrate_abs(e, w[0], w[1], tol))
        .collect::<Result<_>>()?;
    let i0 = pts.iter().position(|x| *x == base).unwrap();
    let mut cum = vec![QuadResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0, converged: true }; pts.len()];
    for i in i0 + 1..pts.len() {
        let (p, s) = (cum[i - 1], steps[i - 1]);
        cum[i] = QuadResult {
            value: p.value + s.value,
            abs_error_estimate: p.abs_error_estimate + s.abs_error_estimate,
            evaluations: p.evaluations + s.evaluations,
            converged: p.converged && s.converged,
        };
    }
    for i in (0..i0).rev() {
        let (p, s) = (cum[i + 1], steps[i]);
        cum[i] = QuadResult {
            value: p.value - s.value,
            abs_error_estimate: p.abs_error_estimate + s.abs_error_estimate,
            evaluations: p.evaluations + s.evaluations,
            converged: p.converged && s.converged,
        };
    }
    Ok(grid
        .iter()
        .map(|x| {
            let i = pts.iter().position(|p| p == x).unwrap();
            (*x, cum[i])
        })
        .collect())
}
