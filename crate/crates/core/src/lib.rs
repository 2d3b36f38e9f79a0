//! Distributional integration of a closed family of symbolic integrands.
//!
//! The engine evaluates integrals that exist only in the distributional sense
//! (oscillatory chirps with arbitrarily negative exponents, step functions
//! whose series must be summed in the Cesaro sense), together with point
//! values, phi-transforms and Fourier recoveries built on top of them.

pub mod cesaro;
pub mod error;
pub mod expr;
pub mod fourier;
pub mod integrate;
pub mod jet;
pub mod phitransform;
pub mod quadrature;
pub mod reduce;

pub use error::{DistError, ParseDiagnostics, Result};
pub use expr::{differentiate, parse, Chirp, Expr, Power, SeqExpr, Side, Smooth, Trig};
pub use cesaro::{CesaroStatus, CesaroValue};
pub use reduce::{chirp_reduce, lateral_value, point_value, PointStatus, PointValue, Reduction};
pub use fourier::{cesaro_partial_sum, fourier_coeffs, recover_value, FourierData, RecoverOpts};
pub use integrate::{
    change_of_variables, dist_integrate, dist_integrate_with, indefinite, integrate_against_smooth, integrate_improper,
    integrate_power_weighted, moment, mvt_find_xi, reconstruct_from_peano, IntegralResult, IntegralStatus, IntegrateOpts,
    MvtKind, Substitution, TraceEntry, WeightedEnd,
};
pub use phitransform::{
    measure_verdict, phi_field, poisson_boundary, radial_extremes, Approach, DistRep, KernelKind, KernelSpec, PhiField,
    Verdict,
};
pub use quadrature::{indefinite_samples, integrate_abs, QuadResult};
