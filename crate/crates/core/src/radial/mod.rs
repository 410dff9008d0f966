//! Geometry of radial Kähler potentials `φ(|z|^2)` on domains in `C^n`.
//!
//! Radial symmetry lets every pointwise quantity be evaluated on the axis
//! `(√r, 0, …, 0)`, where the complex Hessian is diagonal with entries
//! `(r φ')'` (radial) and `φ'` (tangential, multiplicity `n - 1`).

mod completeness;
mod curvature;
mod potential;

pub use completeness::{
    radial_completeness, Completeness, CONVERGENCE_THRESHOLD, DIVERGENCE_THRESHOLD,
};
pub use curvature::{
    curvature_invariants, is_positive_metric, metric_determinant, scalar_curvature,
    scalar_curvature_from_jet, CurvatureReport, PositivityReport,
};
pub use potential::{
    from_log_jet, to_log_jet, LogJet, PotentialKind, RadialDerivatives, RadialPotential,
};
