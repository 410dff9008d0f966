//! Numerical laboratory for partial Bergman kernels of radial Kähler metrics.
//!
//! The crate evaluates everything needed to check that the metric with
//! potential `log r - log(1 - r^3)` on the punctured unit ball of `C^2` is
//! constant-scalar-curvature and has a constant partial Bergman kernel on the
//! graded monomial subspace, while its full Bergman kernel is not constant:
//!
//! * [`radial`]: determinant, scalar curvature, curvature invariants and
//!   completeness for any radial potential.
//! * [`norms`]: weighted `L^2` norms of monomials, three independent ways.
//! * [`kernel`]: truncated kernel series with rigorous tail bounds.
//! * [`catalog`]: the concrete models and their scaled products.
//! * [`report`]: configuration, the verification suite and report export.

pub mod catalog;
mod error;
pub mod kernel;
pub mod norms;
pub mod quadrature;
pub mod radial;
pub mod report;
pub mod special;

pub use catalog::{
    expected_constant, make_family, make_product, make_standard, theorem_instance, Factor,
    ModelKind, ProductModel, Sign, StandardModel,
};
pub use error::{Endpoint, Error, Result};
pub use kernel::{
    constancy_report, family_kernel, full_kernel, generating_check, graded_kernel, product_kernel,
    ConstancyReport, GeneratingCheck, KernelEvaluation, KernelOptions, Point, Subspace,
};
pub use norms::{
    angular_factor, norm_closed, norm_exact_graded, norm_quadrature, GradedIndex, NormSource,
    NormValue,
};
pub use radial::{
    curvature_invariants, is_positive_metric, metric_determinant, radial_completeness,
    scalar_curvature, Completeness, CurvatureReport, PositivityReport, RadialPotential,
};
pub use report::{
    export_report, parse_config, run_verification_suite, ReportFormat, RunConfig,
    VerificationReport,
};
pub use special::log_gamma;
