//! Christoffel functions of planar domains bounded by piecewise smooth curves.
//!
//! The crate covers the whole pipeline: boundary geometry, boundary-reduced
//! cubature, Gram matrices in a Legendre basis, evaluation of `λ_n(D, x)`,
//! explicit needle polynomials that certify two-sided bounds, and the
//! numerical experiments that compare `λ_n` with the closed-form asymptotic
//! profile built from boundary distances.

pub mod christoffel;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod needles;
pub mod quadrature;
pub mod rho;
pub mod verification;

pub use christoffel::{
    build_evaluator, kernel_polynomial, sup_on_region, BivariatePoly, ChristoffelEvaluator,
    EvaluatorOptions, PrecisionMode, SupEstimate,
};
pub use error::{Error, Result};
pub use geometry::{
    Affine2, BoundaryLoop, BoundingBox, CornerData, Curve, CurvePoint, Disc, Domain,
    GeometryConfig, Membership, Orientation, Point2,
};
pub use quadrature::{Cubature, PolyBasis, QuadratureSpec, Reduction};
pub use rho::{rho_star, theorem_rhs, FormulaBreakdown, FormulaMode, FormulaTerm};

/// Largest supported total degree.
pub const MAX_DEGREE: usize = 32;
