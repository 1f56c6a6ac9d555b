//! Constructive local isometries between flat conformal metrics
//! `e^{2 Re f} g0` on the plane and the Euclidean plane, together with the
//! finite-difference machinery that checks every identity the construction
//! relies on.
//!
//! The pipeline runs: [`expr::parse`] an analytic `f`, [`construction::build_isometry`]
//! to obtain `g = log(∫ e^f + C)` on a validated disc, then
//! [`verify::verify_all`] to sweep residual checks over a grid.

pub mod construction;
pub mod expr;
pub mod geometry;
pub mod grid;
pub mod quadrature;
pub mod subset;
pub mod verify;

pub use construction::{
    build_g, build_isometry, choose_constant, isometry_w, validate_domain, ConstructionConfig,
    ConstructionError, ConstructionResult,
};
pub use expr::{parse, ComplexValue, EvalError, ExprTree, ParseError};
pub use geometry::{
    curvature_conformal, jacobian, laplace_beltrami_conformal, laplacian, ExponentSign, FieldError,
    GeometryError, Mat2, PlanarMap, ScalarField,
};
pub use grid::{Grid2D, Point, Strategy};
pub use quadrature::{
    integrate_along_polyline, integrate_exp_f, Disc, QuadratureConfig, QuadratureError,
};
pub use subset::{embed_product, image_side_lengths, Interval, ProductMetricSpec, SideLength};
pub use verify::{verify_all, ResidualReport, Steps, Tolerances};
