//! Isometric embedding of product metrics `e^{2a(x)} dx² + e^{2b(y)} dy²`.
//!
//! Arclength coordinates `u(x) = ∫_0^x e^{a}`, `v(y) = ∫_0^y e^{b}` pull the
//! flat metric back to the product metric exactly, so the image of the
//! coordinate rectangle is an open axis-aligned rectangle in the plane.
//! Improper integrals are compactified (`t = s/(1-s²)` on the whole line,
//! `t = lo + s/(1-s)` on a half line) and fed to the same adaptive
//! Gauss–Kronrod engine as the contour integrals.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Point;
use crate::quadrature::{integrate_interval, QuadratureConfig, QuadratureError};

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Interval of the real line; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

#[derive(Clone)]
pub struct ProductMetricSpec {
    pub a: Profile,
    pub b: Profile,
    pub x_range: Interval,
    pub y_range: Interval,
}

impl fmt::Debug for ProductMetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProductMetricSpec")
            .field("x_range", &self.x_range)
            .field("y_range", &self.y_range)
            .finish_non_exhaustive()
    }
}

impl ProductMetricSpec {
    pub fn new(
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x_range: Interval,
        y_range: Interval,
    ) -> Self {
        Self {
            a: Arc::new(a),
            b: Arc::new(b),
            x_range,
            y_range,
        }
    }

    /// `e^{-2x²} dx² + e^{-2y²} dy²` on the whole plane.
    pub fn gaussian() -> Self {
        Self::new(
            |t| -t * t,
            |t| -t * t,
            Interval::real_line(),
            Interval::real_line(),
        )
    }

    /// The flat metric on `x_range × y_range`.
    pub fn flat(x_range: Interval, y_range: Interval) -> Self {
        Self::new(|_| 0.0, |_| 0.0, x_range, y_range)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideLength {
    Finite(f64),
    Unbounded,
}

impl SideLength {
    pub fn finite(self) -> Option<f64> {
        match self {
            SideLength::Finite(v) => Some(v),
            SideLength::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error("coordinate {value} lies outside [{}, {}]", range.lo, range.hi)]
    OutOfRange { value: f64, range: Interval },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Error)]
#[error("non-finite integrand")]
struct NonFinite;

impl From<NonFinite> for QuadratureError {
    fn from(_: NonFinite) -> Self {
        QuadratureError::ToleranceNotReached {
            estimate: Complex64::new(f64::NAN, 0.0),
            error_bound: f64::INFINITY,
            subdivisions: 0,
        }
    }
}

/// `∫_lo^hi e^{a(t)} dt` for `lo <= hi`, either end possibly infinite.
fn integrate_weight(
    a: &Profile,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, QuadratureError> {
    if lo == hi {
        return Ok(0.0);
    }
    let weight = |t: f64| (a)(t).exp();
    let checked = |v: f64| {
        if v.is_finite() {
            Ok(Complex64::new(v, 0.0))
        } else {
            Err(NonFinite)
        }
    };
    let result = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => integrate_interval(|t| checked(weight(t)), lo, hi, cfg)?,
        (true, false) => integrate_interval(
            |s| {
                let r = 1.0 - s;
                checked(weight(lo + s / r) / (r * r))
            },
            0.0,
            1.0,
            cfg,
        )?,
        (false, true) => integrate_interval(
            |s| {
                let r = 1.0 - s;
                checked(weight(hi - s / r) / (r * r))
            },
            0.0,
            1.0,
            cfg,
        )?,
        (false, false) => integrate_interval(
            |s| {
                let r = 1.0 - s * s;
                checked(weight(s / r) * (1.0 + s * s) / (r * r))
            },
            -1.0,
            1.0,
            cfg,
        )?,
    };
    Ok(result.value.re)
}

/// Signed arclength `∫_0^x e^{a}`.
fn arclength(a: &Profile, x: f64, cfg: &QuadratureConfig) -> Result<f64, QuadratureError> {
    if x >= 0.0 {
        integrate_weight(a, 0.0, x, cfg)
    } else {
        Ok(-integrate_weight(a, x, 0.0, cfg)?)
    }
}

/// Arclength coordinates `(u(x), v(y))` with basepoint at the origin.
/// Infinite coordinates are allowed when the range extends that far.
pub fn embed_product(
    spec: &ProductMetricSpec,
    p: Point,
    cfg: &QuadratureConfig,
) -> Result<Point, EmbedError> {
    for (value, range) in [(p.x, spec.x_range), (p.y, spec.y_range)] {
        if !range.contains(value) || value.is_nan() {
            return Err(EmbedError::OutOfRange { value, range });
        }
    }
    Ok(Point::new(
        arclength(&spec.a, p.x, cfg)?,
        arclength(&spec.b, p.y, cfg)?,
    ))
}

fn side(a: &Profile, range: Interval, cfg: &QuadratureConfig) -> SideLength {
    match integrate_weight(a, range.lo, range.hi, cfg) {
        Ok(v) if v.is_finite() => SideLength::Finite(v),
        _ => SideLength::Unbounded,
    }
}

/// Side lengths of the image rectangle; a divergent integral is reported as
/// [`SideLength::Unbounded`].
pub fn image_side_lengths(
    spec: &ProductMetricSpec,
    cfg: &QuadratureConfig,
) -> (SideLength, SideLength) {
    (
        side(&spec.a, spec.x_range, cfg),
        side(&spec.b, spec.y_range, cfg),
    )
}
