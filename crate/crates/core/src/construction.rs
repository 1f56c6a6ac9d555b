//! Explicit local isometry onto a flat conformal metric.
//!
//! Given an analytic `f`, the metric `e^{2 Re f} g0` is flat. The
//! construction solves `f = g + log g'` with
//!
//! ```text
//! h(z) = ∫_{z0}^{z} e^{f(ξ)} dξ,    g(z) = log(h(z) + C),
//! ```
//!
//! splits `g = Φ + iΨ`, and assembles `W = (e^Φ cos Ψ, e^Φ sin Ψ)`, whose
//! Jacobian satisfies `JᵀJ = e^{2 Re f} I`. The constant is pinned so that
//! `h(z0) + C = 1`, which gives `g(z0) = 0` and `W(z0) = (1, 0)`.
//!
//! The working disc is shrunk until `|h + C - 1| <= 1/2` on its boundary.
//! Since `h + C - 1 = h` is analytic and vanishes at the centre, the maximum
//! modulus principle carries the bound to the interior, so `h + C` stays in
//! the right half-plane and the principal logarithm is continuous there.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ComplexValue, EvalError, ExprTree};
use crate::grid::{Grid2D, Point};
use crate::quadrature::{integrate_exp_f, Disc, QuadratureConfig, QuadratureError};

/// Admissible distance of `h + C` from 1 on the validated disc.
pub const DOMAIN_BOUND: f64 = 0.5;

/// Relative precision of the radius bisection.
const RADIUS_PRECISION: f64 = 0.01;

/// Smallest radius tried, relative to the initial radius.
const RADIUS_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    pub basepoint: ComplexValue,
    pub initial_radius: f64,
    pub quadrature: QuadratureConfig,
    pub boundary_samples: usize,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self {
            basepoint: ComplexValue::new(0.0, 0.0),
            initial_radius: 1.0,
            quadrature: QuadratureConfig::default(),
            boundary_samples: 64,
        }
    }
}

impl ConstructionConfig {
    pub fn validate(&self) -> Result<(), ConstructionError> {
        if !(self.initial_radius > 0.0 && self.initial_radius.is_finite()) {
            return Err(ConstructionError::InvalidConfig(format!(
                "initial radius must be positive, got {}",
                self.initial_radius
            )));
        }
        if self.boundary_samples < 16 {
            return Err(ConstructionError::InvalidConfig(format!(
                "need at least 16 boundary samples, got {}",
                self.boundary_samples
            )));
        }
        if !(self.basepoint.re.is_finite() && self.basepoint.im.is_finite()) {
            return Err(ConstructionError::InvalidConfig(
                "basepoint must be finite".into(),
            ));
        }
        self.quadrature.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("invalid construction config: {0}")]
    InvalidConfig(String),
    #[error("no admissible radius above {floor:e}; f grows too fast near the basepoint")]
    NoAdmissibleRadius { floor: f64 },
    #[error("point {point} lies outside the validated disc of radius {} about {}", domain.radius, domain.center)]
    OutsideDomain { point: ComplexValue, domain: Disc },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Evaluation(#[from] EvalError),
}

/// `C = 1 - h(z0)`. With `h` integrated from the basepoint, `h(z0) = 0`.
pub fn choose_constant(f: &ExprTree, cfg: &ConstructionConfig) -> ComplexValue {
    let z0 = cfg.basepoint;
    // An empty segment integrates to zero without touching `f`.
    let h0 = integrate_exp_f(f, z0, z0, &cfg.quadrature).unwrap_or_default();
    ComplexValue::new(1.0, 0.0) - h0
}

fn circle_admissible(f: &ExprTree, c: ComplexValue, cfg: &ConstructionConfig, radius: f64) -> bool {
    let z0 = cfg.basepoint;
    (0..cfg.boundary_samples).all(|k| {
        let theta = TAU * k as f64 / cfg.boundary_samples as f64;
        let z = z0 + Complex64::from_polar(radius, theta);
        match integrate_exp_f(f, z0, z, &cfg.quadrature) {
            Ok(h) => (h + c - 1.0).norm() <= DOMAIN_BOUND,
            Err(_) => false,
        }
    })
}

/// Largest radius `r <= initial_radius`, to 1% relative precision, with
/// `|h + C - 1| <= 1/2` at every boundary sample of the circle of radius `r`.
pub fn validate_domain(
    f: &ExprTree,
    c: ComplexValue,
    cfg: &ConstructionConfig,
) -> Result<Disc, ConstructionError> {
    cfg.validate()?;
    let z0 = cfg.basepoint;
    if circle_admissible(f, c, cfg, cfg.initial_radius) {
        return Ok(Disc::new(z0, cfg.initial_radius));
    }
    let floor = RADIUS_FLOOR * cfg.initial_radius;
    if !circle_admissible(f, c, cfg, floor) {
        return Err(ConstructionError::NoAdmissibleRadius { floor });
    }
    let (mut lo, mut hi) = (floor, cfg.initial_radius);
    while hi - lo > RADIUS_PRECISION * lo {
        let mid = 0.5 * (lo + hi);
        if circle_admissible(f, c, cfg, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Disc::new(z0, lo))
}

/// `g(z) = log(h(z) + C)` on the principal branch; refuses points outside `domain`.
pub fn build_g(
    f: &ExprTree,
    c: ComplexValue,
    domain: &Disc,
    z: ComplexValue,
    quadrature: &QuadratureConfig,
) -> Result<ComplexValue, ConstructionError> {
    if !domain.contains(z) {
        return Err(ConstructionError::OutsideDomain {
            point: z,
            domain: *domain,
        });
    }
    let h = integrate_exp_f(f, domain.center, z, quadrature)?;
    Ok((h + c).ln())
}

/// Everything the construction produces: the constant, the validated disc
/// and evaluators for `h`, `g`, `g'`, `Φ`, `Ψ` and `W`.
#[derive(Debug, Clone)]
pub struct ConstructionResult {
    f: ExprTree,
    c: ComplexValue,
    domain: Disc,
    quadrature: QuadratureConfig,
}

impl ConstructionResult {
    pub fn f(&self) -> &ExprTree {
        &self.f
    }

    pub fn constant(&self) -> ComplexValue {
        self.c
    }

    pub fn domain(&self) -> Disc {
        self.domain
    }

    pub fn basepoint(&self) -> ComplexValue {
        self.domain.center
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quadrature
    }

    fn check(&self, z: ComplexValue) -> Result<(), ConstructionError> {
        if self.domain.contains(z) {
            Ok(())
        } else {
            Err(ConstructionError::OutsideDomain {
                point: z,
                domain: self.domain,
            })
        }
    }

    /// `h(z) = ∫_{z0}^{z} e^{f}` along the segment from the basepoint.
    pub fn h(&self, z: ComplexValue) -> Result<ComplexValue, ConstructionError> {
        self.check(z)?;
        Ok(integrate_exp_f(
            &self.f,
            self.domain.center,
            z,
            &self.quadrature,
        )?)
    }

    pub fn g(&self, z: ComplexValue) -> Result<ComplexValue, ConstructionError> {
        build_g(&self.f, self.c, &self.domain, z, &self.quadrature)
    }

    /// `g'(z) = e^{f(z) - g(z)}`, read off from `f = g + log g'`.
    pub fn g_prime(&self, z: ComplexValue) -> Result<ComplexValue, ConstructionError> {
        let g = self.g(z)?;
        Ok((self.f.evaluate(z)? - g).exp())
    }

    /// `Re f`, the conformal exponent φ of the target metric.
    pub fn conformal_exponent(&self, p: Point) -> Result<f64, ConstructionError> {
        Ok(self.f.real_part_field(p.x, p.y)?)
    }

    pub fn phi(&self, p: Point) -> Result<f64, ConstructionError> {
        Ok(self.g(p.to_complex())?.re)
    }

    pub fn psi(&self, p: Point) -> Result<f64, ConstructionError> {
        Ok(self.g(p.to_complex())?.im)
    }

    /// `‖∇Φ‖ = |g'|` by the Cauchy–Riemann equations.
    pub fn grad_phi_norm(&self, p: Point) -> Result<f64, ConstructionError> {
        Ok(self.g_prime(p.to_complex())?.norm())
    }

    /// `W(p) = (e^Φ cos Ψ, e^Φ sin Ψ)`.
    pub fn w(&self, p: Point) -> Result<Point, ConstructionError> {
        let g = self.g(p.to_complex())?;
        let scale = g.re.exp();
        Ok(Point::new(scale * g.im.cos(), scale * g.im.sin()))
    }

    /// `h(p) + C`, equal to `W(p)` as a complex number since `W = e^g`.
    pub fn w_direct(&self, p: Point) -> Result<Point, ConstructionError> {
        Ok(Point::from_complex(self.h(p.to_complex())? + self.c))
    }

    /// Centred grid inscribed in the validated disc shrunk by `margin`.
    pub fn domain_grid(&self, nx: usize, ny: usize, margin: f64) -> Option<Grid2D> {
        let inner = self.domain.shrunk(margin)?;
        let longest = nx.max(ny) as f64 - 1.0;
        let shorter = nx.min(ny) as f64 - 1.0;
        // half-diagonal equals the shrunk radius, less a hair for rounding
        let span = 2.0 * inner.radius * (1.0 - 1e-12) * longest / longest.hypot(shorter);
        Some(Grid2D::centered(
            Point::from_complex(inner.center),
            span,
            nx,
            ny,
        ))
    }
}

/// Runs the whole construction: choose `C`, validate the disc, and return
/// the evaluators.
pub fn build_isometry(
    f: &ExprTree,
    cfg: &ConstructionConfig,
) -> Result<ConstructionResult, ConstructionError> {
    cfg.validate()?;
    f.evaluate(cfg.basepoint)?;
    let c = choose_constant(f, cfg);
    let domain = validate_domain(f, c, cfg)?;
    Ok(ConstructionResult {
        f: f.clone(),
        c,
        domain,
        quadrature: cfg.quadrature,
    })
}

/// `W(p)` for a finished construction.
pub fn isometry_w(result: &ConstructionResult, p: Point) -> Result<Point, ConstructionError> {
    result.w(p)
}
