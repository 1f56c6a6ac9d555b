//! Grid-wide residual checks for a finished construction.
//!
//! Each check sweeps a [`Grid2D`] and reduces to the maximum absolute
//! residual. Reductions run in row-major order after the sweep, so parallel
//! and serial runs report identical numbers.

use serde::{Deserialize, Serialize};

use crate::construction::ConstructionResult;
use crate::geometry::{
    curvature_conformal, determinant, gradient, jacobian, laplacian, pullback_metric, ExponentSign,
    FieldError, GeometryError, ScalarField,
};
use crate::grid::{max_abs, try_map_grid, Grid2D, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub max_abs_residual: f64,
    pub grid: Grid2D,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(
        name: impl Into<String>,
        max_abs_residual: f64,
        grid: Grid2D,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            max_abs_residual,
            grid,
            tolerance,
            // false for NaN
            pass: max_abs_residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub gradient_identity: f64,
    pub dual_route: f64,
    pub cr_residual: f64,
    pub pullback: f64,
    pub harmonicity: f64,
    pub curvature_flat: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gradient_identity: 1e-8,
            dual_route: 1e-10,
            cr_residual: 1e-6,
            pullback: 1e-5,
            harmonicity: 1e-5,
            curvature_flat: 1e-5,
        }
    }
}

/// Finite-difference steps used by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Steps {
    /// First derivatives (Jacobian, gradients).
    pub first: f64,
    /// Five-point Laplacian.
    pub second: f64,
}

impl Steps {
    /// `1e-4` for first derivatives; `1e-4 * radius` for the Laplacian.
    pub fn for_radius(radius: f64) -> Self {
        Self {
            first: 1e-4,
            second: 1e-4 * radius,
        }
    }

    pub fn stencil_margin(&self) -> f64 {
        self.first.max(self.second)
    }
}

/// How `‖∇Φ‖` is obtained in the identity `Φ + log‖∇Φ‖ = Re f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientRoute {
    /// `|g'|` with `g' = e^{f - g}`.
    Exact,
    /// Central differences of `Φ` with the given step.
    CentralDifference(f64),
}

fn field<'a>(
    eval: impl Fn(Point) -> Result<f64, crate::construction::ConstructionError> + Sync + 'a,
) -> impl Fn(Point) -> Result<f64, FieldError> + Sync + 'a {
    move |p| eval(p).map_err(FieldError::from)
}

fn lift(err: crate::construction::ConstructionError) -> GeometryError {
    GeometryError::Field(err.into())
}

/// Max over the grid of `|Φ + log‖∇Φ‖ - Re f|`.
pub fn gradient_identity_residual(
    result: &ConstructionResult,
    grid: &Grid2D,
    route: GradientRoute,
) -> Result<f64, GeometryError> {
    let phi = field(|p| result.phi(p));
    let residuals = try_map_grid(grid, |p| {
        let norm = match route {
            GradientRoute::Exact => result.grad_phi_norm(p).map_err(lift)?,
            GradientRoute::CentralDifference(h) => {
                let [gx, gy] = gradient(&phi, p, h)?;
                gx.hypot(gy)
            }
        };
        let phi_p = result.phi(p).map_err(lift)?;
        let varphi = result.conformal_exponent(p).map_err(lift)?;
        Ok::<_, GeometryError>(phi_p + norm.ln() - varphi)
    })?;
    Ok(max_abs(&residuals))
}

/// Max over the grid of `|e^{g} - (h + C)|`.
pub fn dual_route_residual(
    result: &ConstructionResult,
    grid: &Grid2D,
) -> Result<f64, GeometryError> {
    let residuals = try_map_grid(grid, |p| {
        let z = p.to_complex();
        let via_g = result.g(z).map_err(lift)?.exp();
        let direct = result.h(z).map_err(lift)? + result.constant();
        Ok::<_, GeometryError>((via_g - direct).norm())
    })?;
    Ok(max_abs(&residuals))
}

/// Max over the grid of `|Φx - Ψy|` and `|Φy + Ψx|` by central differences.
pub fn cr_residual(
    result: &ConstructionResult,
    grid: &Grid2D,
    h: f64,
) -> Result<f64, GeometryError> {
    let phi = field(|p| result.phi(p));
    let psi = field(|p| result.psi(p));
    let residuals = try_map_grid(grid, |p| {
        let [phi_x, phi_y] = gradient(&phi, p, h)?;
        let [psi_x, psi_y] = gradient(&psi, p, h)?;
        Ok::<_, GeometryError>((phi_x - psi_y).abs().max((phi_y + psi_x).abs()))
    })?;
    Ok(max_abs(&residuals))
}

/// Entry-wise comparison of `JᵀJ` with `e^{2φ} I` over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullbackSummary {
    /// `max ‖JᵀJ - e^{2φ} I‖_∞`.
    pub max_residual: f64,
    /// Largest `|<W_* ∂x, W_* ∂y>|`.
    pub max_off_diagonal: f64,
    /// Largest `|<W_* ∂x, W_* ∂x> - <W_* ∂y, W_* ∂y>|`.
    pub max_diagonal_mismatch: f64,
    /// Smallest `det J`.
    pub min_determinant: f64,
}

pub fn pullback_summary(
    result: &ConstructionResult,
    varphi: &impl ScalarField,
    grid: &Grid2D,
    h: f64,
) -> Result<PullbackSummary, GeometryError> {
    let w = |p: Point| result.w(p).map_err(FieldError::from);
    let rows = try_map_grid(grid, |p| {
        let j = jacobian(&w, p, h)?;
        let m = pullback_metric(&j);
        let factor = (2.0 * varphi.value(p).map_err(GeometryError::Field)?).exp();
        let residual = (m[0][0] - factor)
            .abs()
            .max((m[1][1] - factor).abs())
            .max(m[0][1].abs())
            .max(m[1][0].abs());
        Ok::<_, GeometryError>([residual, m[0][1], m[0][0] - m[1][1], determinant(&j)])
    })?;
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    Ok(PullbackSummary {
        max_residual: max_abs(&column(0)),
        max_off_diagonal: max_abs(&column(1)),
        max_diagonal_mismatch: max_abs(&column(2)),
        min_determinant: column(3).into_iter().fold(f64::INFINITY, f64::min),
    })
}

/// Max over the grid of `‖JᵀJ - e^{2φ} I‖_∞`, covering both diagonal inner
/// products and the vanishing cross term.
pub fn pullback_residual(
    result: &ConstructionResult,
    varphi: &impl ScalarField,
    grid: &Grid2D,
    h: f64,
    tolerance: f64,
) -> Result<ResidualReport, GeometryError> {
    let summary = pullback_summary(result, varphi, grid, h)?;
    Ok(ResidualReport::new(
        "pullback",
        summary.max_residual,
        *grid,
        tolerance,
    ))
}

/// Max over the grid of the five-point Laplacian of `field`.
pub fn harmonicity_residual(
    field: &impl ScalarField,
    grid: &Grid2D,
    h: f64,
) -> Result<f64, GeometryError> {
    let values = try_map_grid(grid, |p| laplacian(field, p, h))?;
    Ok(max_abs(&values))
}

/// Max over the grid and both exponent signs of `|K|` for the metric `e^{2φ} g0`, `K0 = 0`.
pub fn curvature_flat_residual(
    varphi: &impl ScalarField,
    grid: &Grid2D,
    h: f64,
) -> Result<f64, GeometryError> {
    let values = try_map_grid(grid, |p| {
        let a = curvature_conformal(varphi, 0.0, p, h, ExponentSign::Classical)?;
        let b = curvature_conformal(varphi, 0.0, p, h, ExponentSign::Positive)?;
        Ok::<_, GeometryError>(a.abs().max(b.abs()))
    })?;
    Ok(max_abs(&values))
}

/// Runs the full assertion suite in a fixed order:
/// `lemma1_identity`, `dual_route`, `cr_residual`, `pullback`,
/// `harmonicity_phi`, `harmonicity_psi`, `curvature_flat`.
pub fn verify_all(
    result: &ConstructionResult,
    grid: &Grid2D,
    tol: &Tolerances,
    steps: &Steps,
) -> Result<Vec<ResidualReport>, GeometryError> {
    let varphi = field(|p| result.conformal_exponent(p));
    let phi = field(|p| result.phi(p));
    let psi = field(|p| result.psi(p));
    let g = *grid;
    Ok(vec![
        ResidualReport::new(
            "lemma1_identity",
            gradient_identity_residual(result, grid, GradientRoute::Exact)?,
            g,
            tol.gradient_identity,
        ),
        ResidualReport::new(
            "dual_route",
            dual_route_residual(result, grid)?,
            g,
            tol.dual_route,
        ),
        ResidualReport::new(
            "cr_residual",
            cr_residual(result, grid, steps.first)?,
            g,
            tol.cr_residual,
        ),
        pullback_residual(result, &varphi, grid, steps.first, tol.pullback)?,
        ResidualReport::new(
            "harmonicity_phi",
            harmonicity_residual(&phi, grid, steps.second)?,
            g,
            tol.harmonicity,
        ),
        ResidualReport::new(
            "harmonicity_psi",
            harmonicity_residual(&psi, grid, steps.second)?,
            g,
            tol.harmonicity,
        ),
        ResidualReport::new(
            "curvature_flat",
            curvature_flat_residual(&varphi, grid, steps.second)?,
            g,
            tol.curvature_flat,
        ),
    ])
}
