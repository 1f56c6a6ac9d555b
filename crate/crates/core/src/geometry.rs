//! Central-difference differential operators on planar fields and maps.

use thiserror::Error;

use crate::construction::ConstructionError;
use crate::grid::Point;

/// 2×2 matrix, `m[row][col]`.
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("point ({}, {}) is outside the field's domain", .0.x, .0.y)]
    OutsideDomain(Point),
    #[error("{0}")]
    Evaluation(String),
}

impl From<ConstructionError> for FieldError {
    fn from(err: ConstructionError) -> Self {
        match err {
            ConstructionError::OutsideDomain { point, .. } => {
                FieldError::OutsideDomain(Point::from_complex(point))
            }
            other => FieldError::Evaluation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("stencil about ({}, {}) leaves the domain at ({}, {})", .center.x, .center.y, .sample.x, .sample.y)]
    StencilOutsideDomain { center: Point, sample: Point },
    #[error("field evaluation failed: {0}")]
    Field(FieldError),
}

/// Real-valued field on a planar domain.
pub trait ScalarField: Sync {
    fn value(&self, p: Point) -> Result<f64, FieldError>;
}

impl<F> ScalarField for F
where
    F: Fn(Point) -> Result<f64, FieldError> + Sync,
{
    fn value(&self, p: Point) -> Result<f64, FieldError> {
        self(p)
    }
}

/// Map from a planar domain into the plane.
pub trait PlanarMap: Sync {
    fn apply(&self, p: Point) -> Result<Point, FieldError>;
}

impl<F> PlanarMap for F
where
    F: Fn(Point) -> Result<Point, FieldError> + Sync,
{
    fn apply(&self, p: Point) -> Result<Point, FieldError> {
        self(p)
    }
}

/// Sign `s` of the conformal factor `e^{2sφ}` in the curvature formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentSign {
    /// `e^{-2φ}`: Gauss curvature of `e^{2φ} g0`.
    #[default]
    Classical,
    /// `e^{+2φ}`, the alternative convention.
    Positive,
}

impl ExponentSign {
    pub fn value(self) -> f64 {
        match self {
            ExponentSign::Classical => -1.0,
            ExponentSign::Positive => 1.0,
        }
    }
}

fn sample<T>(
    center: Point,
    at: Point,
    eval: impl FnOnce(Point) -> Result<T, FieldError>,
) -> Result<T, GeometryError> {
    eval(at).map_err(|err| match err {
        FieldError::OutsideDomain(_) => GeometryError::StencilOutsideDomain { center, sample: at },
        other => GeometryError::Field(other),
    })
}

fn check_step(h: f64) {
    assert!(
        h > 0.0 && h.is_finite(),
        "finite-difference step must be positive, got {h}"
    );
}

/// Central-difference Jacobian `J[i][j] = ∂map_i/∂x_j`, error `O(h²)`.
pub fn jacobian(map: &impl PlanarMap, p: Point, h: f64) -> Result<Mat2, GeometryError> {
    check_step(h);
    let xp = sample(p, p.offset(h, 0.0), |q| map.apply(q))?;
    let xm = sample(p, p.offset(-h, 0.0), |q| map.apply(q))?;
    let yp = sample(p, p.offset(0.0, h), |q| map.apply(q))?;
    let ym = sample(p, p.offset(0.0, -h), |q| map.apply(q))?;
    let inv = 0.5 / h;
    Ok([
        [(xp.x - xm.x) * inv, (yp.x - ym.x) * inv],
        [(xp.y - xm.y) * inv, (yp.y - ym.y) * inv],
    ])
}

/// `JᵀJ`, the matrix of inner products `<J e_i, J e_j>`.
pub fn pullback_metric(j: &Mat2) -> Mat2 {
    let dot = |a: usize, b: usize| j[0][a] * j[0][b] + j[1][a] * j[1][b];
    [[dot(0, 0), dot(0, 1)], [dot(1, 0), dot(1, 1)]]
}

pub fn determinant(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Central-difference gradient.
pub fn gradient(field: &impl ScalarField, p: Point, h: f64) -> Result<[f64; 2], GeometryError> {
    check_step(h);
    let xp = sample(p, p.offset(h, 0.0), |q| field.value(q))?;
    let xm = sample(p, p.offset(-h, 0.0), |q| field.value(q))?;
    let yp = sample(p, p.offset(0.0, h), |q| field.value(q))?;
    let ym = sample(p, p.offset(0.0, -h), |q| field.value(q))?;
    Ok([(xp - xm) / (2.0 * h), (yp - ym) / (2.0 * h)])
}

/// Five-point Laplacian, error `O(h²)`.
pub fn laplacian(field: &impl ScalarField, p: Point, h: f64) -> Result<f64, GeometryError> {
    check_step(h);
    let c = sample(p, p, |q| field.value(q))?;
    let xp = sample(p, p.offset(h, 0.0), |q| field.value(q))?;
    let xm = sample(p, p.offset(-h, 0.0), |q| field.value(q))?;
    let yp = sample(p, p.offset(0.0, h), |q| field.value(q))?;
    let ym = sample(p, p.offset(0.0, -h), |q| field.value(q))?;
    Ok((xp + xm + yp + ym - 4.0 * c) / (h * h))
}

/// Curvature of `e^{2φ} g0` from that of `g0`: `e^{2sφ} (-Δφ + K0)`.
pub fn curvature_conformal(
    phi: &impl ScalarField,
    k0: f64,
    p: Point,
    h: f64,
    sign: ExponentSign,
) -> Result<f64, GeometryError> {
    let lap = laplacian(phi, p, h)?;
    let phi_p = sample(p, p, |q| phi.value(q))?;
    Ok((2.0 * sign.value() * phi_p).exp() * (k0 - lap))
}

/// Laplace–Beltrami operator of `e^{2φ} g0` in two dimensions: `e^{-2φ} Δu`.
pub fn laplace_beltrami_conformal(
    u: &impl ScalarField,
    phi: &impl ScalarField,
    p: Point,
    h: f64,
) -> Result<f64, GeometryError> {
    let lap = laplacian(u, p, h)?;
    let phi_p = sample(p, p, |q| phi.value(q))?;
    Ok((-2.0 * phi_p).exp() * lap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn total(f: impl Fn(Point) -> f64 + Sync) -> impl Fn(Point) -> Result<f64, FieldError> + Sync {
        move |p| Ok(f(p))
    }

    fn exp_map(p: Point) -> Result<Point, FieldError> {
        let r = p.x.exp();
        Ok(Point::new(r * p.y.cos(), r * p.y.sin()))
    }

    #[test]
    fn identity_jacobian() {
        let id = |p: Point| Ok::<_, FieldError>(p);
        for p in [Point::new(0.0, 0.0), Point::new(3.5, -2.0)] {
            let j = jacobian(&id, p, 1e-3).unwrap();
            for (r, row) in j.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    let expected = if r == c { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(*v, expected, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn exponential_map_jacobian() {
        let j = jacobian(&exp_map, Point::new(0.0, 0.0), 1e-5).unwrap();
        assert_abs_diff_eq!(j[0][0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j[0][1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j[1][0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(j[1][1], 1.0, epsilon = 1e-9);

        let g = pullback_metric(&jacobian(&exp_map, Point::new(0.1, 0.2), 1e-4).unwrap());
        assert_abs_diff_eq!(0.2f64.exp(), 1.221403, epsilon = 1e-6);
        assert_abs_diff_eq!(g[0][0], 0.2f64.exp(), epsilon = 1e-8);
        assert_abs_diff_eq!(g[1][1], 0.2f64.exp(), epsilon = 1e-8);
        assert_abs_diff_eq!(g[0][1], 0.0, epsilon = 1e-8);
        assert_eq!(g[0][1], g[1][0]);
    }

    #[test]
    fn laplacian_examples() {
        let p = Point::new(0.3, -0.7);
        let radial = total(|p| p.x * p.x + p.y * p.y);
        assert_abs_diff_eq!(laplacian(&radial, p, 1e-3).unwrap(), 4.0, epsilon = 1e-6);
        assert_eq!(
            laplacian(&total(|p| p.x), Point::new(0.0, 0.0), 1e-3).unwrap(),
            0.0
        );
        let saddle = total(|p| p.x * p.x - p.y * p.y);
        assert_eq!(laplacian(&saddle, Point::new(0.0, 0.0), 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(laplacian(&saddle, p, 1e-3).unwrap(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn curvature_examples() {
        let p = Point::new(0.2, 0.4);
        let linear = total(|p| p.x);
        for sign in [ExponentSign::Classical, ExponentSign::Positive] {
            assert_abs_diff_eq!(
                curvature_conformal(&linear, 0.0, p, 1e-3, sign).unwrap(),
                0.0,
                epsilon = 1e-9
            );
        }
        let flat = total(|_| 0.0);
        assert_eq!(
            curvature_conformal(&flat, 0.7, p, 1e-3, ExponentSign::Classical).unwrap(),
            0.7
        );
    }

    #[test]
    fn round_sphere_has_unit_curvature() {
        let sphere = total(|p| -(1.0 + (p.x * p.x + p.y * p.y) / 4.0).ln());
        for p in [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(-2.0, 1.5),
        ] {
            let k = curvature_conformal(&sphere, 0.0, p, 1e-3, ExponentSign::Classical).unwrap();
            assert_abs_diff_eq!(k, 1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn laplace_beltrami_examples() {
        let p = Point::new(0.0, 0.0);
        let radial = total(|p| p.x * p.x + p.y * p.y);
        let lb = laplace_beltrami_conformal(&radial, &total(|p| p.x), p, 1e-3).unwrap();
        assert_abs_diff_eq!(lb, 4.0, epsilon = 1e-6);
        let q = Point::new(0.4, 0.1);
        let flat = total(|_| 0.0);
        assert_eq!(
            laplace_beltrami_conformal(&radial, &flat, q, 1e-3).unwrap(),
            laplacian(&radial, q, 1e-3).unwrap()
        );
        let harmonic = total(|p| p.x);
        let wild = total(|p| (3.0 * p.y).sin() + p.x * p.x);
        assert_abs_diff_eq!(
            laplace_beltrami_conformal(&harmonic, &wild, q, 1e-3).unwrap(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn stencil_violation_is_reported() {
        let half_plane = |p: Point| {
            if p.x >= 0.0 {
                Ok(p.x)
            } else {
                Err(FieldError::OutsideDomain(p))
            }
        };
        let err = laplacian(&half_plane, Point::new(0.0, 1.0), 0.1).unwrap_err();
        assert!(matches!(err, GeometryError::StencilOutsideDomain { .. }));
        let failing = |_: Point| Err::<f64, _>(FieldError::Evaluation("boom".into()));
        assert!(matches!(
            gradient(&failing, Point::default(), 0.1),
            Err(GeometryError::Field(_))
        ));
    }
}
