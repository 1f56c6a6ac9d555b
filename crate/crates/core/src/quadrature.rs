//! Adaptive Gauss–Kronrod quadrature and contour integrals of `e^{f}`.
//!
//! The contour integrals `h(z) = ∫_{z0}^{z} e^{f(ξ)} dξ` are taken along
//! straight segments. Each segment is mapped to `t ∈ [0, 1]` and integrated
//! with a 7/15-point Gauss–Kronrod pair under recursive bisection.
//! Subintervals are processed left before right and accepted values are
//! summed in that order, so a call is deterministic for a fixed config.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ComplexValue, EvalError, ExprTree};

// Kronrod abscissae on [-1, 1]; odd indices (and the centre) are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_subdivisions: 1 << 16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(QuadratureError::InvalidConfig(*self));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(
        "tolerance not reached after {subdivisions} subdivisions: \
         best estimate {estimate}, error bound {error_bound:e}"
    )]
    ToleranceNotReached {
        estimate: Complex64,
        error_bound: f64,
        subdivisions: usize,
    },
    #[error("integrand evaluation failed: {0}")]
    Evaluation(#[from] EvalError),
    #[error("invalid quadrature configuration {0:?}")]
    InvalidConfig(QuadratureConfig),
}

/// A converged integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

/// Simply connected, star-shaped domain `{z : |z - center| <= radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: ComplexValue,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: ComplexValue, radius: f64) -> Self {
        assert!(radius > 0.0, "disc radius must be positive, got {radius}");
        Self { center, radius }
    }

    pub fn contains(&self, z: ComplexValue) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// The disc with radius reduced by `margin`, if anything remains.
    pub fn shrunk(&self, margin: f64) -> Option<Disc> {
        let radius = self.radius - margin;
        (radius > 0.0).then_some(Disc {
            center: self.center,
            radius,
        })
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod_panel<F, E>(integrand: &F, a: f64, b: f64) -> Result<Panel, E>
where
    F: Fn(f64) -> Result<Complex64, E>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = integrand(center)?;
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = WGK[7] * f_center.norm();
    let mut samples = [(Complex64::default(), Complex64::default()); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let lo = integrand(center - dx)?;
        let hi = integrand(center + dx)?;
        kronrod += (lo + hi) * WGK[j];
        if j % 2 == 1 {
            gauss += (lo + hi) * WG[j / 2];
        }
        res_abs += WGK[j] * (lo.norm() + hi.norm());
        *sample = (lo, hi);
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for (j, (lo, hi)) in samples.iter().enumerate() {
        res_asc += WGK[j] * ((lo - mean).norm() + (hi - mean).norm());
    }
    let width = half.abs();
    let err = ((kronrod - gauss) * half).norm();
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: rescale_error(err, res_abs * width, res_asc * width),
    })
}

/// Integrates a complex-valued function of a real variable over `[a, b]`.
///
/// Accepts a subinterval once its error estimate is within its share
/// (proportional to width) of `max(abs_tol, rel_tol * |I|)`, where `|I|` is
/// the single-panel estimate of the whole interval.
pub fn integrate_interval<F, E>(
    integrand: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> Result<Complex64, E>,
    QuadratureError: From<E>,
{
    cfg.validate()?;
    if a == b {
        return Ok(Integral {
            value: Complex64::default(),
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let whole = kronrod_panel(&integrand, a, b)?;
    let target = cfg.abs_tol.max(cfg.rel_tol * whole.value.norm());
    let total_width = (b - a).abs();

    let mut stack = vec![whole];
    let mut value = Complex64::default();
    let mut error = 0.0;
    let mut subdivisions = 0;
    while let Some(panel) = stack.pop() {
        let width = (panel.b - panel.a).abs();
        let share = target * width / total_width;
        if panel.error <= share {
            value += panel.value;
            error += panel.error;
            continue;
        }
        let mid = 0.5 * (panel.a + panel.b);
        let unsplittable = mid == panel.a || mid == panel.b;
        if unsplittable || subdivisions >= cfg.max_subdivisions {
            let pending: Complex64 = stack.iter().map(|p| p.value).sum::<Complex64>() + panel.value;
            let pending_err: f64 = stack.iter().map(|p| p.error).sum::<f64>() + panel.error;
            return Err(QuadratureError::ToleranceNotReached {
                estimate: value + pending,
                error_bound: error + pending_err,
                subdivisions,
            });
        }
        subdivisions += 1;
        let left = kronrod_panel(&integrand, panel.a, mid)?;
        let right = kronrod_panel(&integrand, mid, panel.b)?;
        stack.push(right);
        stack.push(left);
    }
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(QuadratureError::ToleranceNotReached {
            estimate: value,
            error_bound: f64::INFINITY,
            subdivisions,
        });
    }
    Ok(Integral {
        value,
        error_estimate: error,
        subdivisions,
    })
}

/// Same as [`integrate_exp_f`] but also returns the error estimate.
pub fn integrate_exp_f_detailed(
    f: &ExprTree,
    from: ComplexValue,
    to: ComplexValue,
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadratureError> {
    let direction = to - from;
    integrate_interval(
        |t: f64| -> Result<Complex64, EvalError> {
            Ok(f.evaluate(from + direction * t)?.exp() * direction)
        },
        0.0,
        1.0,
        cfg,
    )
}

/// `∫ e^{f(ξ)} dξ` along the straight segment from `from` to `to`,
/// parameterised as `ξ(t) = from + t (to - from)`.
pub fn integrate_exp_f(
    f: &ExprTree,
    from: ComplexValue,
    to: ComplexValue,
    cfg: &QuadratureConfig,
) -> Result<ComplexValue, QuadratureError> {
    integrate_exp_f_detailed(f, from, to, cfg).map(|i| i.value)
}

/// Sum of segment integrals along `vertices` in order. Fewer than two
/// vertices give zero.
pub fn integrate_along_polyline(
    f: &ExprTree,
    vertices: &[ComplexValue],
    cfg: &QuadratureConfig,
) -> Result<ComplexValue, QuadratureError> {
    cfg.validate()?;
    vertices
        .windows(2)
        .try_fold(ComplexValue::default(), |acc, seg| {
            Ok(acc + integrate_exp_f(f, seg[0], seg[1], cfg)?)
        })
}

/// Composite 7-point Gauss–Legendre rule with `panels` equal panels along
/// the segment. Used to measure the convergence order of the base rule.
pub fn fixed_gauss_exp_f(
    f: &ExprTree,
    from: ComplexValue,
    to: ComplexValue,
    panels: usize,
) -> Result<ComplexValue, EvalError> {
    assert!(panels > 0);
    let direction = to - from;
    let width = 1.0 / panels as f64;
    let mut sum = ComplexValue::default();
    for k in 0..panels {
        let center = (k as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut panel = f.evaluate(from + direction * center)?.exp() * WG[3];
        for j in [1usize, 3, 5] {
            let dx = half * XGK[j];
            let lo = f.evaluate(from + direction * (center - dx))?.exp();
            let hi = f.evaluate(from + direction * (center + dx))?.exp();
            panel += (lo + hi) * WG[j / 2];
        }
        sum += panel * half;
    }
    Ok(sum * direction)
}
