use conformal_isometry::expr::ParseError;
use conformal_isometry::geometry::FieldError;
use conformal_isometry::grid::try_map_grid;
use conformal_isometry::subset::SideLength;
use conformal_isometry::{
    build_isometry, curvature_conformal, embed_product, image_side_lengths, parse, verify_all,
    ComplexValue, ConstructionConfig, ConstructionError, ConstructionResult, ExponentSign, Grid2D,
    Interval, Point, ProductMetricSpec, QuadratureConfig, Steps, Tolerances,
};
use serde_json::{json, Value};

use crate::args::{
    ConstructArgs, CurvatureArgs, CurvaturePreset, EmbedArgs, EmbedPreset, GridShape, SignArg,
    VerifyArgs,
};
use crate::output::{Document, Table};

#[derive(Debug)]
pub enum CliError {
    Parse(ParseError),
    Usage(String),
    Domain(ConstructionError),
    Io(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
            CliError::Failure(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message, offset) = match self {
            CliError::Parse(e) => ("parse", e.to_string(), Some(e.offset())),
            CliError::Usage(m) => ("usage", m.clone(), None),
            CliError::Domain(e) => ("domain", e.to_string(), None),
            CliError::Io(m) => ("io", m.clone(), None),
            CliError::Failure(m) => ("evaluation", m.clone(), None),
        };
        let mut err = json!({ "kind": kind, "message": message, "exit_code": self.exit_code() });
        if let Some(offset) = offset {
            err["offset"] = json!(offset);
        }
        json!({ "error": err })
    }
}

fn failure(err: impl ToString) -> CliError {
    CliError::Failure(err.to_string())
}

/// A finished run: the document to emit, diagnostics, and whether any check failed.
#[derive(Debug)]
pub struct Outcome {
    pub document: Document,
    pub warnings: Vec<String>,
    pub checks_failed: bool,
}

fn config(args: &ConstructArgs) -> ConstructionConfig {
    ConstructionConfig {
        basepoint: ComplexValue::new(args.z0.0, args.z0.1),
        initial_radius: args.radius,
        quadrature: QuadratureConfig {
            rel_tol: args.tol_rel,
            abs_tol: args.tol_abs,
            max_subdivisions: args.max_subdivisions,
        },
        boundary_samples: args.boundary_samples,
    }
}

fn construct_pipeline(args: &ConstructArgs) -> Result<ConstructionResult, CliError> {
    let f = parse(&args.f).map_err(CliError::Parse)?;
    let cfg = config(args);
    build_isometry(&f, &cfg).map_err(|e| match e {
        ConstructionError::InvalidConfig(_) => CliError::Usage(e.to_string()),
        ConstructionError::NoAdmissibleRadius { .. } => CliError::Domain(e),
        other => failure(other),
    })
}

/// The requested grid, shrunk when it does not fit in the validated disc.
fn fit_grid(
    res: &ConstructionResult,
    shape: GridShape,
    span: Option<f64>,
    margin: f64,
    warnings: &mut Vec<String>,
) -> Result<Grid2D, CliError> {
    let largest = res
        .domain_grid(shape.nx, shape.ny, margin)
        .ok_or(CliError::Domain(ConstructionError::NoAdmissibleRadius {
            floor: margin,
        }))?;
    let max_span = largest.step * (shape.nx.max(shape.ny) - 1) as f64;
    match span {
        Some(s) if s > max_span => {
            warnings.push(format!(
                "span {s} does not fit in the validated disc of radius {}; using {max_span}",
                res.domain().radius
            ));
            Ok(largest)
        }
        Some(s) => Ok(Grid2D::centered(largest.center(), s, shape.nx, shape.ny)),
        None => Ok(largest),
    }
}

fn meta(res: &ConstructionResult, args: &ConstructArgs, extra: Value) -> Value {
    let c = res.constant();
    let mut m = json!({
        "command": Value::Null,
        "expression": res.f().to_string(),
        "input": args.f,
        "basepoint": [args.z0.0, args.z0.1],
        "C": [c.re, c.im],
        "radius": res.domain().radius,
        "initial_radius": args.radius,
        "quadrature": res.quadrature(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    if let (Value::Object(m), Value::Object(extra)) = (&mut m, extra) {
        m.extend(extra);
    }
    m
}

pub fn construct(args: &ConstructArgs) -> Result<Outcome, CliError> {
    let res = construct_pipeline(args)?;
    let mut warnings = Vec::new();
    let grid = fit_grid(&res, args.grid, args.span, 0.0, &mut warnings)?;
    let phi = try_map_grid(&grid, |p| res.phi(p)).map_err(failure)?;
    let psi = try_map_grid(&grid, |p| res.psi(p)).map_err(failure)?;
    let w = try_map_grid(&grid, |p| res.w(p).map(|q| [q.x, q.y])).map_err(failure)?;
    let varphi = try_map_grid(&grid, |p| res.conformal_exponent(p)).map_err(failure)?;
    let document = Document {
        meta: meta(&res, args, json!({ "command": "construct" })),
        tables: vec![
            ("Phi".into(), Table::single(grid, "Phi", phi)),
            ("Psi".into(), Table::single(grid, "Psi", psi)),
            ("W".into(), Table::pair(grid, ["W1", "W2"], ["w1", "w2"], w)),
            ("phi".into(), Table::single(grid, "phi", varphi)),
        ],
        reports: vec![],
    };
    Ok(Outcome {
        document,
        warnings,
        checks_failed: false,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let res = construct_pipeline(&args.construct)?;
    let mut warnings = Vec::new();
    let steps = Steps::for_radius(res.domain().radius);
    let grid = fit_grid(
        &res,
        args.construct.grid,
        args.construct.span,
        steps.stencil_margin(),
        &mut warnings,
    )?;
    let tol = Tolerances {
        gradient_identity: args.tol_identity,
        dual_route: args.tol_dual,
        cr_residual: args.tol_cr,
        pullback: args.tol_pullback,
        harmonicity: args.tol_harmonic,
        curvature_flat: args.tol_curvature,
    };
    let reports = verify_all(&res, &grid, &tol, &steps).map_err(failure)?;
    let checks_failed = reports.iter().any(|r| !r.pass);
    let extra =
        json!({ "command": "verify", "tolerances": tol, "steps": [steps.first, steps.second] });
    Ok(Outcome {
        document: Document {
            meta: meta(&res, &args.construct, extra),
            tables: vec![],
            reports,
        },
        warnings,
        checks_failed,
    })
}

/// `-log(1 + |z|²/4)`
fn sphere(p: Point) -> f64 {
    -(1.0 + (p.x * p.x + p.y * p.y) / 4.0).ln()
}

pub fn curvature(args: &CurvatureArgs) -> Result<Outcome, CliError> {
    let f = match &args.f {
        Some(src) => Some(parse(src).map_err(CliError::Parse)?),
        None => None,
    };
    let field = |p: Point| -> Result<f64, FieldError> {
        match &f {
            Some(f) => f
                .real_part_field(p.x, p.y)
                .map_err(|e| FieldError::Evaluation(e.to_string())),
            None => Ok(sphere(p)),
        }
    };
    let sign = match args.sign {
        SignArg::Classical => ExponentSign::Classical,
        SignArg::Positive => ExponentSign::Positive,
    };
    let h = 1e-4 * args.radius;
    let grid = Grid2D::centered(
        Point::new(args.z0.0, args.z0.1),
        args.span,
        args.grid.nx,
        args.grid.ny,
    );
    let phi = try_map_grid(&grid, field).map_err(failure)?;
    let k = try_map_grid(&grid, |p| curvature_conformal(&field, args.k0, p, h, sign))
        .map_err(failure)?;
    let source = match (&f, args.preset) {
        (Some(f), _) => json!({ "expression": f.to_string(), "input": args.f }),
        (None, Some(CurvaturePreset::Sphere)) => json!({ "preset": "sphere" }),
        (None, None) => unreachable!("clap requires --f or --preset"),
    };
    let mut meta = json!({
        "command": "curvature",
        "center": [args.z0.0, args.z0.1],
        "k0": args.k0,
        "sign": sign.value(),
        "step": h,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if let (Value::Object(m), Value::Object(s)) = (&mut meta, source) {
        m.extend(s);
    }
    Ok(Outcome {
        document: Document {
            meta,
            tables: vec![
                ("phi".into(), Table::single(grid, "phi", phi)),
                ("K".into(), Table::single(grid, "K", k)),
            ],
            reports: vec![],
        },
        warnings: vec![],
        checks_failed: false,
    })
}

fn preset_spec(preset: EmbedPreset, x: Interval, y: Interval) -> ProductMetricSpec {
    match preset {
        EmbedPreset::Gaussian => ProductMetricSpec::new(|t| -t * t, |t| -t * t, x, y),
        EmbedPreset::Zero => ProductMetricSpec::flat(x, y),
        EmbedPreset::ExpDecay => ProductMetricSpec::new(|t| -t, |t| -t, x, y),
    }
}

/// Centre and usable width of one grid axis inside `range`.
fn axis_window(range: Interval, span: f64) -> (f64, f64) {
    match (range.lo.is_finite(), range.hi.is_finite()) {
        (true, true) => (0.5 * (range.lo + range.hi), span.min(range.hi - range.lo)),
        (true, false) => (range.lo + 0.5 * span, span),
        (false, true) => (range.hi - 0.5 * span, span),
        (false, false) => (0.0, span),
    }
}

fn side_json(side: SideLength) -> Value {
    match side {
        SideLength::Finite(v) => json!(v),
        SideLength::Unbounded => json!("unbounded"),
    }
}

pub fn embed(args: &EmbedArgs) -> Result<Outcome, CliError> {
    let x = Interval::new(args.x_range.0, args.x_range.1);
    let y = Interval::new(args.y_range.0, args.y_range.1);
    let spec = preset_spec(args.preset, x, y);
    let cfg = QuadratureConfig {
        rel_tol: args.tol_rel,
        abs_tol: args.tol_abs,
        max_subdivisions: args.max_subdivisions,
    };
    let (sx, sy) = image_side_lengths(&spec, &cfg);
    let mut warnings = Vec::new();
    let (cx, wx) = axis_window(x, args.span);
    let (cy, wy) = axis_window(y, args.span);
    let span = wx.min(wy);
    if span < args.span {
        warnings.push(format!(
            "span {} exceeds the coordinate ranges; using {span}",
            args.span
        ));
    }
    let grid = Grid2D::centered(Point::new(cx, cy), span, args.grid.nx, args.grid.ny);
    let uv = try_map_grid(&grid, |p| {
        // clamp rounding spill at the range ends
        let q = Point::new(p.x.clamp(x.lo, x.hi), p.y.clamp(y.lo, y.hi));
        embed_product(&spec, q, &cfg).map(|e| [e.x, e.y])
    })
    .map_err(failure)?;
    let preset = match args.preset {
        EmbedPreset::Gaussian => "gaussian",
        EmbedPreset::Zero => "zero",
        EmbedPreset::ExpDecay => "exp-decay",
    };
    let meta = json!({
        "command": "embed",
        "preset": preset,
        "x_range": [range_json(x.lo), range_json(x.hi)],
        "y_range": [range_json(y.lo), range_json(y.hi)],
        "sides": [side_json(sx), side_json(sy)],
        "quadrature": cfg,
        "version": env!("CARGO_PKG_VERSION"),
    });
    Ok(Outcome {
        document: Document {
            meta,
            tables: vec![(
                "embedding".into(),
                Table::pair(grid, ["U", "V"], ["u", "v"], uv),
            )],
            reports: vec![],
        },
        warnings,
        checks_failed: false,
    })
}

fn range_json(t: f64) -> Value {
    if t.is_finite() {
        json!(t)
    } else if t > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}
