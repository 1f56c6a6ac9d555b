use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "confiso",
    version,
    about = "Construct and verify explicit isometries of flat conformal metrics e^{2 Re f} g0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build g = log(∫e^f + C) and emit Φ, Ψ, W and φ = Re f over a grid.
    Construct(ConstructArgs),
    /// Build the isometry and run every residual check; exit 5 if any fails.
    Verify(VerifyArgs),
    /// Curvature of e^{2φ} g0 over a grid.
    Curvature(CurvatureArgs),
    /// Arclength embedding of a product metric e^{2a(x)}dx² + e^{2b(y)}dy².
    Embed(EmbedArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridShape {
    pub nx: usize,
    pub ny: usize,
}

pub fn parse_grid(s: &str) -> Result<GridShape, String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NXxNY, got `{s}`"))?;
    let nx: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad column count `{a}`"))?;
    let ny: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad row count `{b}`"))?;
    if nx < 3 || ny < 3 {
        return Err(format!("grid must be at least 3x3, got {nx}x{ny}"));
    }
    Ok(GridShape { nx, ny })
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated numbers, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if a.is_nan() || b.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok((a, b))
}

pub fn parse_finite_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = parse_pair(s)?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(format!("`{s}` must be finite"));
    }
    Ok((a, b))
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = parse_pair(s)?;
    if lo >= hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("expected a positive number, got `{s}`"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file (json) or directory (csv). Defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    /// Analytic function of z, e.g. "z^2/4" or "sin(z)/2".
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: String,
    /// Basepoint z0 as RE,IM.
    #[arg(long, value_parser = parse_finite_pair, default_value = "0,0", allow_hyphen_values = true)]
    pub z0: (f64, f64),
    /// Radius of the disc searched for an admissible domain.
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub radius: f64,
    #[arg(long, value_parser = parse_grid, default_value = "21x21")]
    pub grid: GridShape,
    /// Side of the sample grid; shrunk to fit the validated disc.
    #[arg(long, value_parser = parse_positive)]
    pub span: Option<f64>,
    #[arg(long = "tol-rel", value_parser = parse_positive, default_value = "1e-12")]
    pub tol_rel: f64,
    #[arg(long = "tol-abs", value_parser = parse_positive, default_value = "1e-14")]
    pub tol_abs: f64,
    #[arg(long = "max-subdivisions", default_value_t = 1 << 16)]
    pub max_subdivisions: usize,
    #[arg(long = "boundary-samples", default_value_t = 64)]
    pub boundary_samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub construct: ConstructArgs,
    #[arg(long = "tol-identity", value_parser = parse_positive, default_value = "1e-8")]
    pub tol_identity: f64,
    #[arg(long = "tol-dual", value_parser = parse_positive, default_value = "1e-10")]
    pub tol_dual: f64,
    #[arg(long = "tol-cr", value_parser = parse_positive, default_value = "1e-6")]
    pub tol_cr: f64,
    #[arg(long = "tol-pullback", value_parser = parse_positive, default_value = "1e-5")]
    pub tol_pullback: f64,
    #[arg(long = "tol-harmonic", value_parser = parse_positive, default_value = "1e-5")]
    pub tol_harmonic: f64,
    #[arg(long = "tol-curvature", value_parser = parse_positive, default_value = "1e-5")]
    pub tol_curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurvaturePreset {
    /// φ = -log(1 + |z|²/4), the unit sphere in stereographic coordinates.
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    /// e^{-2φ}(-Δφ + K0)
    Classical,
    /// e^{+2φ}(-Δφ + K0)
    Positive,
}

#[derive(Debug, Clone, Args)]
pub struct CurvatureArgs {
    /// φ = Re f for this analytic f.
    #[arg(
        long = "f",
        allow_hyphen_values = true,
        conflicts_with = "preset",
        required_unless_present = "preset"
    )]
    pub f: Option<String>,
    #[arg(long, value_enum)]
    pub preset: Option<CurvaturePreset>,
    /// Grid centre as RE,IM.
    #[arg(long, value_parser = parse_finite_pair, default_value = "0,0", allow_hyphen_values = true)]
    pub z0: (f64, f64),
    /// Length scale; the finite-difference step is 1e-4 times this.
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub radius: f64,
    #[arg(long, value_parser = parse_grid, default_value = "21x21")]
    pub grid: GridShape,
    #[arg(long, value_parser = parse_positive, default_value = "1")]
    pub span: f64,
    /// Curvature of the background metric.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub k0: f64,
    #[arg(long, value_enum, default_value = "classical")]
    pub sign: SignArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedPreset {
    /// a(t) = b(t) = -t²
    Gaussian,
    /// a = b = 0
    Zero,
    /// a(t) = b(t) = -t
    ExpDecay,
}

#[derive(Debug, Clone, Args)]
pub struct EmbedArgs {
    #[arg(long, value_enum)]
    pub preset: EmbedPreset,
    /// x range as LO,HI; `inf` and `-inf` allowed.
    #[arg(long = "x-range", value_parser = parse_range, default_value = "-inf,inf", allow_hyphen_values = true)]
    pub x_range: (f64, f64),
    #[arg(long = "y-range", value_parser = parse_range, default_value = "-inf,inf", allow_hyphen_values = true)]
    pub y_range: (f64, f64),
    #[arg(long, value_parser = parse_grid, default_value = "21x21")]
    pub grid: GridShape,
    #[arg(long, value_parser = parse_positive, default_value = "2")]
    pub span: f64,
    #[arg(long = "tol-rel", value_parser = parse_positive, default_value = "1e-12")]
    pub tol_rel: f64,
    #[arg(long = "tol-abs", value_parser = parse_positive, default_value = "1e-14")]
    pub tol_abs: f64,
    #[arg(long = "max-subdivisions", default_value_t = 1 << 16)]
    pub max_subdivisions: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
