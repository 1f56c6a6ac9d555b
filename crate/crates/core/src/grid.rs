//! Sample grids and per-point sweeps.
//!
//! With the `parallel` feature (on by default) sweeps fan out over rayon;
//! without it they run on the calling thread. Output order is row-major in
//! both cases, so results are identical either way.

use serde::{Deserialize, Serialize};

use crate::expr::ComplexValue;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn to_complex(self) -> ComplexValue {
        ComplexValue::new(self.x, self.y)
    }

    pub fn from_complex(z: ComplexValue) -> Self {
        Self { x: z.re, y: z.im }
    }

    pub fn offset(self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }
}

/// Uniform grid with spacing `step`, `nx` columns and `ny` rows.
///
/// Samples are stored row-major: index `j * nx + i` holds the point
/// `(origin.x + i * step, origin.y + j * step)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub origin: Point,
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(origin: Point, step: f64, nx: usize, ny: usize) -> Self {
        assert!(step > 0.0, "grid step must be positive");
        assert!(nx >= 3 && ny >= 3, "grid needs at least 3x3 samples");
        Self {
            origin,
            step,
            nx,
            ny,
        }
    }

    /// Grid centred on `center` whose longer side measures `span`.
    pub fn centered(center: Point, span: f64, nx: usize, ny: usize) -> Self {
        let step = span / (nx.max(ny) - 1) as f64;
        let origin = center.offset(-0.5 * step * (nx - 1) as f64, -0.5 * step * (ny - 1) as f64);
        Self::new(origin, step, nx, ny)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> Point {
        let (j, i) = (index / self.nx, index % self.nx);
        self.origin
            .offset(i as f64 * self.step, j as f64 * self.step)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |k| self.point(k))
    }

    pub fn center(&self) -> Point {
        self.origin.offset(
            0.5 * self.step * (self.nx - 1) as f64,
            0.5 * self.step * (self.ny - 1) as f64,
        )
    }

    /// Largest distance from the grid centre to any sample.
    pub fn half_diagonal(&self) -> f64 {
        let w = self.step * (self.nx - 1) as f64;
        let h = self.step * (self.ny - 1) as f64;
        0.5 * w.hypot(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[cfg_attr(not(feature = "parallel"), default)]
    Serial,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Evaluates `f` at every grid point, returning values in row-major order.
/// The first error in row-major order wins.
pub fn try_map_grid<T, E, F>(grid: &Grid2D, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(Point) -> Result<T, E> + Sync,
{
    try_map_grid_with(Strategy::default(), grid, f)
}

pub fn try_map_grid_with<T, E, F>(strategy: Strategy, grid: &Grid2D, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(Point) -> Result<T, E> + Sync,
{
    match strategy {
        Strategy::Serial => grid.points().map(f).collect(),
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            // Collect everything first so the reported error does not depend on scheduling.
            let results: Vec<Result<T, E>> = (0..grid.len())
                .into_par_iter()
                .map(|k| f(grid.point(k)))
                .collect();
            results.into_iter().collect()
        }
    }
}

/// Max of `values`, propagating NaN. Empty input gives 0.
pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, v| {
        if acc.is_nan() || v.is_nan() {
            f64::NAN
        } else {
            acc.max(v.abs())
        }
    })
}
