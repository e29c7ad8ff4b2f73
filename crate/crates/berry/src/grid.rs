//! Axis-aligned evaluation lattices and sampled fields on them.

use crate::{BerryError, Result};

/// Uniform axis-aligned lattice of `nx * ny` nodes with square spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub origin: [f64; 2],
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(origin: [f64; 2], step: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(BerryError::invalid(format!("grid step must be > 0, got {step}")));
        }
        if nx == 0 || ny == 0 {
            return Err(BerryError::invalid("empty grid"));
        }
        if !origin[0].is_finite() || !origin[1].is_finite() {
            return Err(BerryError::invalid("non-finite grid origin"));
        }
        Ok(Grid { origin, step, nx, ny })
    }

    /// Node grid covering `[min, max]` with spacing at most `max_step`,
    /// endpoints included exactly.
    pub fn covering(min: [f64; 2], max: [f64; 2], max_step: f64) -> Result<Self> {
        if !(max[0] > min[0]) || !(max[1] > min[1]) {
            return Err(BerryError::invalid("degenerate grid extent"));
        }
        let w = max[0] - min[0];
        let h = max[1] - min[1];
        let nx_cells = (w / max_step).ceil().max(1.0) as usize;
        let ny_cells = (h / max_step).ceil().max(1.0) as usize;
        let step = (w / nx_cells as f64).max(h / ny_cells as f64);
        Grid::new(min, step, nx_cells + 1, ny_cells + 1)
    }

    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + ix as f64 * self.step,
            self.origin[1] + iy as f64 * self.step,
        ]
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max(&self) -> [f64; 2] {
        self.point(self.nx - 1, self.ny - 1)
    }

    /// Whether the grid's bounding box contains `[min, max]` (with slack for
    /// rounding).
    pub fn covers(&self, min: [f64; 2], max: [f64; 2]) -> bool {
        let eps = 1e-9 * self.step;
        let gmax = self.max();
        self.origin[0] <= min[0] + eps
            && self.origin[1] <= min[1] + eps
            && gmax[0] >= max[0] - eps
            && gmax[1] >= max[1] - eps
    }
}

/// Field values (and optionally exact gradients) sampled on a grid.
#[derive(Clone, Debug)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Gradient components, same layout as `values`.
    pub grad: Option<(Vec<f64>, Vec<f64>)>,
    /// Energy of the sampled wave when known; lets consumers assert the
    /// spacing-vs-wavelength contract.
    pub energy: Option<f64>,
}

impl GridField {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(ix, iy)]
    }
}
