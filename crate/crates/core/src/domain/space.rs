//! Search spaces: finite cell sets and uniform rectangular grids.
//!
//! Grid cells are half-open boxes enumerated in row-major order (x fastest),
//! so every per-cell array in the crate shares one deterministic layout.

use crate::error::{Error, Result};

/// One- or two-dimensional uniform grid over a closed box.
///
/// The upper bound is snapped to a whole number of cells so cell volumes sum
/// exactly to the covered box volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    lower: [f64; 2],
    resolution: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    /// One-dimensional grid on `[lower, upper]` with cell width `resolution`.
    pub fn new_1d(lower: f64, upper: f64, resolution: f64) -> Result<Self> {
        Self::build(1, [lower, 0.0], [upper, 0.0], resolution)
    }

    /// Two-dimensional grid on the box `lower × upper` with square cells.
    pub fn new_2d(lower: [f64; 2], upper: [f64; 2], resolution: f64) -> Result<Self> {
        Self::build(2, lower, upper, resolution)
    }

    /// Square grid centred on `center` with an odd cell count per axis, so
    /// `center` is exactly the centre of the middle cell. Covers at least
    /// `halfwidth` on each side.
    pub fn centered_square(center: [f64; 2], halfwidth: f64, resolution: f64) -> Result<Self> {
        if !(halfwidth > 0.0) || !(resolution > 0.0) {
            return Err(Error::InvalidArgument(
                "grid halfwidth and resolution must be positive".into(),
            ));
        }
        let half_cells = (halfwidth / resolution).round().max(1.0) as usize;
        let reach = (half_cells as f64 + 0.5) * resolution;
        Self::build(
            2,
            [center[0] - reach, center[1] - reach],
            [center[0] + reach, center[1] + reach],
            resolution,
        )
    }

    fn build(dim: usize, lower: [f64; 2], upper: [f64; 2], resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be positive and finite, got {resolution}"
            )));
        }
        let mut counts = [1usize; 2];
        for axis in 0..dim {
            let span = upper[axis] - lower[axis];
            if !(span > 0.0) || !span.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "grid bounds must satisfy lower < upper on axis {axis}"
                )));
            }
            counts[axis] = (span / resolution).round().max(1.0) as usize;
        }
        Ok(Self {
            dim,
            lower,
            resolution,
            nx: counts[0],
            ny: if dim == 2 { counts[1] } else { 1 },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    /// Upper bound after snapping to whole cells.
    pub fn upper(&self) -> [f64; 2] {
        [
            self.lower[0] + self.nx as f64 * self.resolution,
            self.lower[1] + self.ny as f64 * self.resolution,
        ]
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cells_per_axis(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Volume (length in 1-D, area in 2-D) of one cell.
    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.resolution
        } else {
            self.resolution * self.resolution
        }
    }

    /// Centre coordinates of cell `index` (second coordinate is 0 in 1-D).
    pub fn center(&self, index: usize) -> [f64; 2] {
        debug_assert!(index < self.cells());
        let ix = index % self.nx;
        let iy = index / self.nx;
        [
            self.lower[0] + (ix as f64 + 0.5) * self.resolution,
            if self.dim == 2 {
                self.lower[1] + (iy as f64 + 0.5) * self.resolution
            } else {
                0.0
            },
        ]
    }

    /// Index of the half-open cell containing `point`, if inside the grid.
    pub fn locate(&self, point: [f64; 2]) -> Option<usize> {
        let ix = self.axis_index(point[0], 0)?;
        let iy = if self.dim == 2 {
            self.axis_index(point[1], 1)?
        } else {
            0
        };
        Some(iy * self.nx + ix)
    }

    fn axis_index(&self, coord: f64, axis: usize) -> Option<usize> {
        let n = if axis == 0 { self.nx } else { self.ny };
        let offset = (coord - self.lower[axis]) / self.resolution;
        if offset < 0.0 {
            return None;
        }
        let idx = offset.floor() as usize;
        if idx < n {
            Some(idx)
        } else if idx == n && offset <= n as f64 {
            // Points exactly on the upper boundary belong to the last cell.
            Some(n - 1)
        } else {
            None
        }
    }
}

/// A search space: either a finite set of cells or a uniform grid whose
/// cells serve as quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchSpace {
    /// Finite cell set indexed `0..cells`.
    Discrete { cells: usize },
    /// Uniform rectangular grid; per-cell quantities are densities.
    Grid(Grid),
}

impl SearchSpace {
    pub fn discrete(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidArgument(
                "a discrete space needs at least one cell".into(),
            ));
        }
        Ok(Self::Discrete { cells })
    }

    pub fn cells(&self) -> usize {
        match self {
            Self::Discrete { cells } => *cells,
            Self::Grid(g) => g.cells(),
        }
    }

    /// Quadrature weight of one cell: 1 for discrete spaces (masses are
    /// stored directly), the cell volume for grids (densities are stored).
    pub fn cell_weight(&self) -> f64 {
        match self {
            Self::Discrete { .. } => 1.0,
            Self::Grid(g) => g.cell_volume(),
        }
    }

    /// Centre of a cell; discrete cells report their index on the first axis.
    pub fn center(&self, index: usize) -> [f64; 2] {
        match self {
            Self::Discrete { .. } => [index as f64, 0.0],
            Self::Grid(g) => g.center(index),
        }
    }

    pub fn as_grid(&self) -> Option<&Grid> {
        match self {
            Self::Grid(g) => Some(g),
            Self::Discrete { .. } => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::Discrete { .. })
    }
}
