//! Effort allocations: how a fixed budget is spread over the space at one
//! instant.

use crate::domain::space::SearchSpace;
use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;

/// Nonnegative effort per cell at a single time.
///
/// Values are plain efforts on discrete spaces and effort *densities* on
/// grids; `total` is the corresponding quadrature cost, recomputed at
/// construction so it always matches the stored values.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    values: Vec<f64>,
    total: f64,
    cell_weight: f64,
}

impl Allocation {
    pub fn new(space: &SearchSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.cells() {
            return Err(Error::InvalidAllocation(format!(
                "allocation has {} entries but the space has {} cells",
                values.len(),
                space.cells()
            )));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidAllocation(
                "allocation entries must be finite and >= 0".into(),
            ));
        }
        let cell_weight = space.cell_weight();
        let total = neumaier_sum(values.iter().map(|v| v * cell_weight));
        Ok(Self {
            values,
            total,
            cell_weight,
        })
    }

    pub fn zero(space: &SearchSpace) -> Self {
        Self {
            values: vec![0.0; space.cells()],
            total: 0.0,
            cell_weight: space.cell_weight(),
        }
    }

    /// Effort (discrete) or effort density (grid) at a cell.
    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Total cost: Σ value (discrete) or Σ value · cell volume (grid).
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn cell_weight(&self) -> f64 {
        self.cell_weight
    }

    /// Convex combination Σ wᵢ·aᵢ of allocations over one space.
    pub fn combine(parts: &[(&Allocation, f64)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidAllocation("empty combination".into()))?;
        let n = first.0.values.len();
        let cell_weight = first.0.cell_weight;
        for (a, w) in parts {
            if a.values.len() != n || a.cell_weight != cell_weight {
                return Err(Error::SpaceMismatch(
                    "combined allocations must share one space".into(),
                ));
            }
            if !(*w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidAllocation(
                    "combination weights must be finite and >= 0".into(),
                ));
            }
        }
        let mut values = vec![0.0f64; n];
        for (a, w) in parts {
            for (dst, v) in values.iter_mut().zip(&a.values) {
                *dst += w * v;
            }
        }
        let total = neumaier_sum(values.iter().map(|v| v * cell_weight));
        Ok(Self {
            values,
            total,
            cell_weight,
        })
    }
}
