//! Target-location priors and their discretization onto a search space.

use std::f64::consts::PI;

use crate::domain::space::SearchSpace;
use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;
use crate::tolerance::Tolerances;

/// Parametric description of a target-location distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// Probability masses over the cells of a discrete space.
    DiscretePmf(Vec<f64>),
    /// Circular Gaussian centred at the origin with standard deviation
    /// `sigma` per axis.
    Gaussian2D { sigma: f64 },
    /// Uniform density on the disc of radius `radius` centred at the origin.
    UniformDisc { radius: f64 },
    /// Uniform density on the open interval `(a, b)`.
    UniformInterval { a: f64, b: f64 },
    /// Raw per-cell densities aligned with a grid's enumeration.
    GridDensity(Vec<f64>),
    /// Convex combination of component priors over one shared space.
    Mixture {
        components: Vec<Prior>,
        weights: Vec<f64>,
    },
}

impl Prior {
    pub fn mixture(components: Vec<Prior>, weights: Vec<f64>) -> Result<Self> {
        let tol = Tolerances::default();
        if components.is_empty() || components.len() != weights.len() {
            return Err(Error::InvalidPrior(
                "mixture needs matching, non-empty component and weight lists".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidPrior("mixture weights must be >= 0".into()));
        }
        let total = neumaier_sum(weights.iter().copied());
        if (total - 1.0).abs() > tol.mixture_weight {
            return Err(Error::InvalidPrior(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self::Mixture {
            components,
            weights,
        })
    }

    /// Evaluate this prior's cell masses (discrete) or cell-centre densities
    /// (grid) on `space`. Grid values are renormalized so the quadrature mass
    /// is exactly one; the applied factor is recorded on the result.
    pub fn discretize(&self, space: &SearchSpace) -> Result<DiscretizedPrior> {
        let tol = Tolerances::default();
        let raw = self.raw_values(space)?;
        if raw.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidPrior(
                "prior values must be finite and >= 0".into(),
            ));
        }
        let weight = space.cell_weight();
        let mass = neumaier_sum(raw.iter().map(|v| v * weight));
        if mass <= 0.0 {
            return Err(Error::InvalidPrior("prior has zero total mass".into()));
        }
        let exact_input = matches!(self, Prior::DiscretePmf(_) | Prior::GridDensity(_))
            || matches!(self, Prior::Mixture { .. } if space.is_discrete());
        if exact_input && (mass - 1.0).abs() > tol.prior_mass {
            return Err(Error::InvalidPrior(format!(
                "prior mass is {mass}, expected 1 within {:e}",
                tol.prior_mass
            )));
        }
        let values: Vec<f64> = raw.iter().map(|v| v / mass).collect();
        Ok(DiscretizedPrior {
            space: space.clone(),
            values,
            renormalization: 1.0 / mass,
        })
    }

    fn raw_values(&self, space: &SearchSpace) -> Result<Vec<f64>> {
        match self {
            Prior::DiscretePmf(weights) => match space {
                SearchSpace::Discrete { cells } if *cells == weights.len() => Ok(weights.clone()),
                SearchSpace::Discrete { cells } => Err(Error::SpaceMismatch(format!(
                    "pmf has {} entries but the space has {cells} cells",
                    weights.len()
                ))),
                SearchSpace::Grid(_) => Err(Error::SpaceMismatch(
                    "a discrete pmf cannot be placed on a grid".into(),
                )),
            },
            Prior::GridDensity(values) => match space {
                SearchSpace::Grid(g) if g.cells() == values.len() => Ok(values.clone()),
                SearchSpace::Grid(g) => Err(Error::SpaceMismatch(format!(
                    "density vector has {} entries but the grid has {} cells",
                    values.len(),
                    g.cells()
                ))),
                SearchSpace::Discrete { .. } => Err(Error::SpaceMismatch(
                    "grid densities cannot be placed on a discrete space".into(),
                )),
            },
            Prior::Gaussian2D { sigma } => {
                if !(*sigma > 0.0) {
                    return Err(Error::InvalidPrior("sigma must be positive".into()));
                }
                let grid = require_grid(space, 2, "a circular Gaussian")?;
                let norm = 1.0 / (2.0 * PI * sigma * sigma);
                Ok((0..grid.cells())
                    .map(|i| {
                        let [x, y] = grid.center(i);
                        norm * (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
                    })
                    .collect())
            }
            Prior::UniformDisc { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidPrior("radius must be positive".into()));
                }
                let grid = require_grid(space, 2, "a uniform disc")?;
                let density = 1.0 / (PI * radius * radius);
                let r2 = radius * radius;
                Ok((0..grid.cells())
                    .map(|i| {
                        let [x, y] = grid.center(i);
                        if x * x + y * y <= r2 {
                            density
                        } else {
                            0.0
                        }
                    })
                    .collect())
            }
            Prior::UniformInterval { a, b } => {
                if !(b > a) {
                    return Err(Error::InvalidPrior("interval needs a < b".into()));
                }
                let grid = require_grid(space, 1, "a uniform interval")?;
                let density = 1.0 / (b - a);
                Ok((0..grid.cells())
                    .map(|i| {
                        let x = grid.center(i)[0];
                        if x >= *a && x <= *b {
                            density
                        } else {
                            0.0
                        }
                    })
                    .collect())
            }
            Prior::Mixture {
                components,
                weights,
            } => {
                let total = neumaier_sum(weights.iter().copied());
                if (total - 1.0).abs() > Tolerances::default().mixture_weight {
                    return Err(Error::InvalidPrior(format!(
                        "mixture weights sum to {total}, expected 1"
                    )));
                }
                let mut acc = vec![0.0f64; space.cells()];
                for (component, w) in components.iter().zip(weights) {
                    let part = component.discretize(space)?;
                    for (a, v) in acc.iter_mut().zip(part.values()) {
                        *a += w * v;
                    }
                }
                Ok(acc)
            }
        }
    }
}

fn require_grid<'s>(
    space: &'s SearchSpace,
    dim: usize,
    what: &str,
) -> Result<&'s crate::domain::space::Grid> {
    match space.as_grid() {
        Some(g) if g.dim() == dim => Ok(g),
        Some(g) => Err(Error::SpaceMismatch(format!(
            "{what} needs a {dim}-D grid, got a {}-D grid",
            g.dim()
        ))),
        None => Err(Error::SpaceMismatch(format!(
            "{what} needs a grid space, got a discrete space"
        ))),
    }
}

/// A prior bound to a concrete space: one value per cell (mass for discrete
/// spaces, density for grids), normalized so the total mass is one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedPrior {
    space: SearchSpace,
    values: Vec<f64>,
    renormalization: f64,
}

impl DiscretizedPrior {
    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    /// Per-cell masses (discrete) or densities (grid).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    /// Factor applied to the raw values so the quadrature mass is exactly 1.
    /// Grids truncating an unbounded support report a factor slightly above 1.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    /// Quadrature mass; exactly 1 up to final rounding by construction.
    pub fn total_mass(&self) -> f64 {
        let w = self.space.cell_weight();
        neumaier_sum(self.values.iter().map(|v| v * w))
    }
}
