//! Detection functions: probability of spotting the target at a location as
//! a function of the search effort applied there.
//!
//! Models must be regular: `d(x, 0) = 0`, continuously differentiable in the
//! effort with a positive, strictly decreasing derivative. That shape is what
//! makes the marginal-rate inversion in the allocator well defined.

use std::fmt;
use std::sync::Arc;

use crate::domain::space::SearchSpace;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Effort-effectiveness field for the exponential model
/// `d(x, y) = 1 − exp(−α(x)·y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RateField {
    /// One rate for every location.
    Uniform(f64),
    /// One rate per cell, aligned with the space enumeration.
    PerCell(Vec<f64>),
}

impl RateField {
    fn rate(&self, cell: usize) -> f64 {
        match self {
            RateField::Uniform(a) => *a,
            RateField::PerCell(v) => v[cell],
        }
    }

    fn validate(&self, space: &SearchSpace) -> Result<()> {
        match self {
            RateField::Uniform(a) => {
                if !(*a > 0.0) || !a.is_finite() {
                    return Err(Error::InvalidDetection(format!(
                        "exponential rate must be positive and finite, got {a}"
                    )));
                }
            }
            RateField::PerCell(v) => {
                if v.len() != space.cells() {
                    return Err(Error::SpaceMismatch(format!(
                        "rate field has {} entries but the space has {} cells",
                        v.len(),
                        space.cells()
                    )));
                }
                if v.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
                    return Err(Error::InvalidDetection(
                        "every per-cell rate must be positive and finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

type PointFn = Arc<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>;

/// User-supplied regular detection function given by callbacks on
/// (location coordinates, effort).
#[derive(Clone)]
pub struct GeneralRegular {
    /// `d(x, y)`.
    pub value: PointFn,
    /// `∂d/∂y (x, y)`; must be positive and strictly decreasing in `y`.
    pub deriv: PointFn,
    /// Optional closed-form inverse of the derivative in `y`; when absent the
    /// model falls back to bisection, O(log(1/tol)) derivative calls each.
    pub deriv_inverse: Option<PointFn>,
}

impl fmt::Debug for GeneralRegular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralRegular")
            .field("deriv_inverse", &self.deriv_inverse.is_some())
            .finish_non_exhaustive()
    }
}

/// A detection model bound to no particular space; locations are presented
/// as cell indices plus centre coordinates.
#[derive(Debug, Clone)]
pub enum DetectionModel {
    /// `d(x, y) = 1 − exp(−α(x)·y)` with closed-form derivative inverse.
    ExponentialRate(RateField),
    /// Arbitrary regular model driven by callbacks.
    GeneralRegular(GeneralRegular),
}

impl DetectionModel {
    pub fn uniform_exponential(rate: f64) -> Self {
        Self::ExponentialRate(RateField::Uniform(rate))
    }

    /// Structural validation against a space (rate positivity, vector length).
    pub fn validate(&self, space: &SearchSpace) -> Result<()> {
        match self {
            Self::ExponentialRate(field) => field.validate(space),
            Self::GeneralRegular(_) => Ok(()),
        }
    }

    /// Detection probability for effort `y >= 0` at the given cell.
    pub fn prob(&self, space: &SearchSpace, cell: usize, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "effort must be >= 0, got {y}"
            )));
        }
        Ok(match self {
            Self::ExponentialRate(field) => -(-field.rate(cell) * y).exp_m1(),
            Self::GeneralRegular(g) => (g.value)(space.center(cell), y),
        })
    }

    /// Miss probability `1 − d(x, y)`, computed without cancellation for the
    /// exponential family — survival integrands need full relative precision
    /// long after `prob` has rounded to 1.
    pub fn miss_prob(&self, space: &SearchSpace, cell: usize, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "effort must be >= 0, got {y}"
            )));
        }
        Ok(match self {
            Self::ExponentialRate(field) => (-field.rate(cell) * y).exp(),
            Self::GeneralRegular(g) => 1.0 - (g.value)(space.center(cell), y),
        })
    }

    /// Marginal detection rate `∂d/∂y` at effort `y >= 0`.
    pub fn deriv(&self, space: &SearchSpace, cell: usize, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "effort must be >= 0, got {y}"
            )));
        }
        Ok(match self {
            Self::ExponentialRate(field) => {
                let a = field.rate(cell);
                a * (-a * y).exp()
            }
            Self::GeneralRegular(g) => (g.deriv)(space.center(cell), y),
        })
    }

    /// Effort at which the marginal rate equals `target`, assuming
    /// `0 < target <= deriv(x, 0)`.
    pub fn deriv_inverse(&self, space: &SearchSpace, cell: usize, target: f64) -> Result<f64> {
        if !(target > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "marginal-rate target must be > 0, got {target}"
            )));
        }
        match self {
            Self::ExponentialRate(field) => {
                let a = field.rate(cell);
                Ok(((a / target).ln() / a).max(0.0))
            }
            Self::GeneralRegular(g) => {
                let x = space.center(cell);
                if let Some(inv) = &g.deriv_inverse {
                    return Ok(inv(x, target).max(0.0));
                }
                bisect_deriv_inverse(&g.deriv, x, target)
            }
        }
    }

    /// Whether the exponential fast path applies.
    pub fn is_exponential(&self) -> bool {
        matches!(self, Self::ExponentialRate(_))
    }

    /// Exponential rate at a cell, if this is an exponential model.
    pub fn exponential_rate(&self, cell: usize) -> Option<f64> {
        match self {
            Self::ExponentialRate(field) => Some(field.rate(cell)),
            Self::GeneralRegular(_) => None,
        }
    }
}

/// Invert a strictly decreasing derivative by bracketed bisection on effort.
fn bisect_deriv_inverse(deriv: &PointFn, x: [f64; 2], target: f64) -> Result<f64> {
    let tol = Tolerances::default();
    if deriv(x, 0.0) <= target {
        return Ok(0.0);
    }
    // Double the upper bracket until the derivative falls below the target.
    let mut hi = 1.0;
    let mut grow = 0;
    while deriv(x, hi) > target {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::NoConvergence {
                iterations: grow,
                lo: 0.0,
                hi,
                f_lo: deriv(x, 0.0),
                f_hi: deriv(x, hi),
            });
        }
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
    for _ in 0..tol.max_bisect_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol.inner_inverse_rel * hi.max(1.0) {
            return Ok(mid);
        }
        if deriv(x, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
