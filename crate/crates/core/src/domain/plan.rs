//! Search plans: time-indexed effort allocations.
//!
//! A plan is either a parametric family evaluated on demand (budget-optimal,
//! clairvoyant, convex composite, and two hand-built comparison families) or
//! an explicit table of sampled allocations. Lazy evaluation keeps grid
//! plans cheap: a 400-point curve on a million-cell grid never materializes
//! 400 allocations at once.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::allocator::WaterfillSolver;
use crate::domain::allocation::Allocation;
use crate::domain::schedule::EffortSchedule;
use crate::domain::space::SearchSpace;
use crate::domain::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::numeric::interp_linear;

/// A time-indexed allocation of search effort.
#[derive(Debug, Clone)]
pub enum SearchPlan {
    /// Water-filling split of E(t) for a fixed prior and detection model.
    Optimal(OptimalPlan),
    /// Whole budget on the target's cell.
    Clairvoyant(ClairvoyantPlan),
    /// Pointwise convex combination of component plans.
    Composite(CompositePlan),
    /// Two-cell family: equal split up to a budget threshold, then the
    /// threshold-shifted split favouring cell 0.
    ThresholdSplit(ThresholdSplitPlan),
    /// Decaying-density core disc plus a unit-density annulus absorbing the
    /// rest of the budget; the core starves as t grows.
    CoreAnnulus(CoreAnnulusPlan),
    /// Explicit samples on a time grid, linearly interpolated.
    Sampled(SampledPlan),
}

#[derive(Debug, Clone)]
pub struct OptimalPlan {
    pub(crate) solver: Arc<WaterfillSolver>,
    pub(crate) schedule: EffortSchedule,
    pub(crate) t_grid: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ClairvoyantPlan {
    pub(crate) space: SearchSpace,
    pub(crate) truth: GroundTruth,
    pub(crate) schedule: EffortSchedule,
}

#[derive(Debug, Clone)]
pub struct CompositePlan {
    pub(crate) components: Vec<SearchPlan>,
    pub(crate) weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ThresholdSplitPlan {
    pub(crate) space: SearchSpace,
    pub(crate) threshold: f64,
    pub(crate) schedule: EffortSchedule,
}

#[derive(Debug, Clone)]
pub struct CoreAnnulusPlan {
    pub(crate) space: SearchSpace,
    pub(crate) sigma: f64,
    /// Effort arrives at this constant rate: E(t) = rate·t.
    pub(crate) rate: f64,
}

#[derive(Debug, Clone)]
pub struct SampledPlan {
    space: SearchSpace,
    t_grid: Vec<f64>,
    allocations: Vec<Allocation>,
}

impl SearchPlan {
    pub(crate) fn optimal(
        solver: Arc<WaterfillSolver>,
        schedule: EffortSchedule,
        t_grid: Vec<f64>,
    ) -> Self {
        Self::Optimal(OptimalPlan {
            solver,
            schedule,
            t_grid,
        })
    }

    pub(crate) fn clairvoyant(
        space: SearchSpace,
        truth: GroundTruth,
        schedule: EffortSchedule,
    ) -> Self {
        Self::Clairvoyant(ClairvoyantPlan {
            space,
            truth,
            schedule,
        })
    }

    /// Two-cell comparison family on a discrete pair of cells.
    pub fn threshold_split(
        space: &SearchSpace,
        threshold: f64,
        schedule: &EffortSchedule,
    ) -> Result<Self> {
        if space.cells() != 2 || !space.is_discrete() {
            return Err(Error::InvalidPlan(
                "the threshold-split family needs a two-cell discrete space".into(),
            ));
        }
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(Error::InvalidPlan(format!(
                "threshold must be positive and finite, got {threshold}"
            )));
        }
        schedule.validate()?;
        Ok(Self::ThresholdSplit(ThresholdSplitPlan {
            space: space.clone(),
            threshold,
            schedule: schedule.clone(),
        }))
    }

    /// Core/annulus comparison family on a 2-D grid: the central disc of the
    /// water-filling support carries density e^{−t} (capped by the budget),
    /// and a surrounding annulus at unit density absorbs the remainder.
    pub fn core_annulus(space: &SearchSpace, sigma: f64, rate: f64) -> Result<Self> {
        match space.as_grid() {
            Some(g) if g.dim() == 2 => {}
            _ => {
                return Err(Error::InvalidPlan(
                    "the core-annulus family needs a 2-D grid".into(),
                ))
            }
        }
        if !(sigma > 0.0) || !(rate > 0.0) {
            return Err(Error::InvalidPlan(
                "core-annulus sigma and effort rate must be positive".into(),
            ));
        }
        Ok(Self::CoreAnnulus(CoreAnnulusPlan {
            space: space.clone(),
            sigma,
            rate,
        }))
    }

    pub fn sampled(space: &SearchSpace, t_grid: Vec<f64>, allocations: Vec<Allocation>) -> Result<Self> {
        crate::allocator::validate_t_grid(&t_grid)?;
        if t_grid.len() != allocations.len() {
            return Err(Error::InvalidPlan(format!(
                "{} time samples but {} allocations",
                t_grid.len(),
                allocations.len()
            )));
        }
        for a in &allocations {
            if a.values().len() != space.cells() {
                return Err(Error::SpaceMismatch(
                    "sampled allocations must live on the plan's space".into(),
                ));
            }
        }
        Ok(Self::Sampled(SampledPlan {
            space: space.clone(),
            t_grid,
            allocations,
        }))
    }

    pub fn space(&self) -> &SearchSpace {
        match self {
            Self::Optimal(p) => p.solver.prior().space(),
            Self::Clairvoyant(p) => &p.space,
            Self::Composite(p) => p.components[0].space(),
            Self::ThresholdSplit(p) => &p.space,
            Self::CoreAnnulus(p) => &p.space,
            Self::Sampled(p) => &p.space,
        }
    }

    /// The schedule this plan follows, when it has a closed form.
    pub fn schedule(&self) -> Option<&EffortSchedule> {
        match self {
            Self::Optimal(p) => Some(&p.schedule),
            Self::Clairvoyant(p) => Some(&p.schedule),
            Self::Composite(p) => p.components[0].schedule(),
            Self::ThresholdSplit(p) => Some(&p.schedule),
            Self::CoreAnnulus(_) | Self::Sampled(_) => None,
        }
    }

    /// Reference time grid, when the plan carries one.
    pub fn t_grid(&self) -> Option<&[f64]> {
        match self {
            Self::Optimal(p) => Some(&p.t_grid),
            Self::Sampled(p) => Some(&p.t_grid),
            Self::Composite(p) => p.components[0].t_grid(),
            _ => None,
        }
    }

    /// Full allocation at time `t`.
    pub fn allocation_at(&self, t: f64) -> Result<Allocation> {
        match self {
            Self::Optimal(p) => {
                let budget = p.schedule.effort(t)?;
                Ok(p.solver.solve(budget)?.allocation)
            }
            Self::Clairvoyant(p) => {
                let budget = p.schedule.effort(t)?;
                let mut values = vec![0.0; p.space.cells()];
                values[p.truth.cell()] = budget / p.space.cell_weight();
                Allocation::new(&p.space, values)
            }
            Self::Composite(p) => {
                let parts: Vec<Allocation> = p
                    .components
                    .iter()
                    .map(|c| c.allocation_at(t))
                    .collect::<Result<_>>()?;
                let weighted: Vec<(&Allocation, f64)> =
                    parts.iter().zip(p.weights.iter().copied()).collect();
                Allocation::combine(&weighted)
            }
            Self::ThresholdSplit(p) => {
                let e = p.schedule.effort(t)?;
                let values = threshold_split_values(e, p.threshold);
                Allocation::new(&p.space, values.to_vec())
            }
            Self::CoreAnnulus(p) => {
                let grid = p.space.as_grid().expect("validated at construction");
                let geo = CoreAnnulusGeometry::at(p, t)?;
                let values = (0..grid.cells())
                    .map(|i| {
                        let [x, y] = grid.center(i);
                        geo.density(x * x + y * y)
                    })
                    .collect();
                Allocation::new(&p.space, values)
            }
            Self::Sampled(p) => p.allocation_interp(t),
        }
    }

    /// Effort (density) at a single cell — the cheap point query behind
    /// true-detection curves.
    pub fn effort_at(&self, t: f64, cell: usize) -> Result<f64> {
        match self {
            Self::Optimal(p) => {
                let budget = p.schedule.effort(t)?;
                let lambda = p.solver.solve_multiplier(budget)?;
                p.solver.effort_at_multiplier(cell, lambda)
            }
            Self::Clairvoyant(p) => {
                let budget = p.schedule.effort(t)?;
                Ok(if cell == p.truth.cell() {
                    budget / p.space.cell_weight()
                } else {
                    0.0
                })
            }
            Self::Composite(p) => {
                let mut acc = 0.0;
                for (c, w) in p.components.iter().zip(&p.weights) {
                    acc += w * c.effort_at(t, cell)?;
                }
                Ok(acc)
            }
            Self::ThresholdSplit(p) => {
                let e = p.schedule.effort(t)?;
                Ok(threshold_split_values(e, p.threshold)[cell])
            }
            Self::CoreAnnulus(p) => {
                let grid = p.space.as_grid().expect("validated at construction");
                let [x, y] = grid.center(cell);
                Ok(CoreAnnulusGeometry::at(p, t)?.density(x * x + y * y))
            }
            Self::Sampled(p) => Ok(p.allocation_interp(t)?.value(cell)),
        }
    }

    /// Materialize the plan on a time grid.
    pub fn sample(&self, t_grid: &[f64]) -> Result<SampledPlan> {
        crate::allocator::validate_t_grid(t_grid)?;
        let allocations = t_grid
            .iter()
            .map(|&t| self.allocation_at(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledPlan {
            space: self.space().clone(),
            t_grid: t_grid.to_vec(),
            allocations,
        })
    }

    /// Check that per-cell effort never decreases across consecutive grid
    /// times. Families that reallocate effort away from a location (the
    /// core-annulus construction does) fail this check by design.
    pub fn is_monotone_on(&self, t_grid: &[f64], tol: f64) -> Result<bool> {
        let mut prev: Option<Allocation> = None;
        for &t in t_grid {
            let cur = self.allocation_at(t)?;
            if let Some(p) = &prev {
                for cell in 0..cur.values().len() {
                    if cur.value(cell) + tol < p.value(cell) {
                        return Ok(false);
                    }
                }
            }
            prev = Some(cur);
        }
        Ok(true)
    }
}

fn threshold_split_values(budget: f64, threshold: f64) -> [f64; 2] {
    if budget <= threshold {
        [budget / 2.0, budget / 2.0]
    } else {
        [(budget + threshold) / 2.0, (budget - threshold) / 2.0]
    }
}

/// Instantaneous geometry of the core-annulus family.
struct CoreAnnulusGeometry {
    core_r2: f64,
    core_density: f64,
    annulus_r2: f64,
}

impl CoreAnnulusGeometry {
    fn at(p: &CoreAnnulusPlan, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time must be >= 0 and finite, got {t}"
            )));
        }
        let budget = p.rate * t;
        if budget == 0.0 {
            return Ok(Self {
                core_r2: 0.0,
                core_density: 0.0,
                annulus_r2: 0.0,
            });
        }
        // Core disc: the water-filling support radius R²(t) = 2σ²·H·√t for
        // this σ and effort rate.
        let h = (p.rate / (PI * p.sigma * p.sigma)).sqrt();
        let core_r2 = 2.0 * p.sigma * p.sigma * h * t.sqrt();
        let core_area = PI * core_r2;
        // Decaying core density, capped so the core never exceeds the budget
        // (the uncapped form is infeasible at small t).
        let core_density = (-t).exp().min(budget / core_area);
        let leftover = (budget - core_density * core_area).max(0.0);
        let annulus_r2 = core_r2 + leftover / PI;
        Ok(Self {
            core_r2,
            core_density,
            annulus_r2,
        })
    }

    fn density(&self, r2: f64) -> f64 {
        if r2 <= self.core_r2 {
            self.core_density
        } else if r2 <= self.annulus_r2 {
            1.0
        } else {
            0.0
        }
    }
}

impl SampledPlan {
    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn allocations(&self) -> &[Allocation] {
        &self.allocations
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn allocation_interp(&self, t: f64) -> Result<Allocation> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time must be >= 0 and finite, got {t}"
            )));
        }
        // Exact node hit, including the clamped ends.
        if t <= self.t_grid[0] {
            return Ok(self.allocations[0].clone());
        }
        let last = self.t_grid.len() - 1;
        if t >= self.t_grid[last] {
            return Ok(self.allocations[last].clone());
        }
        let hi = self.t_grid.partition_point(|&v| v <= t);
        let lo = hi - 1;
        if self.t_grid[lo] == t {
            return Ok(self.allocations[lo].clone());
        }
        let w = (t - self.t_grid[lo]) / (self.t_grid[hi] - self.t_grid[lo]);
        Allocation::combine(&[(&self.allocations[lo], 1.0 - w), (&self.allocations[hi], w)])
    }

    pub fn into_plan(self) -> SearchPlan {
        SearchPlan::Sampled(self)
    }
}

/// Interpolate a scalar series sampled on the plan's grid (helper shared by
/// evaluators and reports).
pub fn interp_series(t_grid: &[f64], values: &[f64], t: f64) -> f64 {
    interp_linear(t_grid, values, t)
}
