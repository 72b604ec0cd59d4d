//! Detection-probability evaluation: the believed (prior-averaged) and true
//! (at the actual target location) probabilities of a plan, their curves
//! over time, mean time to detection, and feasibility auditing.

use crate::domain::allocation::Allocation;
use crate::domain::detection::DetectionModel;
use crate::domain::plan::SearchPlan;
use crate::domain::prior::DiscretizedPrior;
use crate::domain::schedule::EffortSchedule;
use crate::domain::space::SearchSpace;
use crate::domain::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, neumaier_try_sum};
use crate::tolerance::Tolerances;

/// Which probability a curve tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// Detection probability averaged over the searcher's prior.
    Subjective,
    /// Detection probability at the actual target location.
    True,
}

/// A detection probability sampled on a time grid.
#[derive(Debug, Clone)]
pub struct DetectionCurve {
    kind: CurveKind,
    t_grid: Vec<f64>,
    values: Vec<f64>,
}

impl DetectionCurve {
    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when consecutive samples never decrease beyond `tol`.
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }
}

/// Believed detection probability of an allocation: the prior-weighted
/// average of per-cell detection probabilities.
pub fn subjective_detection_prob(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    alloc: &Allocation,
) -> Result<f64> {
    let space = prior.space();
    check_alloc(space, alloc)?;
    let w = space.cell_weight();
    let p = neumaier_try_sum((0..space.cells()).map(|i| {
        let pi = prior.value(i);
        if pi == 0.0 {
            return Ok(0.0);
        }
        Ok(pi * w * det.prob(space, i, alloc.value(i))?)
    }))?;
    Ok(p.clamp(0.0, 1.0))
}

/// Believed miss probability `1 − P`, summed directly from per-cell miss
/// probabilities so it keeps relative precision when `P` is close to 1.
pub fn subjective_survival(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    alloc: &Allocation,
) -> Result<f64> {
    let space = prior.space();
    check_alloc(space, alloc)?;
    let w = space.cell_weight();
    let s = neumaier_try_sum((0..space.cells()).map(|i| {
        let pi = prior.value(i);
        if pi == 0.0 {
            return Ok(0.0);
        }
        Ok(pi * w * det.miss_prob(space, i, alloc.value(i))?)
    }))?;
    Ok(s.clamp(0.0, 1.0))
}

/// Detection probability at the actual target location: the detection
/// function evaluated at the effort the target's cell receives.
pub fn true_detection_prob(
    space: &SearchSpace,
    truth: &GroundTruth,
    det: &DetectionModel,
    alloc: &Allocation,
) -> Result<f64> {
    check_alloc(space, alloc)?;
    let cell = truth.cell();
    if cell >= space.cells() {
        return Err(Error::TruthOutsideSpace(format!(
            "cell {cell} out of range for {} cells",
            space.cells()
        )));
    }
    det.prob(space, cell, alloc.value(cell))
}

/// Both probability curves of a plan over a time grid, sharing one
/// allocation evaluation per sample.
pub fn detection_curves(
    plan: &SearchPlan,
    prior: &DiscretizedPrior,
    truth: &GroundTruth,
    det: &DetectionModel,
    t_grid: &[f64],
) -> Result<(DetectionCurve, DetectionCurve)> {
    crate::allocator::validate_t_grid(t_grid)?;
    let space = prior.space();
    let mut subjective = Vec::with_capacity(t_grid.len());
    let mut true_prob = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let alloc = plan.allocation_at(t)?;
        subjective.push(subjective_detection_prob(prior, det, &alloc)?);
        true_prob.push(true_detection_prob(space, truth, det, &alloc)?);
    }
    Ok((
        DetectionCurve {
            kind: CurveKind::Subjective,
            t_grid: t_grid.to_vec(),
            values: subjective,
        },
        DetectionCurve {
            kind: CurveKind::True,
            t_grid: t_grid.to_vec(),
            values: true_prob,
        },
    ))
}

/// True-probability curve alone, via single-cell effort queries — avoids
/// materializing full allocations, which matters on fine grids.
pub fn true_detection_curve(
    plan: &SearchPlan,
    truth: &GroundTruth,
    det: &DetectionModel,
    t_grid: &[f64],
) -> Result<DetectionCurve> {
    crate::allocator::validate_t_grid(t_grid)?;
    let space = plan.space();
    let cell = truth.cell();
    if cell >= space.cells() {
        return Err(Error::TruthOutsideSpace(format!(
            "cell {cell} out of range for {} cells",
            space.cells()
        )));
    }
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let y = plan.effort_at(t, cell)?;
        values.push(det.prob(space, cell, y)?);
    }
    Ok(DetectionCurve {
        kind: CurveKind::True,
        t_grid: t_grid.to_vec(),
        values,
    })
}

/// Mean time to detection, or the finding that it does not exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanTimeResult {
    Converged {
        value: f64,
        /// Upper quadrature limit where the miss probability fell below the
        /// tail threshold.
        horizon: f64,
        /// Extrapolated contribution beyond the horizon.
        tail: f64,
    },
    Divergent {
        /// Miss probability still standing at the hard cap.
        survival_at_cap: f64,
        cap: f64,
    },
}

impl MeanTimeResult {
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Converged { value, .. } => Some(*value),
            Self::Divergent { .. } => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Self::Divergent { .. })
    }
}

/// Mean time to detection under the believed probability: the integral of
/// the believed miss probability over all time.
pub fn mean_time_subjective(
    plan: &SearchPlan,
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    tol: &Tolerances,
) -> Result<MeanTimeResult> {
    let mut survival = |t: f64| -> Result<f64> {
        let alloc = plan.allocation_at(t)?;
        subjective_survival(prior, det, &alloc)
    };
    mean_time_impl(&mut survival, tol)
}

/// Mean time to detection under the true probability at the target's cell.
pub fn mean_time_true(
    plan: &SearchPlan,
    truth: &GroundTruth,
    det: &DetectionModel,
    tol: &Tolerances,
) -> Result<MeanTimeResult> {
    let space = plan.space().clone();
    let cell = truth.cell();
    if cell >= space.cells() {
        return Err(Error::TruthOutsideSpace(format!(
            "cell {cell} out of range for {} cells",
            space.cells()
        )));
    }
    let mut survival = |t: f64| -> Result<f64> {
        let y = plan.effort_at(t, cell)?;
        det.miss_prob(&space, cell, y)
    };
    mean_time_impl(&mut survival, tol)
}

/// Shared mean-time machinery: find a horizon where the miss probability has
/// decayed below the tail threshold (doubling, capped), integrate by
/// adaptive quadrature, and extrapolate the remaining tail from the decay
/// rate fitted to the last stretch.
fn mean_time_impl<F: FnMut(f64) -> Result<f64>>(
    survival: &mut F,
    tol: &Tolerances,
) -> Result<MeanTimeResult> {
    let mut horizon = 1.0f64;
    loop {
        let s = survival(horizon)?;
        if s < tol.tail_threshold {
            break;
        }
        if horizon >= tol.time_hard_cap {
            if s > tol.divergence_threshold {
                return Ok(MeanTimeResult::Divergent {
                    survival_at_cap: s,
                    cap: horizon,
                });
            }
            break;
        }
        horizon = (horizon * 2.0).min(tol.time_hard_cap);
    }

    let mut integrand = |t: f64| survival(t).unwrap_or(f64::NAN);
    let value = adaptive_simpson(&mut integrand, 0.0, horizon, 0.5 * tol.mean_time_abs);
    if !value.is_finite() {
        return Err(Error::InvalidArgument(
            "miss-probability evaluation failed inside the mean-time quadrature".into(),
        ));
    }

    let s_end = survival(horizon)?;
    let tail = if s_end <= 0.0 {
        0.0
    } else {
        let t_fit = 0.8 * horizon;
        let s_fit = survival(t_fit)?;
        let rate = (s_fit / s_end).ln() / (horizon - t_fit);
        if !(rate > 0.0) || !rate.is_finite() {
            return Ok(MeanTimeResult::Divergent {
                survival_at_cap: s_end,
                cap: horizon,
            });
        }
        s_end / rate
    };

    Ok(MeanTimeResult::Converged {
        value: value + tail,
        horizon,
        tail,
    })
}

/// Feasibility audit of a plan against a schedule on a time grid.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub worst_t: f64,
    pub pass: bool,
}

/// Compare a plan's total effort with the scheduled budget at each sampled
/// time; the relative residual is measured against `max(1, E(t))`.
pub fn feasibility_check(
    plan: &SearchPlan,
    schedule: &EffortSchedule,
    t_grid: &[f64],
    tol: &Tolerances,
) -> Result<FeasibilityReport> {
    crate::allocator::validate_t_grid(t_grid)?;
    let mut report = FeasibilityReport {
        max_abs_residual: 0.0,
        max_rel_residual: 0.0,
        worst_t: t_grid[0],
        pass: true,
    };
    for &t in t_grid {
        let budget = schedule.effort(t)?;
        let total = plan.allocation_at(t)?.total();
        let abs = (total - budget).abs();
        let rel = abs / budget.max(1.0);
        if rel > report.max_rel_residual {
            report.max_rel_residual = rel;
            report.max_abs_residual = abs;
            report.worst_t = t;
        }
    }
    report.pass = report.max_rel_residual <= tol.feasibility_rel;
    Ok(report)
}

fn check_alloc(space: &SearchSpace, alloc: &Allocation) -> Result<()> {
    if alloc.values().len() != space.cells() {
        return Err(Error::SpaceMismatch(format!(
            "allocation has {} cells, space has {}",
            alloc.values().len(),
            space.cells()
        )));
    }
    Ok(())
}
