//! Budget-constrained effort allocation by marginal-rate equalization.
//!
//! For a prior π and regular detection function d, the marginal return of
//! effort at x is q_x(y) = π(x)·∂d/∂y(x, y). An optimal split of a budget K
//! equalizes q_x across funded locations at a multiplier λ*, funding exactly
//! the locations whose initial rate q_x(0) exceeds λ*:
//!
//!   y(x) = q_x⁻¹(λ*)  with  Q(λ*) = Σ q_x⁻¹(λ*) = K.
//!
//! λ* is found by bisection on ln λ. Exponential models get a closed-form
//! per-cell inverse plus sorted prefix sums, making each Q evaluation
//! O(log m); general models pay O(m) per evaluation with an optional inner
//! bisection per cell.

use std::sync::Arc;

use crate::domain::allocation::Allocation;
use crate::domain::detection::DetectionModel;
use crate::domain::plan::SearchPlan;
use crate::domain::prior::DiscretizedPrior;
use crate::domain::schedule::EffortSchedule;
use crate::domain::space::SearchSpace;
use crate::domain::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;
use crate::tolerance::Tolerances;

/// Result of a multiplier solve: the equalized marginal rate, the allocation
/// it induces, and the measured optimality diagnostics.
#[derive(Debug, Clone)]
pub struct LagrangeSolution {
    /// Equalized marginal rate λ*.
    pub lambda_star: f64,
    /// Induced allocation.
    pub allocation: Allocation,
    /// max over funded cells of |q_x(y(x)) − λ*|.
    pub kkt_spread: f64,
    /// allocation.total() − K.
    pub budget_residual: f64,
}

/// Marginal detection rate q_x(y) = π(x)·∂d/∂y(x, y).
pub fn marginal_rate(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    cell: usize,
    effort: f64,
) -> Result<f64> {
    Ok(prior.value(cell) * det.deriv(prior.space(), cell, effort)?)
}

/// Effort at which the marginal rate drops to `lambda`; zero when the
/// initial rate is already below `lambda`.
pub fn marginal_rate_inverse(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    cell: usize,
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "multiplier must be > 0, got {lambda}"
        )));
    }
    let pi = prior.value(cell);
    if pi <= 0.0 {
        return Ok(0.0);
    }
    let q0 = pi * det.deriv(prior.space(), cell, 0.0)?;
    if lambda >= q0 {
        return Ok(0.0);
    }
    det.deriv_inverse(prior.space(), cell, lambda / pi)
}

/// Total effort Q(λ) absorbed when every location is funded down to
/// marginal rate `lambda` (cell masses on discrete spaces, densities times
/// cell volume on grids).
pub fn aggregate_allocation(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "multiplier must be > 0, got {lambda}"
        )));
    }
    let w = prior.space().cell_weight();
    let mut acc = Vec::with_capacity(prior.values().len());
    for cell in 0..prior.values().len() {
        acc.push(w * marginal_rate_inverse(prior, det, cell, lambda)?);
    }
    Ok(neumaier_sum(acc))
}

/// Reusable multiplier solver for one (prior, detection) pair.
///
/// Building it prepares the per-cell initial rates once (and, for
/// exponential models, the sorted prefix sums), so repeated solves across a
/// schedule are cheap.
#[derive(Debug)]
pub struct WaterfillSolver {
    prior: DiscretizedPrior,
    det: DetectionModel,
    /// π(x)·∂d/∂y(x, 0) per cell.
    q0: Vec<f64>,
    max_q0: f64,
    fast: Option<FastPath>,
    tol: Tolerances,
}

/// Sorted prefix sums enabling O(log m) evaluation of
/// Q(λ) = Σ_{q0 > λ} w·(ln q0 − ln λ)/α.
#[derive(Debug)]
struct FastPath {
    /// ln q0 per cell (−∞ where the prior vanishes).
    ln_q0: Vec<f64>,
    /// ln q0 of funded-candidate cells, descending.
    ln_q0_sorted: Vec<f64>,
    /// prefix_a[k] = Σ_{i<k} w·ln q0_i/α_i over the sorted order.
    prefix_a: Vec<f64>,
    /// prefix_b[k] = Σ_{i<k} w/α_i over the sorted order.
    prefix_b: Vec<f64>,
}

impl WaterfillSolver {
    pub fn new(prior: &DiscretizedPrior, det: &DetectionModel) -> Result<Self> {
        det.validate(prior.space())?;
        let space = prior.space();
        let cells = prior.values().len();
        let mut q0 = Vec::with_capacity(cells);
        for cell in 0..cells {
            let pi = prior.value(cell);
            q0.push(if pi > 0.0 {
                pi * det.deriv(space, cell, 0.0)?
            } else {
                0.0
            });
        }
        let max_q0 = q0.iter().copied().fold(0.0f64, f64::max);
        if !(max_q0 > 0.0) || !max_q0.is_finite() {
            return Err(Error::InvalidPrior(
                "no location has a positive initial marginal rate".into(),
            ));
        }
        let fast = if det.is_exponential() {
            Some(Self::build_fast_path(space, det, &q0))
        } else {
            None
        };
        Ok(Self {
            prior: prior.clone(),
            det: det.clone(),
            q0,
            max_q0,
            fast,
            tol: Tolerances::default(),
        })
    }

    fn build_fast_path(space: &SearchSpace, det: &DetectionModel, q0: &[f64]) -> FastPath {
        let w = space.cell_weight();
        let ln_q0: Vec<f64> = q0
            .iter()
            .map(|&q| if q > 0.0 { q.ln() } else { f64::NEG_INFINITY })
            .collect();
        let mut order: Vec<u32> = (0..q0.len() as u32).filter(|&i| q0[i as usize] > 0.0).collect();
        order.sort_unstable_by(|&a, &b| {
            ln_q0[b as usize]
                .partial_cmp(&ln_q0[a as usize])
                .expect("finite rates")
                .then(a.cmp(&b))
        });
        let mut ln_q0_sorted = Vec::with_capacity(order.len());
        let mut prefix_a = Vec::with_capacity(order.len() + 1);
        let mut prefix_b = Vec::with_capacity(order.len() + 1);
        prefix_a.push(0.0);
        prefix_b.push(0.0);
        // Running compensated sums keep the prefixes accurate on huge grids.
        let (mut sa, mut ca) = (0.0f64, 0.0f64);
        let (mut sb, mut cb) = (0.0f64, 0.0f64);
        for &i in &order {
            let cell = i as usize;
            let alpha = det.exponential_rate(cell).expect("exponential model");
            ln_q0_sorted.push(ln_q0[cell]);
            let va = w * ln_q0[cell] / alpha;
            let t = sa + va;
            ca += if sa.abs() >= va.abs() { (sa - t) + va } else { (va - t) + sa };
            sa = t;
            prefix_a.push(sa + ca);
            let vb = w / alpha;
            let t = sb + vb;
            cb += if sb.abs() >= vb.abs() { (sb - t) + vb } else { (vb - t) + sb };
            sb = t;
            prefix_b.push(sb + cb);
        }
        FastPath {
            ln_q0,
            ln_q0_sorted,
            prefix_a,
            prefix_b,
        }
    }

    pub fn prior(&self) -> &DiscretizedPrior {
        &self.prior
    }

    pub fn detection(&self) -> &DetectionModel {
        &self.det
    }

    /// Largest initial marginal rate; the multiplier at zero budget.
    pub fn max_initial_rate(&self) -> f64 {
        self.max_q0
    }

    /// Q(λ): total effort absorbed at multiplier `lambda`.
    pub fn aggregate(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "multiplier must be > 0, got {lambda}"
            )));
        }
        if let Some(fast) = &self.fast {
            let ln_lambda = lambda.ln();
            let k = fast.ln_q0_sorted.partition_point(|&v| v > ln_lambda);
            return Ok(fast.prefix_a[k] - fast.prefix_b[k] * ln_lambda);
        }
        self.aggregate_generic(lambda)
    }

    fn aggregate_generic(&self, lambda: f64) -> Result<f64> {
        let w = self.prior.space().cell_weight();
        let mut acc = Vec::with_capacity(self.q0.len());
        for cell in 0..self.q0.len() {
            let y = self.invert_cell(cell, lambda)?;
            acc.push(w * y);
        }
        Ok(neumaier_sum(acc))
    }

    /// Effort density one cell receives at multiplier `lambda` — the point
    /// query behind single-cell detection curves.
    pub fn effort_at_multiplier(&self, cell: usize, lambda: f64) -> Result<f64> {
        if cell >= self.q0.len() {
            return Err(Error::InvalidArgument(format!(
                "cell {cell} out of range for {} cells",
                self.q0.len()
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "multiplier must be > 0, got {lambda}"
            )));
        }
        self.invert_cell(cell, lambda)
    }

    /// q_x⁻¹(λ) for one cell.
    fn invert_cell(&self, cell: usize, lambda: f64) -> Result<f64> {
        let q0 = self.q0[cell];
        if q0 <= lambda {
            return Ok(0.0);
        }
        if let Some(fast) = &self.fast {
            let alpha = self.det.exponential_rate(cell).expect("exponential model");
            return Ok((fast.ln_q0[cell] - lambda.ln()) / alpha);
        }
        self.det
            .deriv_inverse(self.prior.space(), cell, lambda / self.prior.value(cell))
    }

    /// Solve Q(λ*) = `budget` and build the induced allocation.
    pub fn solve(&self, budget: f64) -> Result<LagrangeSolution> {
        let lambda_star = self.solve_multiplier(budget)?;
        let space = self.prior.space();
        let mut values = vec![0.0f64; self.q0.len()];
        for (cell, v) in values.iter_mut().enumerate() {
            *v = self.invert_cell(cell, lambda_star)?;
        }
        let allocation = Allocation::new(space, values)?;

        let mut kkt_spread = 0.0f64;
        for cell in 0..self.q0.len() {
            let y = allocation.value(cell);
            if y > 0.0 {
                let rate = self.prior.value(cell) * self.det.deriv(space, cell, y)?;
                kkt_spread = kkt_spread.max((rate - lambda_star).abs());
            }
        }
        let budget_residual = allocation.total() - budget;
        Ok(LagrangeSolution {
            lambda_star,
            allocation,
            kkt_spread,
            budget_residual,
        })
    }

    /// Find the multiplier for a budget without building the allocation.
    pub fn solve_multiplier(&self, budget: f64) -> Result<f64> {
        if !(budget >= 0.0) || !budget.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "budget must be >= 0 and finite, got {budget}"
            )));
        }
        if budget == 0.0 {
            return Ok(self.max_q0);
        }
        // Bracket by halving down from the zero-budget multiplier.
        let hi0 = self.max_q0;
        let mut lo = hi0;
        let mut halvings = 0usize;
        loop {
            lo *= 0.5;
            if self.aggregate(lo)? >= budget {
                break;
            }
            halvings += 1;
            if halvings > 1100 || lo < f64::MIN_POSITIVE {
                return Err(Error::NoConvergence {
                    iterations: halvings,
                    lo,
                    hi: hi0,
                    f_lo: self.aggregate(lo.max(f64::MIN_POSITIVE))?,
                    f_hi: 0.0,
                });
            }
        }
        // Bisection on ln λ; Q is continuous and nonincreasing in λ.
        let mut lo_u = lo.ln();
        let mut hi_u = if halvings == 0 { hi0.ln() } else { (2.0 * lo).ln() };
        for _ in 0..self.tol.max_bisect_iter {
            if hi_u - lo_u <= self.tol.lambda_rel {
                break;
            }
            let mid_u = 0.5 * (lo_u + hi_u);
            if self.aggregate(mid_u.exp())? >= budget {
                lo_u = mid_u;
            } else {
                hi_u = mid_u;
            }
        }
        if hi_u - lo_u > self.tol.lambda_rel {
            return Err(Error::NoConvergence {
                iterations: self.tol.max_bisect_iter,
                lo: lo_u.exp(),
                hi: hi_u.exp(),
                f_lo: self.aggregate(lo_u.exp())?,
                f_hi: self.aggregate(hi_u.exp())?,
            });
        }
        Ok((0.5 * (lo_u + hi_u)).exp())
    }
}

/// Solve the budget split for one instant.
pub fn solve_lambda(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    budget: f64,
) -> Result<LagrangeSolution> {
    WaterfillSolver::new(prior, det)?.solve(budget)
}

/// The allocation maximizing expected detection under the prior for a budget.
pub fn optimal_allocation(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    budget: f64,
) -> Result<Allocation> {
    Ok(solve_lambda(prior, det, budget)?.allocation)
}

/// Budget-equalizing plan across a whole schedule: at every t the allocation
/// is the optimal split of E(t). Evaluated lazily; `t_grid` is the plan's
/// reference sampling grid.
pub fn optimal_plan(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    schedule: &EffortSchedule,
    t_grid: &[f64],
) -> Result<SearchPlan> {
    schedule.validate()?;
    validate_t_grid(t_grid)?;
    let solver = Arc::new(WaterfillSolver::new(prior, det)?);
    Ok(SearchPlan::optimal(solver, schedule.clone(), t_grid.to_vec()))
}

/// Plan that concentrates the whole budget on the target's cell — the
/// perfect-information baseline.
pub fn clairvoyant_plan(
    space: &SearchSpace,
    truth: &GroundTruth,
    schedule: &EffortSchedule,
) -> Result<SearchPlan> {
    schedule.validate()?;
    if truth.cell() >= space.cells() {
        return Err(Error::TruthOutsideSpace(format!(
            "cell {} is outside a space of {} cells",
            truth.cell(),
            space.cells()
        )));
    }
    Ok(SearchPlan::clairvoyant(
        space.clone(),
        truth.clone(),
        schedule.clone(),
    ))
}

pub(crate) fn validate_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if t_grid[0] != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "time grids must start at 0, got {}",
            t_grid[0]
        )));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidArgument(
                "time grids must be strictly increasing".into(),
            ));
        }
    }
    Ok(())
}

/// Multiplier solve forced through the generic per-cell inversion path,
/// bypassing the exponential prefix-sum shortcut. Used to cross-validate the
/// fast path.
pub fn solve_lambda_generic(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    budget: f64,
) -> Result<LagrangeSolution> {
    let mut solver = WaterfillSolver::new(prior, det)?;
    solver.fast = None;
    solver.solve(budget)
}
