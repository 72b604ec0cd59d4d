//! Independent verification paths: exhaustive small-instance search, seeded
//! Monte Carlo simulation, and a registry of closed-form reference curves
//! for the bundled scenarios.
//!
//! Nothing here reuses the allocator's water-filling machinery, so
//! agreement between these oracles and the production path is meaningful
//! evidence rather than a tautology.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::allocation::Allocation;
use crate::domain::detection::DetectionModel;
use crate::domain::plan::SearchPlan;
use crate::domain::prior::DiscretizedPrior;
use crate::domain::truth::GroundTruth;
use crate::error::{Error, Result};

/// Largest cell count accepted by [`brute_force_allocation`].
pub const BRUTE_FORCE_MAX_CELLS: usize = 4;

/// Cap on the number of lattice points the exhaustive search will visit.
const BRUTE_FORCE_MAX_CANDIDATES: u64 = 50_000_000;

/// Exhaustive search over the effort simplex `{f ≥ 0, Σf = budget}`
/// discretized at `step`, maximizing the believed detection probability.
///
/// The final cell absorbs the lattice remainder so every candidate spends
/// the budget exactly. Ties keep the lexicographically smallest candidate.
pub fn brute_force_allocation(
    prior: &DiscretizedPrior,
    det: &DetectionModel,
    budget: f64,
    step: f64,
) -> Result<Allocation> {
    let space = prior.space();
    let m = space.cells();
    if m > BRUTE_FORCE_MAX_CELLS {
        return Err(Error::BruteForceTooLarge {
            max: BRUTE_FORCE_MAX_CELLS,
            got: m,
        });
    }
    if !(budget >= 0.0) || !budget.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "budget must be >= 0 and finite, got {budget}"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be > 0, got {step}"
        )));
    }
    det.validate(space)?;
    if budget == 0.0 {
        return Allocation::new(space, vec![0.0; m]);
    }

    let n = (budget / step).floor() as u64;
    let candidates = simplex_lattice_size(n, m as u64);
    if candidates > BRUTE_FORCE_MAX_CANDIDATES {
        return Err(Error::InvalidArgument(format!(
            "{candidates} lattice candidates exceed the {BRUTE_FORCE_MAX_CANDIDATES} cap; \
             use a coarser step"
        )));
    }

    let w = space.cell_weight();
    let weights: Vec<f64> = (0..m).map(|i| prior.value(i) * w).collect();
    let mut efforts = vec![0.0f64; m];
    let mut best_p = f64::NEG_INFINITY;
    let mut best = vec![0.0f64; m];

    // Depth-first enumeration in lexicographic order of the leading m−1
    // coordinates; the last coordinate takes the exact remainder.
    fn recurse(
        cell: usize,
        remaining: u64,
        spent: f64,
        budget: f64,
        step: f64,
        weights: &[f64],
        det: &DetectionModel,
        space: &crate::domain::space::SearchSpace,
        efforts: &mut [f64],
        best_p: &mut f64,
        best: &mut [f64],
    ) -> Result<()> {
        let m = efforts.len();
        if cell == m - 1 {
            efforts[m - 1] = (budget - spent).max(0.0);
            let mut p = 0.0;
            for i in 0..m {
                p += weights[i] * det.prob(space, i, efforts[i])?;
            }
            if p > *best_p {
                *best_p = p;
                best.copy_from_slice(efforts);
            }
            return Ok(());
        }
        for k in 0..=remaining {
            efforts[cell] = k as f64 * step;
            recurse(
                cell + 1,
                remaining - k,
                spent + efforts[cell],
                budget,
                step,
                weights,
                det,
                space,
                efforts,
                best_p,
                best,
            )?;
        }
        Ok(())
    }

    recurse(
        0, n, 0.0, budget, step, &weights, det, space, &mut efforts, &mut best_p, &mut best,
    )?;
    Allocation::new(space, best)
}

fn simplex_lattice_size(n: u64, m: u64) -> u64 {
    // Number of ways to choose the first m−1 lattice coordinates:
    // C(n + m − 1, m − 1) evaluated without overflow for m ≤ 4.
    match m {
        0 | 1 => 1,
        2 => n + 1,
        3 => (n + 1).saturating_mul(n + 2) / 2,
        _ => (n + 1)
            .saturating_mul(n + 2)
            .saturating_mul(n + 3)
            / 6,
    }
}

/// A seeded frequency estimate of a detection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Detection frequency across trials.
    pub estimate: f64,
    /// Binomial standard error √(p̂(1−p̂)/n).
    pub std_error: f64,
    /// Trial count.
    pub n: u64,
    /// Seed the estimate was produced from.
    pub seed: u64,
}

/// Where each trial's target location comes from.
#[derive(Debug, Clone, Copy)]
pub enum TargetSource<'a> {
    /// Draw a fresh location from the searcher's prior each trial —
    /// estimates the believed detection probability.
    SampleFromPrior(&'a DiscretizedPrior),
    /// Keep the target fixed — estimates the true detection probability.
    Fixed(&'a GroundTruth),
}

/// Trials per RNG stream; estimates depend only on the seed and this fixed
/// batch layout, never on scheduling.
const MC_BATCH: u64 = 65_536;

/// Simulate the search at time `t`: each trial places the target, then
/// detects it with the probability the plan's effort implies.
pub fn monte_carlo_detection(
    source: TargetSource,
    det: &DetectionModel,
    plan: &SearchPlan,
    t: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("trial count must be >= 1".into()));
    }
    let space = plan.space().clone();
    let alloc = plan.allocation_at(t)?;

    // Per-cell detection probabilities are what trials consult; computing
    // them once keeps the trial loop allocation-free.
    let probs: Vec<f64> = (0..space.cells())
        .map(|i| det.prob(&space, i, alloc.value(i)))
        .collect::<Result<_>>()?;

    let cdf: Option<Vec<f64>> = match source {
        TargetSource::SampleFromPrior(prior) => {
            if prior.space() != &space {
                return Err(Error::SpaceMismatch(
                    "sampling prior must live on the plan's space".into(),
                ));
            }
            let w = space.cell_weight();
            let mut acc = 0.0;
            Some(
                (0..space.cells())
                    .map(|i| {
                        acc += prior.value(i) * w;
                        acc
                    })
                    .collect(),
            )
        }
        TargetSource::Fixed(truth) => {
            if truth.cell() >= space.cells() {
                return Err(Error::TruthOutsideSpace(format!(
                    "cell {} out of range for {} cells",
                    truth.cell(),
                    space.cells()
                )));
            }
            None
        }
    };

    let fixed_cell = match source {
        TargetSource::Fixed(truth) => truth.cell(),
        TargetSource::SampleFromPrior(_) => 0,
    };

    let mut detections = 0u64;
    let batches = n.div_ceil(MC_BATCH);
    for batch in 0..batches {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let trials = MC_BATCH.min(n - batch * MC_BATCH);
        for _ in 0..trials {
            let cell = match &cdf {
                Some(cdf) => {
                    let u: f64 = rng.random();
                    let target = u * cdf[cdf.len() - 1];
                    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
                }
                None => fixed_cell,
            };
            let u: f64 = rng.random();
            if u < probs[cell] {
                detections += 1;
            }
        }
    }

    let estimate = detections as f64 / n as f64;
    Ok(McEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / n as f64).sqrt(),
        n,
        seed,
    })
}

/// Closed-form reference values for a bundled scenario at time `t`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReferencePoint {
    /// Believed detection probability of the scenario's primary plan.
    pub subjective: Option<f64>,
    /// True detection probability of the primary plan.
    pub true_prob: Option<f64>,
    /// Believed probability of the scenario's alternative plan.
    pub subjective_alt: Option<f64>,
    /// True probability of the alternative plan.
    pub true_alt: Option<f64>,
}

/// Identifiers of the bundled scenarios with known closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceId {
    /// Uniform two-cell instance, E(t)=t.
    Example1,
    /// Uniform two-cell instance searched clairvoyantly, E(t)=t.
    Clairvoyant,
    /// Uniform disc of radius 1, E(t)=t.
    Example2,
    /// Two cells with prior (2/3, 1/3), E(t)=t, target in cell 0.
    Example3,
    /// Uniform two-cell prior with per-cell rates (1, 2), E(t)=t, target in
    /// the rate-2 cell.
    TwoCellRates,
    /// Uniform prior on [1, e] with rate α(x)=x, E(t)=t, target at 1.5.
    IntervalRateGradient,
    /// Circular Gaussian σ=2, E(t)=t, target at the origin.
    Example4,
    /// Circular Gaussian σ=1 with effort rate π (unit sweep coefficient),
    /// target at the origin.
    Example4UnitH,
    /// Two cells with prior (2/3, 1/3), E(t)=ln4+t, target in cell 0;
    /// alternative plan splits evenly up to ln 4.
    Example5,
    /// Same instance as [`ReferenceId::Example4`]; the alternative plan is
    /// optimal for a σ=1 belief.
    Example6,
    /// Two-cell beliefs (0.99, 0.17) mixed at weight 0.75, rate 0.3,
    /// E(t)=15.318+t, target in cell 0. Primary = single mixed belief,
    /// alternative = blended per-belief plans.
    Example7,
    /// Gaussian beliefs σ=(2, 0.5) mixed evenly, E(t)=t, target at the
    /// origin, moment-matched mode. Primary/alternative as in `Example7`.
    Example8,
    /// Shrinking-core plan on a Gaussian σ=2 instance, E(t)=t, target at
    /// the origin.
    CoreAnnulus,
}

impl ReferenceId {
    /// All registered identifiers, in bundled-scenario order.
    pub const ALL: [ReferenceId; 13] = [
        ReferenceId::Example1,
        ReferenceId::Clairvoyant,
        ReferenceId::Example2,
        ReferenceId::Example3,
        ReferenceId::TwoCellRates,
        ReferenceId::IntervalRateGradient,
        ReferenceId::Example4,
        ReferenceId::Example4UnitH,
        ReferenceId::Example5,
        ReferenceId::Example6,
        ReferenceId::Example7,
        ReferenceId::Example8,
        ReferenceId::CoreAnnulus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Example1 => "example1",
            Self::Clairvoyant => "clairvoyant",
            Self::Example2 => "example2",
            Self::Example3 => "example3",
            Self::TwoCellRates => "two_cell_rates",
            Self::IntervalRateGradient => "interval_rate_gradient",
            Self::Example4 => "example4",
            Self::Example4UnitH => "example4_unit_h",
            Self::Example5 => "example5",
            Self::Example6 => "example6",
            Self::Example7 => "example7",
            Self::Example8 => "example8",
            Self::CoreAnnulus => "core_annulus",
        }
    }
}

impl FromStr for ReferenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownReference(s.to_string()))
    }
}

impl std::fmt::Display for ReferenceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Evaluate the registered closed forms for a scenario at time `t`.
///
/// These are hand-derived formulas evaluated directly; the solver and
/// evaluator are never consulted.
pub fn closed_form_reference(id: ReferenceId, t: f64) -> Result<ReferencePoint> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time must be >= 0 and finite, got {t}"
        )));
    }
    let mut point = ReferencePoint::default();
    match id {
        ReferenceId::Example1 => {
            let p = 1.0 - (-t / 2.0).exp();
            point.subjective = Some(p);
            point.true_prob = Some(p);
        }
        ReferenceId::Clairvoyant => {
            // All effort on the target's cell: true curve 1 − e^{−t}; the
            // uniform two-cell prior believes half of that.
            let d = 1.0 - (-t).exp();
            point.subjective = Some(0.5 * d);
            point.true_prob = Some(d);
        }
        ReferenceId::Example2 => {
            let p = 1.0 - (-t / std::f64::consts::PI).exp();
            point.subjective = Some(p);
            point.true_prob = Some(p);
        }
        ReferenceId::Example3 => {
            let (p, pt) = biased_pair_curves(2.0 / 3.0, t);
            point.subjective = Some(p);
            point.true_prob = Some(pt);
        }
        ReferenceId::TwoCellRates => {
            let e = t;
            let threshold = 0.5 * 2.0f64.ln();
            if e <= threshold {
                // Only the rate-2 cell is funded.
                let d = 1.0 - (-2.0 * e).exp();
                point.subjective = Some(0.5 * d);
                point.true_prob = Some(d);
            } else {
                let decay = (-2.0 * e / 3.0).exp();
                point.subjective = Some(1.0 - 3.0 * 2.0f64.powf(-5.0 / 3.0) * decay);
                point.true_prob = Some(1.0 - 2.0f64.powf(-2.0 / 3.0) * decay);
            }
        }
        ReferenceId::IntervalRateGradient => {
            // Uniform prior on [1, e], rate α(x)=x, target at x₀=1.5. The
            // funded region is [L, e] with L = λ(e−1).
            let x0 = 1.5;
            let e1 = std::f64::consts::E;
            if t >= 0.5 {
                // Fully funded: survival density is L/x pointwise, so the
                // believed survival integrates to L/(e−1).
                let l = (0.5 - t).exp();
                point.subjective = Some(1.0 - l / (e1 - 1.0));
                point.true_prob = Some(1.0 - l / x0);
            } else {
                let l = (1.0 - (2.0 * t).sqrt()).exp();
                point.subjective = Some((e1 - 2.0 * l + l * l.ln()) / (e1 - 1.0));
                point.true_prob = Some(if l <= x0 { 1.0 - l / x0 } else { 0.0 });
            }
        }
        ReferenceId::Example4 | ReferenceId::Example6 => {
            let h = (1.0 / (std::f64::consts::PI * 4.0)).sqrt();
            let u = h * t.sqrt();
            point.subjective = Some(1.0 - (1.0 + u) * (-u).exp());
            point.true_prob = Some(1.0 - (-u).exp());
            if id == ReferenceId::Example6 {
                // Alternative plan: optimal for a σ=1 belief, evaluated
                // under the σ=2 prior and at the origin.
                let v = (t / std::f64::consts::PI).sqrt();
                point.subjective_alt =
                    Some(1.0 - 4.0 / 3.0 * (-v / 4.0).exp() + (-v).exp() / 3.0);
                point.true_alt = Some(1.0 - (-v).exp());
            }
        }
        ReferenceId::Example4UnitH => {
            let u = t.sqrt();
            point.subjective = Some(1.0 - (1.0 + u) * (-u).exp());
            point.true_prob = Some(1.0 - (-u).exp());
        }
        ReferenceId::Example5 => {
            let e = 4.0f64.ln() + t;
            let decay = (-e / 2.0).exp();
            let (p, pt) = biased_pair_curves(2.0 / 3.0, e);
            point.subjective = Some(p);
            point.true_prob = Some(pt);
            point.subjective_alt = Some(1.0 - decay);
            point.true_alt = Some(if e <= 4.0f64.ln() {
                1.0 - decay
            } else {
                1.0 - 0.5 * decay
            });
        }
        ReferenceId::Example7 => {
            let (c, w, p1, p2) = (0.3f64, 0.75f64, 0.99f64, 0.17f64);
            let e = 15.318 + t;
            let p_mix = w * p1 + (1.0 - w) * p2;
            // Primary plan: interior split for the mixed belief.
            let coef_single = ((1.0 - p_mix) / p_mix).sqrt();
            point.true_prob = Some(1.0 - coef_single * (-c * e / 2.0).exp());
            // Alternative plan: weighted blend of per-belief splits; its
            // effort at cell 0 is E/2 + shift.
            let shift = (w * (p1 / (1.0 - p1)).ln() + (1.0 - w) * (p2 / (1.0 - p2)).ln())
                / (2.0 * c);
            point.true_alt = Some(1.0 - (-c * (e / 2.0 + shift)).exp());
        }
        ReferenceId::Example8 => {
            let (s1, s2, w) = (2.0f64, 0.5f64, 0.5f64);
            let root = (t / std::f64::consts::PI).sqrt();
            let sigma_matched = (w * s1 * s1 + (1.0 - w) * s2 * s2).sqrt();
            point.true_prob = Some(1.0 - (-root / sigma_matched).exp());
            let blend = w / s1 + (1.0 - w) / s2;
            point.true_alt = Some(1.0 - (-blend * root).exp());
        }
        ReferenceId::CoreAnnulus => {
            // Core density e^{−t}, capped by the accrued budget spread over
            // the core disc (the uncapped density is infeasible at small t);
            // for σ = 2 and unit effort rate the cap is √t / (4√π).  The
            // origin's detection probability then collapses toward 0.
            let cap = t.sqrt() / (4.0 * std::f64::consts::PI.sqrt());
            let density = (-t).exp().min(cap);
            point.true_prob = Some(1.0 - (-density).exp());
        }
    }
    Ok(point)
}

/// Closed-form optimal allocation for the discrete two-cell scenarios.
pub fn closed_form_allocation(id: ReferenceId, budget: f64) -> Option<Vec<f64>> {
    match id {
        ReferenceId::Example1 => Some(vec![budget / 2.0, budget / 2.0]),
        ReferenceId::Example3 | ReferenceId::Example5 => {
            let s = 2.0f64.ln(); // ln(p/(1−p)) at p = 2/3
            Some(if budget <= s {
                vec![budget, 0.0]
            } else {
                vec![(budget + s) / 2.0, (budget - s) / 2.0]
            })
        }
        ReferenceId::TwoCellRates => {
            let threshold = 0.5 * 2.0f64.ln();
            Some(if budget <= threshold {
                vec![0.0, budget]
            } else {
                vec![
                    (2.0 * budget - 2.0f64.ln()) / 3.0,
                    (budget + 2.0f64.ln()) / 3.0,
                ]
            })
        }
        _ => None,
    }
}

/// Closed-form mean times to detection `(believed, true)` where known.
pub fn closed_form_mean_times(id: ReferenceId) -> Option<(f64, f64)> {
    match id {
        ReferenceId::Example1 => Some((2.0, 2.0)),
        ReferenceId::Example4UnitH => Some((6.0, 2.0)),
        ReferenceId::Example4 => {
            let h2 = 1.0 / (std::f64::consts::PI * 4.0);
            Some((6.0 / h2, 2.0 / h2))
        }
        _ => None,
    }
}

fn biased_pair_curves(p: f64, e: f64) -> (f64, f64) {
    let s = (p / (1.0 - p)).ln();
    if e <= s {
        // Everything goes to the heavy cell.
        (p * (1.0 - (-e).exp()), 1.0 - (-e).exp())
    } else {
        let decay = (-e / 2.0).exp();
        (
            1.0 - 2.0 * (p * (1.0 - p)).sqrt() * decay,
            1.0 - ((1.0 - p) / p).sqrt() * decay,
        )
    }
}
