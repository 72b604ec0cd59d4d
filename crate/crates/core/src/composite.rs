//! Composite beliefs: mixing inconsistent priors, the moment-matched
//! Gaussian shortcut, convex combinations of per-belief optimal plans, and
//! the two-strategy comparison those constructions exist to support.
//!
//! Given component priors π₁…πₙ with weights w, there are two natural
//! strategies: optimize once against the mixture Σwᵢπᵢ, or optimize against
//! each πᵢ separately and blend the resulting plans. The comparison returns
//! both true-detection curves so callers can see which one actually finds
//! the target sooner.

use crate::allocator::optimal_plan;
use crate::domain::detection::DetectionModel;
use crate::domain::plan::{CompositePlan, SearchPlan};
use crate::domain::prior::Prior;
use crate::domain::schedule::EffortSchedule;
use crate::domain::space::SearchSpace;
use crate::domain::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::evaluator::{true_detection_curve, DetectionCurve};

/// How the single-prior strategy condenses the components into one belief.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositeMode {
    /// The exact mixture distribution.
    ExactMixture,
    /// A circular Gaussian with the variance matched to the mixture —
    /// only defined when every component is a circular Gaussian.
    MomentMatched,
}

/// Exact mixture of component priors (weights validated by the
/// constructor).
pub fn mixture_prior(components: Vec<Prior>, weights: Vec<f64>) -> Result<Prior> {
    Prior::mixture(components, weights)
}

/// Variance-matched circular Gaussian for a mixture of circular Gaussians:
/// σ² = Σ wᵢσᵢ². The true mixture is not Gaussian; this is the closed-form
/// stand-in sometimes used in its place.
pub fn moment_matched_gaussian(components: &[Prior], weights: &[f64]) -> Result<Prior> {
    if components.is_empty() || components.len() != weights.len() {
        return Err(Error::InvalidPrior(format!(
            "{} components with {} weights",
            components.len(),
            weights.len()
        )));
    }
    check_weights(weights)?;
    let mut variance = 0.0;
    for (prior, &w) in components.iter().zip(weights) {
        match prior {
            Prior::Gaussian2D { sigma } => variance += w * sigma * sigma,
            other => {
                return Err(Error::InvalidPrior(format!(
                    "moment matching needs circular Gaussian components, got {other:?}"
                )))
            }
        }
    }
    Ok(Prior::Gaussian2D {
        sigma: variance.sqrt(),
    })
}

/// Pointwise convex combination of plans sharing one space and schedule.
pub fn composite_plan(plans: Vec<SearchPlan>, weights: Vec<f64>) -> Result<SearchPlan> {
    if plans.is_empty() || plans.len() != weights.len() {
        return Err(Error::InvalidPlan(format!(
            "{} plans with {} weights",
            plans.len(),
            weights.len()
        )));
    }
    check_weights(&weights)?;
    let space = plans[0].space();
    for plan in &plans[1..] {
        if plan.space() != space {
            return Err(Error::SpaceMismatch(
                "composite components must share one search space".into(),
            ));
        }
    }
    let schedules: Vec<_> = plans.iter().map(|p| p.schedule()).collect();
    if let Some(first) = schedules[0] {
        for s in &schedules[1..] {
            if *s != Some(first) {
                return Err(Error::InvalidPlan(
                    "composite components must follow the same effort schedule".into(),
                ));
            }
        }
    }
    Ok(SearchPlan::Composite(CompositePlan {
        components: plans,
        weights,
    }))
}

/// The two §-style strategies and their true-detection curves.
#[derive(Debug, Clone)]
pub struct StrategyComparison {
    pub t_grid: Vec<f64>,
    /// Curve of the plan optimized against the condensed (mixture or
    /// moment-matched) prior.
    pub optimal_true: DetectionCurve,
    /// Curve of the weighted blend of per-component optimal plans.
    pub composite_true: DetectionCurve,
    /// `composite − optimal` per sample.
    pub difference: Vec<f64>,
}

/// Build both strategies on a shared space and compare their true detection
/// probabilities at the actual target location.
#[allow(clippy::too_many_arguments)]
pub fn compare_strategies(
    space: &SearchSpace,
    components: &[Prior],
    weights: &[f64],
    det: &DetectionModel,
    schedule: &EffortSchedule,
    truth: &GroundTruth,
    t_grid: &[f64],
    mode: CompositeMode,
) -> Result<StrategyComparison> {
    let (optimal, composite) =
        build_strategies(space, components, weights, det, schedule, t_grid, mode)?;
    let optimal_true = true_detection_curve(&optimal, truth, det, t_grid)?;
    let composite_true = true_detection_curve(&composite, truth, det, t_grid)?;
    let difference = composite_true
        .values()
        .iter()
        .zip(optimal_true.values())
        .map(|(c, o)| c - o)
        .collect();
    Ok(StrategyComparison {
        t_grid: t_grid.to_vec(),
        optimal_true,
        composite_true,
        difference,
    })
}

/// The two plans behind [`compare_strategies`]: the single-belief optimal
/// plan and the blended per-component plan, in that order.
pub fn build_strategies(
    space: &SearchSpace,
    components: &[Prior],
    weights: &[f64],
    det: &DetectionModel,
    schedule: &EffortSchedule,
    t_grid: &[f64],
    mode: CompositeMode,
) -> Result<(SearchPlan, SearchPlan)> {
    if components.is_empty() || components.len() != weights.len() {
        return Err(Error::InvalidPrior(format!(
            "{} components with {} weights",
            components.len(),
            weights.len()
        )));
    }
    let condensed = match mode {
        CompositeMode::ExactMixture => mixture_prior(components.to_vec(), weights.to_vec())?,
        CompositeMode::MomentMatched => moment_matched_gaussian(components, weights)?,
    };
    let condensed = condensed.discretize(space)?;
    let optimal = optimal_plan(&condensed, det, schedule, t_grid)?;

    let mut component_plans = Vec::with_capacity(components.len());
    for prior in components {
        let discretized = prior.discretize(space)?;
        component_plans.push(optimal_plan(&discretized, det, schedule, t_grid)?);
    }
    let composite = composite_plan(component_plans, weights.to_vec())?;
    Ok((optimal, composite))
}

fn check_weights(weights: &[f64]) -> Result<()> {
    let sum: f64 = crate::numeric::neumaier_sum(weights.iter().copied());
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument(
            "weights must be nonnegative and finite".into(),
        ));
    }
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "weights must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::prior::Prior;

    fn two_point_components() -> (Vec<Prior>, Vec<f64>) {
        (
            vec![
                Prior::DiscretePmf(vec![0.99, 0.01]),
                Prior::DiscretePmf(vec![0.17, 0.83]),
            ],
            vec![0.75, 0.25],
        )
    }

    #[test]
    fn mixture_of_two_point_priors() {
        let space = SearchSpace::discrete(2).unwrap();
        let (components, weights) = two_point_components();
        let mixture = mixture_prior(components, weights).unwrap();
        let discretized = mixture.discretize(&space).unwrap();
        // 0.75·0.99 + 0.25·0.17 = 0.785.
        assert!((discretized.value(0) - 0.785).abs() < 1e-15);
        assert!((discretized.value(1) - 0.215).abs() < 1e-15);
    }

    #[test]
    fn moment_matching_combines_variances() {
        let components = vec![
            Prior::Gaussian2D { sigma: 2.0 },
            Prior::Gaussian2D { sigma: 0.5 },
        ];
        let matched = moment_matched_gaussian(&components, &[0.5, 0.5]).unwrap();
        match matched {
            Prior::Gaussian2D { sigma } => {
                assert!((sigma - 2.125f64.sqrt()).abs() < 1e-15);
                assert!((sigma - 1.4577).abs() < 1e-4);
            }
            other => panic!("expected a Gaussian, got {other:?}"),
        }

        let uniform = vec![Prior::UniformDisc { radius: 1.0 }];
        assert!(moment_matched_gaussian(&uniform, &[1.0]).is_err());
    }

    #[test]
    fn composite_plan_blends_pointwise() {
        // Two-cell beliefs p₁=0.99, p₂=0.17, rate 0.3: above both interior
        // thresholds the blended effort at cell 0 is E/2 + 5.0832219.
        let space = SearchSpace::discrete(2).unwrap();
        let (components, weights) = two_point_components();
        let det = DetectionModel::uniform_exponential(0.3);
        let schedule = EffortSchedule::affine(15.318, 1.0).unwrap();
        let t_grid = vec![0.0, 1.0, 5.0];
        let (_, composite) = build_strategies(
            &space,
            &components,
            &weights,
            &det,
            &schedule,
            &t_grid,
            CompositeMode::ExactMixture,
        )
        .unwrap();
        for &t in &[1.0, 5.0] {
            let e = 15.318 + t;
            let got = composite.effort_at(t, 0).unwrap();
            assert!(
                (got - (e / 2.0 + 5.0832219)).abs() < 1e-6,
                "t={t}: got {got}"
            );
        }
    }

    #[test]
    fn comparison_matches_two_point_closed_forms() {
        // True-detection curves at x₀ = cell 0:
        //   single-belief plan: 1 − √(0.215/0.785)·e^{−0.15·E}
        //   blended plan:       1 − e^{−0.3·(E/2 + 5.0832219)}
        let space = SearchSpace::discrete(2).unwrap();
        let (components, weights) = two_point_components();
        let det = DetectionModel::uniform_exponential(0.3);
        let schedule = EffortSchedule::affine(15.318, 1.0).unwrap();
        let truth = GroundTruth::at_cell(&space, 0).unwrap();
        let t_grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let cmp = compare_strategies(
            &space,
            &components,
            &weights,
            &det,
            &schedule,
            &truth,
            &t_grid,
            CompositeMode::ExactMixture,
        )
        .unwrap();
        let coef_single = (0.215f64 / 0.785).sqrt();
        for (i, &t) in t_grid.iter().enumerate() {
            let e = 15.318 + t;
            let single = 1.0 - coef_single * (-0.15 * e).exp();
            let blended = 1.0 - (-0.3 * (e / 2.0 + 5.0832219)).exp();
            assert!(
                (cmp.optimal_true.values()[i] - single).abs() < 1e-8,
                "t={t}"
            );
            assert!(
                (cmp.composite_true.values()[i] - blended).abs() < 1e-8,
                "t={t}"
            );
            assert!(
                cmp.difference[i] > 0.0,
                "blended plan should win at the true location, t={t}"
            );
        }
    }

    #[test]
    fn weight_validation_rejects_bad_sums() {
        let space = SearchSpace::discrete(2).unwrap();
        let (components, _) = two_point_components();
        assert!(mixture_prior(components.clone(), vec![0.9, 0.2]).is_err());
        let det = DetectionModel::uniform_exponential(1.0);
        let schedule = EffortSchedule::linear(1.0).unwrap();
        let p1 = optimal_plan(
            &components[0].clone().discretize(&space).unwrap(),
            &det,
            &schedule,
            &[0.0, 1.0],
        )
        .unwrap();
        let p2 = optimal_plan(
            &components[1].clone().discretize(&space).unwrap(),
            &det,
            &schedule,
            &[0.0, 1.0],
        )
        .unwrap();
        assert!(composite_plan(vec![p1, p2], vec![0.6, 0.6]).is_err());
    }
}
