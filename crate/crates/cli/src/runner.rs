//! Command execution: translate a scenario into domain objects, run the
//! requested computation, and write the artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use searchlight_core::allocator::{clairvoyant_plan, optimal_plan};
use searchlight_core::composite::{
    build_strategies, moment_matched_gaussian, CompositeMode, StrategyComparison,
};
use searchlight_core::domain::{
    DetectionModel, DiscretizedPrior, GroundTruth, Prior, SearchPlan, SearchSpace,
};
use searchlight_core::domain::schedule::EffortSchedule;
use searchlight_core::evaluator::{
    detection_curves, mean_time_subjective, mean_time_true, DetectionCurve, MeanTimeResult,
};
use searchlight_core::oracle::{closed_form_reference, ReferencePoint};
use searchlight_core::Tolerances;

use crate::config::{build_prior, prior_components, ModeConfig, PlanConfig, ScenarioConfig};
use crate::error::CliError;
use crate::output;
use crate::scenarios::{bundled, BundledScenario, SuiteCheck};

/// Scenario-driven subcommands. The bundled-suite runner is
/// [`run_examples`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Plan,
    Curves,
    Compare,
    MeanTime,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Condense mixture beliefs by moment matching instead of using the
    /// exact mixture.
    pub paper_mode: bool,
    /// Recorded into JSON summaries; no current command draws random numbers.
    pub seed: Option<u64>,
    /// Report divergent mean times as data instead of failing.
    pub allow_divergent: bool,
}

/// A scenario file resolved into domain objects.
struct Scenario {
    config: ScenarioConfig,
    space: SearchSpace,
    prior: DiscretizedPrior,
    det: DetectionModel,
    schedule: EffortSchedule,
    truth: Option<GroundTruth>,
    t_grid: Vec<f64>,
}

impl Scenario {
    fn from_config(config: ScenarioConfig) -> Result<Self, CliError> {
        let space = config.build_space()?;
        let prior = build_prior(&config.prior)?.discretize(&space)?;
        let det = config.build_detection(&space)?;
        let schedule = config.build_schedule()?;
        let truth = config.build_truth(&space)?;
        let t_grid = config.time.t_grid();
        Ok(Self {
            config,
            space,
            prior,
            det,
            schedule,
            truth,
            t_grid,
        })
    }

    fn truth_required(&self) -> Result<&GroundTruth, CliError> {
        self.truth
            .as_ref()
            .ok_or_else(|| CliError::Validation("this command needs a `truth` entry".into()))
    }

    /// The condensing mode for composite plans, honoring `--paper-mode`.
    fn composite_mode(&self, mode: ModeConfig, paper_mode: bool) -> CompositeMode {
        if paper_mode {
            CompositeMode::MomentMatched
        } else {
            match mode {
                ModeConfig::ExactMixture => CompositeMode::ExactMixture,
                ModeConfig::MomentMatched => CompositeMode::MomentMatched,
            }
        }
    }

    /// Build one plan from its config entry. The composite entry yields the
    /// condensed-belief plan; `compare` builds the blended one separately.
    fn build_plan(&self, plan: &PlanConfig, paper_mode: bool) -> Result<SearchPlan, CliError> {
        let plan = match plan {
            PlanConfig::Optimal => {
                optimal_plan(&self.prior, &self.det, &self.schedule, &self.t_grid)?
            }
            PlanConfig::OptimalFor { prior } => {
                let belief = build_prior(prior)?.discretize(&self.space)?;
                optimal_plan(&belief, &self.det, &self.schedule, &self.t_grid)?
            }
            PlanConfig::Clairvoyant => {
                clairvoyant_plan(&self.space, self.truth_required()?, &self.schedule)?
            }
            PlanConfig::Composite { mode } => {
                let condensed = match self.composite_mode(*mode, paper_mode) {
                    CompositeMode::ExactMixture => self.prior.clone(),
                    CompositeMode::MomentMatched => {
                        let (components, weights) = prior_components(&self.config.prior)?;
                        moment_matched_gaussian(&components, &weights)?.discretize(&self.space)?
                    }
                };
                optimal_plan(&condensed, &self.det, &self.schedule, &self.t_grid)?
            }
            PlanConfig::ThresholdSplit { threshold } => {
                SearchPlan::threshold_split(&self.space, *threshold, &self.schedule)?
            }
            PlanConfig::CoreAnnulus { sigma, rate } => {
                SearchPlan::core_annulus(&self.space, *sigma, *rate)?
            }
        };
        Ok(plan)
    }
}

/// The curves the `curves` command writes.
struct CurveSet {
    subjective: DetectionCurve,
    true_prob: DetectionCurve,
    alt: Option<(DetectionCurve, DetectionCurve)>,
}

#[derive(Serialize)]
struct MeanTimeColumn {
    value: Option<f64>,
    divergent: bool,
}

impl From<&MeanTimeResult> for MeanTimeColumn {
    fn from(r: &MeanTimeResult) -> Self {
        Self {
            value: r.value(),
            divergent: r.is_divergent(),
        }
    }
}

#[derive(Serialize)]
struct MeanTimeSummary {
    name: String,
    seed: Option<u64>,
    subjective: MeanTimeColumn,
    #[serde(rename = "true")]
    true_time: MeanTimeColumn,
}

/// Run one scenario-driven command against a file; returns the artifacts
/// written.
pub fn run_file(
    command: Command,
    path: &Path,
    options: &RunOptions,
) -> Result<Vec<PathBuf>, CliError> {
    let text = fs::read_to_string(path)?;
    let config = ScenarioConfig::from_json(&text)?;
    run_config(command, config, options)
}

fn run_config(
    command: Command,
    config: ScenarioConfig,
    options: &RunOptions,
) -> Result<Vec<PathBuf>, CliError> {
    let scenario = Scenario::from_config(config)?;
    match command {
        Command::Plan => cmd_plan(&scenario, options),
        Command::Curves => cmd_curves(&scenario, options).map(|(paths, _)| paths),
        Command::Compare => cmd_compare(&scenario, options).map(|(paths, _)| paths),
        Command::MeanTime => cmd_mean_time(&scenario, options).map(|(paths, _, _)| paths),
    }
}

/// Allocation snapshots at the start, middle, and end of the time range.
fn cmd_plan(s: &Scenario, options: &RunOptions) -> Result<Vec<PathBuf>, CliError> {
    let plan = s.build_plan(&s.config.plan, options.paper_mode)?;
    let mut ts = vec![
        s.t_grid[0],
        s.t_grid[s.t_grid.len() / 2],
        s.t_grid[s.t_grid.len() - 1],
    ];
    ts.dedup();
    let mut snapshots = Vec::with_capacity(ts.len());
    for t in ts {
        snapshots.push((t, plan.allocation_at(t)?));
    }
    let csv = output::plan_csv(&s.space, &snapshots);
    let path = output::artifact_path(&options.out_dir, &s.config.name, "plan", "csv");
    output::write_atomic(&path, csv.as_bytes())?;
    Ok(vec![path])
}

fn compute_curves(s: &Scenario, options: &RunOptions) -> Result<CurveSet, CliError> {
    let truth = s.truth_required()?;
    let plan = s.build_plan(&s.config.plan, options.paper_mode)?;
    let (subjective, true_prob) =
        detection_curves(&plan, &s.prior, truth, &s.det, &s.t_grid)?;
    let alt = match &s.config.alt_plan {
        None => None,
        Some(alt_config) => {
            let alt_plan = s.build_plan(alt_config, options.paper_mode)?;
            Some(detection_curves(
                &alt_plan, &s.prior, truth, &s.det, &s.t_grid,
            )?)
        }
    };
    Ok(CurveSet {
        subjective,
        true_prob,
        alt,
    })
}

fn cmd_curves(
    s: &Scenario,
    options: &RunOptions,
) -> Result<(Vec<PathBuf>, CurveSet), CliError> {
    let curves = compute_curves(s, options)?;
    let csv = output::curves_csv(
        &s.t_grid,
        &curves.subjective,
        &curves.true_prob,
        curves.alt.as_ref().map(|(a, b)| (a, b)),
    );
    let path = output::artifact_path(&options.out_dir, &s.config.name, "curves", "csv");
    output::write_atomic(&path, csv.as_bytes())?;
    Ok((vec![path], curves))
}

fn cmd_compare(
    s: &Scenario,
    options: &RunOptions,
) -> Result<(Vec<PathBuf>, StrategyComparison), CliError> {
    let mode = match &s.config.plan {
        PlanConfig::Composite { mode } => s.composite_mode(*mode, options.paper_mode),
        _ => {
            return Err(CliError::Validation(
                "`compare` needs a composite plan entry".into(),
            ))
        }
    };
    let truth = s.truth_required()?;
    let (components, weights) = prior_components(&s.config.prior)?;
    let comparison = build_comparison(s, &components, &weights, truth, mode)?;
    let csv = output::compare_csv(
        &s.t_grid,
        &comparison.optimal_true,
        &comparison.composite_true,
        &comparison.difference,
    );
    let path = output::artifact_path(&options.out_dir, &s.config.name, "compare", "csv");
    output::write_atomic(&path, csv.as_bytes())?;
    Ok((vec![path], comparison))
}

fn build_comparison(
    s: &Scenario,
    components: &[Prior],
    weights: &[f64],
    truth: &GroundTruth,
    mode: CompositeMode,
) -> Result<StrategyComparison, CliError> {
    let (optimal, composite) = build_strategies(
        &s.space,
        components,
        weights,
        &s.det,
        &s.schedule,
        &s.t_grid,
        mode,
    )?;
    let optimal_true =
        searchlight_core::evaluator::true_detection_curve(&optimal, truth, &s.det, &s.t_grid)?;
    let composite_true =
        searchlight_core::evaluator::true_detection_curve(&composite, truth, &s.det, &s.t_grid)?;
    let difference = composite_true
        .values()
        .iter()
        .zip(optimal_true.values())
        .map(|(c, o)| c - o)
        .collect();
    Ok(StrategyComparison {
        t_grid: s.t_grid.clone(),
        optimal_true,
        composite_true,
        difference,
    })
}

fn cmd_mean_time(
    s: &Scenario,
    options: &RunOptions,
) -> Result<(Vec<PathBuf>, MeanTimeResult, MeanTimeResult), CliError> {
    let truth = s.truth_required()?;
    let plan = s.build_plan(&s.config.plan, options.paper_mode)?;
    let tol = Tolerances::default();
    let subjective = mean_time_subjective(&plan, &s.prior, &s.det, &tol)?;
    let true_time = mean_time_true(&plan, truth, &s.det, &tol)?;
    let summary = MeanTimeSummary {
        name: s.config.name.clone(),
        seed: options.seed.or(s.config.seed),
        subjective: (&subjective).into(),
        true_time: (&true_time).into(),
    };
    let mut bytes = serde_json::to_vec_pretty(&summary)
        .map_err(|e| CliError::Validation(format!("summary serialization: {e}")))?;
    bytes.push(b'\n');
    let path = output::artifact_path(&options.out_dir, &s.config.name, "mean_time", "json");
    output::write_atomic(&path, &bytes)?;
    if (subjective.is_divergent() || true_time.is_divergent()) && !options.allow_divergent {
        return Err(CliError::Divergent(format!(
            "mean time to detection diverges for `{}` (summary written to {}); \
             pass --allow-divergent to report it as data",
            s.config.name,
            path.display()
        )));
    }
    Ok((vec![path], subjective, true_time))
}

/// Outcome of one bundled-suite check.
#[derive(Debug, Serialize)]
pub struct CheckOutcome {
    pub scenario: &'static str,
    pub check: &'static str,
    pub passed: bool,
    /// Worst closed-form deviation observed, when the check measures one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_err: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckOutcome {
    fn pass(scenario: &'static str, check: &'static str, max_abs_err: Option<f64>) -> Self {
        Self {
            scenario,
            check,
            passed: true,
            max_abs_err,
            detail: String::new(),
        }
    }

    fn fail(
        scenario: &'static str,
        check: &'static str,
        max_abs_err: Option<f64>,
        detail: String,
    ) -> Self {
        Self {
            scenario,
            check,
            passed: false,
            max_abs_err,
            detail,
        }
    }

    /// One human-readable report line.
    pub fn line(&self) -> String {
        let status = if self.passed { "pass" } else { "FAIL" };
        let mut line = format!("{:<24} {:<20} {}", self.scenario, self.check, status);
        if let Some(err) = self.max_abs_err {
            line.push_str(&format!(" (max abs err {err:.3e})"));
        }
        if !self.detail.is_empty() {
            line.push_str(&format!(" — {}", self.detail));
        }
        line
    }
}

#[derive(Serialize)]
struct SuiteReport<'a> {
    passed: usize,
    failed: usize,
    checks: &'a [CheckOutcome],
}

/// Run every bundled scenario, hold it against its closed form, and write
/// `examples_report.json`. Failed checks are reported in the returned
/// outcomes; the caller decides the exit code.
pub fn run_examples(options: &RunOptions) -> Result<Vec<CheckOutcome>, CliError> {
    let mut outcomes = Vec::new();
    for bundle in bundled() {
        run_bundle(bundle, options, &mut outcomes)?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let report = SuiteReport {
        passed: outcomes.len() - failed,
        failed,
        checks: &outcomes,
    };
    let mut bytes = serde_json::to_vec_pretty(&report)
        .map_err(|e| CliError::Validation(format!("report serialization: {e}")))?;
    bytes.push(b'\n');
    output::write_atomic(&options.out_dir.join("examples_report.json"), &bytes)?;
    Ok(outcomes)
}

/// The suite pins each scenario's condensing mode and divergence handling;
/// global `--paper-mode`, `--seed`, and `--allow-divergent` do not alter it.
fn run_bundle(
    bundle: &BundledScenario,
    options: &RunOptions,
    outcomes: &mut Vec<CheckOutcome>,
) -> Result<(), CliError> {
    let config = ScenarioConfig::from_json(bundle.json)?;
    let scenario = Scenario::from_config(config)?;
    let suite_options = RunOptions {
        out_dir: options.out_dir.clone(),
        paper_mode: bundle.paper_mode,
        seed: None,
        allow_divergent: true,
    };
    let reference: Vec<ReferencePoint> = scenario
        .t_grid
        .iter()
        .map(|&t| closed_form_reference(bundle.reference(), t))
        .collect::<Result<_, _>>()?;
    for check in bundle.checks {
        let outcome = match check {
            SuiteCheck::CurvesMatch { tol } => {
                let (_, curves) = cmd_curves(&scenario, &suite_options)?;
                check_curves(bundle.name, &curves, &reference, *tol)
            }
            SuiteCheck::CompareMatch { tol } => {
                let (_, comparison) = cmd_compare(&scenario, &suite_options)?;
                check_compare(bundle.name, &scenario.t_grid, &comparison, &reference, *tol)
            }
            SuiteCheck::MeanTimes { expect, tol } => {
                let (_, subjective, true_time) = cmd_mean_time(&scenario, &suite_options)?;
                check_mean_times(bundle.name, &subjective, &true_time, *expect, *tol)
            }
            SuiteCheck::MeanTimeDivergent => {
                let (_, _, true_time) = cmd_mean_time(&scenario, &suite_options)?;
                if true_time.is_divergent() {
                    CheckOutcome::pass(bundle.name, "mean_time_divergent", None)
                } else {
                    CheckOutcome::fail(
                        bundle.name,
                        "mean_time_divergent",
                        None,
                        format!("expected divergence, got {:?}", true_time.value()),
                    )
                }
            }
        };
        outcomes.push(outcome);
    }
    Ok(())
}

/// Compare every curve column that has a registered closed form.
fn check_curves(
    name: &'static str,
    curves: &CurveSet,
    reference: &[ReferencePoint],
    tol: f64,
) -> CheckOutcome {
    let mut max_err = 0.0f64;
    let mut detail = String::new();
    let mut column = |label: &str, got: Option<&DetectionCurve>, want: &dyn Fn(&ReferencePoint) -> Option<f64>| {
        for (i, point) in reference.iter().enumerate() {
            let Some(want) = want(point) else { continue };
            let Some(curve) = got else {
                detail = format!("reference has a {label} column but the scenario computed none");
                return;
            };
            let err = (curve.values()[i] - want).abs();
            if err > max_err {
                max_err = err;
                if err > tol && detail.is_empty() {
                    detail = format!("{label} off by {err:.3e} at sample {i}");
                }
            }
        }
    };
    column("P_subjective", Some(&curves.subjective), &|p| p.subjective);
    column("P_true", Some(&curves.true_prob), &|p| p.true_prob);
    column("P_subjective_alt", curves.alt.as_ref().map(|(a, _)| a), &|p| {
        p.subjective_alt
    });
    column("P_true_alt", curves.alt.as_ref().map(|(_, b)| b), &|p| p.true_alt);
    if max_err <= tol && detail.is_empty() {
        CheckOutcome::pass(name, "curves", Some(max_err))
    } else {
        CheckOutcome::fail(name, "curves", Some(max_err), detail)
    }
}

/// Both strategy curves must match their closed forms, and the blended plan
/// must stay strictly ahead after t = 0.
fn check_compare(
    name: &'static str,
    t_grid: &[f64],
    comparison: &StrategyComparison,
    reference: &[ReferencePoint],
    tol: f64,
) -> CheckOutcome {
    let mut max_err = 0.0f64;
    let mut detail = String::new();
    for (i, point) in reference.iter().enumerate() {
        let (Some(want_optimal), Some(want_composite)) = (point.true_prob, point.true_alt) else {
            return CheckOutcome::fail(
                name,
                "compare",
                None,
                format!("no registered strategy curves at sample {i}"),
            );
        };
        let err_o = (comparison.optimal_true.values()[i] - want_optimal).abs();
        let err_c = (comparison.composite_true.values()[i] - want_composite).abs();
        max_err = max_err.max(err_o).max(err_c);
        let diff = comparison.difference[i];
        let ordered = if t_grid[i] > 0.0 { diff > 0.0 } else { diff >= 0.0 };
        if !ordered && detail.is_empty() {
            detail = format!("blended plan not ahead at t={} (diff {diff:.3e})", t_grid[i]);
        }
    }
    if max_err > tol && detail.is_empty() {
        detail = format!("strategy curve off by {max_err:.3e}");
    }
    if max_err <= tol && detail.is_empty() {
        CheckOutcome::pass(name, "compare", Some(max_err))
    } else {
        CheckOutcome::fail(name, "compare", Some(max_err), detail)
    }
}

fn check_mean_times(
    name: &'static str,
    subjective: &MeanTimeResult,
    true_time: &MeanTimeResult,
    expect: (f64, f64),
    tol: f64,
) -> CheckOutcome {
    let (Some(mu), Some(mu_true)) = (subjective.value(), true_time.value()) else {
        return CheckOutcome::fail(
            name,
            "mean_times",
            None,
            "expected both mean times to converge".into(),
        );
    };
    let err = (mu - expect.0).abs().max((mu_true - expect.1).abs());
    if err <= tol {
        CheckOutcome::pass(name, "mean_times", Some(err))
    } else {
        CheckOutcome::fail(
            name,
            "mean_times",
            Some(err),
            format!("got ({mu:.6}, {mu_true:.6}), expected {expect:?}"),
        )
    }
}
