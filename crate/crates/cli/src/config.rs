//! Scenario file schema and its translation into domain objects.
//!
//! Scenarios are strict JSON: unknown keys are rejected so a typo fails
//! loudly instead of silently running a different experiment.

use serde::{Deserialize, Serialize};

use searchlight_core::domain::detection::RateField;
use searchlight_core::domain::schedule::EffortSchedule;
use searchlight_core::domain::space::Grid;
use searchlight_core::domain::{DetectionModel, GroundTruth, Prior, SearchSpace};

use crate::error::CliError;

/// Schema revision this build understands.
pub const SCENARIO_VERSION: u32 = 1;

/// A parsed scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Schema revision; must equal [`SCENARIO_VERSION`].
    pub version: u32,
    /// Output-file stem and display name.
    pub name: String,
    pub space: SpaceConfig,
    pub prior: PriorConfig,
    pub detection: DetectionConfig,
    pub schedule: ScheduleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthConfig>,
    pub plan: PlanConfig,
    /// Optional second plan evaluated alongside the primary one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alt_plan: Option<PlanConfig>,
    pub time: TimeConfig,
    /// Seed recorded into outputs; CLI `--seed` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    /// Finite cell list.
    Discrete { cells: usize },
    /// Odd-count square grid with `center` an exact cell centre.
    CenteredSquare {
        center: [f64; 2],
        halfwidth: f64,
        resolution: f64,
    },
    /// Rectangular grid on `[lower, upper]`.
    Rect {
        lower: [f64; 2],
        upper: [f64; 2],
        resolution: f64,
    },
    /// One-dimensional grid on `[lower, upper]`.
    Line {
        lower: f64,
        upper: f64,
        resolution: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorConfig {
    DiscretePmf { pmf: Vec<f64> },
    Gaussian { sigma: f64 },
    UniformDisc { radius: f64 },
    UniformInterval { a: f64, b: f64 },
    Mixture {
        components: Vec<PriorConfig>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetectionConfig {
    /// `d(x,y) = 1 − e^{−rate·y}` everywhere.
    Exponential { rate: f64 },
    /// Per-cell exponential rates, aligned with the space enumeration.
    ExponentialPerCell { rates: Vec<f64> },
    /// Exponential with the rate equal to the cell's first coordinate.
    ExponentialCoordinateRate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Linear { rate: f64 },
    Affine { offset: f64, rate: f64 },
    Table { samples: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TruthConfig {
    Cell { cell: usize },
    Point { point: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    /// Optimize against the exact mixture belief.
    ExactMixture,
    /// Optimize against a single Gaussian matching the mixture's variance.
    MomentMatched,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlanConfig {
    /// Budget split optimally against the scenario prior at every t.
    Optimal,
    /// Optimal against a different belief than the scenario prior — used to
    /// study plans built from a wrong hypothesis.
    OptimalFor { prior: Box<PriorConfig> },
    /// All effort on the target's actual cell.
    Clairvoyant,
    /// Condensed-belief plan together with the blended per-component plan;
    /// requires a mixture prior. `compare` runs both.
    Composite { mode: ModeConfig },
    /// Two-cell competitor: even split while the budget is below `threshold`,
    /// after which the first cell keeps a constant lead of `threshold` and
    /// further effort splits evenly.
    ThresholdSplit { threshold: f64 },
    /// Shrinking-core construction on a Gaussian instance.
    CoreAnnulus { sigma: f64, rate: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Final sample time.
    pub end: f64,
    /// Number of uniform steps; the grid has `samples + 1` points from 0.
    pub samples: usize,
}

impl TimeConfig {
    pub fn t_grid(&self) -> Vec<f64> {
        (0..=self.samples)
            .map(|i| self.end * i as f64 / self.samples as f64)
            .collect()
    }
}

impl ScenarioConfig {
    /// Parse strict JSON.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Validation(format!("scenario parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != SCENARIO_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported scenario version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(CliError::Validation(format!(
                "scenario name {:?} must be a nonempty [A-Za-z0-9_-]+ token",
                self.name
            )));
        }
        if !(self.time.end > 0.0) || self.time.samples == 0 {
            return Err(CliError::Validation(
                "time range needs end > 0 and samples >= 1".into(),
            ));
        }
        if matches!(self.plan, PlanConfig::Composite { .. })
            && !matches!(self.prior, PriorConfig::Mixture { .. })
        {
            return Err(CliError::Validation(
                "composite plans need a mixture prior".into(),
            ));
        }
        Ok(())
    }

    pub fn build_space(&self) -> Result<SearchSpace, CliError> {
        let space = match &self.space {
            SpaceConfig::Discrete { cells } => SearchSpace::discrete(*cells)?,
            SpaceConfig::CenteredSquare {
                center,
                halfwidth,
                resolution,
            } => SearchSpace::Grid(Grid::centered_square(*center, *halfwidth, *resolution)?),
            SpaceConfig::Rect {
                lower,
                upper,
                resolution,
            } => SearchSpace::Grid(Grid::new_2d(*lower, *upper, *resolution)?),
            SpaceConfig::Line {
                lower,
                upper,
                resolution,
            } => SearchSpace::Grid(Grid::new_1d(*lower, *upper, *resolution)?),
        };
        Ok(space)
    }

    pub fn build_detection(&self, space: &SearchSpace) -> Result<DetectionModel, CliError> {
        let det = match &self.detection {
            DetectionConfig::Exponential { rate } => DetectionModel::uniform_exponential(*rate),
            DetectionConfig::ExponentialPerCell { rates } => {
                DetectionModel::ExponentialRate(RateField::PerCell(rates.clone()))
            }
            DetectionConfig::ExponentialCoordinateRate => {
                let rates = (0..space.cells()).map(|i| space.center(i)[0]).collect();
                DetectionModel::ExponentialRate(RateField::PerCell(rates))
            }
        };
        det.validate(space)?;
        Ok(det)
    }

    pub fn build_schedule(&self) -> Result<EffortSchedule, CliError> {
        let schedule = match &self.schedule {
            ScheduleConfig::Linear { rate } => EffortSchedule::linear(*rate)?,
            ScheduleConfig::Affine { offset, rate } => EffortSchedule::affine(*offset, *rate)?,
            ScheduleConfig::Table { samples } => EffortSchedule::table(samples.clone())?,
        };
        Ok(schedule)
    }

    pub fn build_truth(&self, space: &SearchSpace) -> Result<Option<GroundTruth>, CliError> {
        match &self.truth {
            None => Ok(None),
            Some(TruthConfig::Cell { cell }) => Ok(Some(GroundTruth::at_cell(space, *cell)?)),
            Some(TruthConfig::Point { point }) => Ok(Some(GroundTruth::at_point(space, *point)?)),
        }
    }
}

pub fn build_prior(config: &PriorConfig) -> Result<Prior, CliError> {
    let prior = match config {
        PriorConfig::DiscretePmf { pmf } => Prior::DiscretePmf(pmf.clone()),
        PriorConfig::Gaussian { sigma } => Prior::Gaussian2D { sigma: *sigma },
        PriorConfig::UniformDisc { radius } => Prior::UniformDisc { radius: *radius },
        PriorConfig::UniformInterval { a, b } => Prior::UniformInterval { a: *a, b: *b },
        PriorConfig::Mixture {
            components,
            weights,
        } => {
            let built: Result<Vec<Prior>, CliError> = components.iter().map(build_prior).collect();
            Prior::mixture(built?, weights.clone())?
        }
    };
    Ok(prior)
}

/// The mixture parts of a prior, or the prior itself as a single component.
pub fn prior_components(config: &PriorConfig) -> Result<(Vec<Prior>, Vec<f64>), CliError> {
    match config {
        PriorConfig::Mixture {
            components,
            weights,
        } => {
            let built: Result<Vec<Prior>, CliError> = components.iter().map(build_prior).collect();
            Ok((built?, weights.clone()))
        }
        other => Ok((vec![build_prior(other)?], vec![1.0])),
    }
}
