//! Whole-instance validation: cross-checks between prior, detection model,
//! schedule, and ground truth that the individual constructors cannot see.

use crate::domain::detection::DetectionModel;
use crate::domain::prior::DiscretizedPrior;
use crate::domain::schedule::EffortSchedule;
use crate::domain::truth::GroundTruth;
use crate::error::Result;

/// Outcome of validating a full problem instance.
///
/// `issues` are fatal inconsistencies; `notes` are non-fatal observations
/// (renormalization applied, truth placed on a zero-mass cell, ...).
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub issues: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Validate a discretized instance as a whole.
///
/// The parts were each validated at construction; this adds the
/// cross-component checks and collects advisory notes.
pub fn validate_instance(
    prior: &DiscretizedPrior,
    detection: &DetectionModel,
    schedule: &EffortSchedule,
    truth: Option<&GroundTruth>,
) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let space = prior.space();

    if let Err(e) = detection.validate(space) {
        report.issues.push(e.to_string());
    }
    if let Err(e) = schedule.validate() {
        report.issues.push(e.to_string());
    }

    let renorm = prior.renormalization();
    if (renorm - 1.0).abs() > 1e-12 {
        report.notes.push(format!(
            "prior mass renormalized by factor {renorm:.6e} during discretization"
        ));
    }

    if let Some(truth) = truth {
        if truth.cell() >= space.cells() {
            report.issues.push(format!(
                "ground-truth cell {} out of range for {} cells",
                truth.cell(),
                space.cells()
            ));
        } else if truth.outside_prior_support(prior) {
            report.notes.push(format!(
                "ground truth sits in cell {} where the searcher's prior mass is zero; \
                 subjective and true detection will disagree structurally",
                truth.cell()
            ));
        }
    }

    Ok(report)
}
