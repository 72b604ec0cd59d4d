//! Problem-domain types: search spaces, priors, detection models, effort
//! schedules, allocations, plans, and ground truth.

pub mod allocation;
pub mod detection;
pub mod plan;
pub mod prior;
pub mod schedule;
pub mod space;
pub mod truth;
pub mod validate;

pub use allocation::Allocation;
pub use detection::{DetectionModel, RateField};
pub use plan::{SampledPlan, SearchPlan};
pub use prior::{DiscretizedPrior, Prior};
pub use schedule::EffortSchedule;
pub use space::{Grid, SearchSpace};
pub use truth::GroundTruth;
pub use validate::{validate_instance, ValidationReport};
