//! Optimal-search toolkit: water-filling effort allocation, detection-curve
//! evaluation, and the gap between a searcher's believed success probability
//! and the probability a bystander who knows the target's location would
//! assign.
//!
//! The central object is the budget-indexed family of effort allocations
//! that maximize believed detection probability under a prior and a
//! regular detection model. [`allocator`] computes that family; [`evaluator`]
//! turns plans into subjective and true detection curves and mean detection
//! times; [`composite`] mixes heterogeneous beliefs; [`oracle`] provides
//! independent cross-checks (enumeration, Monte Carlo, closed forms) used by
//! the test suites.

pub mod allocator;
pub mod composite;
pub mod domain;
pub mod error;
pub mod evaluator;
pub mod numeric;
pub mod oracle;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
