//! Central numeric-tolerance configuration.
//!
//! Every hard-coded threshold used by the solvers and checks lives here so
//! the values can be audited (and overridden per run) in one place.

/// Numeric tolerances and solver limits.
///
/// All relative tolerances are dimensionless; absolute tolerances carry the
/// unit of the quantity they bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Allowed |mass − 1| for a prior before construction fails.
    pub prior_mass: f64,
    /// Allowed |Σ weights − 1| for mixture weights.
    pub mixture_weight: f64,
    /// Budget residual bound, relative to max(1, budget).
    pub budget_rel: f64,
    /// Equalized-marginal-rate spread bound, relative to the multiplier.
    pub kkt_rel: f64,
    /// Relative width of the multiplier bracket at which bisection stops.
    pub lambda_rel: f64,
    /// Maximum outer bisection iterations for the multiplier solve.
    pub max_bisect_iter: usize,
    /// Relative tolerance for per-location inner inversions (general models).
    pub inner_inverse_rel: f64,
    /// Plan feasibility residual bound, relative to max(1, budget).
    pub feasibility_rel: f64,
    /// Absolute tolerance handed to the adaptive time quadrature.
    pub mean_time_abs: f64,
    /// Survival level below which the time integral is truncated and a
    /// fitted exponential tail is appended.
    pub tail_threshold: f64,
    /// Survival level that must be reached by `time_hard_cap`, otherwise the
    /// mean time is reported as divergent.
    pub divergence_threshold: f64,
    /// Hard upper limit for the time-integration horizon.
    pub time_hard_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            prior_mass: 1e-9,
            mixture_weight: 1e-12,
            budget_rel: 1e-9,
            kkt_rel: 1e-8,
            lambda_rel: 1e-12,
            max_bisect_iter: 200,
            inner_inverse_rel: 1e-13,
            feasibility_rel: 1e-9,
            mean_time_abs: 1e-7,
            tail_threshold: 1e-8,
            divergence_threshold: 1e-3,
            time_hard_cap: 1e4,
        }
    }
}
