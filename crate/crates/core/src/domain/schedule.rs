//! Cumulative search-effort schedules `E(t)`.

use crate::error::{Error, Result};
use crate::numeric::interp_linear;

/// Total effort available up to time `t`. Nondecreasing with `E(0) >= 0`
/// and `E(t) > 0` for `t > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum EffortSchedule {
    /// `E(t) = rate · t`.
    Linear { rate: f64 },
    /// `E(t) = offset + rate · t`.
    Affine { offset: f64, rate: f64 },
    /// Piecewise-linear interpolation of `(t, E)` samples; clamped beyond
    /// the last sample.
    Table { samples: Vec<(f64, f64)> },
}

impl EffortSchedule {
    pub fn linear(rate: f64) -> Result<Self> {
        let s = Self::Linear { rate };
        s.validate()?;
        Ok(s)
    }

    pub fn affine(offset: f64, rate: f64) -> Result<Self> {
        let s = Self::Affine { offset, rate };
        s.validate()?;
        Ok(s)
    }

    pub fn table(samples: Vec<(f64, f64)>) -> Result<Self> {
        let s = Self::Table { samples };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Linear { rate } => {
                if !(*rate > 0.0) || !rate.is_finite() {
                    return Err(Error::InvalidSchedule(format!(
                        "linear rate must be positive and finite, got {rate}"
                    )));
                }
            }
            Self::Affine { offset, rate } => {
                if !(*offset >= 0.0) || !offset.is_finite() {
                    return Err(Error::InvalidSchedule(format!(
                        "affine offset must be >= 0 and finite, got {offset}"
                    )));
                }
                if !(*rate > 0.0) || !rate.is_finite() {
                    return Err(Error::InvalidSchedule(format!(
                        "affine rate must be positive and finite, got {rate}"
                    )));
                }
            }
            Self::Table { samples } => {
                if samples.len() < 2 {
                    return Err(Error::InvalidSchedule(
                        "table schedules need at least two samples".into(),
                    ));
                }
                if samples[0].0 != 0.0 {
                    return Err(Error::InvalidSchedule(
                        "table schedules must start at t = 0".into(),
                    ));
                }
                if !(samples[0].1 >= 0.0) {
                    return Err(Error::InvalidSchedule("E(0) must be >= 0".into()));
                }
                for pair in samples.windows(2) {
                    if !(pair[1].0 > pair[0].0) {
                        return Err(Error::InvalidSchedule(
                            "table times must be strictly increasing".into(),
                        ));
                    }
                    if pair[1].1 < pair[0].1 {
                        return Err(Error::InvalidSchedule(
                            "table effort must be nondecreasing".into(),
                        ));
                    }
                }
                if !(samples[1].1 > 0.0) {
                    return Err(Error::InvalidSchedule(
                        "effort must become positive for t > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Cumulative effort at time `t >= 0`.
    pub fn effort(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time must be >= 0 and finite, got {t}"
            )));
        }
        Ok(match self {
            Self::Linear { rate } => rate * t,
            Self::Affine { offset, rate } => offset + rate * t,
            Self::Table { samples } => {
                let ts: Vec<f64> = samples.iter().map(|p| p.0).collect();
                let es: Vec<f64> = samples.iter().map(|p| p.1).collect();
                interp_linear(&ts, &es, t)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_affine_evaluate() {
        let lin = EffortSchedule::linear(2.0).unwrap();
        assert_eq!(lin.effort(0.0).unwrap(), 0.0);
        assert_eq!(lin.effort(3.0).unwrap(), 6.0);

        let aff = EffortSchedule::affine(1.5, 1.0).unwrap();
        assert_eq!(aff.effort(0.0).unwrap(), 1.5);
        assert_eq!(aff.effort(2.0).unwrap(), 3.5);
    }

    #[test]
    fn table_interpolates_and_clamps() {
        let tab = EffortSchedule::table(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 2.0)]).unwrap();
        assert_eq!(tab.effort(0.5).unwrap(), 1.0);
        assert_eq!(tab.effort(2.0).unwrap(), 2.0);
        assert_eq!(tab.effort(10.0).unwrap(), 2.0);
    }

    #[test]
    fn invalid_schedules_are_rejected() {
        assert!(EffortSchedule::linear(0.0).is_err());
        assert!(EffortSchedule::affine(-1.0, 1.0).is_err());
        assert!(EffortSchedule::table(vec![(0.0, 0.0)]).is_err());
        assert!(EffortSchedule::table(vec![(0.0, 1.0), (1.0, 0.5)]).is_err());
        assert!(EffortSchedule::table(vec![(0.5, 0.0), (1.0, 1.0)]).is_err());
        let lin = EffortSchedule::linear(1.0).unwrap();
        assert!(lin.effort(-1.0).is_err());
    }
}
