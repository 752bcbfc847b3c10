//! Interaction strength along a curve.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Strength `ω` as a function of arc length along a curve.
#[derive(Debug, Clone, PartialEq)]
pub enum StrengthProfile {
    Constant(f64),
    /// Values at strictly increasing arc lengths, linearly interpolated and
    /// held constant beyond the table ends.
    Tabulated { arc_length: Vec<f64>, values: Vec<f64> },
}

impl StrengthProfile {
    pub fn tabulated(arc_length: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if arc_length.is_empty() || arc_length.len() != values.len() {
            return Err(Error::invalid(
                "strength table: arc lengths and values must be non-empty and equally long",
            ));
        }
        if arc_length.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("strength table: arc lengths must be strictly increasing"));
        }
        if arc_length.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("strength table: entries must be finite"));
        }
        Ok(StrengthProfile::Tabulated { arc_length, values })
    }

    pub fn at(&self, s: f64) -> f64 {
        match self {
            StrengthProfile::Constant(w) => *w,
            StrengthProfile::Tabulated { arc_length, values } => {
                let n = arc_length.len();
                if n == 1 || s <= arc_length[0] {
                    return values[0];
                }
                if s >= arc_length[n - 1] {
                    return values[n - 1];
                }
                let i = arc_length.partition_point(|&x| x <= s) - 1;
                let t = (s - arc_length[i]) / (arc_length[i + 1] - arc_length[i]);
                values[i] + t * (values[i + 1] - values[i])
            }
        }
    }

    /// Checks that a table spans `[0, length]` up to `tol`. Constants cover
    /// everything.
    pub fn check_covers(&self, length: f64, tol: f64) -> Result<()> {
        match self {
            StrengthProfile::Constant(_) => Ok(()),
            StrengthProfile::Tabulated { arc_length, .. } => {
                let first = arc_length[0];
                let last = arc_length[arc_length.len() - 1];
                if first <= tol && last >= length - tol {
                    Ok(())
                } else {
                    Err(Error::invalid(alloc::format!(
                        "strength table covers [{first}, {last}] but the curve has length {length}"
                    )))
                }
            }
        }
    }

    /// `factor · ω`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            StrengthProfile::Constant(w) => StrengthProfile::Constant(factor * w),
            StrengthProfile::Tabulated { arc_length, values } => StrengthProfile::Tabulated {
                arc_length: arc_length.clone(),
                values: values.iter().map(|v| factor * v).collect(),
            },
        }
    }

    /// Largest value of the profile.
    pub fn max(&self) -> f64 {
        match self {
            StrengthProfile::Constant(w) => *w,
            StrengthProfile::Tabulated { values, .. } => {
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }
}
