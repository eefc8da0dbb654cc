//! The observed sample and its basic validation.

use crate::error::{data, Result};

/// How exact ties in the observations are treated.
///
/// The asymptotic theory behind the tests assumes continuous marginal
/// distributions, under which ties have probability zero. Real data may carry
/// ties anyway (rounding, discreteness).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Resolve ties by mid-ranks in every rank transform and record a warning
    /// in the report. On tie-free data this is bit-identical to the plain
    /// `count of values <= x` definition.
    #[default]
    MidRank,
    /// Reject tied input with a data error.
    Reject,
}

/// An ordered stretch `X_1, ..., X_N` of real observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    name: Option<String>,
}

impl Series {
    /// Validates that all values are finite and that the stretch is long
    /// enough (`N >= 4`) for any of the statistics to make sense.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(data(format!(
                "series too short: got {} values, need at least 4",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(data(format!(
                "non-finite value {} at position {}",
                values[pos],
                pos + 1
            )));
        }
        Ok(Series { values, name: None })
    }

    pub fn with_name(values: Vec<f64>, name: impl Into<String>) -> Result<Self> {
        let mut s = Series::new(values)?;
        s.name = Some(name.into());
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// True when the sample contains at least one exact tie.
    pub fn has_ties(&self) -> bool {
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    /// Applies the tie policy; returns whether ties are present.
    pub fn check_ties(&self, policy: TiePolicy) -> Result<bool> {
        let tied = self.has_ties();
        if tied && policy == TiePolicy::Reject {
            return Err(data(
                "input contains exact ties and strict tie handling was requested",
            ));
        }
        Ok(tied)
    }
}
