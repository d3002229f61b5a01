use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Which shock series drives the projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockVariant {
    #[default]
    Baseline,
    Narrative,
    Crude,
    OneStep,
}

/// Which date of a row an exclusion is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionTarget {
    /// The shock date `t`.
    Origin,
    /// The horizon date `t + h`.
    #[default]
    Target,
    /// Either of the two.
    Either,
}

/// Inclusive date range dropped from the estimation sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateExclusion {
    pub start: NaiveDate,
    pub end: NaiveDate,
    #[serde(default)]
    pub applies_to: ExclusionTarget,
}

impl DateExclusion {
    pub fn new(start: NaiveDate, end: NaiveDate, applies_to: ExclusionTarget) -> Self {
        Self { start, end, applies_to }
    }

    fn covers(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }

    pub fn excludes(&self, origin: NaiveDate, target: NaiveDate) -> bool {
        match self.applies_to {
            ExclusionTarget::Origin => self.covers(origin),
            ExclusionTarget::Target => self.covers(target),
            ExclusionTarget::Either => self.covers(origin) || self.covers(target),
        }
    }
}

/// How raw coefficients are scaled for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Coefficient per percentage point of shock.
    #[default]
    Raw,
    /// Coefficient and standard error multiplied by a fixed factor, normally
    /// [`crate::lp::impact_scale`] (percent per 10pp impact on the
    /// Republican probability).
    Scale(f64),
}

impl Normalization {
    pub fn factor(self) -> f64 {
        match self {
            Normalization::Raw => 1.0,
            Normalization::Scale(f) => f,
        }
    }
}

/// Settings of one impulse-response estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LpSpec {
    /// Label written to the `spec` column of the output.
    pub name: String,
    /// Largest horizon; horizons run `0..=horizons`.
    pub horizons: usize,
    pub variant: ShockVariant,
    /// Weight rows by trade volume.
    pub weighted: bool,
    /// Include the lagged one-month change `y[t-1] - y[t-1-month_len]`.
    pub lagged_change: bool,
    /// Trading days in a month for the lagged change.
    pub month_len: usize,
    /// Lags of each monthly control.
    pub control_lags: usize,
    pub exclusions: Vec<DateExclusion>,
    pub normalization: Normalization,
}

impl Default for LpSpec {
    fn default() -> Self {
        Self::daily("baseline")
    }
}

impl LpSpec {
    /// Weighted daily projection with the lagged monthly change, 65 horizons.
    pub fn daily(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            horizons: 65,
            variant: ShockVariant::Baseline,
            weighted: true,
            lagged_change: true,
            month_len: 21,
            control_lags: 12,
            exclusions: Vec::new(),
            normalization: Normalization::Raw,
        }
    }

    /// Unweighted monthly projection, 12 horizons, pandemic months dropped
    /// as targets.
    pub fn monthly(name: impl Into<String>) -> Self {
        Self {
            horizons: 12,
            weighted: false,
            lagged_change: false,
            exclusions: vec![super::covid_exclusion()],
            ..Self::daily(name)
        }
    }

    pub fn excluded(&self, origin: NaiveDate, target: NaiveDate) -> bool {
        self.exclusions.iter().any(|e| e.excludes(origin, target))
    }
}
