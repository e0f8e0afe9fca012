use serde::{Deserialize, Serialize};

/// Outcome of one sampled or symbolic check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    /// Passes iff `max_deviation < tolerance` and the deviation is finite.
    pub fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
            pass: max_deviation.is_finite() && max_deviation < tolerance,
            samples,
            note: None,
        }
    }

    /// Passes iff `value > threshold` (used by negative controls).
    pub fn above(name: impl Into<String>, value: f64, threshold: f64, samples: usize) -> Self {
        Self {
            name: name.into(),
            max_deviation: value,
            tolerance: threshold,
            pass: value.is_finite() && value > threshold,
            samples,
            note: Some("passes when the value exceeds the tolerance".into()),
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            max_deviation: if pass { 0.0 } else { 1.0 },
            tolerance: 0.5,
            pass,
            samples: 1,
            note: Some(note.into()),
        }
    }

    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            max_deviation: 0.0,
            tolerance: 0.0,
            pass: true,
            samples: 0,
            note: Some(format!("skipped: {}", note.into())),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Running maximum that propagates NaN.
pub fn track(max: &mut f64, x: f64) {
    if x.is_nan() || x > *max {
        *max = x;
    }
}
