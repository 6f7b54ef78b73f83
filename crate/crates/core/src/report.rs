//! Named residual reports: the common currency of every identity check.

use serde::Serialize;

use crate::numerics::SampledFunction;

/// Outcome of a single residual check. `pass` is exactly
/// `max_abs <= tolerance`.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub max_abs: f64,
    pub rms: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn from_values(
        name: impl Into<String>,
        values: impl IntoIterator<Item = f64>,
        tolerance: f64,
    ) -> Self {
        let mut max_abs = 0.0f64;
        let mut sum_sq = 0.0f64;
        let mut count = 0usize;
        for v in values {
            let a = v.abs();
            max_abs = max_abs.max(a);
            sum_sq += v * v;
            count += 1;
        }
        let rms = if count > 0 {
            (sum_sq / count as f64).sqrt()
        } else {
            0.0
        };
        ResidualReport {
            name: name.into(),
            max_abs,
            rms,
            tolerance,
            pass: max_abs <= tolerance,
        }
    }

    /// Report over the residual band of a sampled residual (the wider edge
    /// exclusion, since these checks stack several derivative passes).
    pub fn from_interior(
        name: impl Into<String>,
        residual: &SampledFunction,
        tolerance: f64,
    ) -> Self {
        let v = residual.values();
        let range = residual.grid().residual_interior();
        ResidualReport::from_values(name, range.map(|i| v[i]), tolerance)
    }

    /// Report for a single scalar deviation.
    pub fn from_scalar(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        ResidualReport::from_values(name, [value], tolerance)
    }

    /// Same measurements judged against a different tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        ResidualReport {
            name: self.name.clone(),
            max_abs: self.max_abs,
            rms: self.rms,
            tolerance,
            pass: self.max_abs <= tolerance,
        }
    }
}
