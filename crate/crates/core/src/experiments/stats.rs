use serde::Serialize;

use super::TrialRecord;
use crate::error::{ensure, Result};
use crate::Scalar;

const Z95: f64 = 1.96;

/// Mean, sample standard deviation (n − 1), and 95% normal-approximation half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricStats {
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
}

impl MetricStats {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        ensure(!samples.is_empty(), || {
            "cannot aggregate zero samples".into()
        })?;
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = if samples.len() > 1 {
            (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std,
            ci95: Z95 * std / n.sqrt(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialAggregate {
    pub screenant: MetricStats,
    pub oracle: MetricStats,
    pub edgeant: MetricStats,
    pub relative_gain: f64,
    /// Delta-method half-width for `relative_gain`.
    pub relative_gain_ci95: f64,
    pub trials: u64,
}

/// `mean_screenant / mean_edgeant − 1`.
pub fn relative_gain(screenant_mean: f64, edgeant_mean: f64) -> f64 {
    screenant_mean / edgeant_mean - 1.0
}

pub fn aggregate<T: Scalar>(records: &[TrialRecord<T>]) -> Result<TrialAggregate> {
    let column = |f: fn(&TrialRecord<T>) -> T| -> Vec<f64> {
        records.iter().map(|r| f(r).to_f64_lossy()).collect()
    };
    let screen = column(|r| r.se_screenant);
    let edge = column(|r| r.se_edgeant);
    let screenant = MetricStats::from_samples(&screen)?;
    let oracle = MetricStats::from_samples(&column(|r| r.se_oracle))?;
    let edgeant = MetricStats::from_samples(&edge)?;

    let n = records.len() as f64;
    let cov = if records.len() > 1 {
        screen
            .iter()
            .zip(&edge)
            .map(|(s, e)| (s - screenant.mean) * (e - edgeant.mean))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let (ms, me) = (screenant.mean, edgeant.mean);
    let var = (screenant.std.powi(2) / me.powi(2) + edgeant.std.powi(2) * ms.powi(2) / me.powi(4)
        - 2.0 * cov * ms / me.powi(3))
        / n;

    Ok(TrialAggregate {
        screenant,
        oracle,
        edgeant,
        relative_gain: relative_gain(ms, me),
        relative_gain_ci95: Z95 * var.max(0.0).sqrt(),
        trials: records.len() as u64,
    })
}
