use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::{aggregate, TrialAggregate};
use super::{BlockageConfig, Scenario, ScenarioConfig, TrialRecord};
use crate::error::{Error, Result};
use crate::Scalar;

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Transparency efficiency `α`.
    Alpha,
    /// Total on-screen elements; perfect squares only.
    Elements,
    /// Transmit power in dBm.
    Power,
    /// AP distance in meters.
    Distance,
    /// Carrier frequency in GHz, blockage disabled.
    Frequency,
    /// Blockage attenuation `β`.
    Beta,
    /// Fraction of blocked elements.
    Ratio,
    /// Carrier frequency in GHz with blockage enabled.
    FrequencyBlk,
}

impl SweepKind {
    pub const ALL: [SweepKind; 8] = [
        SweepKind::Alpha,
        SweepKind::Elements,
        SweepKind::Power,
        SweepKind::Distance,
        SweepKind::Frequency,
        SweepKind::Beta,
        SweepKind::Ratio,
        SweepKind::FrequencyBlk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Alpha => "alpha",
            SweepKind::Elements => "elements",
            SweepKind::Power => "power",
            SweepKind::Distance => "distance",
            SweepKind::Frequency => "frequency",
            SweepKind::Beta => "beta",
            SweepKind::Ratio => "ratio",
            SweepKind::FrequencyBlk => "frequency_blk",
        }
    }

    /// Grid used when no values are given.
    pub fn default_values(self) -> Vec<f64> {
        let grid = |start: f64, step: f64, count: usize| -> Vec<f64> {
            (0..count).map(|i| start + step * i as f64).collect()
        };
        match self {
            SweepKind::Alpha | SweepKind::Beta => (1..=10).map(|i| i as f64 / 10.0).collect(),
            SweepKind::Elements => (4..=10).map(|n| (n * n) as f64).collect(),
            SweepKind::Power => grid(0.0, 5.0, 7),
            SweepKind::Distance => grid(1.0, 1.0, 10),
            SweepKind::Frequency | SweepKind::FrequencyBlk => {
                vec![28.0, 60.0, 100.0, 150.0, 200.0, 300.0]
            }
            SweepKind::Ratio => (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }

    fn reject(self, value: f64, reason: impl Into<String>) -> Error {
        Error::InvalidSweepValue {
            sweep: self.name(),
            value,
            reason: reason.into(),
        }
    }

    /// Returns `base` with the swept field set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        if !value.is_finite() {
            return Err(self.reject(value, "not finite"));
        }
        let mut cfg = base.clone();
        match self {
            SweepKind::Alpha => cfg.link.alpha = value,
            SweepKind::Elements => {
                let side = value.sqrt().round();
                if value < 1.0 || value.fract() != 0.0 || side * side != value {
                    return Err(
                        self.reject(value, "element count must be a positive perfect square")
                    );
                }
                cfg.screen.sx = side as usize;
                cfg.screen.sy = side as usize;
            }
            SweepKind::Power => cfg.link.tx_power_dbm = value,
            SweepKind::Distance => cfg.link.distance_m = value,
            SweepKind::Frequency => {
                cfg.link.carrier_hz = value * 1e9;
                cfg.blockage = None;
            }
            SweepKind::FrequencyBlk => {
                cfg.link.carrier_hz = value * 1e9;
                blocked(&mut cfg);
            }
            SweepKind::Beta => blocked(&mut cfg).beta = value,
            SweepKind::Ratio => blocked(&mut cfg).ratio = value,
        }
        cfg.validate()
            .map_err(|e| self.reject(value, e.to_string()))?;
        Ok(cfg)
    }
}

fn blocked(cfg: &mut ScenarioConfig) -> &mut BlockageConfig {
    cfg.blockage.get_or_insert_with(BlockageConfig::default)
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown sweep {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    #[serde(flatten)]
    pub stats: TrialAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// Aggregates plus, on request, every trial record per point.
#[derive(Debug, Clone)]
pub struct SweepOutput<T> {
    pub result: SweepResult,
    pub records: Option<Vec<Vec<TrialRecord<T>>>>,
}

/// Runs `base.run.trials` trials at each value on the current rayon pool.
///
/// Trial seeds are shared across points, so neighbouring points see the same
/// underlying random draws.
pub fn run_sweep<T: Scalar>(
    kind: SweepKind,
    base: &ScenarioConfig,
    values: &[f64],
    keep_records: bool,
) -> Result<SweepOutput<T>> {
    if values.is_empty() {
        return Err(Error::InvalidConfig(format!("sweep {kind} has no values")));
    }
    let configs = values
        .iter()
        .map(|&v| kind.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let mut points = Vec::with_capacity(values.len());
    let mut kept = keep_records.then(Vec::new);
    for (cfg, &value) in configs.iter().zip(values) {
        let records = Scenario::<T>::prepare(cfg)?.run_trials()?;
        points.push(SweepPoint {
            value,
            stats: aggregate(&records)?,
        });
        if let Some(kept) = kept.as_mut() {
            kept.push(records);
        }
    }
    Ok(SweepOutput {
        result: SweepResult { kind, points },
        records: kept,
    })
}
