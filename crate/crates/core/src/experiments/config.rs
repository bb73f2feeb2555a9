use serde::{Deserialize, Serialize};

use crate::blockage::BlockagePattern;
use crate::channel::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::optimizer::OptimizerConfig;

/// Large-scale link budget. Powers are kept in dBm so a config survives a
/// serialize/parse round trip unchanged; conversion happens in [`super::Scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub carrier_hz: f64,
    pub distance_m: f64,
    pub path_loss_exponent: f64,
    pub reference_distance_m: f64,
    /// Transparency efficiency of the on-screen array; the edge baseline always uses 1.
    pub alpha: f64,
    pub noise_power_dbm: f64,
    pub tx_power_dbm: f64,
    pub extra_loss_db: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            carrier_hz: 28e9,
            distance_m: 3.0,
            path_loss_exponent: 2.5,
            reference_distance_m: 1.0,
            alpha: 0.85,
            noise_power_dbm: -110.0,
            tx_power_dbm: 23.0,
            extra_loss_db: 0.0,
        }
    }
}

impl LinkConfig {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScreenConfig {
    pub sx: usize,
    pub sy: usize,
    /// Element spacing as a multiple of the carrier wavelength.
    pub spacing_wavelengths: f64,
    /// Fixed physical spacing; overrides `spacing_wavelengths` when set.
    pub spacing_m: Option<f64>,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        Self {
            sx: 7,
            sy: 7,
            spacing_wavelengths: 0.5,
            spacing_m: None,
        }
    }
}

impl ScreenConfig {
    pub fn elements(&self) -> usize {
        self.sx * self.sy
    }

    pub fn spacing(&self, wavelength: f64) -> f64 {
        self.spacing_m
            .unwrap_or(self.spacing_wavelengths * wavelength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeConfig {
    /// Defaults to the on-screen element count.
    pub elements: Option<usize>,
    pub chassis_width_m: f64,
    pub chassis_height_m: f64,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        Self {
            elements: None,
            chassis_width_m: 0.07,
            chassis_height_m: 0.15,
        }
    }
}

/// Identical ratio and attenuation on both arrays; patterns may differ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockageConfig {
    pub ratio: f64,
    pub beta: f64,
    pub screen_pattern: BlockagePattern,
    pub edge_pattern: BlockagePattern,
}

impl Default for BlockageConfig {
    fn default() -> Self {
        Self {
            ratio: 0.5,
            beta: 0.1,
            screen_pattern: BlockagePattern::RandomSubset,
            edge_pattern: BlockagePattern::RandomSubset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub trials: u64,
    pub base_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            base_seed: 0,
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub link: LinkConfig,
    pub screen: ScreenConfig,
    pub edge: EdgeConfig,
    pub blockage: Option<BlockageConfig>,
    pub optimizer: OptimizerConfig<f64>,
    pub run: RunConfig,
}

impl ScenarioConfig {
    pub fn edge_elements(&self) -> usize {
        self.edge.elements.unwrap_or_else(|| self.screen.elements())
    }

    /// Checks every section; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.run.trials == 0 {
            return Err(Error::InvalidConfig("run.trials must be at least 1".into()));
        }
        if !(self.screen.spacing_wavelengths.is_finite() && self.screen.spacing_wavelengths > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "screen.spacing_wavelengths must be positive, got {}",
                self.screen.spacing_wavelengths
            )));
        }
        if !(self.link.carrier_hz.is_finite() && self.link.carrier_hz > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "link.carrier_hz must be positive, got {}",
                self.link.carrier_hz
            )));
        }
        for (name, v) in [
            ("link.noise_power_dbm", self.link.noise_power_dbm),
            ("link.tx_power_dbm", self.link.tx_power_dbm),
            ("link.extra_loss_db", self.link.extra_loss_db),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        super::Scenario::<f64>::prepare(self).map(|_| ())
    }
}
