//! Monte Carlo harness: prepared scenarios, per-trial evaluation, and sweeps.

mod config;
mod stats;
mod sweep;

pub use config::{BlockageConfig, EdgeConfig, LinkConfig, RunConfig, ScenarioConfig, ScreenConfig};
pub use stats::{aggregate, relative_gain, MetricStats, TrialAggregate};
pub use sweep::{run_sweep, SweepKind, SweepOutput, SweepPoint, SweepResult};

use rayon::prelude::*;
use serde::Serialize;

use crate::beamforming::{edgeant_weights, mrt_oracle, snr, spectral_efficiency};
use crate::blockage::{apply_static, generate_mask, BlockageSpec};
use crate::channel::{
    correlation_matrix, dbm_to_watts, sample_channel, CorrelationMatrix, LinkParams,
};
use crate::error::{Error, Result};
use crate::geometry::{
    edge_layout, screen_layout, ArrayGeometry, EdgeArrayConfig, ScreenArrayConfig,
};
use crate::optimizer::{optimize, OptimizerConfig};
use crate::rng::{trial_rng, Substream};
use crate::Scalar;

/// Outcome of one Monte Carlo realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord<T> {
    pub trial_index: u64,
    pub se_screenant: T,
    pub se_oracle: T,
    pub se_edgeant: T,
    pub optimizer_iters: usize,
    pub optimizer_converged: bool,
    /// Blocked on-screen elements.
    pub mask_popcount: usize,
}

/// A validated config with geometries and correlation factors precomputed.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    config: ScenarioConfig,
    screen_link: LinkParams<T>,
    edge_link: LinkParams<T>,
    screen_geom: ArrayGeometry<T>,
    edge_geom: ArrayGeometry<T>,
    screen_corr: CorrelationMatrix<T>,
    edge_corr: CorrelationMatrix<T>,
    screen_blockage: Option<BlockageSpec<T>>,
    edge_blockage: Option<BlockageSpec<T>>,
    optimizer: OptimizerConfig<T>,
}

fn invalid(section: &str, err: Error) -> Error {
    match err {
        Error::InvalidParams(msg) | Error::InvalidConfig(msg) => {
            Error::InvalidConfig(format!("{section}: {msg}"))
        }
        other => other,
    }
}

fn optimizer_in<T: Scalar>(cfg: &OptimizerConfig<f64>) -> OptimizerConfig<T> {
    OptimizerConfig {
        num_inits: cfg.num_inits,
        max_iters: cfg.max_iters,
        rel_tol: T::lit(cfg.rel_tol),
        armijo_c1: T::lit(cfg.armijo_c1),
        armijo_shrink: T::lit(cfg.armijo_shrink),
        armijo_mu0: T::lit(cfg.armijo_mu0),
        max_backtracks: cfg.max_backtracks,
        power_floor_rel: T::lit(cfg.power_floor_rel),
        optimize_all_inits: cfg.optimize_all_inits,
        armijo_rule: cfg.armijo_rule,
        mask_active_floor: cfg.mask_active_floor,
    }
}

impl<T: Scalar> Scenario<T> {
    pub fn prepare(config: &ScenarioConfig) -> Result<Self> {
        let link = &config.link;
        let screen_link = LinkParams {
            carrier_hz: T::lit(link.carrier_hz),
            distance_m: T::lit(link.distance_m),
            path_loss_exponent: T::lit(link.path_loss_exponent),
            reference_distance_m: T::lit(link.reference_distance_m),
            alpha: T::lit(link.alpha),
            noise_power_w: dbm_to_watts(T::lit(link.noise_power_dbm)),
            tx_power_w: dbm_to_watts(T::lit(link.tx_power_dbm)),
            extra_loss_db: T::lit(link.extra_loss_db),
        };
        screen_link.validate().map_err(|e| invalid("link", e))?;
        let edge_link = screen_link.with_alpha(T::one());

        let wavelength = screen_link.wavelength();
        let spacing = T::lit(config.screen.spacing(wavelength.to_f64_lossy()));
        let screen_cfg = ScreenArrayConfig::new(config.screen.sx, config.screen.sy, spacing)
            .map_err(|e| invalid("screen", e))?;
        let edge_cfg = EdgeArrayConfig::new(
            config.edge_elements(),
            T::lit(config.edge.chassis_width_m),
            T::lit(config.edge.chassis_height_m),
        )
        .map_err(|e| invalid("edge", e))?;
        let screen_geom = screen_layout(&screen_cfg)?;
        let edge_geom = edge_layout(&edge_cfg)?;
        let screen_corr = correlation_matrix(&screen_geom, wavelength)?;
        let edge_corr = correlation_matrix(&edge_geom, wavelength)?;

        let (screen_blockage, edge_blockage) = match &config.blockage {
            Some(b) => {
                let screen = BlockageSpec::new(T::lit(b.ratio), T::lit(b.beta), b.screen_pattern)
                    .map_err(|e| invalid("blockage", e))?;
                let edge = BlockageSpec::new(T::lit(b.ratio), T::lit(b.beta), b.edge_pattern)
                    .map_err(|e| invalid("blockage", e))?;
                (Some(screen), Some(edge))
            }
            None => (None, None),
        };

        let optimizer = optimizer_in::<T>(&config.optimizer);
        optimizer.validate().map_err(|e| invalid("optimizer", e))?;

        let scenario = Self {
            config: config.clone(),
            screen_link,
            edge_link,
            screen_geom,
            edge_geom,
            screen_corr,
            edge_corr,
            screen_blockage,
            edge_blockage,
            optimizer,
        };
        // Surface pattern/layout mismatches now rather than inside a trial.
        scenario.masks(0)?;
        Ok(scenario)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn screen_link(&self) -> &LinkParams<T> {
        &self.screen_link
    }

    pub fn edge_link(&self) -> &LinkParams<T> {
        &self.edge_link
    }

    pub fn screen_geometry(&self) -> &ArrayGeometry<T> {
        &self.screen_geom
    }

    pub fn edge_geometry(&self) -> &ArrayGeometry<T> {
        &self.edge_geom
    }

    pub fn screen_correlation(&self) -> &CorrelationMatrix<T> {
        &self.screen_corr
    }

    pub fn edge_correlation(&self) -> &CorrelationMatrix<T> {
        &self.edge_corr
    }

    fn masks(
        &self,
        trial_index: u64,
    ) -> Result<Option<(crate::blockage::BlockageMask, crate::blockage::BlockageMask)>> {
        let (Some(screen), Some(edge)) = (&self.screen_blockage, &self.edge_blockage) else {
            return Ok(None);
        };
        let seed = self.config.run.base_seed;
        let screen_mask = generate_mask(
            screen,
            &self.screen_geom,
            &mut trial_rng(seed, trial_index, Substream::ScreenMask),
        )?;
        let edge_mask = generate_mask(
            edge,
            &self.edge_geom,
            &mut trial_rng(seed, trial_index, Substream::EdgeMask),
        )?;
        Ok(Some((screen_mask, edge_mask)))
    }

    /// Evaluates one realization; all randomness derives from `(base_seed, trial_index)`.
    pub fn run_trial(&self, trial_index: u64) -> Result<TrialRecord<T>> {
        self.trial_inner(trial_index).map_err(|e| Error::Trial {
            trial: trial_index,
            source: Box::new(e),
        })
    }

    fn trial_inner(&self, trial_index: u64) -> Result<TrialRecord<T>> {
        let seed = self.config.run.base_seed;
        let mut screen_h = sample_channel(
            &self.screen_corr,
            &self.screen_link,
            &mut trial_rng(seed, trial_index, Substream::ScreenChannel),
            trial_index,
        )?;
        let mut edge_h = sample_channel(
            &self.edge_corr,
            &self.edge_link,
            &mut trial_rng(seed, trial_index, Substream::EdgeChannel),
            trial_index,
        )?;
        let mut mask_popcount = 0;
        if let Some((screen_mask, edge_mask)) = self.masks(trial_index)? {
            let beta = self
                .screen_blockage
                .as_ref()
                .map(|b| b.beta)
                .unwrap_or(T::one());
            screen_h = apply_static(&screen_h, &screen_mask, beta)?;
            edge_h = apply_static(&edge_h, &edge_mask, beta)?;
            mask_popcount = screen_mask.popcount();
        }

        let power = self.screen_link.tx_power_w;
        let noise = self.screen_link.noise_power_w;
        let edge_w = edgeant_weights(edge_h.len(), power)?;
        let se_edgeant = spectral_efficiency(snr(&edge_h, &edge_w, noise)?);
        let se_oracle = mrt_oracle(&screen_h, power, noise)?.se;
        let (_, trace) = optimize(
            &screen_h,
            power,
            noise,
            &self.optimizer,
            &mut trial_rng(seed, trial_index, Substream::Optimizer),
        )?;

        Ok(TrialRecord {
            trial_index,
            se_screenant: trace.final_se(),
            se_oracle,
            se_edgeant,
            optimizer_iters: trace.iters_used,
            optimizer_converged: trace.converged,
            mask_popcount,
        })
    }

    /// Runs trials `0..run.trials` on the current rayon pool, returned in index order.
    pub fn run_trials(&self) -> Result<Vec<TrialRecord<T>>> {
        (0..self.config.run.trials)
            .into_par_iter()
            .map(|i| self.run_trial(i))
            .collect()
    }
}

/// Builds a pool with `threads` workers; 0 means one per available core.
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start {threads} worker threads: {e}")))
}
