//! Link-level simulation of a transparent on-screen antenna array.
//!
//! The crate models a uniform planar array laid over a phone display, its
//! spatially correlated Rayleigh uplink to a single-antenna access point,
//! finger and hand blockage, and a multi-start projected gradient ascent
//! that allocates per-element phase and power. An edge-mounted array with
//! equal power and no phase control serves as the baseline, and the
//! closed-form maximum-ratio beamformer gives the optimum for comparison.
//!
//! Every numeric routine is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`.

pub mod beamforming;
pub mod blockage;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod optimizer;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use beamforming::{
    edgeant_weights, mrt_oracle, snr, spectral_efficiency, wrap_phase, OracleSolution,
};
pub use blockage::{apply_dynamic, apply_static, generate_mask, BlockageMask, BlockagePattern};
pub use channel::{correlation_matrix, path_loss, sample_channel, sinc};
pub use experiments::{
    aggregate, run_sweep, MetricStats, ScenarioConfig, SweepKind, SweepResult, TrialAggregate,
};
pub use geometry::{edge_layout, screen_layout, Layout, Point};
pub use optimizer::{
    ascend_step, grad_power, grad_theta, normalize_gradients, optimize, ArmijoRule,
};
pub use rng::{trial_rng, Substream};

pub type ScreenArrayConfig = geometry::ScreenArrayConfig<f64>;
pub type EdgeArrayConfig = geometry::EdgeArrayConfig<f64>;
pub type ArrayGeometry = geometry::ArrayGeometry<f64>;
pub type LinkParams = channel::LinkParams<f64>;
pub type CorrelationMatrix = channel::CorrelationMatrix<f64>;
pub type ChannelRealization = channel::ChannelRealization<f64>;
pub type BlockageSpec = blockage::BlockageSpec<f64>;
pub type DynamicBlockageFrame = blockage::DynamicBlockageFrame<f64>;
pub type BeamformingVector = beamforming::BeamformingVector<f64>;
pub type OptimizerConfig = optimizer::OptimizerConfig<f64>;
pub type OptimizerTrace = optimizer::OptimizerTrace<f64>;
pub type Scenario = experiments::Scenario<f64>;
pub type TrialRecord = experiments::TrialRecord<f64>;
pub type SweepOutput = experiments::SweepOutput<f64>;
pub type Matrix = linalg::Matrix<f64>;
