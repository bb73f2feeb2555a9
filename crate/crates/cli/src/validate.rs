//! Self-checks run by the `validate` subcommand.

use num_complex::Complex;
use rand::Rng;
use screenant_core::channel::standard_complex_normal;
use screenant_core::optimizer::OptimizerConfig;
use screenant_core::{
    grad_power, grad_theta, mrt_oracle, optimize, snr, spectral_efficiency, trial_rng,
    BeamformingVector, ChannelRealization, LinkParams, Substream,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const SIZES: [usize; 3] = [2, 5, 49];
const POINTS_PER_SIZE: u64 = 10;
const PHASE_STEP: f64 = 1e-6;
const POWER_STEP_REL: f64 = 1e-8;
const PHASE_RTOL: f64 = 1e-5;
const POWER_RTOL: f64 = 1e-4;

fn unit_link() -> LinkParams {
    LinkParams {
        carrier_hz: 28e9,
        distance_m: 1.0,
        path_loss_exponent: 2.5,
        reference_distance_m: 1.0,
        alpha: 1.0,
        noise_power_w: 1.0,
        tx_power_w: 1.0,
        extra_loss_db: 0.0,
    }
}

fn random_channel<R: Rng>(n: usize, rng: &mut R) -> ChannelRealization {
    let h = (0..n).map(|_| standard_complex_normal(rng)).collect();
    ChannelRealization::new(h, unit_link(), 0).expect("finite channel")
}

/// Interior point: every power at least `P/(2S)`.
fn interior_point<R: Rng>(n: usize, budget: f64, rng: &mut R) -> BeamformingVector {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    let power = raw
        .iter()
        .map(|r| budget * (0.5 * r / sum + 0.5 / n as f64))
        .collect();
    let phase = (0..n)
        .map(|_| std::f64::consts::TAU * rng.random::<f64>())
        .collect();
    BeamformingVector::new(power, phase).expect("feasible point")
}

fn se(h: &ChannelRealization, power: Vec<f64>, phase: Vec<f64>, noise: f64) -> f64 {
    let v = BeamformingVector::new(power, phase).expect("perturbed point");
    spectral_efficiency(snr(h, &v, noise).expect("snr"))
}

/// Worst relative error, measured against `max(|fd|, 1e-3·max|fd|)`.
fn worst_error(analytic: &[f64], fd: &[f64]) -> f64 {
    let scale = fd.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    analytic
        .iter()
        .zip(fd)
        .map(|(a, f)| (a - f).abs() / f.abs().max(1e-3 * scale).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn gradient_checks(seed: u64) -> Vec<CheckOutcome> {
    let budget = 1.0;
    let noise = 1.0;
    let (mut worst_phase, mut worst_power) = (0.0f64, 0.0f64);
    for (k, &n) in SIZES.iter().enumerate() {
        for i in 0..POINTS_PER_SIZE {
            let mut rng = trial_rng(seed, k as u64 * POINTS_PER_SIZE + i, Substream::Optimizer);
            let h = random_channel(n, &mut rng);
            let v = interior_point(n, budget, &mut rng);
            let gt = grad_theta(&h, &v, noise).expect("phase gradient");
            let gp = grad_power(&h, &v, noise, 0.0).expect("power gradient");
            let fd_phase: Vec<f64> = (0..n)
                .map(|s| {
                    let shifted = |d: f64| {
                        let mut t = v.phase().to_vec();
                        t[s] += d;
                        se(&h, v.power().to_vec(), t, noise)
                    };
                    (shifted(PHASE_STEP) - shifted(-PHASE_STEP)) / (2.0 * PHASE_STEP)
                })
                .collect();
            let step = POWER_STEP_REL * budget;
            let fd_power: Vec<f64> = (0..n)
                .map(|s| {
                    let shifted = |d: f64| {
                        let mut p = v.power().to_vec();
                        p[s] += d;
                        se(&h, p, v.phase().to_vec(), noise)
                    };
                    (shifted(step) - shifted(-step)) / (2.0 * step)
                })
                .collect();
            worst_phase = worst_phase.max(worst_error(&gt, &fd_phase));
            worst_power = worst_power.max(worst_error(&gp, &fd_power));
        }
    }
    vec![
        CheckOutcome {
            name: "phase-gradient",
            passed: worst_phase < PHASE_RTOL,
            detail: format!("worst relative error {worst_phase:.3e} (limit {PHASE_RTOL:e})"),
        },
        CheckOutcome {
            name: "power-gradient",
            passed: worst_power < POWER_RTOL,
            detail: format!("worst relative error {worst_power:.3e} (limit {POWER_RTOL:e})"),
        },
    ]
}

fn stationarity_check(seed: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for i in 0..10 {
        let mut rng = trial_rng(seed, 1000 + i, Substream::ScreenChannel);
        let h = random_channel(9, &mut rng);
        let o = mrt_oracle(&h, 1.0, 1.0).expect("oracle");
        let g = grad_theta(&h, &o.vector, 1.0).expect("phase gradient");
        worst = g.iter().fold(worst, |m, x| m.max(x.abs()));
    }
    CheckOutcome {
        name: "oracle-stationarity",
        passed: worst < 1e-10,
        detail: format!("largest phase gradient at the oracle {worst:.3e}"),
    }
}

fn scalar_check(seed: u64) -> CheckOutcome {
    let h =
        ChannelRealization::new(vec![Complex::new(0.6, -0.8)], unit_link(), 0).expect("channel");
    let mut rng = trial_rng(seed, 0, Substream::Optimizer);
    let (_, trace) =
        optimize(&h, 2.0, 0.5, &OptimizerConfig::default(), &mut rng).expect("optimize");
    let expected = (1.0f64 + 2.0 * 1.0 / 0.5).log2();
    let err = (trace.final_se() - expected).abs();
    CheckOutcome {
        name: "single-element-optimum",
        passed: err < 1e-12,
        detail: format!("SE {:.12} vs {expected:.12}", trace.final_se()),
    }
}

fn two_element_check(seed: u64) -> CheckOutcome {
    let h = ChannelRealization::new(
        vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)],
        unit_link(),
        0,
    )
    .expect("channel");
    let cfg = OptimizerConfig {
        max_iters: 500,
        rel_tol: 1e-15,
        ..OptimizerConfig::default()
    };
    let mut rng = trial_rng(seed, 1, Substream::Optimizer);
    let (_, trace) = optimize(&h, 2.0, 1.0, &cfg, &mut rng).expect("optimize");
    let err = (trace.final_se() - 5f64.log2()).abs();
    CheckOutcome {
        name: "two-element-oracle",
        passed: err <= 1e-3,
        detail: format!("SE {:.6} vs log2(5) = {:.6}", trace.final_se(), 5f64.log2()),
    }
}

fn dominance_check(seed: u64) -> CheckOutcome {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..50 {
        let mut rng = trial_rng(seed, 2000 + i, Substream::ScreenChannel);
        let h = random_channel(4 + (i as usize % 6), &mut rng);
        let oracle = mrt_oracle(&h, 1.0, 0.1).expect("oracle").se;
        let mut rng = trial_rng(seed, 2000 + i, Substream::Optimizer);
        let (_, trace) =
            optimize(&h, 1.0, 0.1, &OptimizerConfig::default(), &mut rng).expect("optimize");
        worst = worst.max(trace.final_se() - oracle);
    }
    CheckOutcome {
        name: "oracle-dominance",
        passed: worst <= 1e-9,
        detail: format!("largest excess over the oracle {worst:.3e}"),
    }
}

/// Runs every check; the result order is fixed.
pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut out = gradient_checks(seed);
    out.push(stationarity_check(seed));
    out.push(scalar_check(seed));
    out.push(two_element_check(seed));
    out.push(dominance_check(seed));
    out
}
