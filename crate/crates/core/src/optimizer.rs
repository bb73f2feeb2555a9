//! Multi-start projected gradient ascent on element phases and powers.
//!
//! Each iteration evaluates the analytic SE gradients, rescales them so the
//! largest phase component is 2π and the largest power component is `P`,
//! picks a step by Armijo backtracking, and projects the powers back onto
//! `{p_s ≥ floor, Σ p_s ≤ P}`. Only the best of several random starts is
//! refined unless `optimize_all_inits` is set.

use num_complex::Complex;
use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::beamforming::{mrt_oracle, spectral_efficiency, wrap_phase, BeamformingVector};
use crate::channel::ChannelRealization;
use crate::error::{ensure, ensure_len, Error, Result};
use crate::Scalar;

/// Right-hand side of the sufficient-increase test `SE(x + μd) ≥ SE(x) + c1·μ·slope`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArmijoRule {
    /// `slope = ∇SE · d`, the directional derivative along the step.
    #[default]
    DirectionalDerivative,
    /// `slope = d · d`, the squared length of the normalized step.
    StepNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct OptimizerConfig<T> {
    pub num_inits: usize,
    /// Outer iterations, one normalized step each.
    pub max_iters: usize,
    /// Stop once an iteration raises SE by less than this fraction.
    pub rel_tol: T,
    pub armijo_c1: T,
    pub armijo_shrink: T,
    pub armijo_mu0: T,
    pub max_backtracks: usize,
    /// Power floor as a fraction of the total budget.
    pub power_floor_rel: T,
    /// Refine every start and keep the best result instead of only the best start.
    pub optimize_all_inits: bool,
    pub armijo_rule: ArmijoRule,
    /// Drop power-gradient components that point below the floor for elements already on it.
    pub mask_active_floor: bool,
}

impl<T: Scalar> Default for OptimizerConfig<T> {
    fn default() -> Self {
        Self {
            num_inits: 10,
            max_iters: 5,
            rel_tol: T::lit(1e-4),
            armijo_c1: T::lit(1e-4),
            armijo_shrink: T::lit(0.5),
            armijo_mu0: T::one(),
            max_backtracks: 30,
            power_floor_rel: T::lit(1e-8),
            optimize_all_inits: false,
            armijo_rule: ArmijoRule::default(),
            mask_active_floor: true,
        }
    }
}

impl<T: Scalar> OptimizerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: T| v > T::zero() && v < T::one();
        ensure(self.num_inits >= 1, || {
            "num_inits must be at least 1".into()
        })?;
        ensure(self.max_iters >= 1, || {
            "max_iters must be at least 1".into()
        })?;
        ensure(self.max_backtracks >= 1, || {
            "max_backtracks must be at least 1".into()
        })?;
        ensure(self.rel_tol > T::zero(), || {
            format!("rel_tol must be positive, got {}", self.rel_tol)
        })?;
        ensure(in_unit(self.armijo_c1), || {
            format!("armijo_c1 must lie in (0, 1), got {}", self.armijo_c1)
        })?;
        ensure(in_unit(self.armijo_shrink), || {
            format!(
                "armijo_shrink must lie in (0, 1), got {}",
                self.armijo_shrink
            )
        })?;
        ensure(
            self.armijo_mu0 > T::zero() && self.armijo_mu0.is_finite(),
            || format!("armijo_mu0 must be positive, got {}", self.armijo_mu0),
        )?;
        ensure(in_unit(self.power_floor_rel), || {
            format!(
                "power_floor_rel must lie in (0, 1), got {}",
                self.power_floor_rel
            )
        })
    }
}

/// Diagnostics from one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerTrace<T> {
    /// SE before the first step, then after every accepted step.
    pub se_per_iter: Vec<T>,
    /// Outer iterations executed (gradient evaluations).
    pub iters_used: usize,
    /// Stopped on the relative tolerance, a failed line search, or a zero gradient.
    pub converged: bool,
    pub init_index_chosen: usize,
    /// Channel was zero; the returned vector is uniform power.
    pub degenerate: bool,
}

impl<T: Scalar> OptimizerTrace<T> {
    pub fn final_se(&self) -> T {
        *self.se_per_iter.last().expect("trace holds the initial SE")
    }
}

/// Received amplitude and SNR shared by both gradients.
struct LinkState<T> {
    amplitude: Complex<T>,
    gamma: T,
}

fn link_state<T: Scalar>(h: &[Complex<T>], power: &[T], phase: &[T], noise: T) -> LinkState<T> {
    let amplitude = h
        .iter()
        .zip(power.iter().zip(phase))
        .fold(Complex::new(T::zero(), T::zero()), |acc, (hs, (&p, &t))| {
            acc + hs * Complex::from_polar(p.sqrt(), t)
        });
    LinkState {
        amplitude,
        gamma: amplitude.norm_sqr() / noise,
    }
}

fn se_of<T: Scalar>(h: &[Complex<T>], power: &[T], phase: &[T], noise: T) -> T {
    spectral_efficiency(link_state(h, power, phase, noise).gamma)
}

fn check_inputs<T: Scalar>(
    h: &ChannelRealization<T>,
    v: &BeamformingVector<T>,
    noise_power: T,
) -> Result<()> {
    ensure_len(h.len(), v.len())?;
    ensure(noise_power > T::zero(), || {
        format!("noise power must be positive, got {noise_power}")
    })
}

/// `∂SE/∂θ_s = −2√p_s · Im{h_s e^{jθ_s} (h·W)*} / (ln2 · (1+γ) · σ²)`.
pub fn grad_theta<T: Scalar>(
    h: &ChannelRealization<T>,
    v: &BeamformingVector<T>,
    noise_power: T,
) -> Result<Vec<T>> {
    check_inputs(h, v, noise_power)?;
    Ok(phase_gradient(&h.h, v.power(), v.phase(), noise_power))
}

fn phase_gradient<T: Scalar>(h: &[Complex<T>], power: &[T], phase: &[T], noise: T) -> Vec<T> {
    let state = link_state(h, power, phase, noise);
    let conj = state.amplitude.conj();
    let scale = -T::lit(2.0) / (T::LN_2() * (T::one() + state.gamma) * noise);
    h.iter()
        .zip(power.iter().zip(phase))
        .map(|(hs, (&p, &t))| {
            let term = hs * Complex::from_polar(T::one(), t) * conj;
            scale * p.sqrt() * term.im
        })
        .collect()
}

/// `∂SE/∂p_s = Re{h_s φ_s (h·W)*} / (ln2 · (1+γ) · σ² · √p_s)`.
///
/// Fails with [`Error::SingularityGuard`] when any power is below `power_floor`.
pub fn grad_power<T: Scalar>(
    h: &ChannelRealization<T>,
    v: &BeamformingVector<T>,
    noise_power: T,
    power_floor: T,
) -> Result<Vec<T>> {
    check_inputs(h, v, noise_power)?;
    if let Some((element, &p)) = v
        .power()
        .iter()
        .enumerate()
        .find(|(_, &p)| p.is_nan() || p < power_floor || p == T::zero())
    {
        return Err(Error::SingularityGuard {
            element,
            power: p.to_f64_lossy(),
            floor: power_floor.to_f64_lossy(),
        });
    }
    Ok(power_gradient(&h.h, v.power(), v.phase(), noise_power))
}

fn power_gradient<T: Scalar>(h: &[Complex<T>], power: &[T], phase: &[T], noise: T) -> Vec<T> {
    let state = link_state(h, power, phase, noise);
    let conj = state.amplitude.conj();
    let scale = T::one() / (T::LN_2() * (T::one() + state.gamma) * noise);
    h.iter()
        .zip(power.iter().zip(phase))
        .map(|(hs, (&p, &t))| {
            let term = hs * Complex::from_polar(T::one(), t) * conj;
            scale * term.re / p.sqrt()
        })
        .collect()
}

fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Rescales so the largest phase component has magnitude 2π and the largest
/// power component has magnitude `P`. An all-zero vector is returned unchanged.
pub fn normalize_gradients<T: Scalar>(
    g_theta: &[T],
    g_power: &[T],
    total_power: T,
) -> (Vec<T>, Vec<T>) {
    let scaled = |g: &[T], target: T| {
        let peak = max_abs(g);
        if peak > T::zero() {
            let k = target / peak;
            g.iter().map(|&x| x * k).collect()
        } else {
            g.to_vec()
        }
    };
    (scaled(g_theta, T::TAU()), scaled(g_power, total_power))
}

/// Projects onto `{p_s ≥ floor, Σ p_s ≤ budget}`: raises entries to the floor,
/// then, if over budget, shrinks the entries above the floor proportionally.
pub fn project_power<T: Scalar>(power: &mut [T], budget: T, floor: T) {
    for p in power.iter_mut() {
        if p.is_nan() || *p < floor {
            *p = floor;
        }
    }
    for _ in 0..power.len() {
        let total: T = power.iter().copied().sum();
        if total <= budget {
            return;
        }
        let (mut fixed, mut free) = (T::zero(), T::zero());
        for &p in power.iter() {
            if p > floor {
                free += p;
            } else {
                fixed += p;
            }
        }
        if free <= T::zero() {
            return;
        }
        let scale = ((budget - fixed) / free).max(T::zero());
        let mut clamped = false;
        for p in power.iter_mut().filter(|p| **p > floor) {
            *p *= scale;
            if *p < floor {
                *p = floor;
                clamped = true;
            }
        }
        if !clamped {
            return;
        }
    }
}

/// One update `θ ← θ + μ·g_θ`, `p ← p + μ·g_p`, followed by phase wrapping and power projection.
pub fn ascend_step<T: Scalar>(
    v: &BeamformingVector<T>,
    g_theta: &[T],
    g_power: &[T],
    mu: T,
    total_power: T,
    power_floor: T,
) -> Result<BeamformingVector<T>> {
    ensure_len(v.len(), g_theta.len())?;
    ensure_len(v.len(), g_power.len())?;
    ensure(mu >= T::zero(), || {
        format!("step size must be non-negative, got {mu}")
    })?;
    let (power, phase) = step_parts(
        v.power(),
        v.phase(),
        g_theta,
        g_power,
        mu,
        total_power,
        power_floor,
    );
    Ok(BeamformingVector::from_parts_unchecked(power, phase))
}

fn step_parts<T: Scalar>(
    power: &[T],
    phase: &[T],
    g_theta: &[T],
    g_power: &[T],
    mu: T,
    budget: T,
    floor: T,
) -> (Vec<T>, Vec<T>) {
    let phase = phase
        .iter()
        .zip(g_theta)
        .map(|(&t, &g)| wrap_phase(t + mu * g))
        .collect();
    let mut power: Vec<T> = power
        .iter()
        .zip(g_power)
        .map(|(&p, &g)| p + mu * g)
        .collect();
    project_power(&mut power, budget, floor);
    (power, phase)
}

/// Random start: phases uniform on `(0, 2π]`, powers uniform on the simplex scaled to `P`.
pub fn random_start<T: Scalar, R: Rng + ?Sized>(
    elements: usize,
    total_power: T,
    rng: &mut R,
) -> BeamformingVector<T> {
    let phase = (0..elements)
        .map(|_| T::TAU() * (T::one() - T::lit(rng.random::<f64>())))
        .collect();
    let draws: Vec<f64> = (0..elements).map(|_| rng.sample(Exp1)).collect();
    let sum: f64 = draws.iter().sum();
    let power = if sum > 0.0 {
        draws
            .iter()
            .map(|d| total_power * T::lit(d / sum))
            .collect()
    } else {
        vec![total_power / T::from_usize_lossy(elements); elements]
    };
    BeamformingVector::from_parts_unchecked(power, phase)
}

struct Ascent<T> {
    vector: BeamformingVector<T>,
    se_per_iter: Vec<T>,
    iters_used: usize,
    converged: bool,
}

fn ascend<T: Scalar>(
    h: &[Complex<T>],
    start: &BeamformingVector<T>,
    budget: T,
    noise: T,
    cfg: &OptimizerConfig<T>,
) -> Ascent<T> {
    let floor = cfg.power_floor_rel * budget;
    let mut power = start.power().to_vec();
    project_power(&mut power, budget, floor);
    let mut phase = start.phase().to_vec();
    let mut se = se_of(h, &power, &phase, noise);
    let mut se_per_iter = vec![se];
    let mut iters_used = 0;
    let mut converged = false;

    for iter in 1..=cfg.max_iters {
        iters_used = iter;
        let g_theta = phase_gradient(h, &power, &phase, noise);
        let mut g_power = power_gradient(h, &power, &phase, noise);
        if cfg.mask_active_floor {
            for (g, &p) in g_power.iter_mut().zip(&power) {
                if p <= floor && *g < T::zero() {
                    *g = T::zero();
                }
            }
        }
        let (d_theta, d_power) = normalize_gradients(&g_theta, &g_power, budget);
        let slope = match cfg.armijo_rule {
            ArmijoRule::DirectionalDerivative => dot(&g_theta, &d_theta) + dot(&g_power, &d_power),
            ArmijoRule::StepNorm => dot(&d_theta, &d_theta) + dot(&d_power, &d_power),
        };
        if slope.is_nan() || slope <= T::zero() {
            converged = true;
            break;
        }

        let mut mu = cfg.armijo_mu0;
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            let (p, t) = step_parts(&power, &phase, &d_theta, &d_power, mu, budget, floor);
            let candidate = se_of(h, &p, &t, noise);
            if candidate >= se + cfg.armijo_c1 * mu * slope {
                accepted = Some((p, t, candidate));
                break;
            }
            mu *= cfg.armijo_shrink;
        }
        let Some((p, t, candidate)) = accepted else {
            converged = true;
            break;
        };
        let gain = if se > T::zero() {
            (candidate - se) / se
        } else {
            T::infinity()
        };
        power = p;
        phase = t;
        se = candidate;
        se_per_iter.push(se);
        if gain < cfg.rel_tol {
            converged = true;
            break;
        }
    }

    Ascent {
        vector: BeamformingVector::from_parts_unchecked(power, phase),
        se_per_iter,
        iters_used,
        converged,
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Maximizes `log2(1 + |h·W|²/σ²)` subject to `Σ p_s ≤ P`, `p_s ≥ 0`, `|φ_s| = 1`.
///
/// The returned SE is never below the best initial SE and, by Cauchy–Schwarz,
/// never above the maximum-ratio optimum.
pub fn optimize<T: Scalar, R: Rng + ?Sized>(
    h: &ChannelRealization<T>,
    total_power: T,
    noise_power: T,
    cfg: &OptimizerConfig<T>,
    rng: &mut R,
) -> Result<(BeamformingVector<T>, OptimizerTrace<T>)> {
    cfg.validate()?;
    ensure(!h.is_empty(), || "channel has no elements".into())?;
    ensure(total_power > T::zero() && total_power.is_finite(), || {
        format!("total power must be positive, got {total_power}")
    })?;
    ensure(noise_power > T::zero(), || {
        format!("noise power must be positive, got {noise_power}")
    })?;
    ensure(
        cfg.power_floor_rel * T::from_usize_lossy(h.len()) < T::one(),
        || "power floor times element count exceeds the budget".into(),
    )?;

    if h.norm_sqr() == T::zero() {
        let oracle = mrt_oracle(h, total_power, noise_power)?;
        let trace = OptimizerTrace {
            se_per_iter: vec![T::zero()],
            iters_used: 0,
            converged: true,
            init_index_chosen: 0,
            degenerate: true,
        };
        return Ok((oracle.vector, trace));
    }

    let starts: Vec<BeamformingVector<T>> = (0..cfg.num_inits)
        .map(|_| random_start(h.len(), total_power, rng))
        .collect();

    let (index, best) = if cfg.optimize_all_inits {
        starts
            .iter()
            .map(|s| ascend(&h.h, s, total_power, noise_power, cfg))
            .enumerate()
            .fold(None::<(usize, Ascent<T>)>, |best, (i, run)| match best {
                Some((_, ref b)) if b.se_per_iter.last() >= run.se_per_iter.last() => best,
                _ => Some((i, run)),
            })
            .expect("at least one start")
    } else {
        let index = starts
            .iter()
            .map(|s| se_of(&h.h, s.power(), s.phase(), noise_power))
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, bs), (i, s)| {
                if s > bs {
                    (i, s)
                } else {
                    (bi, bs)
                }
            })
            .0;
        (
            index,
            ascend(&h.h, &starts[index], total_power, noise_power, cfg),
        )
    };

    let trace = OptimizerTrace {
        se_per_iter: best.se_per_iter,
        iters_used: best.iters_used,
        converged: best.converged,
        init_index_chosen: index,
        degenerate: false,
    };
    Ok((best.vector, trace))
}
