//! Beamforming vectors, link SNR/SE, the non-coherent edge baseline, and the
//! closed-form maximum-ratio optimum.

use num_complex::Complex;

use crate::channel::ChannelRealization;
use crate::error::{ensure, ensure_len, Result};
use crate::Scalar;

/// Maps an angle into `(0, 2π]`; an exact multiple of 2π maps to 2π.
pub fn wrap_phase<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let r = theta % tau;
    if r <= T::zero() {
        r + tau
    } else {
        r
    }
}

/// Per-element transmit power (watts) and phase (radians, in `(0, 2π]`).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingVector<T> {
    power: Vec<T>,
    phase: Vec<T>,
}

impl<T: Scalar> BeamformingVector<T> {
    /// Phases are canonicalized into `(0, 2π]`.
    pub fn new(power: Vec<T>, phase: Vec<T>) -> Result<Self> {
        ensure_len(power.len(), phase.len())?;
        ensure(
            power.iter().all(|&p| p >= T::zero() && p.is_finite()),
            || "element powers must be finite and non-negative".into(),
        )?;
        ensure(phase.iter().all(|t| t.is_finite()), || {
            "element phases must be finite".into()
        })?;
        Ok(Self::from_parts_unchecked(
            power,
            phase.into_iter().map(wrap_phase).collect(),
        ))
    }

    pub(crate) fn from_parts_unchecked(power: Vec<T>, phase: Vec<T>) -> Self {
        Self { power, phase }
    }

    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn power(&self) -> &[T] {
        &self.power
    }

    pub fn phase(&self) -> &[T] {
        &self.phase
    }

    pub fn total_power(&self) -> T {
        self.power.iter().copied().sum()
    }

    /// Total power within `budget` up to a relative slack of 1e-9.
    pub fn within_budget(&self, budget: T) -> bool {
        self.total_power() <= budget + budget * T::lit(1e-9)
    }

    /// `w_s = √p_s · e^{jθ_s}`.
    pub fn weights(&self) -> Vec<Complex<T>> {
        self.power
            .iter()
            .zip(&self.phase)
            .map(|(&p, &t)| Complex::from_polar(p.sqrt(), t))
            .collect()
    }
}

/// Complex weights of `v`.
pub fn weights<T: Scalar>(v: &BeamformingVector<T>) -> Vec<Complex<T>> {
    v.weights()
}

/// Received amplitude `Σ_s h_s w_s`.
pub fn received_amplitude<T: Scalar>(h: &[Complex<T>], w: &[Complex<T>]) -> Result<Complex<T>> {
    ensure_len(h.len(), w.len())?;
    Ok(h.iter()
        .zip(w)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
            acc + a * b
        }))
}

/// `|h·W|² / σ²`.
pub fn snr<T: Scalar>(
    h: &ChannelRealization<T>,
    v: &BeamformingVector<T>,
    noise_power: T,
) -> Result<T> {
    ensure(noise_power > T::zero(), || {
        format!("noise power must be positive, got {noise_power}")
    })?;
    Ok(received_amplitude(&h.h, &v.weights())?.norm_sqr() / noise_power)
}

/// `log2(1 + γ)` in bps/Hz.
pub fn spectral_efficiency<T: Scalar>(gamma: T) -> T {
    (T::one() + gamma).log2()
}

/// Equal power `P/S` on every element with one common phase.
pub fn edgeant_weights<T: Scalar>(elements: usize, total_power: T) -> Result<BeamformingVector<T>> {
    ensure(elements >= 1, || {
        "baseline needs at least one element".into()
    })?;
    ensure(total_power > T::zero() && total_power.is_finite(), || {
        format!("total power must be positive, got {total_power}")
    })?;
    let p = total_power / T::from_usize_lossy(elements);
    Ok(BeamformingVector::from_parts_unchecked(
        vec![p; elements],
        vec![T::TAU(); elements],
    ))
}

/// Closed-form SNR-optimal beamformer for a single-antenna receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution<T> {
    pub vector: BeamformingVector<T>,
    /// `log2(1 + P‖h‖²/σ²)`.
    pub se: T,
    /// Set when the channel is identically zero; `vector` is then uniform power.
    pub degenerate: bool,
}

/// Maximum-ratio transmission: `θ_s = −arg h_s`, `p_s = P|h_s|²/‖h‖²`.
///
/// By Cauchy–Schwarz `|h·W|² ≤ ‖h‖²·Σp_s ≤ P‖h‖²`, with equality exactly for this choice.
pub fn mrt_oracle<T: Scalar>(
    h: &ChannelRealization<T>,
    total_power: T,
    noise_power: T,
) -> Result<OracleSolution<T>> {
    ensure(total_power > T::zero(), || {
        format!("total power must be positive, got {total_power}")
    })?;
    ensure(noise_power > T::zero(), || {
        format!("noise power must be positive, got {noise_power}")
    })?;
    let norm_sqr = h.norm_sqr();
    if norm_sqr == T::zero() {
        return Ok(OracleSolution {
            vector: edgeant_weights(h.len().max(1), total_power)?,
            se: T::zero(),
            degenerate: true,
        });
    }
    let power =
        h.h.iter()
            .map(|z| total_power * z.norm_sqr() / norm_sqr)
            .collect();
    let phase = h.h.iter().map(|z| wrap_phase(-z.arg())).collect();
    Ok(OracleSolution {
        vector: BeamformingVector::from_parts_unchecked(power, phase),
        se: spectral_efficiency(total_power * norm_sqr / noise_power),
        degenerate: false,
    })
}
