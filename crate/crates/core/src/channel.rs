//! Large-scale path loss, spatial correlation, and correlated Rayleigh sampling.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure, ensure_len, Error, Result};
use crate::geometry::ArrayGeometry;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::Scalar;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Eigenvalues below this fraction of the largest one are clipped to zero.
pub const EIGEN_CLIP_RELATIVE: f64 = 1e-12;

/// Uplink link budget. All powers are linear watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams<T> {
    pub carrier_hz: T,
    pub distance_m: T,
    pub path_loss_exponent: T,
    pub reference_distance_m: T,
    /// Radiation efficiency of the antenna material, in (0, 1].
    pub alpha: T,
    pub noise_power_w: T,
    pub tx_power_w: T,
    /// Extra attenuation in dB applied on top of the distance law.
    pub extra_loss_db: T,
}

impl<T: Scalar> LinkParams<T> {
    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: T| v.is_finite() && v > T::zero();
        ensure(finite_pos(self.carrier_hz), || {
            format!(
                "carrier frequency must be positive, got {}",
                self.carrier_hz
            )
        })?;
        ensure(finite_pos(self.reference_distance_m), || {
            format!(
                "reference distance must be positive, got {}",
                self.reference_distance_m
            )
        })?;
        ensure(
            self.distance_m.is_finite() && self.distance_m >= self.reference_distance_m,
            || {
                format!(
                    "UE-AP distance {} must be at least the reference distance {}",
                    self.distance_m, self.reference_distance_m
                )
            },
        )?;
        ensure(
            self.path_loss_exponent.is_finite() && self.path_loss_exponent > T::lit(2.0),
            || {
                format!(
                    "path-loss exponent must exceed 2, got {}",
                    self.path_loss_exponent
                )
            },
        )?;
        ensure(self.alpha > T::zero() && self.alpha <= T::one(), || {
            format!("alpha must lie in (0, 1], got {}", self.alpha)
        })?;
        ensure(finite_pos(self.noise_power_w), || {
            format!("noise power must be positive, got {}", self.noise_power_w)
        })?;
        ensure(finite_pos(self.tx_power_w), || {
            format!("transmit power must be positive, got {}", self.tx_power_w)
        })?;
        ensure(!self.extra_loss_db.is_nan(), || {
            "extra loss must be a number".to_string()
        })?;
        Ok(())
    }

    pub fn wavelength(&self) -> T {
        T::lit(SPEED_OF_LIGHT) / self.carrier_hz
    }

    /// Average per-element channel power `α·ℓ(d_AP)`.
    pub fn channel_gain(&self) -> Result<T> {
        Ok(self.alpha * path_loss(self)?)
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }
}

/// Free-space reference loss at `d0` followed by a power-law decay:
/// `(λ/(4π d0))² · (d_AP/d0)^(−η) · 10^(−extra/10)`.
pub fn path_loss<T: Scalar>(params: &LinkParams<T>) -> Result<T> {
    params.validate()?;
    let reference =
        (params.wavelength() / (T::lit(4.0) * T::PI() * params.reference_distance_m)).powi(2);
    let decay = (params.distance_m / params.reference_distance_m).powf(-params.path_loss_exponent);
    Ok(reference * decay * db_to_linear(-params.extra_loss_db))
}

/// Normalized sinc, `sin(πx)/(πx)` with `sinc(0) = 1`.
pub fn sinc<T: Scalar>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        let px = T::PI() * x;
        px.sin() / px
    }
}

/// Spatial correlation of an array under isotropic scattering, with a
/// sampling factor `C` such that `C·Cᵀ` is the PSD-clipped correlation.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix<T> {
    r: Matrix<T>,
    factor: Matrix<T>,
    eigenvalues: Vec<T>,
    clipped: usize,
}

impl<T: Scalar> CorrelationMatrix<T> {
    pub fn dim(&self) -> usize {
        self.r.dim()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.r
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.factor
    }

    /// Eigenvalues of the raw correlation matrix, ascending, before clipping.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Number of eigenvalues that were clipped to zero.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    /// `C·Cᵀ`, the covariance actually realized by sampling.
    pub fn clipped_matrix(&self) -> Matrix<T> {
        self.factor.mul_transpose(&self.factor)
    }
}

/// Builds `R[s][s'] = sinc(2·d(s,s')/λ)` and its eigen-based sampling factor.
pub fn correlation_matrix<T: Scalar>(
    geom: &ArrayGeometry<T>,
    wavelength: T,
) -> Result<CorrelationMatrix<T>> {
    ensure(wavelength > T::zero() && wavelength.is_finite(), || {
        format!("wavelength must be positive, got {wavelength}")
    })?;
    let n = geom.len();
    let two = T::lit(2.0);
    let r = Matrix::from_fn(n, |i, j| {
        if i == j {
            T::one()
        } else {
            sinc(two * geom.distance(i, j) / wavelength)
        }
    });
    let eig = symmetric_eigen(&r)?;
    let max = eig.values.iter().copied().fold(T::zero(), T::max);
    let threshold = max * T::lit(EIGEN_CLIP_RELATIVE);
    let mut clipped = 0;
    let roots: Vec<T> = eig
        .values
        .iter()
        .map(|&v| {
            if v < threshold {
                clipped += 1;
                T::zero()
            } else {
                v.sqrt()
            }
        })
        .collect();
    let factor = Matrix::from_fn(n, |i, k| eig.vectors.get(i, k) * roots[k]);
    Ok(CorrelationMatrix {
        r,
        factor,
        eigenvalues: eig.values,
        clipped,
    })
}

/// One draw of the uplink channel row.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    pub h: Vec<Complex<T>>,
    pub params: LinkParams<T>,
    pub seed_tag: u64,
}

impl<T: Scalar> ChannelRealization<T> {
    pub fn new(h: Vec<Complex<T>>, params: LinkParams<T>, seed_tag: u64) -> Result<Self> {
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericFailure(
                "channel has non-finite entries".into(),
            ));
        }
        Ok(Self {
            h,
            params,
            seed_tag,
        })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.h.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `CN(0, 1)`: real and imaginary parts each `N(0, 1/2)`.
pub fn standard_complex_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im)) * T::FRAC_1_SQRT_2()
}

/// Colors a white vector `z`: returns `√gain · C·z`.
pub fn correlate<T: Scalar>(
    corr: &CorrelationMatrix<T>,
    gain: T,
    z: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    ensure_len(corr.dim(), z.len())?;
    let amp = gain.sqrt();
    Ok(corr
        .factor
        .mul_complex(z)?
        .into_iter()
        .map(|v| v * amp)
        .collect())
}

/// Draws `h ~ CN(0, α·ℓ·R)` using the correlation factor.
pub fn sample_channel<T: Scalar, R: Rng + ?Sized>(
    corr: &CorrelationMatrix<T>,
    params: &LinkParams<T>,
    rng: &mut R,
    seed_tag: u64,
) -> Result<ChannelRealization<T>> {
    let gain = params.channel_gain()?;
    let z: Vec<Complex<T>> = (0..corr.dim())
        .map(|_| standard_complex_normal(rng))
        .collect();
    ChannelRealization::new(correlate(corr, gain, &z)?, *params, seed_tag)
}

pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Scalar>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

pub fn dbm_to_watts<T: Scalar>(dbm: T) -> T {
    db_to_linear(dbm - T::lit(30.0))
}

pub fn watts_to_dbm<T: Scalar>(watts: T) -> Result<T> {
    ensure(watts > T::zero() && watts.is_finite(), || {
        format!("power must be positive to convert to dBm, got {watts}")
    })?;
    Ok(linear_to_db(watts) + T::lit(30.0))
}
