//! Average achievable rate, `(1 - alpha beta) E[log2(1 + mu gamma / L*)]`.
//!
//! Logs are natural throughout; the single conversion to bits happens in the
//! prefactor. `m` below is the SNR numerator `mu * P_t / sigma^2` in square
//! meters (about 2.2e5 at 28 GHz, 0.3 W and -90 dBm). At that size the
//! arctangent arguments `span / sqrt(m + h^2)` are small but still carry full
//! relative precision, so no series expansion is needed.

use std::fmt;

use thiserror::Error;

use crate::distdist::SquaredDistanceDistribution;
use crate::geometry::{Deployment, Scheme};
use crate::quadrature::{QuadratureError, QuadratureOptions};
use crate::sysconfig::{ProtocolParams, RegionGeometry, SystemParams};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("the {0} scheme has no strip closed form; use the diagonal closed form")]
    SchemeMismatch(Scheme),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RateMethod {
    Closed,
    Quadrature,
    MonteCarlo,
}

impl RateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMethod::Closed => "closed",
            RateMethod::Quadrature => "quadrature",
            RateMethod::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for RateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult<T> {
    pub bits_per_s_per_hz: T,
    pub scheme: Scheme,
    pub method: RateMethod,
}

/// Received SNR `mu * gamma_bar / L` at squared distance `L`.
pub fn snr<T: Scalar>(system: &SystemParams<T>, squared_distance: T) -> T {
    system.snr_scale_m2() / squared_distance
}

/// `int_0^span ln(1 + m / (h^2 + t^2)) dt`, integrated by parts:
/// `2 A atan(span / A) - 2 h atan(span / h) + span ln(1 + m / (h^2 + span^2))`
/// with `A = sqrt(m + h^2)`.
pub fn strip_log_integral<T: Scalar>(m: T, h: T, span: T) -> T {
    let a = (m + h * h).sqrt();
    T::two() * a * (span / a).atan() - T::two() * h * (span / h).atan()
        + span * (m / (h * h + span * span)).ln_1p()
}

/// `int_{h^2}^{h^2 + reach^2} ln(1 + m / l) / sqrt(l - h^2) dl`.
pub fn diagonal_i1<T: Scalar>(m: T, h: T, reach: T) -> T {
    let a = (m + h * h).sqrt();
    let four = T::lit(4.0);
    four * a * (reach / a).atan() - four * h * (reach / h).atan()
        + T::two() * reach * (m / (reach * reach + h * h)).ln_1p()
}

/// `int_{h^2}^{h^2 + reach^2} ln(1 + m / l) dl`.
///
/// Equal to `U ln(1 + m/U) + m ln(U + m) - h^2 ln(1 + m/h^2) - m ln(h^2 + m)`
/// with `U = h^2 + reach^2`; the two `m ln(.)` terms are merged into one
/// `ln_1p` to avoid cancelling two large logs.
pub fn diagonal_i2<T: Scalar>(m: T, h: T, reach: T) -> T {
    let h2 = h * h;
    let upper = h2 + reach * reach;
    upper * (m / upper).ln_1p() + m * (reach * reach / (h2 + m)).ln_1p() - h2 * (m / h2).ln_1p()
}

/// Closed-form rate for the edge (`Eds`) and center (`Cds`) schemes.
pub fn avg_rate_edge_center_closed<T: Scalar>(
    scheme: Scheme,
    region: &RegionGeometry<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
) -> Result<RateResult<T>, RateError> {
    let strips = scheme.strips().ok_or(RateError::SchemeMismatch(scheme))?;
    let span = region.d_y() / T::lit(f64::from(strips));
    let integral = strip_log_integral(system.snr_scale_m2(), region.height(), span);
    Ok(RateResult {
        bits_per_s_per_hz: protocol.decode_share() / (span * T::LN_2()) * integral,
        scheme,
        method: RateMethod::Closed,
    })
}

/// Closed-form rate for the diagonal scheme.
pub fn avg_rate_diagonal_closed<T: Scalar>(
    region: &RegionGeometry<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
) -> RateResult<T> {
    let m = system.snr_scale_m2();
    let h = region.height();
    let reach = region.diagonal_reach();
    let inner = diagonal_i1(m, h, reach) / reach - diagonal_i2(m, h, reach) / (reach * reach);
    RateResult {
        bits_per_s_per_hz: protocol.decode_share() / T::LN_2() * inner,
        scheme: Scheme::Dds,
        method: RateMethod::Closed,
    }
}

/// Closed-form rate for any scheme.
pub fn avg_rate_closed<T: Scalar>(
    deployment: &Deployment<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
) -> RateResult<T> {
    match deployment.scheme {
        Scheme::Dds => avg_rate_diagonal_closed(&deployment.region, system, protocol),
        s => avg_rate_edge_center_closed(s, &deployment.region, system, protocol)
            .expect("strip schemes have a closed form"),
    }
}

/// Rate by quadrature against the squared-distance law.
pub fn avg_rate_quadrature<T: Scalar>(
    deployment: &Deployment<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
    opts: &QuadratureOptions<T>,
) -> Result<RateResult<T>, RateError> {
    let dist = SquaredDistanceDistribution::new(*deployment);
    let m = system.snr_scale_m2();
    let nats = dist.expectation(|l| (m / l).ln_1p(), opts)?;
    Ok(RateResult {
        bits_per_s_per_hz: protocol.decode_share() / T::LN_2() * nats.value,
        scheme: deployment.scheme,
        method: RateMethod::Quadrature,
    })
}
