//! Average harvested energy.
//!
//! Energy is reported as average power over the unit period, in watts. The
//! incident power at squared distance `L` is `beta * P_t / L`.

use std::fmt;

use thiserror::Error;

use crate::distdist::SquaredDistanceDistribution;
use crate::geometry::{Deployment, Scheme};
use crate::quadrature::{QuadratureError, QuadratureOptions};
use crate::sysconfig::{HarvestModel, LogisticParams, ModelKind, ProtocolParams, SystemParams};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("expected a {expected} harvesting model, got {got}")]
    WrongModel { expected: ModelKind, got: ModelKind },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergyMethod {
    Closed,
    JensenBound,
    Quadrature,
    MonteCarlo,
}

impl EnergyMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyMethod::Closed => "closed",
            EnergyMethod::JensenBound => "bound",
            EnergyMethod::Quadrature => "quadrature",
            EnergyMethod::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for EnergyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResult<T> {
    pub value_w: T,
    pub model: ModelKind,
    pub method: EnergyMethod,
    pub scheme: Scheme,
}

/// Logistic rectifier output for incident power `p_in`:
/// `[phi / (1 - Omega) * (sigmoid(a (p_in - b)) - Omega)]^+`.
pub fn logistic_harvest<T: Scalar>(params: &LogisticParams<T>, p_in: T) -> T {
    let z = params.steepness_per_w() * (p_in - params.threshold_w());
    // Same expression as the offset for z = -ab, so the bracket is exactly 0 at p_in = 0.
    let sigmoid = if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    };
    let omega = params.offset();
    let value = params.saturation_w() / (T::one() - omega) * (sigmoid - omega);
    value.max(T::zero())
}

/// Harvested power for incident power `p_in` under either model.
pub fn harvest<T: Scalar>(model: &HarvestModel<T>, p_in: T) -> T {
    match model {
        HarvestModel::Linear { eta } => *eta * p_in,
        HarvestModel::Logistic(p) => logistic_harvest(p, p_in),
    }
}

/// `E[1 / L*]` in closed form, per square meter.
pub fn mean_inverse_squared_distance<T: Scalar>(deployment: &Deployment<T>) -> T {
    let r = &deployment.region;
    let h = r.height();
    match deployment.scheme.strips() {
        Some(n) => {
            let n = T::lit(f64::from(n));
            n / (h * r.d_y()) * (r.d_y() / (n * h)).atan()
        }
        None => {
            let reach = r.diagonal_reach();
            let q = reach / h;
            T::two() / (reach * h) * q.atan() - (q * q).ln_1p() / (reach * reach)
        }
    }
}

fn expect_linear<T: Scalar>(model: &HarvestModel<T>) -> Result<T, EnergyError> {
    match model {
        HarvestModel::Linear { eta } => Ok(*eta),
        other => Err(EnergyError::WrongModel {
            expected: ModelKind::Linear,
            got: other.kind(),
        }),
    }
}

fn expect_logistic<T: Scalar>(model: &HarvestModel<T>) -> Result<&LogisticParams<T>, EnergyError> {
    match model {
        HarvestModel::Logistic(p) => Ok(p),
        other => Err(EnergyError::WrongModel {
            expected: ModelKind::Logistic,
            got: other.kind(),
        }),
    }
}

/// Closed-form average harvested power under the linear model.
pub fn avg_energy_lm_closed<T: Scalar>(
    deployment: &Deployment<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
    model: &HarvestModel<T>,
) -> Result<EnergyResult<T>, EnergyError> {
    let eta = expect_linear(model)?;
    let value_w = protocol.alpha()
        * protocol.beta()
        * eta
        * system.transmit_power_w()
        * mean_inverse_squared_distance(deployment);
    Ok(EnergyResult {
        value_w,
        model: ModelKind::Linear,
        method: EnergyMethod::Closed,
        scheme: deployment.scheme,
    })
}

/// Mean incident power `beta * P_t * E[1/L*]`.
pub fn mean_incident_power<T: Scalar>(
    deployment: &Deployment<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
) -> T {
    protocol.beta() * system.transmit_power_w() * mean_inverse_squared_distance(deployment)
}

/// Upper bound `alpha * Phi(E[P_in])` on the logistic-model average. Valid
/// while the incident power stays on the concave side of the logistic.
pub fn avg_energy_nlm_bound<T: Scalar>(
    deployment: &Deployment<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
    model: &HarvestModel<T>,
) -> Result<EnergyResult<T>, EnergyError> {
    let params = expect_logistic(model)?;
    let p_in = mean_incident_power(deployment, system, protocol);
    Ok(EnergyResult {
        value_w: protocol.alpha() * logistic_harvest(params, p_in),
        model: ModelKind::Logistic,
        method: EnergyMethod::JensenBound,
        scheme: deployment.scheme,
    })
}

/// Exact average harvested power under either model, by quadrature against
/// the squared-distance law.
pub fn avg_energy_quadrature<T: Scalar>(
    deployment: &Deployment<T>,
    system: &SystemParams<T>,
    protocol: &ProtocolParams<T>,
    model: &HarvestModel<T>,
    opts: &QuadratureOptions<T>,
) -> Result<EnergyResult<T>, EnergyError> {
    let dist = SquaredDistanceDistribution::new(*deployment);
    let source = protocol.beta() * system.transmit_power_w();
    let h = deployment.region.height();

    // Break where the incident power crosses the logistic threshold.
    let mut breaks = Vec::new();
    if let HarvestModel::Logistic(p) = model {
        let s2 = source / p.threshold_w() - h * h;
        if s2 > T::zero() {
            breaks.push(s2.sqrt());
        }
    }
    let mean = dist.expectation_with_breaks(|l| harvest(model, source / l), &breaks, opts)?;
    Ok(EnergyResult {
        value_w: protocol.alpha() * mean.value,
        model: model.kind(),
        method: EnergyMethod::Quadrature,
        scheme: deployment.scheme,
    })
}
