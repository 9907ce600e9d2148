//! Physical, geometric and protocol parameters.
//!
//! Everything is stored in SI units (W, m, Hz). Unit conversion happens at the
//! boundary ([`crate::config_file`], the CLI); nothing below this module sees
//! dBm or microwatts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Deployment, Scheme};
use crate::Scalar;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts<T: Scalar>(p_dbm: T) -> T {
    T::lit(10.0).powf((p_dbm - T::lit(30.0)) / T::lit(10.0))
}

pub fn watts_to_dbm<T: Scalar>(p_w: T) -> T {
    T::lit(10.0) * p_w.log10() + T::lit(30.0)
}

/// One violated parameter constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every constraint a configuration violated, in field order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<FieldError>);

impl ValidationErrors {
    pub fn fields(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.iter().map(|e| e.field)
    }

    pub fn mentions(&self, field: &str) -> bool {
        self.0.iter().any(|e| e.field == field)
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration")?;
        for (i, e) in self.0.iter().enumerate() {
            write!(f, "{} {e}", if i == 0 { ":" } else { ";" })?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Checker(Vec<FieldError>);

impl Checker {
    fn positive<T: Scalar>(&mut self, field: &'static str, v: T) {
        if !(v.is_finite() && v > T::zero()) {
            self.0.push(FieldError {
                field,
                message: format!("must be positive and finite, got {v}"),
            });
        }
    }

    fn unit_interval<T: Scalar>(&mut self, field: &'static str, v: T) {
        if !(v >= T::zero() && v <= T::one()) {
            self.0.push(FieldError {
                field,
                message: format!("must lie in [0, 1], got {v}"),
            });
        }
    }

    fn efficiency<T: Scalar>(&mut self, field: &'static str, v: T) {
        if !(v > T::zero() && v <= T::one()) {
            self.0.push(FieldError {
                field,
                message: format!("must lie in (0, 1], got {v}"),
            });
        }
    }

    fn finish(self) -> Result<(), ValidationErrors> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(ValidationErrors(self.0))
        }
    }
}

/// Free-space path-loss factor `c^2 / (16 pi^2 f_c^2)`, in square meters.
pub fn derive_mu<T: Scalar>(carrier_frequency_hz: T) -> Result<T, FieldError> {
    if !(carrier_frequency_hz.is_finite() && carrier_frequency_hz > T::zero()) {
        return Err(FieldError {
            field: "carrier_frequency_hz",
            message: format!("must be positive and finite, got {carrier_frequency_hz}"),
        });
    }
    let c = T::lit(SPEED_OF_LIGHT_M_S);
    let four_pi_f = T::lit(4.0) * T::PI() * carrier_frequency_hz;
    let ratio = c / four_pi_f;
    Ok(ratio * ratio)
}

/// Carrier, noise and transmit power with the constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    carrier_frequency_hz: T,
    noise_power_w: T,
    transmit_power_w: T,
    wavelength_m: T,
    path_loss_m2: T,
    wavenumber_per_m: T,
    transmit_snr: T,
}

impl<T: Scalar> SystemParams<T> {
    pub fn new(
        carrier_frequency_hz: T,
        noise_power_w: T,
        transmit_power_w: T,
    ) -> Result<Self, ValidationErrors> {
        let mut check = Checker::default();
        check.positive("carrier_frequency_hz", carrier_frequency_hz);
        check.positive("noise_power_w", noise_power_w);
        check.positive("transmit_power_w", transmit_power_w);
        check.finish()?;
        Ok(Self::derive(
            carrier_frequency_hz,
            noise_power_w,
            transmit_power_w,
        ))
    }

    fn derive(carrier_frequency_hz: T, noise_power_w: T, transmit_power_w: T) -> Self {
        let wavelength_m = T::lit(SPEED_OF_LIGHT_M_S) / carrier_frequency_hz;
        // Inputs were range-checked by the caller.
        let path_loss_m2 = derive_mu(carrier_frequency_hz).expect("validated carrier frequency");
        Self {
            carrier_frequency_hz,
            noise_power_w,
            transmit_power_w,
            wavelength_m,
            path_loss_m2,
            wavenumber_per_m: T::two() * T::PI() / wavelength_m,
            transmit_snr: transmit_power_w / noise_power_w,
        }
    }

    pub fn with_transmit_power(&self, transmit_power_w: T) -> Result<Self, ValidationErrors> {
        Self::new(
            self.carrier_frequency_hz,
            self.noise_power_w,
            transmit_power_w,
        )
    }

    pub fn carrier_frequency_hz(&self) -> T {
        self.carrier_frequency_hz
    }

    pub fn noise_power_w(&self) -> T {
        self.noise_power_w
    }

    pub fn transmit_power_w(&self) -> T {
        self.transmit_power_w
    }

    pub fn wavelength_m(&self) -> T {
        self.wavelength_m
    }

    /// Path-loss factor `mu`; the received power at squared distance `L` is `mu * P_t / L`.
    pub fn path_loss_m2(&self) -> T {
        self.path_loss_m2
    }

    /// Wavenumber `2 pi / lambda`. Only enters the unit-modulus phase of the
    /// received signal, so no magnitude computation uses it.
    pub fn wavenumber_per_m(&self) -> T {
        self.wavenumber_per_m
    }

    /// Transmit SNR `P_t / sigma^2`.
    pub fn transmit_snr(&self) -> T {
        self.transmit_snr
    }

    /// `mu * P_t / sigma^2`, the SNR numerator in square meters.
    pub fn snr_scale_m2(&self) -> T {
        self.path_loss_m2 * self.transmit_snr
    }
}

/// Hybrid time-switching / power-splitting split of a unit-length period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams<T> {
    alpha: T,
    beta: T,
}

impl<T: Scalar> ProtocolParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self, ValidationErrors> {
        let mut check = Checker::default();
        check.unit_interval("alpha", alpha);
        check.unit_interval("beta", beta);
        check.finish()?;
        Ok(Self { alpha, beta })
    }

    /// Fraction of the period spent harvesting.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Fraction of received power routed to the harvester while harvesting.
    pub fn beta(&self) -> T {
        self.beta
    }

    /// Share of time-power left for decoding, `1 - alpha * beta`.
    pub fn decode_share(&self) -> T {
        T::one() - self.alpha * self.beta
    }
}

/// The service rectangle and the waveguide height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionGeometry<T> {
    d_x: T,
    d_y: T,
    height: T,
    aspect: T,
    diagonal_reach: T,
}

impl<T: Scalar> RegionGeometry<T> {
    pub fn new(d_x: T, d_y: T, height: T) -> Result<Self, ValidationErrors> {
        let mut check = Checker::default();
        check.positive("d_x", d_x);
        check.positive("d_y", d_y);
        check.positive("height", height);
        check.finish()?;
        Ok(Self {
            d_x,
            d_y,
            height,
            aspect: d_y / d_x,
            diagonal_reach: d_x * d_y / d_x.hypot(d_y),
        })
    }

    pub fn d_x(&self) -> T {
        self.d_x
    }

    pub fn d_y(&self) -> T {
        self.d_y
    }

    pub fn height(&self) -> T {
        self.height
    }

    /// Slope `k = D_y / D_x` of the diagonal waveguide.
    pub fn aspect(&self) -> T {
        self.aspect
    }

    /// Largest perpendicular distance from the rectangle to its diagonal,
    /// `D_x D_y / sqrt(D_x^2 + D_y^2)`.
    pub fn diagonal_reach(&self) -> T {
        self.diagonal_reach
    }
}

/// Which harvesting model to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[serde(rename = "lm")]
    Linear,
    #[serde(rename = "nlm")]
    Logistic,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Linear, ModelKind::Logistic];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Linear => "lm",
            ModelKind::Logistic => "nlm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lm" | "linear" => Ok(ModelKind::Linear),
            "nlm" | "logistic" => Ok(ModelKind::Logistic),
            _ => Err(FieldError {
                field: "model",
                message: format!("unknown harvesting model {s:?}"),
            }),
        }
    }
}

/// Logistic rectifier constants, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams<T> {
    saturation_w: T,
    steepness_per_w: T,
    threshold_w: T,
    offset: T,
}

impl<T: Scalar> LogisticParams<T> {
    /// Maximum harvested power `phi`.
    pub fn saturation_w(&self) -> T {
        self.saturation_w
    }

    /// Steepness `a`, per watt.
    pub fn steepness_per_w(&self) -> T {
        self.steepness_per_w
    }

    /// Turn-on threshold `b`, in watts.
    pub fn threshold_w(&self) -> T {
        self.threshold_w
    }

    /// `Omega = 1 / (1 + e^{ab})`, the logistic value at zero input.
    pub fn offset(&self) -> T {
        self.offset
    }
}

/// Energy-harvesting transfer model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HarvestModel<T> {
    /// Constant conversion efficiency `eta`.
    Linear { eta: T },
    /// Saturating logistic rectifier.
    Logistic(LogisticParams<T>),
}

impl<T: Scalar> HarvestModel<T> {
    pub fn linear(eta: T) -> Result<Self, ValidationErrors> {
        let mut check = Checker::default();
        check.efficiency("eta", eta);
        check.finish()?;
        Ok(HarvestModel::Linear { eta })
    }

    pub fn logistic(phi_w: T, a_per_w: T, b_w: T) -> Result<Self, ValidationErrors> {
        let mut check = Checker::default();
        check.positive("phi_w", phi_w);
        check.positive("a_per_w", a_per_w);
        check.positive("b_w", b_w);
        check.finish()?;
        // e^{ab} overflows for ab > ~709 in f64, so go through e^{-ab}.
        let decay = (-(a_per_w * b_w)).exp();
        Ok(HarvestModel::Logistic(LogisticParams {
            saturation_w: phi_w,
            steepness_per_w: a_per_w,
            threshold_w: b_w,
            offset: decay / (T::one() + decay),
        }))
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            HarvestModel::Linear { .. } => ModelKind::Linear,
            HarvestModel::Logistic(_) => ModelKind::Logistic,
        }
    }
}

/// Unvalidated configuration, all values in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config<T> {
    pub carrier_frequency_hz: T,
    pub noise_power_w: T,
    pub transmit_power_w: T,
    pub alpha: T,
    pub beta: T,
    pub d_x: T,
    pub d_y: T,
    pub height: T,
    pub eta: T,
    pub phi_w: T,
    pub a_per_w: T,
    pub b_w: T,
}

impl<T: Scalar> Config<T> {
    /// Reference parameter set: -90 dBm noise, 28 GHz, 15 m x 10 m room,
    /// 3 m waveguide, alpha = beta = 0.8, eta = 1, phi = 20 mW,
    /// a = 100 per uW, b = 2.9 uW. The transmit power has no default.
    pub fn reference(transmit_power_w: T) -> Self {
        Self {
            carrier_frequency_hz: T::lit(28e9),
            noise_power_w: dbm_to_watts(T::lit(-90.0)),
            transmit_power_w,
            alpha: T::lit(0.8),
            beta: T::lit(0.8),
            d_x: T::lit(15.0),
            d_y: T::lit(10.0),
            height: T::lit(3.0),
            eta: T::one(),
            phi_w: T::lit(20e-3),
            a_per_w: T::lit(100.0 / 1e-6),
            b_w: T::lit(2.9e-6),
        }
    }

    /// Checks every field and derives the dependent constants. All violations
    /// are reported, not just the first.
    pub fn validate(&self) -> Result<Scenario<T>, ValidationErrors> {
        let mut errors = Vec::new();
        let system = SystemParams::new(
            self.carrier_frequency_hz,
            self.noise_power_w,
            self.transmit_power_w,
        );
        let protocol = ProtocolParams::new(self.alpha, self.beta);
        let region = RegionGeometry::new(self.d_x, self.d_y, self.height);
        let linear = HarvestModel::linear(self.eta);
        let logistic = HarvestModel::logistic(self.phi_w, self.a_per_w, self.b_w);

        fn keep<V>(r: Result<V, ValidationErrors>, errors: &mut Vec<FieldError>) -> Option<V> {
            r.map_err(|e| errors.extend(e.0)).ok()
        }
        let system = keep(system, &mut errors);
        let protocol = keep(protocol, &mut errors);
        let region = keep(region, &mut errors);
        let linear = keep(linear, &mut errors);
        let logistic = keep(logistic, &mut errors);

        match (system, protocol, region, linear, logistic) {
            (Some(system), Some(protocol), Some(region), Some(linear), Some(logistic)) => {
                Ok(Scenario {
                    system,
                    protocol,
                    region,
                    linear,
                    logistic,
                })
            }
            _ => Err(ValidationErrors(errors)),
        }
    }
}

/// A validated configuration with every derived constant populated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario<T> {
    pub system: SystemParams<T>,
    pub protocol: ProtocolParams<T>,
    pub region: RegionGeometry<T>,
    linear: HarvestModel<T>,
    logistic: HarvestModel<T>,
}

impl<T: Scalar> Scenario<T> {
    pub fn deployment(&self, scheme: Scheme) -> Deployment<T> {
        Deployment::new(scheme, self.region)
    }

    pub fn harvest(&self, kind: ModelKind) -> &HarvestModel<T> {
        match kind {
            ModelKind::Linear => &self.linear,
            ModelKind::Logistic => &self.logistic,
        }
    }

    pub fn logistic_params(&self) -> &LogisticParams<T> {
        match &self.logistic {
            HarvestModel::Logistic(p) => p,
            HarvestModel::Linear { .. } => unreachable!("logistic slot holds a logistic model"),
        }
    }

    pub fn with_protocol(&self, alpha: T, beta: T) -> Result<Self, ValidationErrors> {
        Ok(Self {
            protocol: ProtocolParams::new(alpha, beta)?,
            ..*self
        })
    }

    pub fn with_transmit_power(&self, transmit_power_w: T) -> Result<Self, ValidationErrors> {
        Ok(Self {
            system: self.system.with_transmit_power(transmit_power_w)?,
            ..*self
        })
    }
}
