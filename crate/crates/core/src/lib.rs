//! Performance analysis of a pinching-antenna SWIPT link.
//!
//! A single user is dropped uniformly in a `D_x x D_y` rectangle. A pinching
//! antenna rides a dielectric waveguide mounted at height `h` along one of
//! three lines (edge, center, or diagonal of the rectangle) and is clipped at
//! the point closest to the user. The harvested power and the achievable rate
//! then depend only on the squared antenna-user distance.
//!
//! The crate provides:
//!
//! * [`sysconfig`]: validated physical and protocol parameters,
//! * [`geometry`]: deployment schemes and optimal antenna placement,
//! * [`distdist`]: the exact law of the optimal squared distance,
//! * [`energy`] and [`rate`]: closed-form averages with quadrature cross-checks,
//! * [`montecarlo`]: a seeded, worker-count-invariant Monte-Carlo estimator,
//! * [`sweep`]: figure-style parameter sweeps with CSV output.
//!
//! Analytical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root pin the common `f64` instantiations.

pub mod config_file;
pub mod distdist;
pub mod energy;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod rate;
pub mod scalar;
pub mod stats;
pub mod sweep;
pub mod sysconfig;

pub use scalar::Scalar;

pub use distdist::SquaredDistanceDistribution;
pub use energy::{EnergyMethod, EnergyResult};
pub use geometry::{AntennaPosition, Deployment, Scheme, SquaredDistance, UePosition};
pub use montecarlo::{EstimateWithCI, McOptions, Metric};
pub use quadrature::QuadratureOptions;
pub use rate::{RateMethod, RateResult};
pub use sysconfig::{
    Config, HarvestModel, ModelKind, ProtocolParams, RegionGeometry, Scenario, SystemParams,
};

pub type Config64 = Config<f64>;
pub type Scenario64 = Scenario<f64>;
pub type SystemParams64 = SystemParams<f64>;
pub type ProtocolParams64 = ProtocolParams<f64>;
pub type RegionGeometry64 = RegionGeometry<f64>;
pub type HarvestModel64 = HarvestModel<f64>;
pub type Deployment64 = Deployment<f64>;
pub type Distribution64 = SquaredDistanceDistribution<f64>;

pub type Config32 = Config<f32>;
pub type Scenario32 = Scenario<f32>;
pub type Deployment32 = Deployment<f32>;
pub type Distribution32 = SquaredDistanceDistribution<f32>;
