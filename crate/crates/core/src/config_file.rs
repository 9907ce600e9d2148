//! TOML configuration files with unit-suffixed keys.
//!
//! ```toml
//! [system]
//! carrier_frequency_ghz = 28.0
//! noise_power_dbm = -90.0
//! # transmit_power_w = 0.3      # optional; the CLI flag takes precedence
//!
//! [protocol]
//! alpha = 0.8
//! beta = 0.8
//!
//! [geometry]
//! d_x_m = 15.0
//! d_y_m = 10.0
//! height_m = 3.0
//!
//! [harvest]
//! eta = 1.0
//! saturation_mw = 20.0
//! steepness_per_uw = 100.0
//! threshold_uw = 2.9
//! ```
//!
//! Every key is optional and falls back to the reference value shown.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sysconfig::{dbm_to_watts, Config, ValidationErrors};
use crate::Scenario;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("no transmit power given (set system.transmit_power_w or pass it explicitly)")]
    MissingTransmitPower,
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub carrier_frequency_ghz: f64,
    pub noise_power_dbm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transmit_power_w: Option<f64>,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            carrier_frequency_ghz: 28.0,
            noise_power_dbm: -90.0,
            transmit_power_w: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            beta: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub d_x_m: f64,
    pub d_y_m: f64,
    pub height_m: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            d_x_m: 15.0,
            d_y_m: 10.0,
            height_m: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarvestSection {
    pub eta: f64,
    pub saturation_mw: f64,
    pub steepness_per_uw: f64,
    pub threshold_uw: f64,
}

impl Default for HarvestSection {
    fn default() -> Self {
        Self {
            eta: 1.0,
            saturation_mw: 20.0,
            steepness_per_uw: 100.0,
            threshold_uw: 2.9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemSection,
    pub protocol: ProtocolSection,
    pub geometry: GeometrySection,
    pub harvest: HarvestSection,
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config sections serialize")
    }

    /// Converts to SI units. `transmit_power_w` overrides the file value.
    pub fn to_config(&self, transmit_power_w: Option<f64>) -> Result<Config<f64>, ConfigFileError> {
        let pt = transmit_power_w
            .or(self.system.transmit_power_w)
            .ok_or(ConfigFileError::MissingTransmitPower)?;
        Ok(Config {
            carrier_frequency_hz: self.system.carrier_frequency_ghz * 1e9,
            noise_power_w: dbm_to_watts(self.system.noise_power_dbm),
            transmit_power_w: pt,
            alpha: self.protocol.alpha,
            beta: self.protocol.beta,
            d_x: self.geometry.d_x_m,
            d_y: self.geometry.d_y_m,
            height: self.geometry.height_m,
            eta: self.harvest.eta,
            phi_w: self.harvest.saturation_mw * 1e-3,
            a_per_w: self.harvest.steepness_per_uw * 1e6,
            b_w: self.harvest.threshold_uw * 1e-6,
        })
    }

    pub fn to_scenario(
        &self,
        transmit_power_w: Option<f64>,
    ) -> Result<Scenario<f64>, ConfigFileError> {
        Ok(self.to_config(transmit_power_w)?.validate()?)
    }
}
