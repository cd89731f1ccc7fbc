//! Flat key-value run configuration.
//!
//! Files are flat TOML tables (`key = value` lines, `#` comments) using the
//! keys `eps1, eps2, gamma1, gamma2, v_re, v_im, qx, qy, vf, init, d,
//! gamma_noise, t_final, dt`. String values (only `init`) must be quoted.
//! Command-line values are layered on top with [`RunConfig::overlay`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{coupling_from_wavevector, InitialState, ModelParams};
use crate::noise::NoiseParams;
use crate::ode::IntegratorConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

macro_rules! overlay_fields {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Values present in `other` replace the ones in `self`.
    pub fn overlay(mut self, other: &RunConfig) -> Self {
        let dst = &mut self;
        overlay_fields!(
            dst, other, eps1, eps2, gamma1, gamma2, v_re, v_im, qx, qy, vf, init, d,
            gamma_noise, t_final, dt
        );
        self
    }

    /// The coupling from either `v_re`/`v_im` or `qx`/`qy`/`vf`; the two
    /// parameterizations are mutually exclusive.
    pub fn coupling(&self) -> Result<C64> {
        let direct = self.v_re.is_some() || self.v_im.is_some();
        let wave = self.qx.is_some() || self.qy.is_some() || self.vf.is_some();
        match (direct, wave) {
            (true, true) => Err(Error::Config(
                "v_re/v_im and qx/qy/vf are mutually exclusive".into(),
            )),
            (true, false) => Ok(C64::new(self.v_re.unwrap_or(0.0), self.v_im.unwrap_or(0.0))),
            (false, true) => {
                let vf = self
                    .vf
                    .ok_or_else(|| Error::Config("missing required parameter: vf".into()))?;
                if self.qx.is_none() && self.qy.is_none() {
                    return Err(Error::Config("missing required parameter: qx or qy".into()));
                }
                Ok(coupling_from_wavevector(
                    self.qx.unwrap_or(0.0),
                    self.qy.unwrap_or(0.0),
                    vf,
                ))
            }
            (false, false) => Err(Error::Config(
                "missing required parameter: coupling (v_re/v_im or qx/qy/vf)".into(),
            )),
        }
    }

    /// Model parameters; every field must be present (no invented defaults).
    pub fn model_params(&self) -> Result<ModelParams> {
        let eps1 = require(self.eps1, "eps1")?;
        let eps2 = require(self.eps2, "eps2")?;
        let gamma1 = require(self.gamma1, "gamma1")?;
        let gamma2 = require(self.gamma2, "gamma2")?;
        ModelParams::new(eps1, eps2, gamma1, gamma2, self.coupling()?)
    }

    pub fn noise_params(&self) -> Result<NoiseParams> {
        NoiseParams::from_asymmetry(require(self.d, "d")?, require(self.gamma_noise, "gamma_noise")?)
    }

    pub fn initial_state(&self) -> Result<InitialState> {
        require(self.init, "init")
    }

    /// Integration window `[0, t_final]`: fixed-step RK4 when `dt` is given,
    /// otherwise the default adaptive scheme. Samples every
    /// `sample_interval`, or only at the endpoints when `None`.
    pub fn integrator(&self, sample_interval: Option<f64>) -> Result<IntegratorConfig> {
        let t_final = require(self.t_final, "t_final")?;
        let interval = sample_interval.unwrap_or(t_final);
        let cfg = match self.dt {
            Some(dt) => IntegratorConfig::fixed(dt, t_final, interval),
            None => IntegratorConfig {
                t_final,
                sample_interval: interval,
                ..Default::default()
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required parameter: {name}")))
}
