//! Dynamics averaged over diagonal random-telegraph noise.
//!
//! The site energies fluctuate as `ε_m + ξ(t) d_m` with `ξ = ±1` flipping at
//! rate γ, so `⟨ξ(t)ξ(t′)⟩ = e^{−2γ|t−t′|}`. For this process the noise
//! average closes on two blocks, `⟨ρ⟩` and `⟨ρ^ξ⟩ = ⟨ξρ⟩`:
//!
//! ```text
//! d⟨ρ⟩/dt   = L⟨ρ⟩   − i𝔅⟨ρ^ξ⟩
//! d⟨ρ^ξ⟩/dt = L⟨ρ^ξ⟩ − i𝔅⟨ρ⟩ − 2γ⟨ρ^ξ⟩
//! ```
//!
//! where `L` is the sink Liouvillian and `(𝔅M)_mn = (d_m − d_n) M_mn`.
//! [`mc`] holds an independent trajectory sampler for the same average.

pub mod mc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    efficiency_curve_with, initial_vector, EfficiencyCurve, Recorder, SinkLiouvillian, TrajectoryRecord,
    BUDGET_FACTOR, STATE_DIM, TRAJECTORY_COLUMNS,
};
use crate::error::{Error, Result};
use crate::linalg::{pack, unpack, CMat2, C64};
use crate::model::{initial_density, DensityMatrix, InitialState, ModelParams};
use crate::ode::{integrate, IntegratorConfig, OdeSystem};
use crate::table::Table;

/// Telegraph-noise amplitudes and rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Amplitude on site 1 [ps⁻¹].
    pub d1: f64,
    /// Amplitude on site 2 [ps⁻¹].
    pub d2: f64,
    /// Flip rate γ [ps⁻¹]; correlations decay as `e^{−2γ|s|}`.
    pub gamma_noise: f64,
    /// Magnitude of ξ. Fixed to 1; the amplitudes carry the scale.
    pub sigma: f64,
}

impl NoiseParams {
    pub fn new(d1: f64, d2: f64, gamma_noise: f64) -> Result<Self> {
        let n = NoiseParams {
            d1,
            d2,
            gamma_noise,
            sigma: 1.0,
        };
        n.validate()?;
        Ok(n)
    }

    /// Symmetric split `d₁ = −d₂ = d/2`.
    pub fn from_asymmetry(d: f64, gamma_noise: f64) -> Result<Self> {
        Self::new(0.5 * d, -0.5 * d, gamma_noise)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d1.is_finite() && self.d2.is_finite()) {
            return Err(Error::InvalidParams("noise amplitudes must be finite".into()));
        }
        if !(self.gamma_noise > 0.0 && self.gamma_noise.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma_noise must be positive, got {}",
                self.gamma_noise
            )));
        }
        Ok(())
    }

    /// `d = d₁ − d₂`, the only dynamically relevant amplitude.
    pub fn d(&self) -> f64 {
        self.d1 - self.d2
    }

    /// Same noise with both amplitudes shifted by `c`.
    pub fn shifted(self, c: f64) -> Self {
        NoiseParams {
            d1: self.d1 + c,
            d2: self.d2 + c,
            ..self
        }
    }

    /// Noise correlation `χ(s) = σ² e^{−2γ|s|}`.
    pub fn correlation(&self, s: f64) -> f64 {
        self.sigma * self.sigma * (-2.0 * self.gamma_noise * s.abs()).exp()
    }
}

/// Packed `⟨ρ⟩` (8), `η₁, η₂`, then packed `⟨ρ^ξ⟩` (8).
pub const NOISY_STATE_DIM: usize = 18;
const XI: usize = STATE_DIM;

pub const NOISY_EXTRA_COLUMNS: [&str; 4] = ["rho_xi_11", "rho_xi_22", "rho_xi_12_re", "rho_xi_12_im"];

/// The two-block closure as an ODE system.
#[derive(Debug, Clone, Copy)]
pub struct NoisyLiouvillian {
    base: SinkLiouvillian,
    d: [f64; 2],
    gamma_noise: f64,
}

impl NoisyLiouvillian {
    pub fn new(p: &ModelParams, n: &NoiseParams) -> Self {
        NoisyLiouvillian {
            base: SinkLiouvillian::new(p),
            d: [n.d1, n.d2],
            gamma_noise: n.gamma_noise,
        }
    }
}

/// `−i𝔅M`, added into `out` (packed layout).
fn add_modulation(dd: f64, m: &CMat2, out: &mut [f64]) {
    // (𝔅M)_12 = d M_12, (𝔅M)_21 = −d M_21; diagonal untouched
    let b12 = m[(0, 1)] * C64::new(0.0, -dd);
    let b21 = m[(1, 0)] * C64::new(0.0, dd);
    out[2] += b12.re;
    out[3] += b12.im;
    out[4] += b21.re;
    out[5] += b21.im;
}

impl OdeSystem<NOISY_STATE_DIM> for NoisyLiouvillian {
    fn rhs(&self, _t: f64, y: &[f64; NOISY_STATE_DIM], dy: &mut [f64; NOISY_STATE_DIM]) {
        self.base.write_rhs(&y[..STATE_DIM], &mut dy[..STATE_DIM]);
        let xi = unpack(&y[XI..]);
        pack(&(self.base.apply(&xi) - xi * C64::from(2.0 * self.gamma_noise)), &mut dy[XI..]);
        let dd = self.d[0] - self.d[1];
        if dd != 0.0 {
            add_modulation(dd, &xi, &mut dy[..8]);
            add_modulation(dd, &unpack(&y[..8]), &mut dy[XI..]);
        }
    }
}

/// Noise-averaged trajectory and the correlated block `⟨ρ^ξ⟩` at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyRecord {
    pub record: TrajectoryRecord,
    pub rho_xi: Vec<CMat2>,
}

impl NoisyRecord {
    /// Trajectory columns followed by `rho_xi_11,rho_xi_22,rho_xi_12_re,rho_xi_12_im`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(TRAJECTORY_COLUMNS.iter().chain(&NOISY_EXTRA_COLUMNS).copied());
        for (s, x) in self.record.samples.iter().zip(&self.rho_xi) {
            let mut row = s.cells();
            row.extend([x[(0, 0)].re.into(), x[(1, 1)].re.into(), x[(0, 1)].re.into(), x[(0, 1)].im.into()]);
            t.push(row);
        }
        t
    }
}

/// Integrates the closure from `⟨ρ⟩(0) = rho0`, `⟨ρ^ξ⟩(0) = 0`.
pub fn propagate_noisy(
    p: &ModelParams,
    n: &NoiseParams,
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
) -> Result<NoisyRecord> {
    p.validate()?;
    n.validate()?;
    let sys = NoisyLiouvillian::new(p, n);
    let mut rec = Recorder::new(BUDGET_FACTOR * cfg.tolerance(), Some(XI));
    let steps = integrate(&sys, initial_vector::<NOISY_STATE_DIM>(rho0), cfg, &mut rec)?;
    let (record, rho_xi) = rec.finish(steps);
    Ok(NoisyRecord { record, rho_xi })
}

/// Noise-averaged `(η₁(τ), η₂(τ))` versus Γ₁, τ = `cfg.t_final`.
pub fn noisy_efficiency_curve(
    base: &ModelParams,
    n: &NoiseParams,
    gamma1_values: &[f64],
    init: &InitialState,
    cfg: &IntegratorConfig,
) -> Result<EfficiencyCurve> {
    efficiency_curve_with(gamma1_values, |g1| {
        let p = base.with_gamma1(g1);
        let rho0 = initial_density(init, &p)?;
        Ok(propagate_noisy(&p, n, &rho0, cfg)?.record)
    })
}
