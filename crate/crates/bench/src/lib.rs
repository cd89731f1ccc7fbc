//! Parameter sets shared by the kernel benchmarks.

use dirac_sink_core::{initial_density, DensityMatrix, InitialState, ModelParams, NoiseParams, C64};

/// Γ₂ = 1, ε = 0.1, |V| = 2 at the efficiency maximum Γ₁ = 2.
pub fn efficiency_peak() -> ModelParams {
    ModelParams::from_splitting(0.1, 2.0, 1.0, C64::from(2.0)).expect("valid parameters")
}

/// ε = 0, Γ₂ = 1, |V| = 2, used with telegraph noise.
pub fn noisy_case() -> (ModelParams, NoiseParams) {
    let p = ModelParams::from_splitting(0.0, 2.0, 1.0, C64::from(2.0)).expect("valid parameters");
    (p, NoiseParams::from_asymmetry(10.0, 10.0).expect("valid noise"))
}

pub fn site_b(p: &ModelParams) -> DensityMatrix {
    initial_density(&InitialState::SiteB, p).expect("site state")
}
