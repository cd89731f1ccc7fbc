//! Two-level non-Hermitian model of graphene near the Dirac point, coupled to
//! two sinks.
//!
//! All rates and energies are in ps⁻¹ (see [`model::MEV_PER_INV_PS`] for the
//! conversion to meV). The crate covers the complex spectrum and exceptional
//! points ([`spectral`]), density-matrix dynamics with sink efficiencies
//! ([`dynamics`]) and their closed forms ([`analytic`]), telegraph-noise
//! averaging ([`noise`]), and batch sweeps ([`sweep`]).

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod ode;
pub mod spectral;
pub mod sweep;
pub mod table;

pub use analytic::{coefficients, eta0_surface, eta1_asymptotic, eta1_closed, eta2_asymptotic, eta2_closed, EfficiencyCoefficients, Eta0Surface};
pub use config::RunConfig;
pub use dynamics::{efficiency_curve, propagate, EfficiencyCurve, Sample, TrajectoryRecord};
pub use error::{Error, Result};
pub use linalg::{CMat2, C64};
pub use model::{effective_hamiltonian, initial_density, DensityMatrix, EffectiveHamiltonian, InitialState, ModelParams};
pub use noise::mc::{mc_oracle, McConfig, McRecord};
pub use noise::{noisy_efficiency_curve, propagate_noisy, NoiseParams, NoisyRecord};
pub use ode::{IntegratorConfig, Method};
pub use spectral::{
    asymptotic_widths, biorthogonal_eigenvectors, ep_locus_test, overlap_criterion_solve, spectrum, st_locate, BiorthogonalBasis,
    ComplexSpectrum, Regime, StGrid,
};
pub use sweep::{figure_dataset, run_sweep, SweepGrid, SweepOptions};
pub use table::{Format, Table};
