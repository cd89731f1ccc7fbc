//! Physical parameters, the effective Hamiltonian and initial states.
//!
//! Units: every energy and rate is in ps⁻¹ with ħ = 1, time is in ps.
//! Conversion to meV is for display only ([`MEV_PER_INV_PS`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cmat, real_diag, CMat2, C64, ZERO};

/// Display conversion: 1 ps⁻¹ ≈ 0.66 meV.
pub const MEV_PER_INV_PS: f64 = 0.66;

/// Tolerance used when validating user supplied density matrices.
pub const DENSITY_TOL: f64 = 1e-12;

/// One physical configuration of the two-site model.
///
/// `eps1`, `eps2` are the renormalized site energies of sublattices A and B,
/// `gamma1`, `gamma2` the escape rates into the sinks attached to them and
/// `v` the complex A–B coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps1: f64,
    pub eps2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub v: C64,
}

impl ModelParams {
    pub fn new(eps1: f64, eps2: f64, gamma1: f64, gamma2: f64, v: C64) -> Result<Self> {
        let p = ModelParams {
            eps1,
            eps2,
            gamma1,
            gamma2,
            v,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the level splitting `eps = eps1 - eps2`, using
    /// the symmetric split `eps1 = -eps2 = eps / 2`.
    pub fn from_splitting(eps: f64, gamma1: f64, gamma2: f64, v: C64) -> Result<Self> {
        Self::new(eps / 2.0, -eps / 2.0, gamma1, gamma2, v)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.eps1, self.eps2, self.gamma1, self.gamma2, self.v.re, self.v.im]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.gamma1 < 0.0 || self.gamma2 < 0.0 {
            return Err(Error::InvalidParams(format!(
                "escape rates must be nonnegative (gamma1 = {}, gamma2 = {})",
                self.gamma1, self.gamma2
            )));
        }
        Ok(())
    }

    pub fn with_gamma1(mut self, gamma1: f64) -> Self {
        self.gamma1 = gamma1;
        self
    }

    pub fn with_gamma2(mut self, gamma2: f64) -> Self {
        self.gamma2 = gamma2;
        self
    }

    /// Replaces the site energies by the symmetric split of `eps`.
    pub fn with_splitting(mut self, eps: f64) -> Self {
        self.eps1 = eps / 2.0;
        self.eps2 = -eps / 2.0;
        self
    }

    /// ε₀ = ε₁ + ε₂
    pub fn eps0(&self) -> f64 {
        self.eps1 + self.eps2
    }

    /// ε = ε₁ − ε₂
    pub fn eps(&self) -> f64 {
        self.eps1 - self.eps2
    }

    /// Γ₀ = (Γ₁ + Γ₂)/2
    pub fn gamma0(&self) -> f64 {
        (self.gamma1 + self.gamma2) / 2.0
    }

    /// Γ = (Γ₁ − Γ₂)/2
    pub fn gamma(&self) -> f64 {
        (self.gamma1 - self.gamma2) / 2.0
    }

    pub fn v_abs(&self) -> f64 {
        self.v.norm()
    }

    pub fn v_abs2(&self) -> f64 {
        self.v.norm_sqr()
    }

    /// Phase φ = arg V.
    pub fn phase(&self) -> f64 {
        self.v.arg()
    }

    /// Ω₀ = √(ε² + |V|²), the level repulsion of the Hermitian part.
    pub fn omega0(&self) -> f64 {
        (self.eps() * self.eps() + self.v_abs2()).sqrt()
    }

    /// λ₀ = ε₀ − iΓ₀
    pub fn lambda0(&self) -> C64 {
        C64::new(self.eps0(), -self.gamma0())
    }

    /// Z = ε − iΓ
    pub fn z(&self) -> C64 {
        C64::new(self.eps(), -self.gamma())
    }
}

/// Hermitian part `H` and sink part `W` of `H̃ = H − iW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    pub h: CMat2,
    pub w: CMat2,
}

impl EffectiveHamiltonian {
    /// `H − iW`
    pub fn non_hermitian(&self) -> CMat2 {
        self.h - self.w * C64::new(0.0, 1.0)
    }
}

/// `H = (ε₀/2)·1 + ½[[ε, V*],[V, −ε]]`, `W = diag(Γ₁/2, Γ₂/2)`.
pub fn effective_hamiltonian(p: &ModelParams) -> EffectiveHamiltonian {
    let half_eps0 = p.eps0() / 2.0;
    let half_eps = p.eps() / 2.0;
    let h = cmat(
        C64::from(half_eps0 + half_eps),
        p.v.conj() / 2.0,
        p.v / 2.0,
        C64::from(half_eps0 - half_eps),
    );
    let w = real_diag(p.gamma1 / 2.0, p.gamma2 / 2.0);
    EffectiveHamiltonian { h, w }
}

/// `V = 2 v_F (q_x + i q_y)` in ps⁻¹ from `q` in cm⁻¹ and `v_F` in cm/s.
pub fn coupling_from_wavevector(qx: f64, qy: f64, vf: f64) -> C64 {
    // cm/s · cm⁻¹ = s⁻¹ = 1e-12 ps⁻¹
    C64::new(qx, qy) * (2.0 * vf * 1e-12)
}

/// A validated 2×2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(CMat2);

impl DensityMatrix {
    /// Checks Hermiticity, positivity and unit trace. Nothing is projected;
    /// a violating matrix is rejected.
    pub fn new(m: CMat2) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let drift = crate::linalg::hermiticity_drift(&m);
        if drift > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (drift {drift:e})")));
        }
        let r11 = m[(0, 0)].re;
        let r22 = m[(1, 1)].re;
        let det = r11 * r22 - m[(0, 1)].norm_sqr();
        if r11 < -DENSITY_TOL || r22 < -DENSITY_TOL || det < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not positive semidefinite (rho11 = {r11}, rho22 = {r22}, det = {det})"
            )));
        }
        let trace = r11 + r22;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace is {trace}, expected 1")));
        }
        Ok(DensityMatrix(m))
    }

    pub fn from_entries(rho11: f64, rho22: f64, rho12: C64) -> Result<Self> {
        Self::new(cmat(C64::from(rho11), rho12, rho12.conj(), C64::from(rho22)))
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.0
    }

    pub fn rho11(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn rho22(&self) -> f64 {
        self.0[(1, 1)].re
    }

    pub fn rho12(&self) -> C64 {
        self.0[(0, 1)]
    }
}

/// Initial state of a propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Sublattice A populated, `|1⟩`.
    SiteA,
    /// Sublattice B populated, `|2⟩`.
    SiteB,
    /// Conduction band `|+⟩`; needs `V ≠ 0`.
    BandPlus,
    /// Valence band `|−⟩`; needs `V ≠ 0`.
    BandMinus,
    Custom(DensityMatrix),
}

impl InitialState {
    pub fn label(&self) -> &'static str {
        match self {
            InitialState::SiteA => "site-a",
            InitialState::SiteB => "site-b",
            InitialState::BandPlus => "band-plus",
            InitialState::BandMinus => "band-minus",
            InitialState::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "site-a" | "a" => Ok(InitialState::SiteA),
            "site-b" | "b" => Ok(InitialState::SiteB),
            "band-plus" | "plus" | "+" => Ok(InitialState::BandPlus),
            "band-minus" | "minus" | "-" => Ok(InitialState::BandMinus),
            other => Err(Error::Config(format!(
                "unknown initial state '{other}' (expected site-a, site-b, band-plus or band-minus)"
            ))),
        }
    }
}

impl Serialize for InitialState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for InitialState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Builds ρ(0) for the requested state.
pub fn initial_density(state: &InitialState, p: &ModelParams) -> Result<DensityMatrix> {
    let band = |sign: f64| -> Result<DensityMatrix> {
        if p.v == ZERO {
            return Err(Error::ZeroCouplingPhase);
        }
        let phase = C64::from_polar(0.5, -p.phase());
        DensityMatrix::from_entries(0.5, 0.5, phase * sign)
    };
    match state {
        InitialState::SiteA => DensityMatrix::from_entries(1.0, 0.0, ZERO),
        InitialState::SiteB => DensityMatrix::from_entries(0.0, 1.0, ZERO),
        InitialState::BandPlus => band(1.0),
        InitialState::BandMinus => band(-1.0),
        InitialState::Custom(rho) => DensityMatrix::new(*rho.matrix()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &CMat2, b: &CMat2, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn hamiltonian_pure_coupling() {
        let p = ModelParams::new(0.0, 0.0, 0.0, 0.0, C64::from(2.0)).unwrap();
        let eh = effective_hamiltonian(&p);
        let expected = cmat(ZERO, C64::from(1.0), C64::from(1.0), ZERO);
        assert_eq!(eh.h, expected);
        assert_eq!(eh.w, CMat2::zeros());
    }

    #[test]
    fn hamiltonian_matches_composite_form() {
        let p = ModelParams::new(1.0, -1.0, 4.0, 0.0, C64::from(2.0)).unwrap();
        let full = effective_hamiltonian(&p).non_hermitian();
        let expected = cmat(
            C64::new(1.0, -2.0),
            C64::from(1.0),
            C64::from(1.0),
            C64::from(-1.0),
        );
        assert!(close(&full, &expected, 0.0));

        // λ₀/2·1 + ½[[ε − iΓ, V*],[V, −ε + iΓ]]
        let half_lambda0 = p.lambda0() / 2.0;
        let z = p.z();
        let composite = cmat(
            half_lambda0 + z / 2.0,
            p.v.conj() / 2.0,
            p.v / 2.0,
            half_lambda0 - z / 2.0,
        );
        assert!(close(&full, &composite, 1e-15));
    }

    #[test]
    fn hamiltonian_equal_rates_imaginary_coupling() {
        let p = ModelParams::new(0.0, 0.0, 2.0, 2.0, C64::new(0.0, 2.0)).unwrap();
        let full = effective_hamiltonian(&p).non_hermitian();
        assert_eq!(full[(0, 0)], C64::new(0.0, -1.0));
        assert_eq!(full[(1, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn wavevector_mapping() {
        let v = coupling_from_wavevector(1e4, 0.0, 1e8);
        assert!((v.norm() - 2.0).abs() < 1e-12);
        assert_eq!(coupling_from_wavevector(0.0, 0.0, 1e8), ZERO);
        let v = coupling_from_wavevector(0.0, 1e4, 1e8);
        assert!((v - C64::new(0.0, 2.0)).norm() < 1e-12);
        assert!((v.arg() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn negative_rate_rejected() {
        assert!(matches!(
            ModelParams::new(0.0, 0.0, -1.0, 0.0, C64::from(2.0)),
            Err(Error::InvalidParams(_))
        ));
        assert!(ModelParams::new(f64::NAN, 0.0, 1.0, 0.0, C64::from(2.0)).is_err());
    }

    #[test]
    fn named_initial_states() {
        let p = ModelParams::from_splitting(0.1, 1.0, 1.0, C64::from(2.0)).unwrap();
        let b = initial_density(&InitialState::SiteB, &p).unwrap();
        assert_eq!(*b.matrix(), real_diag(0.0, 1.0));
        let a = initial_density(&InitialState::SiteA, &p).unwrap();
        assert_eq!(*a.matrix(), real_diag(1.0, 0.0));
        let plus = initial_density(&InitialState::BandPlus, &p).unwrap();
        let half = C64::from(0.5);
        assert!(close(plus.matrix(), &cmat(half, half, half, half), 1e-16));
        let minus = initial_density(&InitialState::BandMinus, &p).unwrap();
        assert!(close(minus.matrix(), &cmat(half, -half, -half, half), 1e-16));
    }

    #[test]
    fn band_state_is_eigenvector_of_coupling() {
        let p = ModelParams::new(0.0, 0.0, 0.0, 0.0, C64::from_polar(2.0, 0.7)).unwrap();
        let rho = initial_density(&InitialState::BandPlus, &p).unwrap();
        let h = effective_hamiltonian(&p).h;
        // |+⟩ is the +|V|/2 eigenvector, so Hρ = (|V|/2)ρ
        let lhs = h * rho.matrix();
        let rhs = rho.matrix() * C64::from(1.0);
        assert!(close(&lhs, &rhs, 1e-14));
    }

    #[test]
    fn band_state_needs_coupling() {
        let p = ModelParams::new(0.0, 0.0, 1.0, 1.0, ZERO).unwrap();
        assert_eq!(
            initial_density(&InitialState::BandPlus, &p),
            Err(Error::ZeroCouplingPhase)
        );
    }

    #[test]
    fn custom_state_validated_not_projected() {
        let m = cmat(C64::from(0.6), C64::from(0.9), C64::from(0.9), C64::from(0.4));
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidDensity(_))));
        let non_herm = cmat(C64::from(0.5), C64::from(0.1), C64::from(0.2), C64::from(0.5));
        assert!(matches!(DensityMatrix::new(non_herm), Err(Error::InvalidDensity(_))));
        let bad_trace = real_diag(0.5, 0.6);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidDensity(_))));
        let ok = DensityMatrix::from_entries(0.7, 0.3, C64::new(0.1, -0.2)).unwrap();
        let p = ModelParams::new(0.0, 0.0, 0.0, 0.0, ZERO).unwrap();
        assert_eq!(initial_density(&InitialState::Custom(ok), &p).unwrap(), ok);
    }

    #[test]
    fn parse_labels() {
        assert_eq!("site-b".parse::<InitialState>().unwrap(), InitialState::SiteB);
        assert_eq!("Band-Minus".parse::<InitialState>().unwrap(), InitialState::BandMinus);
        assert!("site-c".parse::<InitialState>().is_err());
    }

    proptest! {
        #[test]
        fn hamiltonian_hermitian_and_sinks_nonnegative(
            eps1 in -10.0..10.0f64, eps2 in -10.0..10.0f64,
            g1 in 0.0..20.0f64, g2 in 0.0..20.0f64,
            vr in -5.0..5.0f64, vi in -5.0..5.0f64,
        ) {
            let p = ModelParams::new(eps1, eps2, g1, g2, C64::new(vr, vi)).unwrap();
            let eh = effective_hamiltonian(&p);
            prop_assert_eq!(eh.h, eh.h.adjoint());
            prop_assert_eq!(eh.w[(0, 1)], ZERO);
            prop_assert_eq!(eh.w[(1, 0)], ZERO);
            prop_assert!(eh.w[(0, 0)].re >= 0.0 && eh.w[(1, 1)].re >= 0.0);
        }

        #[test]
        fn hermitian_part_eigenvalues_are_half_omega0(
            eps in -10.0..10.0f64, vr in -5.0..5.0f64, vi in -5.0..5.0f64,
        ) {
            let p = ModelParams::from_splitting(eps, 0.0, 0.0, C64::new(vr, vi)).unwrap();
            let h = effective_hamiltonian(&p).h;
            // traceless Hermitian 2×2: eigenvalues ±√(-det)
            let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
            let lam = (-det.re).sqrt();
            prop_assert!((lam - p.omega0() / 2.0).abs() <= 1e-12 * (1.0 + p.omega0()));
        }

        #[test]
        fn wavevector_preserves_phase(qx in -1e5..1e5f64, qy in -1e5..1e5f64) {
            prop_assume!(qx.abs() + qy.abs() > 1.0);
            let v = coupling_from_wavevector(qx, qy, 1e8);
            prop_assert!((v.arg() - qy.atan2(qx)).abs() < 1e-12);
        }
    }
}
