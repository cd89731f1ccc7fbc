//! Closed-form sink efficiencies for a start on sublattice B.
//!
//! With `Ω = Ω₁ + iΩ₂`,
//!
//! ```text
//! η₁(t) = η₀ − e^{−Γ₀t} [ B(Γ₀ cosh Ω₂t + Ω₂ sinh Ω₂t) − C(Γ₀ cos Ω₁t − Ω₁ sin Ω₁t) ]
//! η₀ = |V|²Γ₀Γ₁ / (2(Γ₀² + Ω₁²)(Γ₀² − Ω₂²))
//! B  = |V|²Γ₁ / (2(Ω₁² + Ω₂²)(Γ₀² − Ω₂²))
//! C  = |V|²Γ₁ / (2(Ω₁² + Ω₂²)(Γ₀² + Ω₁²))
//! D  = |V|²Γ₁ / (4(Ω₁² + Ω₂²)(Γ₀ − |Ω₂|))
//! ```
//!
//! The expressions are even in Ω₂ except for `D`, which multiplies the
//! slowest tail `e^{−2Υ_sub t}` with `2Υ_sub = Γ₀ − |Ω₂|`; `|Ω₂|` keeps it
//! independent of the branch of Ω.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::ModelParams;
use crate::spectral::spectrum;
use crate::table::Table;

/// Margins below which the denominators are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyCoefficients {
    pub eta0: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Re Ω
    pub omega1: f64,
    /// Im Ω
    pub omega2: f64,
    pub gamma0: f64,
    /// Decay rate of the slowest tail, `Γ₀ − |Ω₂| = 2Υ_sub`.
    pub tail_rate: f64,
}

pub fn coefficients(p: &ModelParams) -> Result<EfficiencyCoefficients> {
    p.validate()?;
    let omega = spectrum(p).omega;
    let (o1, o2) = (omega.re, omega.im);
    let g0 = p.gamma0();
    let g1 = p.gamma1;
    let v2 = p.v_abs2();
    let omega_abs2 = o1 * o1 + o2 * o2;
    let tail_rate = g0 - o2.abs();
    if !(tail_rate > SINGULAR_TOL) {
        return Err(Error::SingularDenominator(format!(
            "Gamma0 - |Omega2| = {tail_rate:e} (Gamma0 = {g0}, Omega2 = {o2})"
        )));
    }
    if !(omega_abs2.sqrt() > SINGULAR_TOL) {
        return Err(Error::SingularDenominator(format!(
            "|Omega| = {:e} at an exceptional point",
            omega_abs2.sqrt()
        )));
    }
    let g0_sq = g0 * g0;
    Ok(EfficiencyCoefficients {
        eta0: v2 * g0 * g1 / (2.0 * (g0_sq + o1 * o1) * (g0_sq - o2 * o2)),
        b: v2 * g1 / (2.0 * omega_abs2 * (g0_sq - o2 * o2)),
        c: v2 * g1 / (2.0 * omega_abs2 * (g0_sq + o1 * o1)),
        d: v2 * g1 / (4.0 * omega_abs2 * tail_rate),
        omega1: o1,
        omega2: o2,
        gamma0: g0,
        tail_rate,
    })
}

impl EfficiencyCoefficients {
    /// Exact η₁(t).
    pub fn eta1(&self, t: f64) -> f64 {
        let (g0, o1, o2) = (self.gamma0, self.omega1, self.omega2);
        let hyperbolic = self.b * (g0 * (o2 * t).cosh() + o2 * (o2 * t).sinh());
        let oscillating = self.c * (g0 * (o1 * t).cos() - o1 * (o1 * t).sin());
        self.eta0 - (-g0 * t).exp() * (hyperbolic - oscillating)
    }

    /// Two-term tail `η₀ − D e^{−2Υ_sub t}`.
    pub fn eta1_tail(&self, t: f64) -> f64 {
        self.eta0 - self.d * (-self.tail_rate * t).exp()
    }

    /// Companion tail `1 − η₀ + D e^{−2Υ_sub t}`.
    pub fn eta2_tail(&self, t: f64) -> f64 {
        1.0 - self.eta0 + self.d * (-self.tail_rate * t).exp()
    }

    /// Envelope `|C|(Γ₀ + |Ω₁|) e^{−Γ₀t}` bounding any overshoot of η₀.
    pub fn overshoot_bound(&self, t: f64) -> f64 {
        self.c.abs() * (self.gamma0 + self.omega1.abs()) * (-self.gamma0 * t).exp()
    }
}

pub fn eta1_closed(t: f64, p: &ModelParams) -> Result<f64> {
    Ok(coefficients(p)?.eta1(t))
}

/// Exact η₂(t) from the budget identity, given `Tr ρ(t)` (e.g. from a
/// numerical propagation): `η₂ = 1 − Tr ρ − η₁`.
pub fn eta2_closed(t: f64, p: &ModelParams, trace: f64) -> Result<f64> {
    Ok(1.0 - trace - eta1_closed(t, p)?)
}

/// Whether `t` is deep enough in the tail (`2Υ_sub t > 3`).
fn check_tail(c: &EfficiencyCoefficients, t: f64) -> Result<()> {
    if c.tail_rate * t > 3.0 {
        Ok(())
    } else {
        Err(Error::RegimeViolation(format!(
            "tail form needs 2*Upsilon_sub*t > 3, got {}",
            c.tail_rate * t
        )))
    }
}

pub fn eta1_asymptotic(t: f64, p: &ModelParams) -> Result<f64> {
    if p.gamma1 == 0.0 {
        return Ok(0.0);
    }
    let c = coefficients(p)?;
    check_tail(&c, t)?;
    Ok(c.eta1_tail(t))
}

pub fn eta2_asymptotic(t: f64, p: &ModelParams) -> Result<f64> {
    let c = coefficients(p)?;
    check_tail(&c, t)?;
    Ok(c.eta2_tail(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eta0Cell {
    pub gamma1: f64,
    pub eps: f64,
    /// NaN when the cell is outside the validity domain.
    pub eta0: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowMax {
    pub eps: f64,
    pub gamma1: f64,
    pub eta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eta0Surface {
    /// Row-major over `eps` (outer) and `gamma1` (inner).
    pub cells: Vec<Eta0Cell>,
    pub row_max: Vec<RowMax>,
}

impl Eta0Surface {
    /// Rows under the header `gamma1,eps,eta0,valid`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["gamma1", "eps", "eta0", "valid"]);
        for c in &self.cells {
            t.push(vec![c.gamma1.into(), c.eps.into(), c.eta0.into(), c.valid.into()]);
        }
        t
    }
}

/// η₀ over a (Γ₁, ε) grid at fixed Γ₂ and real coupling `v_abs`.
/// Invalid cells are kept and flagged.
pub fn eta0_surface(gamma1_axis: &[f64], eps_axis: &[f64], gamma2: f64, v_abs: f64) -> Eta0Surface {
    let mut cells = Vec::with_capacity(gamma1_axis.len() * eps_axis.len());
    let mut row_max = Vec::with_capacity(eps_axis.len());
    for &eps in eps_axis {
        let mut best: Option<RowMax> = None;
        for &g1 in gamma1_axis {
            let eta0 = ModelParams::from_splitting(eps, g1, gamma2, C64::from(v_abs))
                .and_then(|p| coefficients(&p))
                .map(|c| c.eta0);
            let cell = match eta0 {
                Ok(e) => Eta0Cell {
                    gamma1: g1,
                    eps,
                    eta0: e,
                    valid: true,
                },
                Err(_) => Eta0Cell {
                    gamma1: g1,
                    eps,
                    eta0: f64::NAN,
                    valid: false,
                },
            };
            if cell.valid && best.is_none_or(|b| cell.eta0 > b.eta0) {
                best = Some(RowMax {
                    eps,
                    gamma1: g1,
                    eta0: cell.eta0,
                });
            }
            cells.push(cell);
        }
        if let Some(b) = best {
            row_max.push(b);
        }
    }
    Eta0Surface { cells, row_max }
}
