//! Complex spectrum of `H̃ = H − iW`, exceptional points and the
//! superradiance-transition (ST) locators.

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{principal_sqrt, C64};
use crate::model::ModelParams;

/// Eigenvalues `Ẽ₁,₂ = λ₀/2 ± Ω/2`, split as `Ẽ_α = E_α − iΥ_α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexSpectrum {
    pub e1: C64,
    pub e2: C64,
    /// Real parts `E_α`.
    pub energy1: f64,
    pub energy2: f64,
    /// Half-widths `Υ_α = −Im Ẽ_α`.
    pub width1: f64,
    pub width2: f64,
    /// `Ω = √(|V|² + (ε − iΓ)²)`, principal branch.
    pub omega: C64,
    /// `ΔE = E₁ − E₂ = Re Ω`.
    pub spacing: f64,
}

/// Which eigenvalue index carries the larger width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchLabel {
    pub superradiant: usize,
    pub subradiant: usize,
}

impl ComplexSpectrum {
    pub fn widths(&self) -> [f64; 2] {
        [self.width1, self.width2]
    }

    pub fn branches(&self) -> BranchLabel {
        if self.width1 >= self.width2 {
            BranchLabel {
                superradiant: 1,
                subradiant: 2,
            }
        } else {
            BranchLabel {
                superradiant: 2,
                subradiant: 1,
            }
        }
    }

    pub fn superradiant_width(&self) -> f64 {
        self.width1.max(self.width2)
    }

    pub fn subradiant_width(&self) -> f64 {
        self.width1.min(self.width2)
    }
}

/// `Ω² = |V|² + (ε − iΓ)²`, expanded so the EP cancels exactly when it can.
fn omega_squared(p: &ModelParams) -> C64 {
    let eps = p.eps();
    let gamma = p.gamma();
    C64::new(p.v_abs2() + eps * eps - gamma * gamma, -2.0 * eps * gamma)
}

pub fn spectrum(p: &ModelParams) -> ComplexSpectrum {
    let omega = principal_sqrt(omega_squared(p));
    let half_lambda0 = p.lambda0() / 2.0;
    let e1 = half_lambda0 + omega / 2.0;
    let e2 = half_lambda0 - omega / 2.0;
    ComplexSpectrum {
        e1,
        e2,
        energy1: e1.re,
        energy2: e2.re,
        width1: -e1.im,
        width2: -e2.im,
        omega,
        spacing: e1.re - e2.re,
    }
}

/// Default exceptional-point tolerance on `|X² + Y² + Z²|`.
pub fn default_ep_tolerance(p: &ModelParams) -> f64 {
    1e-10 * p.v_abs2().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpTest {
    /// `|X² + Y² + Z²|` with `X = Re V`, `Y = Im V`, `Z = ε − iΓ`.
    pub distance: f64,
    pub is_ep: bool,
}

pub fn ep_locus_test(p: &ModelParams, tol: f64) -> EpTest {
    let x = p.v.re;
    let y = p.v.im;
    let z = p.z();
    let distance = (z * z + x * x + y * y).norm();
    EpTest {
        distance,
        is_ep: distance <= tol,
    }
}

/// Left/right eigenvectors of `H̃` for both eigenvalues.
///
/// Right vectors have unit Euclidean norm. Left vectors are stored as the
/// entries of the row vector `⟨ũ_α|` and scaled so that `⟨ũ_α|u_α⟩ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiorthogonalBasis {
    pub eigenvalues: [C64; 2],
    pub right: [Vector2<C64>; 2],
    pub left: [Vector2<C64>; 2],
    /// `|⟨ũ_α|u_α⟩|` for unit-norm left and right vectors. Equal to 1 for a
    /// normal matrix and collapsing to 0 as the EP is approached.
    pub raw_overlaps: [f64; 2],
    /// `⟨ũ₁|u₂⟩` and `⟨ũ₂|u₁⟩` after normalization.
    pub cross: [C64; 2],
}

/// Below this `|Ω|` (times `max(1, |V|)`) a non-diagonal `H̃` is treated as
/// sitting on an exceptional point.
pub const EP_OMEGA_TOL: f64 = 1e-8;

fn larger(a: Vector2<C64>, b: Vector2<C64>) -> Vector2<C64> {
    if a.norm_squared() >= b.norm_squared() {
        a
    } else {
        b
    }
}

/// Raw (unnormalized) right and left eigenvectors of the traceless part
/// `½[[Z, V*],[V, −Z]]` for the eigenvalue `mu`.
fn raw_pair(v: C64, z: C64, mu: C64, fallback: usize) -> (Vector2<C64>, Vector2<C64>) {
    let half_v = v / 2.0;
    let half_z = z / 2.0;
    let right = larger(
        Vector2::new(half_v.conj(), mu - half_z),
        Vector2::new(mu + half_z, half_v),
    );
    let left = larger(
        Vector2::new(half_v, mu - half_z),
        Vector2::new(mu + half_z, half_v.conj()),
    );
    let unit = |x: Vector2<C64>| {
        let n = x.norm();
        if n == 0.0 {
            let mut e = Vector2::zeros();
            e[fallback] = C64::from(1.0);
            e
        } else {
            x.unscale(n)
        }
    };
    (unit(right), unit(left))
}

/// Bilinear pairing of a row vector with a column vector.
fn pair(row: &Vector2<C64>, col: &Vector2<C64>) -> C64 {
    row[0] * col[0] + row[1] * col[1]
}

/// Builds the biorthogonal eigenbasis.
///
/// Near an exceptional point (`|Ω|` below [`EP_OMEGA_TOL`] while `H̃` is
/// not a multiple of the identity) the left/right vectors coalesce and the
/// call fails with [`Error::DegenerateAtEp`], which carries the raw
/// self-overlaps.
pub fn biorthogonal_eigenvectors(p: &ModelParams) -> Result<BiorthogonalBasis> {
    let s = spectrum(p);
    let z = p.z();
    let mu = [s.omega / 2.0, -s.omega / 2.0];
    let (r1, l1) = raw_pair(p.v, z, mu[0], 0);
    let (r2, l2) = raw_pair(p.v, z, mu[1], 1);
    let o1 = pair(&l1, &r1);
    let o2 = pair(&l2, &r2);
    let raw_overlaps = [o1.norm(), o2.norm()];

    let scale = p.v_abs().max(1.0);
    let nontrivial = p.v_abs() > EP_OMEGA_TOL * scale || z.norm() > EP_OMEGA_TOL * scale;
    if s.omega.norm() < EP_OMEGA_TOL * scale && nontrivial {
        return Err(Error::DegenerateAtEp {
            omega_abs: s.omega.norm(),
            raw_overlaps,
        });
    }

    let left = [l1 / o1, l2 / o2];
    let right = [r1, r2];
    Ok(BiorthogonalBasis {
        eigenvalues: [s.e1, s.e2],
        right,
        left,
        raw_overlaps,
        cross: [pair(&left[0], &right[1]), pair(&left[1], &right[0])],
    })
}

/// Left-hand side of the resonance-overlap quartic
/// `Γ₀⁴ + Γ₀²Γ² − Ω₀²Γ₀² − ε²Γ² = 0` as a function of Γ₁.
pub fn overlap_quartic(gamma1: f64, gamma2: f64, eps: f64, v_abs: f64) -> f64 {
    let g0 = (gamma1 + gamma2) / 2.0;
    let g = (gamma1 - gamma2) / 2.0;
    let omega0_sq = eps * eps + v_abs * v_abs;
    let g0_sq = g0 * g0;
    let g_sq = g * g;
    g0_sq * g0_sq + g0_sq * g_sq - omega0_sq * g0_sq - eps * eps * g_sq
}

/// Default search bound `10·√(Ω₀² + ε²)`.
pub fn default_gamma_max(eps: f64, v_abs: f64) -> f64 {
    10.0 * (v_abs * v_abs + 2.0 * eps * eps).sqrt()
}

const CRITERION_SCAN_POINTS: usize = 4096;

/// All Γ₁ ∈ (0, Γ_max] at which the total half-width Γ₀ equals the
/// level spacing ΔE, found by scanning for sign changes of the quartic and
/// bisecting each bracket.
///
/// The trivial zero at Γ₀ = 0 (both rates vanishing) is excluded; tangent
/// (even-multiplicity) roots are not detected.
pub fn overlap_criterion_solve(
    eps: f64,
    v_abs: f64,
    gamma2: f64,
    gamma_max: Option<f64>,
) -> Result<Vec<f64>> {
    let gamma_max = gamma_max.unwrap_or_else(|| default_gamma_max(eps, v_abs));
    if !(gamma_max > 0.0) || gamma2 < 0.0 {
        return Err(Error::InvalidParams(
            "criterion needs gamma_max > 0 and gamma2 >= 0".into(),
        ));
    }
    let f = |g1: f64| overlap_quartic(g1, gamma2, eps, v_abs);
    let n = CRITERION_SCAN_POINTS;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=n {
        let x = gamma_max * k as f64 / n as f64;
        if (x + gamma2) == 0.0 {
            continue;
        }
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
            prev = None;
            continue;
        }
        if let Some((xp, fp)) = prev {
            if fp.signum() != fx.signum() {
                roots.push(bisect(&f, xp, x, fp));
            }
        }
        prev = Some((x, fx));
    }
    if roots.is_empty() {
        Err(Error::NoRootInRange { gamma_max })
    } else {
        Ok(roots)
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid used by [`st_locate`]: `points` equally spaced values of Γ₁ on
/// `[0, gamma_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StGrid {
    pub gamma_max: f64,
    pub points: usize,
}

impl StGrid {
    pub fn for_params(eps: f64, v_abs: f64) -> Self {
        StGrid {
            gamma_max: default_gamma_max(eps, v_abs),
            points: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StPoint {
    pub gamma1: f64,
    pub subradiant_width: f64,
}

/// Smallest half-width as a function of Γ₁ (the other parameters fixed).
pub fn subradiant_width(gamma1: f64, gamma2: f64, eps: f64, v_abs: f64) -> f64 {
    let p = ModelParams {
        eps1: eps / 2.0,
        eps2: -eps / 2.0,
        gamma1,
        gamma2,
        v: C64::from(v_abs),
    };
    spectrum(&p).subradiant_width()
}

/// Locates the ST as the Γ₁ maximizing the subradiant width.
///
/// The grid maximum is refined by golden-section search over the two
/// neighbouring grid cells.
pub fn st_locate(eps: f64, v_abs: f64, gamma2: f64, grid: StGrid) -> Result<StPoint> {
    if grid.points < 100 || !(grid.gamma_max > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "ST grid needs >= 100 points and gamma_max > 0 (got {} points, max {})",
            grid.points, grid.gamma_max
        )));
    }
    let f = |g1: f64| subradiant_width(g1, gamma2, eps, v_abs);
    let n = grid.points;
    let xs: Vec<f64> = (0..n)
        .map(|k| grid.gamma_max * k as f64 / (n - 1) as f64)
        .collect();
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (k, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v > best_val {
            best_val = v;
            best = k;
        }
    }
    if best == 0 || best == n - 1 {
        return Err(Error::MonotoneNoMax);
    }
    let gamma1 = golden_max(&f, xs[best - 1], xs[best + 1], 1e-12);
    Ok(StPoint {
        gamma1,
        subradiant_width: f(gamma1),
    })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `|Γ| ≪ Ω₀`, enforced as `|Γ| < Ω₀/5`.
    Small,
    /// `|Γ| ≫ Ω₀`, enforced as `|Γ| > 5Ω₀`.
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticSpectrum {
    pub spacing: f64,
    pub width1: f64,
    pub width2: f64,
}

/// Leading-order expansions of the spacing and half-widths.
///
/// The expansion is taken on Ω itself and then split exactly like
/// [`spectrum`], so indices match the exact branch convention:
///
/// * small: `Ω ≈ Ω₀ − iεΓ/Ω₀ − |V|²Γ²/(2Ω₀³)`, giving
///   `ΔE ≈ Ω₀ − |V|²Γ²/(2Ω₀³)`, `Υ₁,₂ ≈ Γ₀/2 ± εΓ/(2Ω₀)`;
/// * large: `Ω ≈ ±(Z + |V|²/(2Z))`, `Z = ε − iΓ`, giving for ε, Γ > 0
///   `ΔE ≈ ε + ε|V|²/(2Γ²)`, `Υ₁ ≈ Γ₁/2 − |V|²/(4Γ)`,
///   `Υ₂ ≈ Γ₂/2 + |V|²/(4Γ)`.
pub fn asymptotic_widths(p: &ModelParams, regime: Regime) -> Result<AsymptoticSpectrum> {
    let gamma = p.gamma();
    let omega0 = p.omega0();
    let eps = p.eps();
    let v2 = p.v_abs2();
    let omega = match regime {
        Regime::Small => {
            if !(gamma.abs() < omega0 / 5.0) {
                return Err(Error::RegimeViolation(format!(
                    "small regime needs |Gamma| < Omega0/5 (Gamma = {gamma}, Omega0 = {omega0})"
                )));
            }
            C64::new(
                omega0 - v2 * gamma * gamma / (2.0 * omega0.powi(3)),
                -eps * gamma / omega0,
            )
        }
        Regime::Large => {
            if !(gamma.abs() > 5.0 * omega0) {
                return Err(Error::RegimeViolation(format!(
                    "large regime needs |Gamma| > 5 Omega0 (Gamma = {gamma}, Omega0 = {omega0})"
                )));
            }
            let z = p.z();
            let w = z + v2 / (2.0 * z);
            if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
                -w
            } else {
                w
            }
        }
    };
    let g0 = p.gamma0();
    Ok(AsymptoticSpectrum {
        spacing: omega.re,
        width1: g0 / 2.0 - omega.im / 2.0,
        width2: g0 / 2.0 + omega.im / 2.0,
    })
}
