//! Sink-coupled density-matrix dynamics
//!
//! `dρ/dt = −i[H, ρ] − {W, ρ}`, integrated together with the sink
//! efficiencies `dη_n/dt = Γ_n ρ_nn`, so that `Tr ρ + η₁ + η₂ = 1` holds
//! to integrator rounding.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{anticommutator, commutator, hermitian_part, hermiticity_drift, pack, unpack, CMat2, C64};
use crate::model::{effective_hamiltonian, initial_density, DensityMatrix, InitialState, ModelParams};
use crate::ode::{integrate, IntegratorConfig, Observer, OdeSystem, StepStats};
use crate::table::{Cell, Table};

/// State layout: packed ρ (8 reals) followed by η₁, η₂.
pub const STATE_DIM: usize = 10;
pub(crate) const ETA1: usize = 8;
pub(crate) const ETA2: usize = 9;

/// Budget errors above this multiple of the integrator tolerance abort.
pub const BUDGET_FACTOR: f64 = 100.0;

pub const TRAJECTORY_COLUMNS: [&str; 9] = [
    "t", "rho11", "rho22", "rho12_re", "rho12_im", "trace", "eta1", "eta2", "budget_err",
];

/// The generator `ρ ↦ −i[H, ρ] − {W, ρ}` together with the sink rates.
#[derive(Debug, Clone, Copy)]
pub struct SinkLiouvillian {
    h: CMat2,
    w: CMat2,
    rates: [f64; 2],
}

impl SinkLiouvillian {
    pub fn new(p: &ModelParams) -> Self {
        let eh = effective_hamiltonian(p);
        SinkLiouvillian {
            h: eh.h,
            w: eh.w,
            rates: [p.gamma1, p.gamma2],
        }
    }

    pub fn apply(&self, rho: &CMat2) -> CMat2 {
        commutator(&self.h, rho) * C64::new(0.0, -1.0) - anticommutator(&self.w, rho)
    }

    /// Writes `dρ/dt` and `dη/dt` into `dy[0..10]` from `y[0..8]`.
    pub(crate) fn write_rhs(&self, y: &[f64], dy: &mut [f64]) {
        let rho = unpack(&y[..8]);
        pack(&self.apply(&rho), &mut dy[..8]);
        dy[ETA1] = self.rates[0] * y[0];
        dy[ETA2] = self.rates[1] * y[6];
    }
}

impl OdeSystem<STATE_DIM> for SinkLiouvillian {
    fn rhs(&self, _t: f64, y: &[f64; STATE_DIM], dydt: &mut [f64; STATE_DIM]) {
        self.write_rhs(y, dydt);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: C64,
    pub trace: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// `|Tr ρ + η₁ + η₂ − 1|`
    pub budget_error: f64,
}

impl Sample {
    fn from_state(t: f64, rho: &CMat2, eta1: f64, eta2: f64) -> Self {
        let rho11 = rho[(0, 0)].re;
        let rho22 = rho[(1, 1)].re;
        let trace = rho11 + rho22;
        Sample {
            t,
            rho11,
            rho22,
            rho12: rho[(0, 1)],
            trace,
            eta1,
            eta2,
            budget_error: (trace + eta1 + eta2 - 1.0).abs(),
        }
    }

    pub(crate) fn cells(&self) -> Vec<Cell> {
        vec![
            self.t.into(),
            self.rho11.into(),
            self.rho22.into(),
            self.rho12.re.into(),
            self.rho12.im.into(),
            self.trace.into(),
            self.eta1.into(),
            self.eta2.into(),
            self.budget_error.into(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Largest `max |ρ − ρ†|` seen before any symmetrization.
    pub max_hermiticity_drift: f64,
    /// Smallest per-step increment of either efficiency.
    pub min_eta_increment: f64,
    pub steps: StepStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
    pub diagnostics: Diagnostics,
}

impl TrajectoryRecord {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn max_budget_error(&self) -> f64 {
        self.samples.iter().map(|s| s.budget_error).fold(0.0, f64::max)
    }

    /// Rows under the header
    /// `t,rho11,rho22,rho12_re,rho12_im,trace,eta1,eta2,budget_err`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(TRAJECTORY_COLUMNS);
        for s in &self.samples {
            t.push(s.cells());
        }
        t
    }
}

/// Observer shared by the noiseless and noise-averaged propagators.
///
/// Symmetrizes `ρ` (and, when present, the noise-correlated block at
/// `xi_offset`) at every sample, and enforces the trace budget.
pub(crate) struct Recorder {
    pub samples: Vec<Sample>,
    pub xi_samples: Vec<CMat2>,
    xi_offset: Option<usize>,
    budget_limit: f64,
    max_drift: f64,
    min_eta_increment: f64,
}

impl Recorder {
    pub fn new(budget_limit: f64, xi_offset: Option<usize>) -> Self {
        Recorder {
            samples: Vec::new(),
            xi_samples: Vec::new(),
            xi_offset,
            budget_limit,
            max_drift: 0.0,
            min_eta_increment: f64::INFINITY,
        }
    }

    pub fn finish(self, steps: StepStats) -> (TrajectoryRecord, Vec<CMat2>) {
        let diagnostics = Diagnostics {
            max_hermiticity_drift: self.max_drift,
            min_eta_increment: if self.min_eta_increment.is_finite() {
                self.min_eta_increment
            } else {
                0.0
            },
            steps,
        };
        (
            TrajectoryRecord {
                samples: self.samples,
                diagnostics,
            },
            self.xi_samples,
        )
    }

    fn blocks(&self) -> impl Iterator<Item = usize> {
        std::iter::once(0).chain(self.xi_offset)
    }
}

impl<const N: usize> Observer<N> for Recorder {
    fn sample(&mut self, t: f64, y: &mut [f64; N]) -> Result<()> {
        for off in self.blocks() {
            let m = unpack(&y[off..off + 8]);
            self.max_drift = self.max_drift.max(hermiticity_drift(&m));
            pack(&hermitian_part(&m), &mut y[off..off + 8]);
        }
        let rho = unpack(&y[..8]);
        let s = Sample::from_state(t, &rho, y[ETA1], y[ETA2]);
        if !(s.budget_error <= self.budget_limit) {
            return Err(Error::ToleranceFailure {
                t,
                error: s.budget_error,
                limit: self.budget_limit,
            });
        }
        self.samples.push(s);
        if let Some(off) = self.xi_offset {
            self.xi_samples.push(unpack(&y[off..off + 8]));
        }
        Ok(())
    }

    fn step(&mut self, _t: f64, prev: &[f64; N], next: &[f64; N]) {
        let inc = (next[ETA1] - prev[ETA1]).min(next[ETA2] - prev[ETA2]);
        self.min_eta_increment = self.min_eta_increment.min(inc);
        for off in self.blocks() {
            let m = unpack(&next[off..off + 8]);
            self.max_drift = self.max_drift.max(hermiticity_drift(&m));
        }
    }
}

pub(crate) fn initial_vector<const N: usize>(rho0: &DensityMatrix) -> [f64; N] {
    let mut y = [0.0; N];
    pack(rho0.matrix(), &mut y[..8]);
    y
}

/// Integrates the sink-coupled Liouville–von Neumann equation from `rho0`.
pub fn propagate(
    p: &ModelParams,
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    p.validate()?;
    let sys = SinkLiouvillian::new(p);
    let mut rec = Recorder::new(BUDGET_FACTOR * cfg.tolerance(), None);
    let steps = integrate(&sys, initial_vector::<STATE_DIM>(rho0), cfg, &mut rec)?;
    Ok(rec.finish(steps).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyPoint {
    pub gamma1: f64,
    pub eta1: f64,
    pub eta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyCurve {
    pub points: Vec<EfficiencyPoint>,
}

impl EfficiencyCurve {
    /// Index of the largest η₁ (first one on ties).
    pub fn argmax_eta1(&self) -> usize {
        argmax(self.points.iter().map(|p| p.eta1))
    }

    /// The η₁ maximum if it lies strictly inside the grid.
    pub fn interior_max_eta1(&self) -> Option<EfficiencyPoint> {
        let k = self.argmax_eta1();
        (k > 0 && k + 1 < self.points.len()).then(|| self.points[k])
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["gamma1", "eta1", "eta2"]);
        for p in &self.points {
            t.push(vec![p.gamma1.into(), p.eta1.into(), p.eta2.into()]);
        }
        t
    }
}

pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (k, v) in values.enumerate() {
        if v > best_val {
            best_val = v;
            best = k;
        }
    }
    best
}

/// `(η₁(τ), η₂(τ))` versus Γ₁ with every other parameter taken from `base`,
/// τ = `cfg.t_final`. Grid points run in parallel; output keeps grid order.
pub fn efficiency_curve(
    base: &ModelParams,
    gamma1_values: &[f64],
    init: &InitialState,
    cfg: &IntegratorConfig,
) -> Result<EfficiencyCurve> {
    efficiency_curve_with(gamma1_values, |g1| {
        let p = base.with_gamma1(g1);
        let rho0 = initial_density(init, &p)?;
        propagate(&p, &rho0, cfg)
    })
}

pub(crate) fn efficiency_curve_with<F>(gamma1_values: &[f64], run: F) -> Result<EfficiencyCurve>
where
    F: Fn(f64) -> Result<TrajectoryRecord> + Sync,
{
    let points = gamma1_values
        .par_iter()
        .map(|&g1| {
            let last = *run(g1)?.last();
            Ok(EfficiencyPoint {
                gamma1: g1,
                eta1: last.eta1,
                eta2: last.eta2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EfficiencyCurve { points })
}

/// `n` equally spaced values on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn site_b() -> DensityMatrix {
        DensityMatrix::from_entries(0.0, 1.0, ZERO).unwrap()
    }

    #[test]
    fn unitary_rabi_oscillation() {
        let p = ModelParams::new(0.0, 0.0, 0.0, 0.0, C64::from(2.0)).unwrap();
        let cfg = IntegratorConfig::adaptive(1e-10, 1e-12, std::f64::consts::PI, 0.01);
        let rec = propagate(&p, &site_b(), &cfg).unwrap();
        for s in &rec.samples {
            assert!((s.rho22 - s.t.cos().powi(2)).abs() < 1e-8);
            assert_eq!(s.eta1, 0.0);
        }
        let half = propagate(
            &p,
            &site_b(),
            &IntegratorConfig::adaptive(1e-10, 1e-12, std::f64::consts::FRAC_PI_2, 0.1),
        )
        .unwrap();
        assert!((half.last().rho11 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn closed_second_sink_collects_nothing() {
        let p = ModelParams::from_splitting(0.3, 3.0, 0.0, C64::from(2.0)).unwrap();
        let rec = propagate(&p, &site_b(), &IntegratorConfig::default()).unwrap();
        assert!(rec.samples.iter().all(|s| s.eta2 == 0.0));
        assert!(rec.last().eta1 > 0.5);
    }

    #[test]
    fn fixed_rk4_conserves_budget() {
        let p = ModelParams::from_splitting(0.1, 2.0, 1.0, C64::from(2.0)).unwrap();
        let cfg = IntegratorConfig::fixed(1e-3, 5.0, 0.5);
        let rec = propagate(&p, &site_b(), &cfg).unwrap();
        assert!(rec.max_budget_error() < 1e-12);
        assert_eq!(rec.samples.len(), 11);
    }

    #[test]
    fn trajectory_invariants() {
        let p = ModelParams::new(0.4, -0.9, 2.5, 1.5, C64::new(1.0, 1.5)).unwrap();
        let rho0 = DensityMatrix::from_entries(0.3, 0.7, C64::new(0.2, 0.3)).unwrap();
        let rec = propagate(&p, &rho0, &IntegratorConfig::adaptive(1e-10, 1e-12, 20.0, 0.1)).unwrap();
        assert_eq!(rec.samples[0].eta1, 0.0);
        assert_eq!(rec.samples[0].eta2, 0.0);
        for w in rec.samples.windows(2) {
            assert!(w[1].trace <= w[0].trace + 1e-12);
            assert!(w[1].eta1 >= w[0].eta1 && w[1].eta2 >= w[0].eta2);
        }
        assert!(rec.max_budget_error() < 1e-9);
        assert!(rec.diagnostics.min_eta_increment >= -1e-15);
        assert!(rec.diagnostics.max_hermiticity_drift < 1e-10);
    }

    #[test]
    fn budget_violation_detected() {
        let p = ModelParams::from_splitting(0.1, 2.0, 1.0, C64::from(2.0)).unwrap();
        let sys = SinkLiouvillian::new(&p);
        let mut rec = Recorder::new(1e-8, None);
        // inconsistent start: trace 1 plus η₁ = 0.5
        let mut y = initial_vector::<STATE_DIM>(&site_b());
        y[ETA1] = 0.5;
        let r = integrate(&sys, y, &IntegratorConfig::default(), &mut rec);
        assert!(matches!(r, Err(Error::ToleranceFailure { .. })));
    }

    #[test]
    fn csv_header() {
        let p = ModelParams::from_splitting(0.1, 2.0, 1.0, C64::from(2.0)).unwrap();
        let rec = propagate(&p, &site_b(), &IntegratorConfig::endpoint(1.0)).unwrap();
        let csv = rec.to_table().to_csv();
        assert!(csv.starts_with("t,rho11,rho22,rho12_re,rho12_im,trace,eta1,eta2,budget_err\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn efficiency_curve_limits() {
        let base = ModelParams::from_splitting(0.1, 0.0, 1.0, C64::from(2.0)).unwrap();
        let curve = efficiency_curve(
            &base,
            &[1e-4, 2.0],
            &InitialState::SiteB,
            &IntegratorConfig::endpoint(40.0),
        )
        .unwrap();
        let first = curve.points[0];
        assert!(first.eta1 < 1e-3);
        assert!((first.eta2 - 1.0).abs() < 1e-3);
        assert_eq!(curve.points[1].gamma1, 2.0);
    }
}
