//! Monte-Carlo trajectories under telegraph noise.
//!
//! Each path `ξ(t) ∈ {+1, −1}` starts from the stationary distribution and
//! flips after exponential waiting times with rate γ. Between flips the
//! generator is constant, so `ρ` is advanced exactly with
//! `ρ ↦ e^{Aτ} ρ e^{A†τ}`, `A = −i(H + ξ diag(d)) − W`. The efficiencies are
//! integrated with 8-point Gauss–Legendre quadrature on sub-intervals no
//! longer than [`QUAD_CHUNK`].
//!
//! Trajectory `k` draws from `ChaCha8Rng` seeded with the run seed on stream
//! `k`, and the per-sample statistics are merged in a fixed order, so results
//! depend only on the seed and the trajectory count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;

use super::NoiseParams;
use crate::dynamics::{Diagnostics, Sample, TrajectoryRecord, TRAJECTORY_COLUMNS};
use crate::error::{Error, Result};
use crate::linalg::{expm2, real_diag, CMat2, C64};
use crate::model::{effective_hamiltonian, DensityMatrix, ModelParams};
use crate::ode::{IntegratorConfig, StepStats};
use crate::table::Table;

pub const MIN_TRAJECTORIES: usize = 100;

/// Longest sub-interval handled by one quadrature rule [ps].
pub const QUAD_CHUNK: f64 = 0.05;

/// Trajectories per statistics block; fixes the merge order.
const BLOCK: usize = 64;

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n_traj: usize,
    pub seed: Option<u64>,
    /// Refuse to run without an explicit seed.
    pub reproducible: bool,
}

impl McConfig {
    pub fn seeded(n_traj: usize, seed: u64) -> Self {
        McConfig {
            n_traj,
            seed: Some(seed),
            reproducible: true,
        }
    }

    /// The seed to use, drawing one from the OS when allowed.
    pub fn resolve_seed(&self) -> Result<u64> {
        match (self.seed, self.reproducible) {
            (Some(s), _) => Ok(s),
            (None, true) => Err(Error::SeedRequired),
            (None, false) => Ok(rand::rng().random()),
        }
    }
}

/// Symmetric telegraph process with values `±sigma` and flip rate `gamma`.
#[derive(Debug, Clone, Copy)]
pub struct TelegraphProcess {
    pub sigma: f64,
    pub gamma: f64,
}

/// One realization on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphPath {
    pub initial: f64,
    /// Increasing flip times inside the horizon.
    pub flips: Vec<f64>,
}

impl TelegraphPath {
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.flips.partition_point(|&f| f <= t);
        if n % 2 == 0 {
            self.initial
        } else {
            -self.initial
        }
    }
}

impl TelegraphProcess {
    pub fn sample<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> TelegraphPath {
        let initial = if rng.random_bool(0.5) { self.sigma } else { -self.sigma };
        let wait = Exp::new(self.gamma).expect("positive flip rate");
        let mut flips = Vec::new();
        let mut t = wait.sample(rng);
        while t < horizon {
            flips.push(t);
            t += wait.sample(rng);
        }
        TelegraphPath { initial, flips }
    }
}

/// Stream-separated generator for trajectory `k`.
pub fn trajectory_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Observables recorded per sample.
const N_OBS: usize = 6;

fn observables(rho: &CMat2, eta: [f64; 2]) -> [f64; N_OBS] {
    [
        rho[(0, 0)].re,
        rho[(1, 1)].re,
        rho[(0, 1)].re,
        rho[(0, 1)].im,
        eta[0],
        eta[1],
    ]
}

struct Generators {
    /// `A` for ξ = +1 and ξ = −1.
    a: [CMat2; 2],
    rates: [f64; 2],
}

impl Generators {
    fn new(p: &ModelParams, n: &NoiseParams) -> Self {
        let eh = effective_hamiltonian(p);
        let build = |xi: f64| {
            let h = eh.h + real_diag(xi * n.d1, xi * n.d2);
            h * C64::new(0.0, -1.0) - eh.w
        };
        Generators {
            a: [build(1.0), build(-1.0)],
            rates: [p.gamma1, p.gamma2],
        }
    }

    /// Advances `(ρ, η)` by `tau` under generator `a`.
    fn advance(&self, a: &CMat2, rho: &mut CMat2, eta: &mut [f64; 2], tau: f64) {
        let mut left = tau;
        while left > 0.0 {
            let h = if left > QUAD_CHUNK { QUAD_CHUNK } else { left };
            let mut acc = [0.0; 2];
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                let u = expm2(&(a * C64::from(0.5 * h * (1.0 + x))));
                let r = u * *rho * u.adjoint();
                acc[0] += w * r[(0, 0)].re;
                acc[1] += w * r[(1, 1)].re;
            }
            eta[0] += self.rates[0] * 0.5 * h * acc[0];
            eta[1] += self.rates[1] * 0.5 * h * acc[1];
            let u = expm2(&(a * C64::from(h)));
            *rho = u * *rho * u.adjoint();
            left -= h;
        }
    }
}

fn run_trajectory(
    gens: &Generators,
    process: &TelegraphProcess,
    rho0: &CMat2,
    times: &[f64],
    rng: &mut ChaCha8Rng,
) -> Vec<[f64; N_OBS]> {
    let horizon = *times.last().expect("sample times");
    let path = process.sample(horizon, rng);
    let mut rho = *rho0;
    let mut eta = [0.0; 2];
    let mut t = 0.0;
    let mut sign = path.initial > 0.0;
    let mut flips = path.flips.iter().peekable();
    let mut out = Vec::with_capacity(times.len());
    for &ts in times {
        while let Some(&&f) = flips.peek() {
            if f > ts {
                break;
            }
            gens.advance(&gens.a[usize::from(!sign)], &mut rho, &mut eta, f - t);
            t = f;
            sign = !sign;
            flips.next();
        }
        if ts > t {
            gens.advance(&gens.a[usize::from(!sign)], &mut rho, &mut eta, ts - t);
            t = ts;
        }
        out.push(observables(&rho, eta));
    }
    out
}

/// Running mean and sum of squared deviations (Welford / Chan merge).
#[derive(Debug, Clone)]
struct Moments {
    n: f64,
    mean: Vec<[f64; N_OBS]>,
    m2: Vec<[f64; N_OBS]>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Moments {
            n: 0.0,
            mean: vec![[0.0; N_OBS]; len],
            m2: vec![[0.0; N_OBS]; len],
        }
    }

    fn push(&mut self, x: &[[f64; N_OBS]]) {
        self.n += 1.0;
        for ((m, s), v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            for j in 0..N_OBS {
                let delta = v[j] - m[j];
                m[j] += delta / self.n;
                s[j] += delta * (v[j] - m[j]);
            }
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        for k in 0..self.mean.len() {
            for j in 0..N_OBS {
                let delta = other.mean[k][j] - self.mean[k][j];
                self.mean[k][j] += delta * other.n / n;
                self.m2[k][j] += other.m2[k][j] + delta * delta * self.n * other.n / n;
            }
        }
        self.n = n;
    }
}

/// Standard errors of the mean per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McStderr {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12_re: f64,
    pub rho12_im: f64,
    pub eta1: f64,
    pub eta2: f64,
}

pub const MC_EXTRA_COLUMNS: [&str; 6] = [
    "stderr_rho11",
    "stderr_rho22",
    "stderr_rho12_re",
    "stderr_rho12_im",
    "stderr_eta1",
    "stderr_eta2",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRecord {
    pub mean: TrajectoryRecord,
    pub stderr: Vec<McStderr>,
    pub n_traj: usize,
    pub seed: u64,
}

impl McRecord {
    /// Trajectory columns followed by the `stderr_*` columns.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(TRAJECTORY_COLUMNS.iter().chain(&MC_EXTRA_COLUMNS).copied());
        for (s, e) in self.mean.samples.iter().zip(&self.stderr) {
            let mut row = s.cells();
            row.extend([e.rho11, e.rho22, e.rho12_re, e.rho12_im, e.eta1, e.eta2].map(Into::into));
            t.push(row);
        }
        t
    }
}

/// Mean and standard error over `mc.n_traj` noise realizations, sampled at
/// `cfg.sample_times()`. The integration method in `cfg` is not used.
pub fn mc_oracle(
    p: &ModelParams,
    n: &NoiseParams,
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
    mc: &McConfig,
) -> Result<McRecord> {
    p.validate()?;
    n.validate()?;
    cfg.validate()?;
    if mc.n_traj < MIN_TRAJECTORIES {
        return Err(Error::InvalidConfig(format!(
            "n_traj must be at least {MIN_TRAJECTORIES}, got {}",
            mc.n_traj
        )));
    }
    let seed = mc.resolve_seed()?;
    let times = cfg.sample_times();
    let gens = Generators::new(p, n);
    let process = TelegraphProcess {
        sigma: 1.0,
        gamma: n.gamma_noise,
    };
    let rho0 = *rho0.matrix();
    let n_blocks = mc.n_traj.div_ceil(BLOCK);
    let blocks: Vec<Moments> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut m = Moments::new(times.len());
            for k in b * BLOCK..((b + 1) * BLOCK).min(mc.n_traj) {
                let mut rng = trajectory_rng(seed, k as u64);
                m.push(&run_trajectory(&gens, &process, &rho0, &times, &mut rng));
            }
            m
        })
        .collect();
    let mut total = Moments::new(times.len());
    for b in &blocks {
        total.merge(b);
    }

    let nt = total.n;
    let se = |m2: f64| (m2.max(0.0) / (nt - 1.0) / nt).sqrt();
    let mut samples = Vec::with_capacity(times.len());
    let mut stderr = Vec::with_capacity(times.len());
    for ((&t, m), s) in times.iter().zip(&total.mean).zip(&total.m2) {
        let trace = m[0] + m[1];
        samples.push(Sample {
            t,
            rho11: m[0],
            rho22: m[1],
            rho12: C64::new(m[2], m[3]),
            trace,
            eta1: m[4],
            eta2: m[5],
            budget_error: (trace + m[4] + m[5] - 1.0).abs(),
        });
        stderr.push(McStderr {
            rho11: se(s[0]),
            rho22: se(s[1]),
            rho12_re: se(s[2]),
            rho12_im: se(s[3]),
            eta1: se(s[4]),
            eta2: se(s[5]),
        });
    }
    Ok(McRecord {
        mean: TrajectoryRecord {
            samples,
            diagnostics: Diagnostics {
                max_hermiticity_drift: 0.0,
                min_eta_increment: 0.0,
                steps: StepStats::default(),
            },
        },
        stderr,
        n_traj: mc.n_traj,
        seed,
    })
}
