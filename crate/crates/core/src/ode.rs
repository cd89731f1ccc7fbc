//! Explicit Runge–Kutta integrators over fixed-size real state vectors.
//!
//! Both schemes are linear in the stage derivatives, so linear invariants of
//! the right-hand side (the trace budget in particular) are preserved up to
//! rounding.
//!
//! The adaptive scheme measures errors in the max norm. A component that is
//! identically zero therefore never changes the step sequence, which keeps a
//! system embedded in a larger one (the noise closure with vanishing noise)
//! bit-identical to the stand-alone system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with step `dt` [ps].
    FixedRk4 { dt: f64 },
    /// Dormand–Prince 5(4) with mixed error control `atol + rtol·|y|`.
    AdaptiveRk45 { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// End of the evolution window [ps].
    pub t_final: f64,
    /// Spacing of recorded samples [ps]; the integrator lands exactly on
    /// every sample time.
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::AdaptiveRk45 {
                rtol: 1e-10,
                atol: 1e-12,
            },
            t_final: 10.0,
            sample_interval: 0.1,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive(rtol: f64, atol: f64, t_final: f64, sample_interval: f64) -> Self {
        IntegratorConfig {
            method: Method::AdaptiveRk45 { rtol, atol },
            t_final,
            sample_interval,
        }
    }

    pub fn fixed(dt: f64, t_final: f64, sample_interval: f64) -> Self {
        IntegratorConfig {
            method: Method::FixedRk4 { dt },
            t_final,
            sample_interval,
        }
    }

    /// Default adaptive tolerances, sampling only at `t = 0` and `t_final`.
    pub fn endpoint(t_final: f64) -> Self {
        IntegratorConfig {
            t_final,
            sample_interval: t_final,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if !(self.sample_interval > 0.0) || !self.sample_interval.is_finite() {
            return bad(format!(
                "sample_interval must be positive, got {}",
                self.sample_interval
            ));
        }
        match self.method {
            Method::FixedRk4 { dt } if !(dt > 0.0) || !dt.is_finite() => {
                bad(format!("dt must be positive, got {dt}"))
            }
            Method::AdaptiveRk45 { rtol, atol } if !(rtol > 0.0 && atol > 0.0) => {
                bad(format!("rtol and atol must be positive, got {rtol}, {atol}"))
            }
            _ => Ok(()),
        }
    }

    /// Nominal accuracy of the scheme: `rtol` for the adaptive method and the
    /// local error scale `dt⁴` (floored at 1e-12) for fixed RK4.
    pub fn tolerance(&self) -> f64 {
        match self.method {
            Method::AdaptiveRk45 { rtol, .. } => rtol,
            Method::FixedRk4 { dt } => dt.powi(4).max(1e-12),
        }
    }

    /// Sample times `0, Δ, 2Δ, …` with `t_final` always included last.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_final / self.sample_interval * (1.0 + 1e-12)).floor() as usize;
        let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * self.sample_interval).collect();
        ts.retain(|&t| t < self.t_final * (1.0 - 1e-12));
        ts.push(self.t_final);
        ts
    }
}

/// `dy/dt = f(t, y)` on a real vector of dimension `N`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dydt: &mut [f64; N]);
}

/// Receives the solution while it is being integrated.
pub trait Observer<const N: usize> {
    /// Called at every sample time (including `t = 0`); may modify the state
    /// before integration continues from it.
    fn sample(&mut self, t: f64, y: &mut [f64; N]) -> Result<()>;

    /// Called after every accepted step with the previous and new state.
    fn step(&mut self, _t: f64, _prev: &[f64; N], _next: &[f64; N]) {}
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

const MAX_STEPS: usize = 50_000_000;

/// Integrates `sys` from `y0` over `[0, cfg.t_final]`, reporting every sample
/// time to `obs`.
pub fn integrate<const N: usize, S, O>(
    sys: &S,
    y0: [f64; N],
    cfg: &IntegratorConfig,
    obs: &mut O,
) -> Result<StepStats>
where
    S: OdeSystem<N>,
    O: Observer<N>,
{
    cfg.validate()?;
    let times = cfg.sample_times();
    let mut y = y0;
    obs.sample(0.0, &mut y)?;
    let mut stats = StepStats::default();
    match cfg.method {
        Method::FixedRk4 { dt } => {
            let mut t0 = 0.0;
            for &t1 in &times[1..] {
                let n = ((t1 - t0) / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                let h = (t1 - t0) / n as f64;
                for k in 0..n {
                    let t = t0 + k as f64 * h;
                    let next = rk4_step(sys, t, &y, h);
                    obs.step(t, &y, &next);
                    y = next;
                    stats.accepted += 1;
                }
                obs.sample(t1, &mut y)?;
                t0 = t1;
            }
        }
        Method::AdaptiveRk45 { rtol, atol } => {
            let mut dp = DormandPrince::new(sys, rtol, atol);
            let mut t = 0.0;
            let mut h = dp.initial_step(0.0, &y, cfg.t_final);
            for &t_sample in &times[1..] {
                while t < t_sample {
                    let remaining = t_sample - t;
                    let clamped = h >= remaining * (1.0 - 1e-12);
                    let h_try = if clamped { remaining } else { h };
                    let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
                    if h_try < h_min && !clamped {
                        return Err(Error::StepUnderflow { t, h: h_try });
                    }
                    let (next, err) = dp.step(t, &y, h_try);
                    let factor = if err == 0.0 {
                        5.0
                    } else if !err.is_finite() {
                        0.2
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if err <= 1.0 {
                        let t_next = if clamped { t_sample } else { t + h_try };
                        obs.step(t, &y, &next);
                        y = next;
                        t = t_next;
                        dp.accept();
                        stats.accepted += 1;
                        // a step shortened to hit a sample must not shrink the proposal
                        h = if clamped { h.max(h_try * factor) } else { h_try * factor };
                    } else {
                        stats.rejected += 1;
                        h = h_try * factor.min(1.0);
                    }
                    if stats.accepted + stats.rejected > MAX_STEPS {
                        return Err(Error::StepUnderflow { t, h });
                    }
                }
                obs.sample(t_sample, &mut y)?;
                // the observer may have modified the state
                dp.invalidate();
            }
        }
    }
    Ok(stats)
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
    out
}

fn rk4_step<const N: usize, S: OdeSystem<N>>(sys: &S, t: f64, y: &[f64; N], h: f64) -> [f64; N] {
    let mut k1 = [0.0; N];
    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    sys.rhs(t, y, &mut k1);
    sys.rhs(t + h / 2.0, &axpy(y, h, &[(0.5, &k1)]), &mut k2);
    sys.rhs(t + h / 2.0, &axpy(y, h, &[(0.5, &k2)]), &mut k3);
    sys.rhs(t + h, &axpy(y, h, &[(1.0, &k3)]), &mut k4);
    axpy(
        y,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    )
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂ (fifth minus embedded fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct DormandPrince<'a, const N: usize, S> {
    sys: &'a S,
    rtol: f64,
    atol: f64,
    /// FSAL derivative at the current state, if still valid.
    k1: Option<[f64; N]>,
    /// Derivative at the end of the last attempted step.
    k7: [f64; N],
}

impl<'a, const N: usize, S: OdeSystem<N>> DormandPrince<'a, N, S> {
    fn new(sys: &'a S, rtol: f64, atol: f64) -> Self {
        DormandPrince {
            sys,
            rtol,
            atol,
            k1: None,
            k7: [0.0; N],
        }
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.atol + self.rtol * a.abs().max(b.abs())
    }

    fn invalidate(&mut self) {
        self.k1 = None;
    }

    fn accept(&mut self) {
        self.k1 = Some(self.k7);
    }

    /// Starting step from the usual two-evaluation heuristic, in max norms.
    fn initial_step(&mut self, t: f64, y: &[f64; N], t_end: f64) -> f64 {
        let mut f0 = [0.0; N];
        self.sys.rhs(t, y, &mut f0);
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for i in 0..N {
            let sc = self.scale(y[i], y[i]);
            d0 = d0.max(y[i].abs() / sc);
            d1 = d1.max(f0[i].abs() / sc);
        }
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(y, h0, &[(1.0, &f0)]);
        let mut f1 = [0.0; N];
        self.sys.rhs(t + h0, &y1, &mut f1);
        let mut d2: f64 = 0.0;
        for i in 0..N {
            d2 = d2.max((f1[i] - f0[i]).abs() / self.scale(y[i], y[i]));
        }
        d2 /= h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        self.k1 = Some(f0);
        (100.0 * h0).min(h1).min(t_end)
    }

    /// One trial step; returns the fifth-order solution and the scaled error.
    fn step(&mut self, t: f64, y: &[f64; N], h: f64) -> ([f64; N], f64) {
        let sys = self.sys;
        let k1 = match self.k1 {
            Some(k) => k,
            None => {
                let mut k = [0.0; N];
                sys.rhs(t, y, &mut k);
                self.k1 = Some(k);
                k
            }
        };
        let mut k2 = [0.0; N];
        let mut k3 = [0.0; N];
        let mut k4 = [0.0; N];
        let mut k5 = [0.0; N];
        let mut k6 = [0.0; N];
        let mut k7 = [0.0; N];
        sys.rhs(t + C2 * h, &axpy(y, h, &[(A21, &k1)]), &mut k2);
        sys.rhs(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]), &mut k3);
        sys.rhs(
            t + C4 * h,
            &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            &mut k4,
        );
        sys.rhs(
            t + C5 * h,
            &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            &mut k5,
        );
        sys.rhs(
            t + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            &mut k6,
        );
        let y_new = axpy(
            y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        sys.rhs(t + h, &y_new, &mut k7);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err = err.max(e.abs() / self.scale(y[i], y_new[i]));
        }
        self.k7 = k7;
        (y_new, err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y' = -y, y'' = -y as a 2-vector (harmonic oscillator) plus decay.
    struct Oscillator;

    impl OdeSystem<3> for Oscillator {
        fn rhs(&self, _t: f64, y: &[f64; 3], dy: &mut [f64; 3]) {
            dy[0] = y[1];
            dy[1] = -y[0];
            dy[2] = -0.5 * y[2];
        }
    }

    struct Recorder(Vec<(f64, [f64; 3])>);

    impl Observer<3> for Recorder {
        fn sample(&mut self, t: f64, y: &mut [f64; 3]) -> Result<()> {
            self.0.push((t, *y));
            Ok(())
        }
    }

    fn max_error(rec: &Recorder) -> f64 {
        rec.0
            .iter()
            .map(|(t, y)| {
                (y[0] - t.cos())
                    .abs()
                    .max((y[1] + t.sin()).abs())
                    .max((y[2] - (-0.5 * t).exp()).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn adaptive_hits_samples_and_is_accurate() {
        let cfg = IntegratorConfig::adaptive(1e-10, 1e-12, 10.0, 0.5);
        let mut rec = Recorder(Vec::new());
        let stats = integrate(&Oscillator, [1.0, 0.0, 1.0], &cfg, &mut rec).unwrap();
        assert_eq!(rec.0.len(), 21);
        for (k, (t, _)) in rec.0.iter().enumerate() {
            assert!((t - 0.5 * k as f64).abs() < 1e-12);
        }
        assert!(max_error(&rec) < 1e-8, "{}", max_error(&rec));
        assert!(stats.accepted > 10);
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let err = |dt: f64| {
            let mut rec = Recorder(Vec::new());
            integrate(&Oscillator, [1.0, 0.0, 1.0], &IntegratorConfig::fixed(dt, 5.0, 1.0), &mut rec)
                .unwrap();
            max_error(&rec)
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }

    #[test]
    fn sample_times_include_end() {
        let cfg = IntegratorConfig::adaptive(1e-8, 1e-10, 1.05, 0.5);
        assert_eq!(cfg.sample_times(), vec![0.0, 0.5, 1.0, 1.05]);
        let cfg = IntegratorConfig::adaptive(1e-8, 1e-10, 0.3, 0.1);
        assert_eq!(cfg.sample_times().len(), 4);
        assert_eq!(IntegratorConfig::endpoint(10.0).sample_times(), vec![0.0, 10.0]);
    }

    #[test]
    fn invalid_configs() {
        assert!(IntegratorConfig::fixed(0.0, 1.0, 0.1).validate().is_err());
        assert!(IntegratorConfig::adaptive(1e-8, 0.0, 1.0, 0.1).validate().is_err());
        assert!(IntegratorConfig::adaptive(1e-8, 1e-8, -1.0, 0.1).validate().is_err());
        assert!(IntegratorConfig::adaptive(1e-8, 1e-8, 1.0, 0.0).validate().is_err());
    }

    /// Stiff decay forcing tiny steps with an impossible tolerance.
    struct Blowup;

    impl OdeSystem<1> for Blowup {
        fn rhs(&self, t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = y[0] * y[0] / (1.0 - t).max(1e-300).powi(2);
        }
    }

    struct Nop;

    impl Observer<1> for Nop {
        fn sample(&mut self, _t: f64, _y: &mut [f64; 1]) -> Result<()> {
            Ok(())
        }
    }

    #[test]
    fn underflow_reported() {
        let cfg = IntegratorConfig::adaptive(1e-10, 1e-12, 2.0, 2.0);
        let r = integrate(&Blowup, [1.0], &cfg, &mut Nop);
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
    }
}
