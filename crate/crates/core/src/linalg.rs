//! Small helpers for 2×2 complex matrices.

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat2 = Matrix2<Complex64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn cmat(m11: C64, m12: C64, m21: C64, m22: C64) -> CMat2 {
    CMat2::new(m11, m12, m21, m22)
}

pub fn real_diag(a: f64, b: f64) -> CMat2 {
    cmat(C64::from(a), ZERO, ZERO, C64::from(b))
}

/// Principal square root with the tie rule `Re > 0`, or `Re == 0` and `Im >= 0`.
pub fn principal_sqrt(z: C64) -> C64 {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// `[a, b] = ab - ba`
pub fn commutator(a: &CMat2, b: &CMat2) -> CMat2 {
    a * b - b * a
}

/// `{a, b} = ab + ba`
pub fn anticommutator(a: &CMat2, b: &CMat2) -> CMat2 {
    a * b + b * a
}

/// Largest entrywise deviation from Hermiticity, `max |m - m†|`.
pub fn hermiticity_drift(m: &CMat2) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(m + m†) / 2`
pub fn hermitian_part(m: &CMat2) -> CMat2 {
    (m + m.adjoint()).scale(0.5)
}

/// Matrix exponential of a 2×2 complex matrix in closed form.
///
/// Writes `m = c·1 + n` with `n` traceless, so `n² = δ²·1` and
/// `exp(m) = e^c (cosh δ · 1 + sinh δ / δ · n)`. The ratio `sinh δ / δ` is
/// evaluated from its series near the degenerate point `δ = 0`, where `n`
/// may be a nonzero nilpotent (Jordan block).
pub fn expm2(m: &CMat2) -> CMat2 {
    let c = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let n = m - CMat2::identity() * c;
    let delta2 = n[(0, 0)] * n[(0, 0)] + n[(0, 1)] * n[(1, 0)];
    let delta = delta2.sqrt();
    let (cosh, sinhc) = if delta.norm() < 1e-4 {
        (
            ONE + delta2 / 2.0 + delta2 * delta2 / 24.0,
            ONE + delta2 / 6.0 + delta2 * delta2 / 120.0,
        )
    } else {
        (delta.cosh(), delta.sinh() / delta)
    };
    (CMat2::identity() * cosh + n * sinhc) * c.exp()
}

/// Packs the four complex entries of `m` into `out[0..8]` as
/// `re11, im11, re12, im12, re21, im21, re22, im22`.
pub fn pack(m: &CMat2, out: &mut [f64]) {
    let entries = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
    for (k, z) in entries.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
}

/// Inverse of [`pack`].
pub fn unpack(v: &[f64]) -> CMat2 {
    cmat(
        C64::new(v[0], v[1]),
        C64::new(v[2], v[3]),
        C64::new(v[4], v[5]),
        C64::new(v[6], v[7]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &CMat2) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn sqrt_branch_ties() {
        let r = principal_sqrt(C64::new(-4.0, -0.0));
        assert_eq!(r, C64::new(0.0, 2.0));
        let r = principal_sqrt(C64::new(3.0, -4.0));
        assert!(r.re > 0.0);
        assert!((r * r - C64::new(3.0, -4.0)).norm() < 1e-14);
    }

    #[test]
    fn expm_matches_nalgebra_pade() {
        let m = cmat(
            C64::new(0.3, -1.2),
            C64::new(0.7, 0.1),
            C64::new(-0.2, 0.5),
            C64::new(-0.4, -0.3),
        );
        let ours = expm2(&m);
        let reference = m.exp();
        assert!(max_abs(&(ours - reference)) < 1e-13);
    }

    #[test]
    fn expm_of_jordan_block() {
        // n = [[0,1],[0,0]] is nilpotent: exp(c + n) = e^c (1 + n)
        let c = C64::new(-1.0, 0.5);
        let m = cmat(c, ONE, ZERO, c);
        let expected = cmat(c.exp(), c.exp(), ZERO, c.exp());
        assert!(max_abs(&(expm2(&m) - expected)) < 1e-15);
    }

    #[test]
    fn pack_round_trip() {
        let m = cmat(C64::new(1.0, 2.0), C64::new(3.0, 4.0), C64::new(5.0, 6.0), C64::new(7.0, 8.0));
        let mut buf = [0.0; 8];
        pack(&m, &mut buf);
        assert_eq!(buf, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(unpack(&buf), m);
    }
}
