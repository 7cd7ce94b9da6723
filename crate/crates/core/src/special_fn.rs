//! Hermite polynomials and normalized harmonic-oscillator eigenfunctions.
//!
//! Physicists' convention throughout: `H_0 = 1`, `H_1 = 2x`,
//! `H_{n+1} = 2x H_n - 2n H_{n-1}`, and
//! `φ_n(β) = H_n(β) e^{-β²/2} / sqrt(2^n n! sqrt(π))`.

use crate::{Error, Real, Result};

/// Largest oscillator index accepted by the evaluators.
pub const N_MAX: usize = 64;

/// Oscillator quantum number (photon number / energy level), capped at [`N_MAX`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct OscillatorIndex(usize);

impl OscillatorIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n > N_MAX {
            return Err(Error::IndexBounds { n, max: N_MAX });
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for OscillatorIndex {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

fn check_finite<T: Real>(x: T, func: &'static str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { func })
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by three-term recurrence.
pub fn hermite_poly<T: Real>(n: OscillatorIndex, x: T) -> Result<T> {
    check_finite(x, "hermite_poly")?;
    Ok(hermite_unchecked(n.get(), x))
}

pub(crate) fn hermite_unchecked<T: Real>(n: usize, x: T) -> T {
    let two = T::lit(2.0);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two * x;
    for k in 1..n {
        let next = two * x * cur - two * T::from_usize_lossy(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized oscillator eigenfunction `φ_n(β)`.
///
/// Evaluated with the normalized recurrence
/// `φ_{k+1} = sqrt(2/(k+1)) β φ_k - sqrt(k/(k+1)) φ_{k-1}`, which never forms
/// `2^n n!`. The value is computed at `|β|` and the sign applied afterwards, so
/// `φ_n(-β) = (-1)^n φ_n(β)` holds bitwise.
pub fn ho_wavefunction<T: Real>(n: OscillatorIndex, beta: T) -> Result<T> {
    check_finite(beta, "ho_wavefunction")?;
    Ok(ho_unchecked(n.get(), beta))
}

pub(crate) fn ho_unchecked<T: Real>(n: usize, beta: T) -> T {
    let b = beta.abs();
    let v = ho_nonneg(n, b);
    if beta.is_sign_negative() && n % 2 == 1 {
        -v
    } else {
        v
    }
}

fn ho_nonneg<T: Real>(n: usize, b: T) -> T {
    // π^{-1/4}
    let phi0 = T::PI().powf(T::lit(-0.25)) * (-(b * b) * T::lit(0.5)).exp();
    if n == 0 {
        return phi0;
    }
    let mut prev = phi0;
    let mut cur = T::SQRT_2() * b * phi0;
    for k in 1..n {
        let kk = T::from_usize_lossy(k);
        let k1 = kk + T::one();
        let next = (T::lit(2.0) / k1).sqrt() * b * cur - (kk / k1).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `φ_0(β), ..., φ_n(β)` from one recurrence pass.
pub fn ho_wavefunctions_upto<T: Real>(n: OscillatorIndex, beta: T) -> Result<Vec<T>> {
    check_finite(beta, "ho_wavefunctions_upto")?;
    let b = beta.abs();
    let neg = beta.is_sign_negative();
    let mut out = Vec::with_capacity(n.get() + 1);
    out.push(T::PI().powf(T::lit(-0.25)) * (-(b * b) * T::lit(0.5)).exp());
    if n.get() >= 1 {
        out.push(T::SQRT_2() * b * out[0]);
    }
    for k in 1..n.get() {
        let kk = T::from_usize_lossy(k);
        let k1 = kk + T::one();
        let next = (T::lit(2.0) / k1).sqrt() * b * out[k] - (kk / k1).sqrt() * out[k - 1];
        out.push(next);
    }
    if neg {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussHermite;
    use proptest::prelude::*;

    fn idx(n: usize) -> OscillatorIndex {
        OscillatorIndex::new(n).unwrap()
    }

    /// Explicit sum `Σ_k (-1)^k n!/(k!(n-2k)!) (2x)^{n-2k}`.
    fn hermite_sum_oracle(n: usize, x: f64) -> f64 {
        let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
        (0..=n / 2)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * fact(n) / (fact(k) * fact(n - 2 * k)) * (2.0 * x).powi((n - 2 * k) as i32)
            })
            .sum()
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite_poly(idx(0), 3.7).unwrap(), 1.0);
        assert_eq!(hermite_poly(idx(1), 2.0).unwrap(), 4.0);
        let h4 = hermite_poly(idx(4), 1.5).unwrap();
        // 16x^4 - 48x^2 + 12 at 1.5 = 81 - 108 + 12
        assert!((h4 - hermite_sum_oracle(4, 1.5)).abs() < 1e-12);
        assert!((h4 + 15.0).abs() < 1e-12);
        for n in 0..12 {
            for &x in &[-2.3, -0.4, 0.0, 0.7, 1.9] {
                let a = hermite_poly(idx(n), x).unwrap();
                let b = hermite_sum_oracle(n, x);
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn index_cap_and_domain() {
        assert_eq!(OscillatorIndex::new(65), Err(Error::IndexBounds { n: 65, max: 64 }));
        assert!(OscillatorIndex::new(64).is_ok());
        assert!(matches!(hermite_poly(idx(2), f64::NAN), Err(Error::Domain { .. })));
        assert!(ho_wavefunction(idx(2), f64::INFINITY).is_err());
    }

    #[test]
    fn wavefunction_values() {
        let v: f64 = ho_wavefunction(idx(0), 0.0).unwrap();
        assert!((v - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(ho_wavefunction(idx(1), 0.0).unwrap(), 0.0);
        // φ_3(1) = H_3(1) e^{-1/2} / sqrt(48 sqrt π), H_3(1) = 8 - 12 = -4.
        // Reference digits from a 50-digit mpmath evaluation.
        let v3: f64 = ho_wavefunction(idx(3), 1.0).unwrap();
        assert!((v3 - (-0.263_029_623_623_333_4)).abs() < 1e-14, "{v3}");
        let direct = -4.0 * (-0.5f64).exp() / (48.0 * std::f64::consts::PI.sqrt()).sqrt();
        assert!((v3 - direct).abs() < 1e-14);
    }

    #[test]
    fn finite_at_cap() {
        for &b in &[-20.0, -7.5, 0.0, 3.0, 20.0] {
            let v: f64 = ho_wavefunction(idx(N_MAX), b).unwrap();
            assert!(v.is_finite());
        }
    }

    #[test]
    fn orthonormality_low_orders() {
        let rule = GaussHermite::new(40).unwrap();
        for m in 0..=6 {
            for n in 0..=6 {
                // ∫ φ_m φ_n dβ = ∫ e^{-β²} [φ_m φ_n e^{β²}] dβ
                let val = rule.integrate(|b: f64| ho_unchecked(m, b) * ho_unchecked(n, b) * (b * b).exp());
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((val - want).abs() < 1e-8, "m={m} n={n} val={val}");
            }
        }
    }

    #[test]
    fn ladder_recurrence() {
        for n in 1..=10 {
            for &b in &[-3.1, -1.0, 0.25, 0.9, 2.6] {
                let lhs = b * ho_unchecked(n, b);
                let rhs = (n as f64 / 2.0).sqrt() * ho_unchecked(n - 1, b)
                    + ((n as f64 + 1.0) / 2.0).sqrt() * ho_unchecked(n + 1, b);
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-3), "n={n} b={b}");
            }
        }
    }

    #[test]
    fn batch_matches_single() {
        let all = ho_wavefunctions_upto(idx(9), -1.3).unwrap();
        for (n, v) in all.iter().enumerate() {
            assert_eq!(*v, ho_unchecked(n, -1.3));
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        for n in 0..8 {
            let a = ho_unchecked(n, 1.2f32) as f64;
            let b = ho_unchecked(n, 1.2f64);
            assert!((a - b).abs() < 1e-5);
        }
    }

    proptest! {
        #[test]
        fn parity_is_exact(n in 0usize..=N_MAX, b in -20.0f64..20.0) {
            let pos = ho_unchecked(n, b);
            let neg = ho_unchecked(n, -b);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert_eq!(neg, sign * pos);
        }
    }
}
