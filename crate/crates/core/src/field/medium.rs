use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Constants of the inhomogeneous waveguide
/// `k²(x, y) = k0² - (kx x² + ky y²) + 2 g x y`.
///
/// `wavelength` is in model length units; `k0 = 2π n0 / wavelength` is derived
/// at construction and cannot be set independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams<T> {
    wavelength: T,
    n0: T,
    k0: T,
    kx: T,
    ky: T,
    g: T,
    length_unit_m: T,
}

impl<T: Real> MediumParams<T> {
    /// `wavelength` in model length units of `length_unit_m` metres each.
    pub fn new(wavelength: T, n0: T, kx: T, ky: T, g: T, length_unit_m: T) -> Result<Self> {
        let bad = |name: &str, reason: &str| Error::Parameter { name: name.into(), reason: reason.into() };
        if !(wavelength > T::zero() && wavelength.is_finite()) {
            return Err(bad("wavelength", "must be positive"));
        }
        if !(n0 >= T::one() && n0.is_finite()) {
            return Err(bad("n0", "must be >= 1"));
        }
        if !(length_unit_m > T::zero() && length_unit_m.is_finite()) {
            return Err(bad("length_unit_m", "must be positive"));
        }
        check_quadratic_form(kx, ky, g)?;
        Ok(Self { wavelength, n0, k0: T::lit(2.0) * T::PI() * n0 / wavelength, kx, ky, g, length_unit_m })
    }

    /// Wavelength given in metres, converted to model units.
    pub fn from_si(wavelength_m: T, n0: T, kx: T, ky: T, g: T, length_unit_m: T) -> Result<Self> {
        Self::new(wavelength_m / length_unit_m, n0, kx, ky, g, length_unit_m)
    }

    /// 1300 nm in a GRIN medium with `n0 = 1.45`, `kx = 1.2`, `ky = 1.5`,
    /// `g = 0.25`, in micrometre units.
    pub fn grin_default() -> Self {
        Self::from_si(T::lit(1300e-9), T::lit(1.45), T::lit(1.2), T::lit(1.5), T::lit(0.25), T::lit(1e-6))
            .expect("default medium is valid")
    }

    pub fn with_coefficients(&self, kx: T, ky: T, g: T) -> Result<Self> {
        Self::new(self.wavelength, self.n0, kx, ky, g, self.length_unit_m)
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }
    pub fn n0(&self) -> T {
        self.n0
    }
    pub fn k0(&self) -> T {
        self.k0
    }
    pub fn kx(&self) -> T {
        self.kx
    }
    pub fn ky(&self) -> T {
        self.ky
    }
    pub fn g(&self) -> T {
        self.g
    }
    pub fn length_unit_m(&self) -> T {
        self.length_unit_m
    }

    /// Vacuum wavenumber `2π / λ`.
    pub fn free_space_k(&self) -> T {
        T::lit(2.0) * T::PI() / self.wavelength
    }

    /// Transverse potential `kx x² + ky y² - 2 g x y`.
    #[inline]
    pub fn potential(&self, x: T, y: T) -> T {
        self.kx * x * x + self.ky * y * y - T::lit(2.0) * self.g * x * y
    }
}

pub(crate) fn check_quadratic_form<T: Real>(kx: T, ky: T, g: T) -> Result<()> {
    if !(kx > T::zero() && ky > T::zero()) || !g.is_finite() || !kx.is_finite() || !ky.is_finite() {
        return Err(Error::Parameter { name: "kx/ky".into(), reason: "must be positive and finite".into() });
    }
    if kx * ky <= g * g {
        return Err(Error::NotDefinite { kxky: (kx * ky).as_f64(), g2: (g * g).as_f64() });
    }
    Ok(())
}

/// Diagonalization of the transverse quadratic form.
///
/// With `u = x cosθ - y sinθ`, `v = x sinθ + y cosθ` the potential becomes
/// `κ₊ u² + κ₋ v²`. `omega_x = sqrt(κ₊)` is the frequency of the oscillator in
/// `u` (the coordinate carrying the `x` level), `omega_y = sqrt(κ₋)` the one
/// in `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalModes<T> {
    pub theta: T,
    pub omega_x: T,
    pub omega_y: T,
    pub kappa_plus: T,
    pub kappa_minus: T,
}

pub fn rotation_angle<T: Real>(params: &MediumParams<T>) -> Result<NormalModes<T>> {
    normal_modes(params.kx(), params.ky(), params.g())
}

pub fn normal_modes<T: Real>(kx: T, ky: T, g: T) -> Result<NormalModes<T>> {
    check_quadratic_form(kx, ky, g)?;
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let theta = half * (two * g).atan2(kx - ky);
    let mean = (kx + ky) * half;
    let d = ((kx - ky) * half).hypot(g);
    let kappa_plus = mean + d;
    // mean - d loses digits when d ≈ mean; the product form does not.
    let kappa_minus = (kx * ky - g * g) / kappa_plus;
    Ok(NormalModes { theta, omega_x: kappa_plus.sqrt(), omega_y: kappa_minus.sqrt(), kappa_plus, kappa_minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    #[test]
    fn k0_enforced() {
        let p = MediumParams::<f64>::grin_default();
        assert!((p.wavelength() - 1.3).abs() < 1e-12);
        assert!((p.k0() - 2.0 * std::f64::consts::PI * 1.45 / 1.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let err = MediumParams::new(1.3, 1.45, 1.0, 1.0, 1.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::NotDefinite { .. }));
        assert!(MediumParams::new(1.3, 0.9, 1.0, 1.0, 0.0, 1e-6).is_err());
        assert!(MediumParams::new(-1.3, 1.2, 1.0, 1.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn angle_for_grin_set() {
        let m = normal_modes(1.2f64, 1.5, 0.25).unwrap();
        assert!((m.theta - 0.5 * 0.5f64.atan2(-0.3)).abs() < 1e-15);
        assert!((m.theta - 1.055_6).abs() < 1e-4);
    }

    #[test]
    fn decoupled_medium() {
        let m = normal_modes(2.0f64, 1.0, 0.0).unwrap();
        assert_eq!(m.theta, 0.0);
        assert_eq!(m.kappa_plus, 2.0);
        assert_eq!(m.kappa_minus, 1.0);
    }

    #[test]
    fn degenerate_diagonal() {
        let q = std::f64::consts::FRAC_PI_4;
        assert!((normal_modes(1.0f64, 1.0, 0.3).unwrap().theta - q).abs() < 1e-15);
        assert!((normal_modes(1.0f64, 1.0, -0.3).unwrap().theta + q).abs() < 1e-15);
        assert_eq!(normal_modes(1.0f64, 1.0, 0.0).unwrap().theta, 0.0);
    }

    #[test]
    fn eigenvalues_match_matrix_oracle() {
        for &(kx, ky, g) in &[(3.5, 5.0, 0.5), (1.2, 1.5, 0.25), (4.0, 0.5, -1.1)] {
            let m = normal_modes(kx, ky, g).unwrap();
            let mat = Matrix2::new(kx, -g, -g, ky);
            let mut ev: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!((m.kappa_minus - ev[0]).abs() < 1e-12);
            assert!((m.kappa_plus - ev[1]).abs() < 1e-12);
            // rotated form reproduces the potential
            let (s, c) = m.theta.sin_cos();
            for &(x, y) in &[(0.3, -1.2), (2.0, 0.7)] {
                let u = x * c - y * s;
                let v = x * s + y * c;
                let pot = kx * x * x + ky * y * y - 2.0 * g * x * y;
                assert!((m.kappa_plus * u * u + m.kappa_minus * v * v - pot).abs() < 1e-12);
            }
        }
    }
}
