use serde::Serialize;

use super::{FieldGrid, GridAxes, MediumParams};
use crate::special_fn::{ho_unchecked, OscillatorIndex};
use crate::{Complex, Error, Real, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Gaussian-beam geometry at one propagation distance.
///
/// `curvature` is `1/R(z)`; it is zero at the waist where `R` is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamGeometry<T> {
    pub rayleigh_range: T,
    pub waist: T,
    pub radius: T,
    pub curvature: T,
    pub gouy: T,
}

impl<T: Real> BeamGeometry<T> {
    pub fn radius_of_curvature(&self) -> T {
        if self.curvature == T::zero() {
            T::infinity()
        } else {
            self.curvature.recip()
        }
    }
}

/// `w0 = sqrt(λ b / π)`, `w(z) = w0 sqrt(1 + (z/b)²)`,
/// `1/R(z) = z / (z² + b²)`, `φ(z) = atan(z/b)`.
pub fn beam_geometry<T: Real>(z: T, b: T, wavelength: T) -> Result<BeamGeometry<T>> {
    if !(b > T::zero() && b.is_finite()) {
        return Err(Error::Parameter { name: "rayleigh_range".into(), reason: "must be positive".into() });
    }
    if !(wavelength > T::zero() && wavelength.is_finite()) {
        return Err(Error::Parameter { name: "wavelength".into(), reason: "must be positive".into() });
    }
    if !z.is_finite() {
        return Err(Error::Domain { func: "beam_geometry" });
    }
    let waist = (wavelength * b / T::PI()).sqrt();
    let zr = z / b;
    Ok(BeamGeometry {
        rayleigh_range: b,
        waist,
        radius: waist * (T::one() + zr * zr).sqrt(),
        curvature: z / (z * z + b * b),
        gouy: zr.atan(),
    })
}

/// Hermite-Gauss mode `ψ_lm(x, y, z)` of a free-space beam with Rayleigh
/// range `b` and wavelength `λ` (wavenumber `k = 2π/λ`).
pub fn tem_mode<T: Real>(
    l: OscillatorIndex,
    m: OscillatorIndex,
    x: T,
    y: T,
    z: T,
    b: T,
    wavelength: T,
) -> Result<Complex<T>> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::Domain { func: "tem_mode" });
    }
    let geom = beam_geometry(z, b, wavelength)?;
    let k = T::lit(2.0) * T::PI() / wavelength;
    Ok(tem_value(l.get(), m.get(), x, y, &geom, k))
}

fn tem_value<T: Real>(l: usize, m: usize, x: T, y: T, geom: &BeamGeometry<T>, k: T) -> Complex<T> {
    let s = T::SQRT_2() / geom.radius;
    let amp = geom.waist / geom.radius * ho_unchecked(l, s * x) * ho_unchecked(m, s * y);
    let order = T::from_usize_lossy(l + m + 1);
    let phase = k * (x * x + y * y) * geom.curvature * T::lit(0.5) - order * geom.gouy;
    Complex::from_polar(amp, phase)
}

/// [`tem_mode`] sampled on a grid.
pub fn tem_mode_grid<T: Real>(
    l: OscillatorIndex,
    m: OscillatorIndex,
    axes: GridAxes<T>,
    b: T,
    wavelength: T,
) -> Result<FieldGrid<T>> {
    beam_geometry(T::zero(), b, wavelength)?;
    let k = T::lit(2.0) * T::PI() / wavelength;
    FieldGrid::from_fn(axes, |x, y, z| {
        let geom = beam_geometry(z, b, wavelength).expect("validated");
        tem_value(l.get(), m.get(), x, y, &geom, k)
    })
}

/// Complex amplitudes of the paraxial electric field at `t = 0`:
/// `E_x = ω ψ e^{ikz}`, `E_z = i c ∂ψ/∂x e^{ikz}`. The physical field is the
/// real part, see [`ParaxialVectorField::real_parts`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParaxialVectorField<T> {
    pub axes: GridAxes<T>,
    pub ex: Vec<Complex<T>>,
    pub ez: Vec<Complex<T>>,
}

impl<T: Real> ParaxialVectorField<T> {
    pub fn real_parts(&self) -> (Vec<T>, Vec<T>) {
        (self.ex.iter().map(|v| v.re).collect(), self.ez.iter().map(|v| v.re).collect())
    }
}

/// `c` is taken in model length units per second; `omega` in rad/s.
/// `∂ψ/∂x` uses second-order central differences, with second-order
/// one-sided stencils on the two boundary columns.
pub fn electric_field_paraxial<T: Real>(
    psi: &FieldGrid<T>,
    params: &MediumParams<T>,
    omega: T,
) -> Result<ParaxialVectorField<T>> {
    let axes = psi.axes();
    let (nx, ny, nz) = axes.shape();
    if nx < 3 {
        return Err(Error::Grid(format!("need at least 3 x samples, got {nx}")));
    }
    let (hx, _, _) = axes.spacings();
    let c = T::lit(SPEED_OF_LIGHT) / params.length_unit_m();
    let k = params.free_space_k();
    let i = Complex::new(T::zero(), T::one());
    let two_h = T::lit(2.0) * hx;
    let mut ex = Vec::with_capacity(psi.values().len());
    let mut ez = Vec::with_capacity(psi.values().len());
    for iz in 0..nz {
        let carrier = Complex::from_polar(T::one(), k * axes.z[iz]);
        for iy in 0..ny {
            let row = |ix: usize| psi.at(ix, iy, iz);
            for ix in 0..nx {
                let d = if ix == 0 {
                    (row(0) * T::lit(-3.0) + row(1) * T::lit(4.0) - row(2)) / two_h
                } else if ix == nx - 1 {
                    (row(nx - 1) * T::lit(3.0) - row(nx - 2) * T::lit(4.0) + row(nx - 3)) / two_h
                } else {
                    (row(ix + 1) - row(ix - 1)) / two_h
                };
                ex.push(row(ix) * omega * carrier);
                ez.push(i * d * c * carrier);
            }
        }
    }
    Ok(ParaxialVectorField { axes: axes.clone(), ex, ez })
}
