use super::{FieldGrid, MediumParams};
use crate::{Complex, Error, Real, Result};

/// Which paraxial equation a residual is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParaxialEquation {
    /// `ψ_xx + ψ_yy + 2ik ψ_z = 0` with the vacuum wavenumber `k = 2π/λ`.
    FreeSpace,
    /// `2ik0 E_z = E_xx + E_yy + (k0² - kx x² - ky y² + 2gxy) E`.
    Inhomogeneous,
}

/// RMS of the equation's residual over interior nodes (second-order central
/// differences on all three axes), divided by the RMS field magnitude on the
/// same nodes.
pub fn paraxial_residual<T: Real>(
    field: &FieldGrid<T>,
    params: &MediumParams<T>,
    equation: ParaxialEquation,
) -> Result<T> {
    let axes = field.axes();
    let (nx, ny, nz) = axes.shape();
    if nx < 5 || ny < 5 || nz < 5 {
        return Err(Error::Grid(format!("residual needs >= 5 samples per axis, got {nx}x{ny}x{nz}")));
    }
    let (hx, hy, hz) = axes.spacings();
    let two = T::lit(2.0);
    let i = Complex::new(T::zero(), T::one());
    let (k_long, with_medium) = match equation {
        ParaxialEquation::FreeSpace => (params.free_space_k(), false),
        ParaxialEquation::Inhomogeneous => (params.k0(), true),
    };
    let k0_sq = params.k0() * params.k0();
    let mut res_sq = T::zero();
    let mut mag_sq = T::zero();
    for iz in 1..nz - 1 {
        for iy in 1..ny - 1 {
            for ix in 1..nx - 1 {
                let c = field.at(ix, iy, iz);
                let dxx = (field.at(ix + 1, iy, iz) + field.at(ix - 1, iy, iz) - c * two) / (hx * hx);
                let dyy = (field.at(ix, iy + 1, iz) + field.at(ix, iy - 1, iz) - c * two) / (hy * hy);
                let dz = (field.at(ix, iy, iz + 1) - field.at(ix, iy, iz - 1)) / (two * hz);
                let r = if with_medium {
                    let v = params.potential(axes.x[ix], axes.y[iy]);
                    i * dz * (two * k_long) - dxx - dyy - c * (k0_sq - v)
                } else {
                    dxx + dyy + i * dz * (two * k_long)
                };
                res_sq += r.norm_sqr();
                mag_sq += c.norm_sqr();
            }
        }
    }
    if !(mag_sq > T::zero()) {
        return Err(Error::Grid("field vanishes on interior nodes".into()));
    }
    Ok((res_sq / mag_sq).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{tem_mode_grid, GridAxes};
    use crate::special_fn::OscillatorIndex;

    #[test]
    fn rejects_small_grid() {
        let params = MediumParams::<f64>::grin_default();
        let axes = GridAxes::from_ranges((0.0, 1.0, 4), (0.0, 1.0, 5), (0.0, 1.0, 5)).unwrap();
        let g = FieldGrid::from_fn(axes, |_, _, _| Complex::new(1.0, 0.0)).unwrap();
        assert!(matches!(paraxial_residual(&g, &params, ParaxialEquation::FreeSpace), Err(Error::Grid(_))));
    }

    #[test]
    fn plane_wave_solves_free_space() {
        let params = MediumParams::<f64>::grin_default();
        let axes = GridAxes::from_ranges((0.0, 0.1, 6), (0.0, 0.1, 6), (0.0, 0.1, 6)).unwrap();
        let g = FieldGrid::from_fn(axes, |_, _, _| Complex::new(0.3, 0.4)).unwrap();
        let r = paraxial_residual(&g, &params, ParaxialEquation::FreeSpace).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn corrupted_mode_is_flagged() {
        let params = MediumParams::<f64>::grin_default();
        let l = OscillatorIndex::new(1).unwrap();
        let m = OscillatorIndex::new(0).unwrap();
        let res = |h: f64, corrupt: bool| {
            let n = (12.0 / h).round() as usize + 1;
            let axes = GridAxes::centered(6.0, n, -1.0, h, 9).unwrap();
            let g = tem_mode_grid(l, m, axes, 10.0, params.wavelength()).unwrap();
            let g = if corrupt {
                let vals: Vec<_> = g
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| if g.axes().x[k % n] > 0.0 { v * 1.1 } else { *v })
                    .collect();
                FieldGrid::new(g.axes().clone(), vals).unwrap()
            } else {
                g
            };
            paraxial_residual(&g, &params, ParaxialEquation::FreeSpace).unwrap()
        };
        let clean = res(0.1, false);
        let dirty_coarse = res(0.2, true);
        let dirty_fine = res(0.1, true);
        assert!(clean < 1e-2);
        assert!(dirty_fine > 10.0 * clean);
        // does not decay under refinement
        assert!(dirty_fine > 0.5 * dirty_coarse);
    }
}
