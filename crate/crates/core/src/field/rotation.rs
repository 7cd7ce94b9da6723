//! Grid rotation `(Ŵ_θ† f)(x, y) = f(x cosθ - y sinθ, x sinθ + y cosθ)` for
//! sampled transverse fields.
//!
//! The rotation is factored into three shears (x by `-tan(θ/2)`, y by
//! `sinθ`, x by `-tan(θ/2)`), each applied as a Fourier-domain shift along
//! one axis. Shifts are exact for band-limited periodic samples, and each
//! shear is inverted exactly by the opposite shear.

use rustfft::FftPlanner;

use super::{FieldGrid, GridAxes};
use crate::{Complex, Error, Real, Result};

/// Shift every line of a row-major `n_lines x len` buffer: line `j` is
/// replaced by `line(t + shift(j))` (shift in samples).
fn shift_lines<T: Real>(
    buf: &mut [Complex<T>],
    len: usize,
    stride: usize,
    n_lines: usize,
    line_step: usize,
    shift: impl Fn(usize) -> T,
    planner: &mut FftPlanner<T>,
) {
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut line = vec![Complex::new(T::zero(), T::zero()); len];
    let scale = T::from_usize_lossy(len).recip();
    let two_pi = T::lit(2.0) * T::PI();
    for j in 0..n_lines {
        let base = j * line_step;
        for (t, v) in line.iter_mut().enumerate() {
            *v = buf[base + t * stride];
        }
        fwd.process(&mut line);
        let d = shift(j);
        for (m, v) in line.iter_mut().enumerate() {
            // signed frequency index
            let f = if m <= len / 2 { m as f64 } else { m as f64 - len as f64 };
            let ang = two_pi * T::lit(f) * d / T::from_usize_lossy(len);
            *v = *v * Complex::from_polar(scale, ang);
        }
        inv.process(&mut line);
        for (t, v) in line.iter().enumerate() {
            buf[base + t * stride] = *v;
        }
    }
}

/// Rotates one transverse slice (row-major in y then x) by `theta`.
///
/// Coordinates are measured from the grid centre.
pub fn rotate_slice<T: Real>(values: &[Complex<T>], x: &[T], y: &[T], theta: T) -> Result<Vec<Complex<T>>> {
    let (nx, ny) = (x.len(), y.len());
    if values.len() != nx * ny || nx < 2 || ny < 2 {
        return Err(Error::Grid("slice shape mismatch".into()));
    }
    let hx = (x[nx - 1] - x[0]) / T::from_usize_lossy(nx - 1);
    let hy = (y[ny - 1] - y[0]) / T::from_usize_lossy(ny - 1);
    let xc = (x[0] + x[nx - 1]) * T::lit(0.5);
    let yc = (y[0] + y[ny - 1]) * T::lit(0.5);
    let a = -(theta * T::lit(0.5)).tan();
    let b = theta.sin();
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::new();
    // g(x, y) <- g(x + a y, y): shift row j by a (y_j - yc) / hx samples.
    let shear_x = |buf: &mut [Complex<T>], planner: &mut FftPlanner<T>| {
        shift_lines(buf, nx, 1, ny, nx, |j| a * (y[j] - yc) / hx, planner)
    };
    shear_x(&mut buf, &mut planner);
    // g(x, y) <- g(x, y + b x): shift column i by b (x_i - xc) / hy samples.
    shift_lines(&mut buf, ny, nx, nx, 1, |i| b * (x[i] - xc) / hy, &mut planner);
    shear_x(&mut buf, &mut planner);
    Ok(buf)
}

/// Applies [`rotate_slice`] to every z slice of a grid.
pub fn rotate_transverse<T: Real>(field: &FieldGrid<T>, theta: T) -> Result<FieldGrid<T>> {
    let axes: &GridAxes<T> = field.axes();
    let (_, _, nz) = axes.shape();
    let mut out = Vec::with_capacity(field.values().len());
    for iz in 0..nz {
        out.extend(rotate_slice(field.slice(iz), &axes.x, &axes.y, theta)?);
    }
    FieldGrid::new(axes.clone(), out)
}
