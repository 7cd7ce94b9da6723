use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::MediumParams;
use crate::{Complex, Error, Real, Result};

/// Uniform sample axes of a field grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxes<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub z: Vec<T>,
}

fn linspace<T: Real>(start: T, step: T, n: usize) -> Vec<T> {
    (0..n).map(|i| start + step * T::from_usize_lossy(i)).collect()
}

fn axis_step<T: Real>(axis: &[T], name: &str) -> Result<T> {
    if axis.len() < 2 {
        return Ok(T::one());
    }
    let h = (axis[axis.len() - 1] - axis[0]) / T::from_usize_lossy(axis.len() - 1);
    if !(h > T::zero()) {
        return Err(Error::Grid(format!("{name} axis spacing must be positive")));
    }
    let tol = T::lit(1e-6) * h;
    for w in axis.windows(2) {
        if ((w[1] - w[0]) - h).abs() > tol {
            return Err(Error::Grid(format!("{name} axis is not uniform")));
        }
    }
    Ok(h)
}

impl<T: Real> GridAxes<T> {
    pub fn new(x: Vec<T>, y: Vec<T>, z: Vec<T>) -> Result<Self> {
        if x.is_empty() || y.is_empty() || z.is_empty() {
            return Err(Error::Grid("empty axis".into()));
        }
        for (a, n) in [(&x, "x"), (&y, "y"), (&z, "z")] {
            if a.iter().any(|v| !v.is_finite()) {
                return Err(Error::Grid(format!("{n} axis has non-finite samples")));
            }
            axis_step(a, n)?;
        }
        Ok(Self { x, y, z })
    }

    /// Symmetric transverse window `[-half, half]²` with `nt` samples per side
    /// and `nz` samples from `z0` with step `hz`.
    pub fn centered(half: T, nt: usize, z0: T, hz: T, nz: usize) -> Result<Self> {
        if nt < 1 || nz < 1 {
            return Err(Error::Grid("axis lengths must be positive".into()));
        }
        let ht = if nt > 1 { T::lit(2.0) * half / T::from_usize_lossy(nt - 1) } else { T::one() };
        let start = if nt > 1 { -half } else { T::zero() };
        Self::new(linspace(start, ht, nt), linspace(start, ht, nt), linspace(z0, hz, nz))
    }

    pub fn from_ranges(
        (x0, hx, nx): (T, T, usize),
        (y0, hy, ny): (T, T, usize),
        (z0, hz, nz): (T, T, usize),
    ) -> Result<Self> {
        Self::new(linspace(x0, hx, nx), linspace(y0, hy, ny), linspace(z0, hz, nz))
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.x.len(), self.y.len(), self.z.len())
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len() * self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacings(&self) -> (T, T, T) {
        (
            axis_step(&self.x, "x").unwrap_or(T::one()),
            axis_step(&self.y, "y").unwrap_or(T::one()),
            axis_step(&self.z, "z").unwrap_or(T::one()),
        )
    }
}

/// Complex field samples on a rectilinear grid, stored z-major then y then x.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid<T> {
    axes: GridAxes<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> FieldGrid<T> {
    pub fn new(axes: GridAxes<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != axes.len() {
            return Err(Error::Grid(format!("{} samples for a {:?} grid", values.len(), axes.shape())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Grid("non-finite field sample".into()));
        }
        Ok(Self { axes, values })
    }

    pub fn from_fn<F>(axes: GridAxes<T>, f: F) -> Result<Self>
    where
        F: Fn(T, T, T) -> Complex<T> + Sync,
    {
        use rayon::prelude::*;
        let (nx, ny, _) = axes.shape();
        let mut values = vec![Complex::new(T::zero(), T::zero()); axes.len()];
        values.par_chunks_mut(nx * ny).zip(axes.z.par_iter()).for_each(|(slice, &z)| {
            for (iy, &y) in axes.y.iter().enumerate() {
                for (ix, &x) in axes.x.iter().enumerate() {
                    slice[iy * nx + ix] = f(x, y, z);
                }
            }
        });
        Self::new(axes, values)
    }

    pub fn axes(&self) -> &GridAxes<T> {
        &self.axes
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        let (nx, ny, _) = self.axes.shape();
        (iz * ny + iy) * nx + ix
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize, iz: usize) -> Complex<T> {
        self.values[self.index(ix, iy, iz)]
    }

    /// Transverse slice at `iz`, row-major in y then x.
    pub fn slice(&self, iz: usize) -> &[Complex<T>] {
        let (nx, ny, _) = self.axes.shape();
        &self.values[iz * nx * ny..(iz + 1) * nx * ny]
    }

    /// `∬ |E|² dx dy` per z slice by the trapezoid rule.
    pub fn transverse_norms(&self) -> Vec<T> {
        let (nx, ny, nz) = self.axes.shape();
        let (hx, hy, _) = self.axes.spacings();
        let wt = |i: usize, n: usize| {
            if n > 1 && (i == 0 || i == n - 1) {
                T::lit(0.5)
            } else {
                T::one()
            }
        };
        (0..nz)
            .map(|iz| {
                let s = self.slice(iz);
                let mut acc = T::zero();
                for iy in 0..ny {
                    for ix in 0..nx {
                        acc += wt(ix, nx) * wt(iy, ny) * s[iy * nx + ix].norm_sqr();
                    }
                }
                acc * hx * hy
            })
            .collect()
    }

    /// Pointwise sum of two fields on identical axes.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.axes != other.axes {
            return Err(Error::Grid("axes differ".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.axes.clone(), values)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { axes: self.axes.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    /// CSV with header `x,y,z,re,im`, one node per row, z slowest.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,z,re,im")?;
        let (nx, ny, nz) = self.axes.shape();
        for iz in 0..nz {
            for iy in 0..ny {
                for ix in 0..nx {
                    let v = self.at(ix, iy, iz);
                    writeln!(w, "{},{},{},{},{}", self.axes.x[ix], self.axes.y[iy], self.axes.z[iz], v.re, v.im)?;
                }
            }
        }
        Ok(())
    }

    /// Parses the [`write_csv`](Self::write_csv) layout back into a grid.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Grid("empty field CSV".into()))?
            .map_err(|e| Error::Grid(e.to_string()))?;
        if header.trim() != "x,y,z,re,im" {
            return Err(Error::Grid(format!("unexpected header `{header}`")));
        }
        let mut rows: Vec<[T; 5]> = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Grid(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut rec = [T::zero(); 5];
            let mut n = 0;
            for (k, tok) in line.split(',').enumerate() {
                if k >= 5 {
                    return Err(Error::Grid(format!("line {}: too many fields", ln + 2)));
                }
                let v: f64 =
                    tok.trim().parse().map_err(|_| Error::Grid(format!("line {}: bad number `{tok}`", ln + 2)))?;
                rec[k] = T::lit(v);
                n += 1;
            }
            if n != 5 {
                return Err(Error::Grid(format!("line {}: expected 5 fields", ln + 2)));
            }
            rows.push(rec);
        }
        let nx = rows.iter().take_while(|r| r[1] == rows[0][1] && r[2] == rows[0][2]).count();
        if nx == 0 {
            return Err(Error::Grid("no samples".into()));
        }
        let ny = rows.iter().step_by(nx).take_while(|r| r[2] == rows[0][2]).count();
        if !rows.len().is_multiple_of(nx * ny) {
            return Err(Error::Grid("row count is not a full grid".into()));
        }
        let nz = rows.len() / (nx * ny);
        let x = rows[..nx].iter().map(|r| r[0]).collect();
        let y = (0..ny).map(|j| rows[j * nx][1]).collect();
        let z = (0..nz).map(|k| rows[k * nx * ny][2]).collect();
        let axes = GridAxes::new(x, y, z)?;
        let values = rows.iter().map(|r| Complex::new(r[3], r[4])).collect();
        Self::new(axes, values)
    }

    pub fn sidecar(&self, medium: &MediumParams<T>) -> GridSidecar<T> {
        let (hx, hy, hz) = self.axes.spacings();
        let (nx, ny, nz) = self.axes.shape();
        GridSidecar {
            shape: [nx, ny, nz],
            spacings: [hx, hy, hz],
            origin: [self.axes.x[0], self.axes.y[0], self.axes.z[0]],
            length_unit_m: medium.length_unit_m(),
            medium: *medium,
        }
    }
}

/// JSON companion of the field CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSidecar<T> {
    pub shape: [usize; 3],
    pub spacings: [T; 3],
    pub origin: [T; 3],
    pub length_unit_m: T,
    pub medium: MediumParams<T>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FieldGrid<f64> {
        let axes = GridAxes::from_ranges((-1.0, 0.5, 5), (0.0, 0.25, 3), (2.0, 1.0, 2)).unwrap();
        FieldGrid::from_fn(axes, |x, y, z| Complex::new(x + 10.0 * y, z * 0.125)).unwrap()
    }

    #[test]
    fn layout_is_z_major() {
        let g = small();
        assert_eq!(g.index(1, 0, 0), 1);
        assert_eq!(g.index(0, 1, 0), 5);
        assert_eq!(g.index(0, 0, 1), 15);
        assert_eq!(g.at(4, 2, 1), Complex::new(1.0 + 5.0, 0.375));
    }

    #[test]
    fn csv_roundtrip() {
        let g = small();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,y,z,re,im\n-1,0,2,"));
        let back = FieldGrid::<f64>::read_csv(&buf[..]).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_bad_shapes() {
        let axes = GridAxes::from_ranges((0.0, 1.0, 2), (0.0, 1.0, 2), (0.0, 1.0, 1)).unwrap();
        assert!(FieldGrid::new(axes.clone(), vec![Complex::new(0.0, 0.0); 3]).is_err());
        let mut v = vec![Complex::new(0.0, 0.0); 4];
        v[2].re = f64::NAN;
        assert!(FieldGrid::new(axes, v).is_err());
        assert!(GridAxes::new(vec![0.0, 1.0, 3.0], vec![0.0], vec![0.0]).is_err());
        assert!(GridAxes::new(vec![1.0, 0.0], vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn trapezoid_norm_of_constant() {
        let axes = GridAxes::from_ranges((0.0, 0.5, 5), (0.0, 0.25, 9), (0.0, 1.0, 2)).unwrap();
        let g: FieldGrid<f64> = FieldGrid::from_fn(axes, |_, _, _| Complex::new(0.0, 2.0)).unwrap();
        for n in g.transverse_norms() {
            assert!((n - 4.0 * 2.0 * 2.0).abs() < 1e-12);
        }
    }
}
