//! Received energy along the propagation axis, the two-window moving-average
//! split into small- and large-scale variations, and histogram densities.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::field::{FieldGrid, ParaxialVectorField};
use crate::{Error, Real, Result};

/// Samples below this are treated as a dark probe in [`decompose_envelope`].
pub const ENVELOPE_FLOOR: f64 = 1e-30;

/// Received energy `e_r(z)` on a uniform z grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSeries<T> {
    z: Vec<T>,
    values: Vec<T>,
    wavelength: T,
}

impl<T: Real> EnvelopeSeries<T> {
    pub fn new(z: Vec<T>, values: Vec<T>, wavelength: T) -> Result<Self> {
        if z.len() != values.len() || z.len() < 2 {
            return Err(Error::Parameter {
                name: "series".into(),
                reason: format!("need matching z/value lengths >= 2, got {} and {}", z.len(), values.len()),
            });
        }
        if !(wavelength > T::zero() && wavelength.is_finite()) {
            return Err(Error::Parameter { name: "wavelength".into(), reason: "must be positive".into() });
        }
        let h = z[1] - z[0];
        let tol = T::lit(1e-6) * h.abs();
        if !(h > T::zero()) || z.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol) {
            return Err(Error::Grid("z samples must be increasing and uniform".into()));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::Parameter {
                name: "e_r".into(),
                reason: format!("sample {i} is negative or not finite"),
            });
        }
        Ok(Self { z, values, wavelength })
    }

    pub fn z(&self) -> &[T] {
        &self.z
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn spacing(&self) -> T {
        self.z[1] - self.z[0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same z grid, new values (validated).
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.z.clone(), values, self.wavelength)
    }

    /// CSV with header `z,e_r`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "z,e_r")?;
        for (z, e) in self.z.iter().zip(&self.values) {
            writeln!(w, "{z:e},{e:e}")?;
        }
        Ok(())
    }
}

fn nearest<T: Real>(axis: &[T], p: impl Real) -> Option<usize> {
    let n = axis.len();
    let h = if n > 1 { axis[1] - axis[0] } else { T::zero() };
    let p = num_traits::cast::<_, f64>(p)?;
    let (lo, hi, h) = (axis[0].as_f64(), axis[n - 1].as_f64(), h.as_f64());
    if p < lo - h || p > hi + h {
        return None;
    }
    axis.iter().enumerate().min_by(|a, b| (a.1.as_f64() - p).abs().total_cmp(&(b.1.as_f64() - p).abs())).map(|(i, _)| i)
}

fn probe_indices<T: Real>(x: &[T], y: &[T], probe: (T, T)) -> Result<(usize, usize)> {
    match (nearest(x, probe.0), nearest(y, probe.1)) {
        (Some(ix), Some(iy)) => Ok((ix, iy)),
        _ => Err(Error::Probe { x: probe.0.as_f64(), y: probe.1.as_f64() }),
    }
}

/// `e_r(z) = ½|E(x*, y*, z)|²` at the grid node nearest the probe. Probes
/// more than one cell outside the grid are rejected.
pub fn received_energy<T: Real>(field: &FieldGrid<T>, probe: (T, T), wavelength: T) -> Result<EnvelopeSeries<T>> {
    let axes = field.axes();
    let (ix, iy) = probe_indices(&axes.x, &axes.y, probe)?;
    let half = T::lit(0.5);
    let values = (0..axes.z.len()).map(|iz| half * field.at(ix, iy, iz).norm_sqr()).collect();
    EnvelopeSeries::new(axes.z.clone(), values, wavelength)
}

/// Two-component variant, `e_r = ½(|E_x|² + |E_z|²)`.
pub fn received_energy_vector<T: Real>(
    field: &ParaxialVectorField<T>,
    probe: (T, T),
    wavelength: T,
) -> Result<EnvelopeSeries<T>> {
    let axes = &field.axes;
    let (ix, iy) = probe_indices(&axes.x, &axes.y, probe)?;
    let (nx, ny, _) = axes.shape();
    let half = T::lit(0.5);
    let values = (0..axes.z.len())
        .map(|iz| {
            let k = (iz * ny + iy) * nx + ix;
            half * (field.ex[k].norm_sqr() + field.ez[k].norm_sqr())
        })
        .collect();
    EnvelopeSeries::new(axes.z.clone(), values, wavelength)
}

/// Converts a window given in wavelengths to a sample count, rounding half
/// to even.
pub fn window_samples<T: Real>(window_lambda: T, wavelength: T, hz: T) -> Result<usize> {
    let w = (window_lambda * wavelength / hz).as_f64().round_ties_even();
    if !(w >= 1.0 && w.is_finite()) {
        return Err(Error::Parameter {
            name: "window".into(),
            reason: format!("{window_lambda} wavelengths is below one sample"),
        });
    }
    Ok(w as usize)
}

/// Centered moving average over `window` samples. Even windows reach one
/// sample further back than forward. Near the ends the window shrinks
/// symmetrically so the output length matches the input.
pub fn moving_average<T: Real>(values: &[T], window: usize) -> Result<Vec<T>> {
    if window == 0 || values.len() < window {
        return Err(Error::Length { len: values.len(), window });
    }
    let n = values.len();
    let back = window / 2;
    let fwd = window - 1 - back;
    Ok((0..n)
        .map(|i| {
            let room = i.min(n - 1 - i);
            let lo = i - back.min(room);
            let hi = i + fwd.min(room);
            let win = &values[lo..=hi];
            let mean = win.iter().copied().sum::<T>() / T::from_usize_lossy(win.len());
            // rounding can push a mean of near-equal values just outside them
            let (mn, mx) = win.iter().fold((win[0], win[0]), |(a, b), &v| (a.min(v), b.max(v)));
            mean.max(mn).min(mx)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecomposeOptions {
    /// Short window in wavelengths.
    pub short_window: f64,
    /// Long window in wavelengths.
    pub long_window: f64,
    /// Use `e_r / ψ` for the small scale instead of `e_r / sqrt(ψ)`.
    pub mean_one_small_scale: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { short_window: 4.0, long_window: 150.0, mean_one_small_scale: false }
    }
}

/// Output of [`decompose_envelope`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    /// `e_rs = e_r / sqrt(ψ)`.
    pub small: EnvelopeSeries<T>,
    /// `e_rl = ψ / ψ'`.
    pub large: EnvelopeSeries<T>,
    /// `ψ`, the short-window average.
    pub psi: Vec<T>,
    /// `ψ'`, the long-window average of `ψ`.
    pub psi_long: Vec<T>,
    pub short_samples: usize,
    pub long_samples: usize,
}

impl<T: Real> Decomposition<T> {
    /// CSV with header `z,e_r,e_rs,e_rl`.
    pub fn write_csv<W: Write>(&self, raw: &EnvelopeSeries<T>, mut w: W) -> std::io::Result<()> {
        writeln!(w, "z,e_r,e_rs,e_rl")?;
        for i in 0..raw.len() {
            writeln!(w, "{:e},{:e},{:e},{:e}", raw.z[i], raw.values[i], self.small.values[i], self.large.values[i])?;
        }
        Ok(())
    }
}

fn check_floor<T: Real>(which: &'static str, v: &[T]) -> Result<()> {
    match v.iter().position(|x| !(*x > T::lit(ENVELOPE_FLOOR))) {
        Some(index) => Err(Error::DegenerateEnvelope { which, index, value: v[index].as_f64() }),
        None => Ok(()),
    }
}

/// `ψ = MA_short(e_r)`, `e_rs = e_r / sqrt(ψ)`, `ψ' = MA_long(ψ)`, `e_rl = ψ / ψ'`.
pub fn decompose_envelope<T: Real>(series: &EnvelopeSeries<T>, opts: DecomposeOptions) -> Result<Decomposition<T>> {
    let hz = series.spacing();
    let lam = series.wavelength;
    let short_samples = window_samples(T::lit(opts.short_window), lam, hz)?;
    let long_samples = window_samples(T::lit(opts.long_window), lam, hz)?;
    if series.len() < long_samples.max(short_samples) {
        return Err(Error::Length { len: series.len(), window: long_samples.max(short_samples) });
    }
    let psi = moving_average(&series.values, short_samples)?;
    check_floor("psi", &psi)?;
    let psi_long = moving_average(&psi, long_samples)?;
    check_floor("psi_long", &psi_long)?;
    let small = series
        .values
        .iter()
        .zip(&psi)
        .map(|(&e, &p)| if opts.mean_one_small_scale { e / p } else { e / p.sqrt() })
        .collect();
    let large = psi.iter().zip(&psi_long).map(|(&p, &q)| p / q).collect();
    Ok(Decomposition {
        small: series.with_values(small)?,
        large: series.with_values(large)?,
        psi,
        psi_long,
        short_samples,
        long_samples,
    })
}

/// Histogram density: `edges.len() == probabilities.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDensity<T> {
    edges: Vec<T>,
    probabilities: Vec<T>,
    normalized: bool,
}

impl<T: Real> EmpiricalDensity<T> {
    /// Builds and normalizes a histogram from raw bin masses.
    pub fn from_masses(edges: Vec<T>, masses: Vec<T>) -> Result<Self> {
        if edges.len() != masses.len() + 1 || masses.is_empty() {
            return Err(Error::Parameter { name: "edges".into(), reason: "need one more edge than bins".into() });
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter {
                name: "edges".into(),
                reason: "must be finite and strictly increasing".into(),
            });
        }
        if masses.iter().any(|m| !(m.is_finite() && *m >= T::zero())) {
            return Err(Error::Parameter {
                name: "probabilities".into(),
                reason: "must be finite and nonnegative".into(),
            });
        }
        let total: T = masses.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::EmptyProduct);
        }
        Ok(Self { edges, probabilities: masses.into_iter().map(|m| m / total).collect(), normalized: true })
    }

    /// Point mass on the single bin `[at, at + width)`.
    pub fn point_mass(at: T, width: T) -> Result<Self> {
        Self::from_masses(vec![at, at + width], vec![T::one()])
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn bins(&self) -> usize {
        self.probabilities.len()
    }

    /// `(midpoint, probability)` per bin.
    pub fn midpoints(&self) -> impl Iterator<Item = (T, T)> + '_ {
        let half = T::lit(0.5);
        self.edges.windows(2).zip(&self.probabilities).map(move |(e, &p)| ((e[0] + e[1]) * half, p))
    }

    pub fn support(&self) -> (T, T) {
        (self.edges[0], self.edges[self.edges.len() - 1])
    }

    pub fn total(&self) -> T {
        self.probabilities.iter().copied().sum()
    }

    pub fn mean(&self) -> T {
        self.midpoints().map(|(m, p)| m * p).sum()
    }

    /// Mass of this density that falls into `[a, b)`, assuming it is spread
    /// uniformly within each bin.
    fn mass_in(&self, a: T, b: T) -> T {
        self.edges
            .windows(2)
            .zip(&self.probabilities)
            .filter_map(|(e, &p)| {
                let lo = e[0].max(a);
                let hi = e[1].min(b);
                (hi > lo).then(|| p * (hi - lo) / (e[1] - e[0]))
            })
            .sum()
    }

    /// CSV with header `bin_left,bin_right,probability`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "bin_left,bin_right,probability")?;
        for (e, p) in self.edges.windows(2).zip(&self.probabilities) {
            writeln!(w, "{:e},{:e},{:e}", e[0], e[1], p)?;
        }
        Ok(())
    }

    /// Parses the [`write_csv`](Self::write_csv) layout. Adjacent bins must
    /// share their edge; the probabilities are renormalized.
    pub fn read_csv<R: std::io::BufRead>(r: R) -> Result<Self> {
        let bad = |msg: String| Error::Parameter { name: "density csv".into(), reason: msg };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?.map_err(|e| bad(e.to_string()))?;
        if header.trim() != "bin_left,bin_right,probability" {
            return Err(bad(format!("unexpected header `{header}`")));
        }
        let mut edges = Vec::new();
        let mut masses = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let vals = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("line {}: {e}", ln + 2)))?;
            let [l, r, p] = vals[..] else {
                return Err(bad(format!("line {}: expected 3 fields", ln + 2)));
            };
            match edges.last() {
                None => edges.push(T::lit(l)),
                Some(&prev) if (prev - T::lit(l)).abs() <= T::lit(1e-12) * prev.abs().max(T::one()) => {}
                Some(_) => return Err(bad(format!("line {}: bins are not contiguous", ln + 2))),
            }
            edges.push(T::lit(r));
            masses.push(T::lit(p));
        }
        Self::from_masses(edges, masses)
    }
}

/// Histogram bin selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinSpec {
    #[default]
    FreedmanDiaconis,
    Count(usize),
}

/// Bin count used when the interquartile range vanishes.
pub const FALLBACK_BINS: usize = 32;
const MAX_BINS: usize = 4096;
const MIN_SAMPLES: usize = 100;

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    match sorted.get(i + 1) {
        Some(&next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

/// Normalized histogram of `samples`. Uses the Freedman-Diaconis width by
/// default and falls back to 32 uniform bins over `[min, max + δ]` when the
/// interquartile range is zero.
pub fn estimate_density<T: Real>(samples: &[T], bins: BinSpec) -> Result<EmpiricalDensity<T>> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { need: MIN_SAMPLES, got: samples.len() });
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::Domain { func: "estimate_density" });
    }
    let mut sorted: Vec<f64> = samples.iter().map(|s| s.as_f64()).collect();
    sorted.sort_by(f64::total_cmp);
    let lo = sorted[0];
    let mut hi = sorted[sorted.len() - 1];
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let count = match bins {
        BinSpec::Count(n) if n > 0 => n,
        BinSpec::Count(_) => {
            return Err(Error::Parameter { name: "bins".into(), reason: "bin count must be positive".into() })
        }
        BinSpec::FreedmanDiaconis if iqr > 0.0 && hi > lo => {
            let h = 2.0 * iqr / (sorted.len() as f64).cbrt();
            (((hi - lo) / h).ceil() as usize).clamp(1, MAX_BINS)
        }
        BinSpec::FreedmanDiaconis => FALLBACK_BINS,
    };
    if !(hi > lo) || iqr == 0.0 && bins == BinSpec::FreedmanDiaconis {
        hi += (hi.abs().max(lo.abs()) * 1e-9).max(1e-12);
    }
    let width = (hi - lo) / count as f64;
    let mut masses = vec![0.0f64; count];
    for &s in &sorted {
        let k = (((s - lo) / width) as usize).min(count - 1);
        masses[k] += 1.0;
    }
    let edges = (0..=count).map(|k| T::lit(if k == count { hi } else { lo + k as f64 * width })).collect();
    EmpiricalDensity::from_masses(edges, masses.into_iter().map(T::lit).collect())
}

/// How [`envelope_density`] combines the two scale densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityProduct {
    /// Multiply the two densities on a shared grid and renormalize.
    #[default]
    Pointwise,
    /// Density of the product of independent variables `R = S L`.
    ProductOfVariables,
}

/// Combines the small- and large-scale densities into `p_R`.
pub fn envelope_density<T: Real>(
    small: &EmpiricalDensity<T>,
    large: &EmpiricalDensity<T>,
    mode: DensityProduct,
) -> Result<EmpiricalDensity<T>> {
    for d in [small, large] {
        if !d.normalized || (d.total() - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::DensityNotNormalized(d.total().as_f64()));
        }
    }
    let bins = small.bins().max(large.bins());
    match mode {
        DensityProduct::Pointwise => {
            let (a0, a1) = small.support();
            let (b0, b1) = large.support();
            if a1 <= b0 || b1 <= a0 {
                return Err(Error::EmptyProduct);
            }
            let (lo, hi) = (a0.min(b0), a1.max(b1));
            let edges = uniform_edges(lo, hi, bins);
            let masses: Vec<T> = edges
                .windows(2)
                .map(|e| {
                    let w = e[1] - e[0];
                    // product of bin-averaged densities, times the bin width
                    small.mass_in(e[0], e[1]) * large.mass_in(e[0], e[1]) / w
                })
                .collect();
            if !masses.iter().any(|m| *m > T::zero()) {
                return Err(Error::EmptyProduct);
            }
            EmpiricalDensity::from_masses(edges, masses)
        }
        DensityProduct::ProductOfVariables => {
            let pairs: Vec<(T, T)> = small
                .midpoints()
                .flat_map(|(ms, ps)| large.midpoints().map(move |(ml, pl)| (ms * ml, ps * pl)))
                .filter(|(_, p)| *p > T::zero())
                .collect();
            let lo = pairs.iter().map(|p| p.0).fold(T::infinity(), T::min);
            let mut hi = pairs.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
            if pairs.is_empty() {
                return Err(Error::EmptyProduct);
            }
            if !(hi > lo) {
                hi = lo + (lo.abs() * T::lit(1e-9)).max(T::lit(1e-12));
            }
            let edges = uniform_edges(lo, hi, bins);
            let width = (hi - lo) / T::from_usize_lossy(bins);
            let mut masses = vec![T::zero(); bins];
            for (v, p) in pairs {
                let k = ((v - lo) / width).to_usize().unwrap_or(0).min(bins - 1);
                masses[k] += p;
            }
            EmpiricalDensity::from_masses(edges, masses)
        }
    }
}

fn uniform_edges<T: Real>(lo: T, hi: T, bins: usize) -> Vec<T> {
    let w = (hi - lo) / T::from_usize_lossy(bins);
    (0..=bins).map(|k| if k == bins { hi } else { lo + T::from_usize_lossy(k) * w }).collect()
}
