//! Additive noise made of an independent Gaussian part `G` and a scaled
//! Poisson count `q P`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridNoiseSpec<T> {
    /// Gaussian variance.
    pub sigma_g2: T,
    /// Gaussian mean.
    #[serde(default)]
    pub mu_g: T,
    /// Poisson intensity (mean count).
    pub lambda_p: T,
    /// Energy per count, `ℏf`.
    pub hbar_f: T,
}

impl<T: Real> HybridNoiseSpec<T> {
    pub fn new(sigma_g2: T, mu_g: T, lambda_p: T, hbar_f: T) -> Result<Self> {
        let s = Self { sigma_g2, mu_g, lambda_p, hbar_f };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| Error::Parameter { name: name.into(), reason: reason.into() };
        if !(self.sigma_g2 >= T::zero() && self.sigma_g2.is_finite()) {
            return Err(bad("sigma_g2", "must be finite and >= 0"));
        }
        if !self.mu_g.is_finite() {
            return Err(bad("mu_g", "must be finite"));
        }
        if !(self.lambda_p >= T::zero() && self.lambda_p.is_finite()) {
            return Err(bad("lambda_p", "must be finite and >= 0"));
        }
        if !(self.hbar_f > T::zero() && self.hbar_f.is_finite()) {
            return Err(bad("hbar_f", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Number of Poisson terms kept: `ceil(λ + 12 sqrt(λ) + 30)`.
    pub fn truncation(&self) -> usize {
        let l = self.lambda_p.as_f64();
        (l + 12.0 * l.sqrt() + 30.0).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridMoments<T> {
    pub mean: T,
    pub variance: T,
    pub second_central: T,
}

/// `mean = μ_G + q λ`, `variance = σ_G² + q² λ`.
pub fn hybrid_moments<T: Real>(spec: &HybridNoiseSpec<T>) -> Result<HybridMoments<T>> {
    spec.validate()?;
    let q = spec.hbar_f;
    let variance = spec.sigma_g2 + q * q * spec.lambda_p;
    Ok(HybridMoments { mean: spec.mu_g + q * spec.lambda_p, variance, second_central: variance })
}

/// Poisson probability of `k` counts, evaluated in log space.
pub fn poisson_pmf<T: Real>(lambda: T, k: usize) -> T {
    if lambda == T::zero() {
        return if k == 0 { T::one() } else { T::zero() };
    }
    let mut log_fact = T::zero();
    for j in 2..=k {
        log_fact += T::from_usize_lossy(j).ln();
    }
    (T::from_usize_lossy(k) * lambda.ln() - lambda - log_fact).exp()
}

/// Mass of the atom at `μ_G + q k` when the Gaussian part vanishes.
pub fn hybrid_mass<T: Real>(spec: &HybridNoiseSpec<T>, k: usize) -> Result<T> {
    spec.validate()?;
    Ok(poisson_pmf(spec.lambda_p, k))
}

/// `f(x) = Σ_k Pois(k; λ) N(x; μ_G + q k, σ_G²)`, truncated where the
/// Poisson tail is below 1e-12. Fails with [`Error::Atomic`] when `σ_G² = 0`.
pub fn hybrid_density<T: Real>(spec: &HybridNoiseSpec<T>, x: T) -> Result<T> {
    spec.validate()?;
    if spec.sigma_g2 == T::zero() {
        return Err(Error::Atomic);
    }
    let two = T::lit(2.0);
    let norm = (two * T::PI() * spec.sigma_g2).sqrt().recip();
    let mut pmf = (-spec.lambda_p).exp();
    let mut sum = T::zero();
    // the recursive pmf underflows for huge λ; fall back to log space there
    let recursive = spec.lambda_p < T::lit(500.0);
    for k in 0..=spec.truncation() {
        let w = if recursive { pmf } else { poisson_pmf(spec.lambda_p, k) };
        let d = x - spec.mu_g - spec.hbar_f * T::from_usize_lossy(k);
        sum += w * (-d * d / (two * spec.sigma_g2)).exp();
        pmf = pmf * spec.lambda_p / T::from_usize_lossy(k + 1);
    }
    Ok(sum * norm)
}

/// Combined white PSD `σ_G² + q² λ` over `[0, B]`; total power is this times `B`.
pub fn cross_psd<T: Real>(spec: &HybridNoiseSpec<T>, f: T, bandwidth: T) -> Result<T> {
    spec.validate()?;
    if !(bandwidth > T::zero() && bandwidth.is_finite()) {
        return Err(Error::Parameter { name: "bandwidth".into(), reason: "must be positive".into() });
    }
    if !f.is_finite() {
        return Err(Error::Domain { func: "cross_psd" });
    }
    Ok(spec.sigma_g2 + spec.hbar_f * spec.hbar_f * spec.lambda_p)
}

const CHUNK: usize = 1 << 14;

/// `n` draws of `G + q P`. Each chunk of draws has its own ChaCha stream, so
/// the output depends only on the seed and `n`, not on thread count.
pub fn sample_hybrid<T: Real>(spec: &HybridNoiseSpec<T>, n: usize, seed: u64) -> Result<Vec<T>> {
    spec.validate()?;
    let sd = spec.sigma_g2.as_f64().sqrt();
    let normal = Normal::new(spec.mu_g.as_f64(), sd)
        .map_err(|e| Error::Parameter { name: "sigma_g2".into(), reason: e.to_string() })?;
    let lambda = spec.lambda_p.as_f64();
    let poisson = if lambda > 0.0 {
        Some(Poisson::new(lambda).map_err(|e| Error::Parameter { name: "lambda_p".into(), reason: e.to_string() })?)
    } else {
        None
    };
    let q = spec.hbar_f.as_f64();
    let mut out = vec![T::zero(); n];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        for v in chunk {
            let g = if sd > 0.0 { normal.sample(&mut rng) } else { spec.mu_g.as_f64() };
            let p: f64 = poisson.map_or(0.0, |p| p.sample(&mut rng));
            *v = T::lit(g + q * p);
        }
    });
    Ok(out)
}

/// Uniform draws in `[0, 1)` with the same chunked-stream scheme; handy for
/// reproducible synthetic inputs.
pub fn seeded_uniform(n: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        for v in chunk {
            *v = rng.random::<f64>();
        }
    });
    out
}

/// CSV with header `x,pdf`.
pub fn write_density_csv<T: Real, W: Write>(spec: &HybridNoiseSpec<T>, xs: &[T], mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Grid(format!("write failed: {e}"));
    writeln!(w, "x,pdf").map_err(io)?;
    for &x in xs {
        writeln!(w, "{:e},{:e}", x, hybrid_density(spec, x)?).map_err(io)?;
    }
    Ok(())
}
