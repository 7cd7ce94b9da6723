//! Channel capacities: Shannon, number-state (Fock), Holevo, entanglement
//! assisted, and the fading average over an empirical envelope density.
//!
//! The quantum expressions are per-use quantities in bits; every `*_capacity`
//! function multiplies them by the bandwidth to report bits/s. The bracketed
//! per-use values are available through [`CapacityReport`] and the
//! `*_per_use` functions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::envelope::EmpiricalDensity;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityInputs<T> {
    /// Bandwidth `B`, Hz.
    pub bandwidth: T,
    /// Transmit power `Υ`, W.
    pub signal_power: T,
    /// Classical noise PSD `N₀`, W/Hz.
    pub n0: T,
    /// Photon energy `ℏf`, J.
    pub hbar_f: T,
    /// Quantum-channel noise `N`; occupancy is `N / ℏf`.
    pub quantum_noise: T,
    /// Amplification/attenuation constant `χ`.
    pub chi: T,
}

impl<T: Real> CapacityInputs<T> {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("bandwidth", self.bandwidth, true),
            ("signal_power", self.signal_power, false),
            ("n0", self.n0, false),
            ("hbar_f", self.hbar_f, true),
            ("quantum_noise", self.quantum_noise, false),
            ("chi", self.chi, true),
        ];
        for (name, v, strict) in checks {
            let ok = v.is_finite() && if strict { v > T::zero() } else { v >= T::zero() };
            if !ok {
                return Err(Error::Parameter {
                    name: name.into(),
                    reason: if strict { "must be > 0" } else { "must be >= 0" }.into(),
                });
            }
        }
        Ok(())
    }

    /// `ζ_n = N / ℏf`.
    pub fn zeta_n(&self) -> T {
        self.quantum_noise / self.hbar_f
    }

    /// `ζ_υ = Υχ / (B ℏf)`.
    pub fn zeta_upsilon(&self) -> T {
        self.signal_power * self.chi / (self.bandwidth * self.hbar_f)
    }
}

/// `g(x) = (1+x) log₂(1+x) - x log₂ x`, with `g(0) = 0`.
pub fn g_entropy<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(Error::Domain { func: "g_entropy" });
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    Ok(((T::one() + x) * x.ln_1p() - x * x.ln()) / T::LN_2())
}

/// `B log₂(1 + Υ / (N₀ B))`.
pub fn shannon_capacity<T: Real>(inp: &CapacityInputs<T>) -> Result<T> {
    inp.validate()?;
    if inp.signal_power == T::zero() {
        return Ok(T::zero());
    }
    let noise = inp.n0 * inp.bandwidth;
    if noise == T::zero() {
        return Err(Error::InfiniteCapacity);
    }
    Ok(inp.bandwidth * (inp.signal_power / noise).ln_1p() / T::LN_2())
}

/// `g(Υ / (ℏf B))`.
pub fn fock_per_use<T: Real>(inp: &CapacityInputs<T>) -> Result<T> {
    inp.validate()?;
    g_entropy(inp.signal_power / (inp.hbar_f * inp.bandwidth))
}

pub fn fock_capacity<T: Real>(inp: &CapacityInputs<T>) -> Result<T> {
    Ok(inp.bandwidth * fock_per_use(inp)?)
}

/// `g((N B + Υχ) / (ℏf B)) - g(N / ℏf)`.
pub fn holevo_per_use<T: Real>(inp: &CapacityInputs<T>) -> Result<T> {
    inp.validate()?;
    let top = (inp.quantum_noise * inp.bandwidth + inp.signal_power * inp.chi) / (inp.hbar_f * inp.bandwidth);
    Ok(g_entropy(top)? - g_entropy(inp.zeta_n())?)
}

pub fn holevo_capacity<T: Real>(inp: &CapacityInputs<T>) -> Result<T> {
    Ok(inp.bandwidth * holevo_per_use(inp)?)
}

/// Which occupancy fills which slot of the entanglement-assisted formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EaMode {
    /// `ζ_n = N/ℏf` in the first slot, `ζ_υ` in the second.
    #[default]
    AsPrinted,
    /// Signal occupancy `ζ_υ` in the first slot, noise `ζ_n` in the second,
    /// the arrangement of the usual entanglement-assisted bound.
    Standard,
}

/// `D± = ½(sqrt((2a + b + 1)² - 4χ a (a + 1)) - 1 ± b)` for slot values `a`, `b`.
pub fn ea_d_terms<T: Real>(a: T, b: T, chi: T) -> Result<(T, T)> {
    let two = T::lit(2.0);
    let lead = two * a + b + T::one();
    let quad = T::lit(4.0) * a * (a + T::one());
    let disc = lead * lead - chi * quad;
    let regime = || Error::Regime { disc: disc.as_f64(), chi_max: (lead * lead / quad).as_f64() };
    if disc < T::zero() {
        return Err(regime());
    }
    let half = T::lit(0.5);
    let root = disc.sqrt();
    let plus = half * (root - T::one() + b);
    let mut minus = half * (root - T::one() - b);
    // cancellation leaves a few ulps of the wrong sign when D- is exactly 0
    let slack = T::lit(64.0) * T::epsilon() * (T::one() + lead);
    if minus < T::zero() && minus > -slack {
        minus = T::zero();
    }
    if minus < T::zero() || plus < T::zero() {
        return Err(regime());
    }
    Ok((plus, minus))
}

/// `g(a) + g(a + b) - g(D+) - g(D-)`.
pub fn ea_per_use<T: Real>(inp: &CapacityInputs<T>, mode: EaMode) -> Result<T> {
    inp.validate()?;
    let (a, b) = match mode {
        EaMode::AsPrinted => (inp.zeta_n(), inp.zeta_upsilon()),
        EaMode::Standard => (inp.zeta_upsilon(), inp.zeta_n()),
    };
    let (dp, dm) = ea_d_terms(a, b, inp.chi)?;
    Ok(g_entropy(a)? + g_entropy(a + b)? - g_entropy(dp)? - g_entropy(dm)?)
}

pub fn ea_capacity<T: Real>(inp: &CapacityInputs<T>, mode: EaMode) -> Result<T> {
    Ok(inp.bandwidth * ea_per_use(inp, mode)?)
}

/// `Σ_bins B log₂(1 + r_c² Υ / (N_βρ B)) p`, with `r_c` the bin midpoint.
pub fn fading_capacity<T: Real>(inp: &CapacityInputs<T>, density: &EmpiricalDensity<T>, n_beta_rho: T) -> Result<T> {
    inp.validate()?;
    if !(n_beta_rho > T::zero() && n_beta_rho.is_finite()) {
        return Err(Error::Parameter { name: "n_beta_rho".into(), reason: "noise PSD must be positive".into() });
    }
    let total = density.total();
    if !density.is_normalized() || (total - T::one()).abs() > T::lit(1e-9) {
        return Err(Error::DensityNotNormalized(total.as_f64()));
    }
    let snr = inp.signal_power / (n_beta_rho * inp.bandwidth);
    Ok(density.midpoints().map(|(r, p)| inp.bandwidth * (r * r * snr).ln_1p() / T::LN_2() * p).sum())
}

/// One row of capacity results. Failed entries carry the error text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub inputs: CapacityInputs<f64>,
    pub ea_mode: EaMode,
    pub shannon: Outcome,
    pub fock: Outcome,
    pub holevo: Outcome,
    pub entanglement_assisted: Outcome,
    pub fading: Outcome,
    pub fock_per_use: Outcome,
    pub holevo_per_use: Outcome,
    pub ea_per_use: Outcome,
    /// `ea >= holevo` when both are defined. Reported, not enforced.
    pub ea_exceeds_holevo: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Value(f64),
    Error(String),
    Skipped,
}

impl Outcome {
    fn of<T: Real>(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Value(v.as_f64()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Outcome::Value(v) => Some(*v),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        self.value().map_or_else(|| "nan".into(), |v| format!("{v:e}"))
    }
}

impl CapacityReport {
    /// Evaluates everything; the fading entry is skipped without a density.
    pub fn compute(inp: &CapacityInputs<f64>, density: Option<(&EmpiricalDensity<f64>, f64)>, mode: EaMode) -> Self {
        let holevo = Outcome::of(holevo_capacity(inp));
        let ea = Outcome::of(ea_capacity(inp, mode));
        let ea_exceeds_holevo = match (ea.value(), holevo.value()) {
            (Some(e), Some(h)) => Some(e >= h),
            _ => None,
        };
        Self {
            inputs: *inp,
            ea_mode: mode,
            shannon: Outcome::of(shannon_capacity(inp)),
            fock: Outcome::of(fock_capacity(inp)),
            holevo,
            entanglement_assisted: ea,
            fading: density.map_or(Outcome::Skipped, |(d, n)| Outcome::of(fading_capacity(inp, d, n))),
            fock_per_use: Outcome::of(fock_per_use(inp)),
            holevo_per_use: Outcome::of(holevo_per_use(inp)),
            ea_per_use: Outcome::of(ea_per_use(inp, mode)),
            ea_exceeds_holevo,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Writes `param,value,C_shannon,C_F,C_H,C_E,C_cqc` rows; failed entries are `nan`.
pub fn write_sweep_csv<W: Write>(param: &str, rows: &[(f64, CapacityReport)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "param,value,C_shannon,C_F,C_H,C_E,C_cqc")?;
    for (v, r) in rows {
        writeln!(
            w,
            "{param},{v:e},{},{},{},{},{}",
            r.shannon.csv(),
            r.fock.csv(),
            r.holevo.csv(),
            r.entanglement_assisted.csv(),
            r.fading.csv()
        )?;
    }
    Ok(())
}
