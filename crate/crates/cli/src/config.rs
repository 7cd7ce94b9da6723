//! Run configuration: one JSON document, every key optional, unknown keys
//! rejected. Physical quantities are SI except the medium's quadratic
//! coefficients, which are per squared `length_unit_m`.

use std::path::{Path, PathBuf};

use qho_core::capacity::{CapacityInputs, EaMode};
use qho_core::envelope::{BinSpec, DecomposeOptions, DensityProduct};
use qho_core::field::{ClusterConfig, GridAxes, MediumParams, Photon};
use qho_core::noise::HybridNoiseSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

const PLANCK: f64 = 6.626_070_15e-34;
const LIGHT: f64 = 299_792_458.0;
/// `h c / 1300 nm`.
pub const DEFAULT_PHOTON_ENERGY: f64 = PLANCK * LIGHT / 1300e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub medium: MediumBlock,
    pub cluster: ClusterBlock,
    pub grid: GridBlock,
    pub windows: DecomposeOptions,
    pub density: DensityBlock,
    pub noise: NoiseBlock,
    pub capacity: CapacityBlock,
    pub seed: u64,
    /// Output directory. Left out of the parameter echo so that runs differing
    /// only in destination produce identical manifests.
    #[serde(skip_serializing)]
    pub output: PathBuf,
    pub emit: EmitFlags,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            medium: MediumBlock::default(),
            cluster: ClusterBlock::default(),
            grid: GridBlock::default(),
            windows: DecomposeOptions::default(),
            density: DensityBlock::default(),
            noise: NoiseBlock::default(),
            capacity: CapacityBlock::default(),
            seed: 0,
            output: PathBuf::from("out"),
            emit: EmitFlags::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumBlock {
    pub wavelength_m: f64,
    pub n0: f64,
    pub kx: f64,
    pub ky: f64,
    pub g: f64,
    pub length_unit_m: f64,
}

impl Default for MediumBlock {
    fn default() -> Self {
        Self { wavelength_m: 1300e-9, n0: 1.45, kx: 1.2, ky: 1.5, g: 0.25, length_unit_m: 1e-6 }
    }
}

/// How photons of a cluster share the mean level `(level, level)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelScheme {
    /// `(level + d, level - d)` with `d = 0, 1, -1, 2, ...`.
    #[default]
    Split,
    /// Every photon at `(level, level)`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterBlock {
    pub n1: usize,
    pub n2: usize,
    pub level: usize,
    pub levels: LevelScheme,
    pub mu: f64,
    pub sigma: [f64; 2],
    /// Explicit photon list; overrides `n1`, `n2`, `level` and `levels`.
    pub photons: Option<Vec<Photon<f64>>>,
}

impl Default for ClusterBlock {
    fn default() -> Self {
        Self { n1: 4, n2: 4, level: 2, levels: LevelScheme::Split, mu: 0.0, sigma: [0.0; 2], photons: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub transverse_half_width_m: f64,
    pub transverse_points: usize,
    pub z_start_m: f64,
    /// z spacing as a fraction of the wavelength.
    pub z_step_wavelengths: f64,
    pub z_points: usize,
    /// Probe point; defaults to `(w0/2, w0/2)`.
    pub probe_m: Option<[f64; 2]>,
    /// Rayleigh range `b` that fixes the reference waist `w0 = sqrt(λb/π)`.
    pub rayleigh_range_m: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            transverse_half_width_m: 2e-6,
            transverse_points: 5,
            z_start_m: 0.0,
            z_step_wavelengths: 0.125,
            z_points: 8192,
            probe_m: None,
            rayleigh_range_m: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityBlock {
    pub bins: BinSpec,
    pub product: DensityProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseBlock {
    pub sigma_g2: f64,
    pub mu_g: f64,
    pub lambda_p: f64,
    pub hbar_f: f64,
    /// Draws for the seeded Monte-Carlo moment check.
    pub monte_carlo_draws: usize,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        Self { sigma_g2: 1e-19, mu_g: 0.0, lambda_p: 1.0, hbar_f: DEFAULT_PHOTON_ENERGY, monte_carlo_draws: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacityBlock {
    pub bandwidth_hz: f64,
    pub signal_power_w: f64,
    pub n0_w_per_hz: f64,
    pub hbar_f_j: f64,
    pub quantum_noise: f64,
    pub chi: f64,
    pub ea_mode: EaMode,
    /// Points in the signal-power sweep, log-spaced over four decades.
    pub sweep_points: usize,
}

impl Default for CapacityBlock {
    fn default() -> Self {
        Self {
            bandwidth_hz: 1e9,
            signal_power_w: 1e-9,
            n0_w_per_hz: 1e-19,
            hbar_f_j: DEFAULT_PHOTON_ENERGY,
            quantum_noise: 0.5 * DEFAULT_PHOTON_ENERGY,
            chi: 0.9,
            ea_mode: EaMode::AsPrinted,
            sweep_points: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitFlags {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        Self { csv: true, json: true, svg: true }
    }
}

impl EmitFlags {
    /// Parses a comma list such as `csv,svg`.
    pub fn parse_list(s: &str) -> CliResult<Self> {
        let mut f = Self { csv: false, json: false, svg: false };
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                other => return Err(CliError::Syntax(format!("unknown emit kind `{other}`"))),
            }
        }
        Ok(f)
    }
}

/// Baked-in parameter sets of the two reference configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
}

impl Preset {
    /// Overrides the medium coefficients and the cluster shape (4 + 4 photons
    /// around level 2).
    pub fn apply(self, cfg: &mut RunConfig) {
        let (kx, ky, g) = match self {
            Preset::Fig1 => (1.2, 1.5, 0.25),
            Preset::Fig2 => (3.5, 5.0, 0.5),
        };
        cfg.medium.kx = kx;
        cfg.medium.ky = ky;
        cfg.medium.g = g;
        cfg.medium.wavelength_m = 1300e-9;
        cfg.cluster.n1 = 4;
        cfg.cluster.n2 = 4;
        cfg.cluster.level = 2;
        cfg.cluster.photons = None;
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let cfg = parse_config_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses without validating; serde names the offending key on rejection.
pub fn parse_config_str(text: &str) -> CliResult<RunConfig> {
    serde_json::from_str(text).map_err(|e| CliError::Syntax(e.to_string()))
}

fn invariant(e: qho_core::Error) -> CliError {
    CliError::Invariant(e.to_string())
}

impl RunConfig {
    pub fn medium_params(&self) -> CliResult<MediumParams<f64>> {
        let m = &self.medium;
        MediumParams::from_si(m.wavelength_m, m.n0, m.kx, m.ky, m.g, m.length_unit_m).map_err(invariant)
    }

    pub fn cluster_config(&self, medium: &MediumParams<f64>) -> CliResult<ClusterConfig<f64>> {
        let c = &self.cluster;
        let mut cfg = match (&c.photons, c.levels) {
            (Some(p), _) => ClusterConfig { photons: p.clone(), mu: 0.0, sigma: [0.0; 2] },
            (None, LevelScheme::Split) => ClusterConfig::split_levels(c.n1, c.n2, medium, c.level),
            (None, LevelScheme::Uniform) => ClusterConfig::uniform(c.n1, c.n2, medium, c.level),
        };
        cfg.mu = c.mu;
        cfg.sigma = c.sigma;
        cfg.validate().map_err(invariant)?;
        Ok(cfg)
    }

    /// Grid in model units.
    pub fn axes(&self, medium: &MediumParams<f64>) -> CliResult<GridAxes<f64>> {
        let g = &self.grid;
        let unit = medium.length_unit_m();
        let hz = g.z_step_wavelengths * medium.wavelength();
        let half = g.transverse_half_width_m / unit;
        let n = g.transverse_points;
        let start = |half: f64| if n > 1 { -half } else { 0.0 };
        let step = if n > 1 { 2.0 * half / (n - 1) as f64 } else { 1.0 };
        GridAxes::from_ranges((start(half), step, n), (start(half), step, n), (g.z_start_m / unit, hz, g.z_points))
            .map_err(invariant)
    }

    /// Reference waist `sqrt(λ b / π)` in model units.
    pub fn waist(&self, medium: &MediumParams<f64>) -> f64 {
        let b = self.grid.rayleigh_range_m / medium.length_unit_m();
        (medium.wavelength() * b / std::f64::consts::PI).sqrt()
    }

    /// Probe point in model units.
    pub fn probe(&self, medium: &MediumParams<f64>) -> (f64, f64) {
        match self.grid.probe_m {
            Some([x, y]) => (x / medium.length_unit_m(), y / medium.length_unit_m()),
            None => {
                let h = self.waist(medium) / 2.0;
                (h, h)
            }
        }
    }

    pub fn noise_spec(&self) -> CliResult<HybridNoiseSpec<f64>> {
        let n = &self.noise;
        HybridNoiseSpec::new(n.sigma_g2, n.mu_g, n.lambda_p, n.hbar_f).map_err(invariant)
    }

    pub fn capacity_inputs(&self) -> CliResult<CapacityInputs<f64>> {
        let c = &self.capacity;
        let inp = CapacityInputs {
            bandwidth: c.bandwidth_hz,
            signal_power: c.signal_power_w,
            n0: c.n0_w_per_hz,
            hbar_f: c.hbar_f_j,
            quantum_noise: c.quantum_noise,
            chi: c.chi,
        };
        inp.validate().map_err(invariant)?;
        Ok(inp)
    }

    /// Checks every block; violations map to exit code 3.
    pub fn validate(&self) -> CliResult<()> {
        let medium = self.medium_params()?;
        self.cluster_config(&medium)?;
        let g = &self.grid;
        if g.transverse_points == 0 || g.z_points < 2 {
            return Err(CliError::Invariant("grid needs >= 1 transverse and >= 2 z points".into()));
        }
        if !(g.z_step_wavelengths > 0.0 && g.transverse_half_width_m >= 0.0 && g.rayleigh_range_m > 0.0) {
            return Err(CliError::Invariant("grid spacings and Rayleigh range must be positive".into()));
        }
        let axes = self.axes(&medium)?;
        let (px, py) = self.probe(&medium);
        let (hx, hy, _) = axes.spacings();
        let inside = |p: f64, ax: &[f64], h: f64| p >= ax[0] - h && p <= ax[ax.len() - 1] + h;
        if !inside(px, &axes.x, hx) || !inside(py, &axes.y, hy) {
            return Err(CliError::Invariant(format!("probe ({px}, {py}) lies outside the grid")));
        }
        let w = &self.windows;
        if !(w.short_window > 0.0 && w.short_window < w.long_window) {
            return Err(CliError::Invariant("windows need 0 < short < long".into()));
        }
        if let BinSpec::Count(0) = self.density.bins {
            return Err(CliError::Invariant("bin count must be positive".into()));
        }
        self.noise_spec()?;
        self.capacity_inputs()?;
        if self.capacity.sweep_points < 2 {
            return Err(CliError::Invariant("sweep needs at least 2 points".into()));
        }
        Ok(())
    }
}
