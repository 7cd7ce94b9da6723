//! Stages of the end-to-end run. Each stage is a pure function of the config
//! (and earlier stages); writers turn stage results into files.

use std::io::Write;

use qho_core::capacity::{write_sweep_csv, CapacityInputs, CapacityReport};
use qho_core::envelope::{
    decompose_envelope, envelope_density, estimate_density, received_energy, Decomposition, EmpiricalDensity,
    EnvelopeSeries,
};
use qho_core::field::{cluster_hamiltonian_coeffs, propagate_cluster, ClusterConfig, FieldGrid, MediumParams};
use qho_core::noise::{cross_psd, hybrid_moments, sample_hybrid, write_density_csv, HybridMoments, HybridNoiseSpec};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;
use crate::svg;

pub struct FieldStage {
    pub medium: MediumParams<f64>,
    pub cluster: ClusterConfig<f64>,
    pub field: FieldGrid<f64>,
}

pub fn field_stage(cfg: &RunConfig) -> CliResult<FieldStage> {
    let medium = cfg.medium_params()?;
    let cluster = cfg.cluster_config(&medium)?;
    let axes = cfg.axes(&medium)?;
    let field = propagate_cluster(&cluster, axes, &medium).map_err(CliError::stage("field"))?;
    Ok(FieldStage { medium, cluster, field })
}

pub fn write_field(out: &OutputDir, st: &FieldStage) -> CliResult<()> {
    out.csv("field.csv", |w| st.field.write_csv(w))?;
    let coeffs = cluster_hamiltonian_coeffs(&st.cluster, &st.medium).map_err(CliError::stage("field"))?;
    out.json(
        "field.json",
        &json!({
            "grid": st.field.sidecar(&st.medium),
            "cluster": st.cluster,
            "hamiltonian": coeffs,
        }),
    )
}

pub struct EnvelopeStage {
    pub probe: (f64, f64),
    pub series: EnvelopeSeries<f64>,
    pub decomposition: Decomposition<f64>,
    pub small_density: EmpiricalDensity<f64>,
    pub large_density: EmpiricalDensity<f64>,
    pub envelope_density: EmpiricalDensity<f64>,
}

pub fn envelope_stage(cfg: &RunConfig, fs: &FieldStage) -> CliResult<EnvelopeStage> {
    let probe = cfg.probe(&fs.medium);
    let series = received_energy(&fs.field, probe, fs.medium.wavelength()).map_err(CliError::stage("energy"))?;
    let decomposition = decompose_envelope(&series, cfg.windows).map_err(CliError::stage("decomposition"))?;
    let density = |v: &[f64]| estimate_density(v, cfg.density.bins).map_err(CliError::stage("density"));
    let small_density = density(decomposition.small.values())?;
    let large_density = density(decomposition.large.values())?;
    let envelope_density = envelope_density(&small_density, &large_density, cfg.density.product)
        .map_err(CliError::stage("envelope density"))?;
    Ok(EnvelopeStage { probe, series, decomposition, small_density, large_density, envelope_density })
}

pub fn write_envelope(
    out: &OutputDir,
    cfg: &RunConfig,
    medium: &MediumParams<f64>,
    st: &EnvelopeStage,
) -> CliResult<()> {
    let d = &st.decomposition;
    out.csv("envelope.csv", |w| d.write_csv(&st.series, w))?;
    out.csv("density_small.csv", |w| st.small_density.write_csv(w))?;
    out.csv("density_large.csv", |w| st.large_density.write_csv(w))?;
    out.csv("density_pr.csv", |w| st.envelope_density.write_csv(w))?;
    let unit = medium.length_unit_m();
    out.json(
        "envelope.json",
        &json!({
            "probe_model_units": [st.probe.0, st.probe.1],
            "probe_m": [st.probe.0 * unit, st.probe.1 * unit],
            "wavelength_model_units": medium.wavelength(),
            "z_step_model_units": st.series.spacing(),
            "windows": cfg.windows,
            "short_window_samples": d.short_samples,
            "long_window_samples": d.long_samples,
            "density_bins": {
                "small": st.small_density.bins(),
                "large": st.large_density.bins(),
                "envelope": st.envelope_density.bins(),
            },
            "density_product": cfg.density.product,
            "envelope_total_probability": st.envelope_density.total(),
            "seed": cfg.seed,
        }),
    )?;
    let lam = medium.wavelength();
    let z_lambda: Vec<f64> = st.series.z().iter().map(|z| z / lam).collect();
    out.svg(
        "large_scale.svg",
        &svg::line_panel("1", "large-scale variation", "z / λ", "e_rl", &z_lambda, d.large.values()),
    )?;
    out.svg(
        "small_scale.svg",
        &svg::line_panel("2", "small-scale variation", "z / λ", "e_rs", &z_lambda, d.small.values()),
    )?;
    out.svg("density.svg", &svg::histogram_panel("3", "envelope density p_R", "r", &st.envelope_density))
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseStage {
    pub spec: HybridNoiseSpec<f64>,
    pub moments: HybridMoments<f64>,
    /// Combined PSD over the capacity bandwidth.
    pub psd: f64,
    pub bandwidth: f64,
    pub draws: usize,
    pub seed: u64,
    pub sample_mean: f64,
    pub sample_variance: f64,
}

pub fn noise_stage(cfg: &RunConfig) -> CliResult<NoiseStage> {
    let spec = cfg.noise_spec()?;
    let stage = CliError::stage;
    let moments = hybrid_moments(&spec).map_err(stage("noise"))?;
    let bandwidth = cfg.capacity.bandwidth_hz;
    let psd = cross_psd(&spec, 0.0, bandwidth).map_err(stage("noise"))?;
    let draws = cfg.noise.monte_carlo_draws;
    let (sample_mean, sample_variance) = if draws > 1 {
        let v = sample_hybrid(&spec, draws, cfg.seed).map_err(stage("noise"))?;
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        (mean, v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(NoiseStage { spec, moments, psd, bandwidth, draws, seed: cfg.seed, sample_mean, sample_variance })
}

pub fn write_noise(out: &OutputDir, st: &NoiseStage) -> CliResult<()> {
    if st.spec.sigma_g2 > 0.0 {
        let sd = st.moments.variance.sqrt();
        let xs: Vec<f64> = (0..=400).map(|k| st.moments.mean + sd * (-8.0 + 16.0 * k as f64 / 400.0)).collect();
        let mut buf = Vec::new();
        write_density_csv(&st.spec, &xs, &mut buf).map_err(CliError::stage("noise"))?;
        out.csv("noise_density.csv", |w| w.write_all(&buf))?;
    }
    out.json("noise.json", st)
}

pub struct CapacityStage {
    pub report: CapacityReport,
    pub sweep: Vec<(f64, CapacityReport)>,
}

pub fn capacity_stage(cfg: &RunConfig, density: Option<&EmpiricalDensity<f64>>, psd: f64) -> CliResult<CapacityStage> {
    let inputs = cfg.capacity_inputs()?;
    let mode = cfg.capacity.ea_mode;
    let report = CapacityReport::compute(&inputs, density.map(|d| (d, psd)), mode);
    let n = cfg.capacity.sweep_points;
    let sweep = (0..n)
        .map(|k| {
            let scale = 10f64.powf(-2.0 + 4.0 * k as f64 / (n - 1) as f64);
            let p = inputs.signal_power * scale;
            let i = CapacityInputs { signal_power: p, ..inputs };
            (p, CapacityReport::compute(&i, density.map(|d| (d, psd)), mode))
        })
        .collect();
    Ok(CapacityStage { report, sweep })
}

pub fn write_capacity(out: &OutputDir, st: &CapacityStage, psd: f64) -> CliResult<()> {
    out.json("capacity.json", &json!({ "n_beta_rho": psd, "report": st.report }))?;
    out.csv("capacity_sweep.csv", |w| write_sweep_csv("signal_power_w", &st.sweep, w))
}
