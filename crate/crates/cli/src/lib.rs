//! Command-line front end: config handling, the staged pipeline and its
//! file outputs.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod selftest;
pub mod svg;

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qho_core::envelope::EmpiricalDensity;

use crate::config::{parse_config, EmitFlags, Preset, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;
use crate::pipeline::*;

#[derive(Debug, Parser)]
#[command(name = "qho", version, about = "Photon clusters in a GRIN fibre: field, envelope, noise and capacity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate the photon cluster and write the sampled field.
    Field(Common),
    /// Received-energy series, its two-scale split and densities.
    Envelope(Common),
    /// Hybrid Gaussian plus Poisson noise: density, moments, Monte-Carlo check.
    Noise(Common),
    /// Capacity report and signal-power sweep.
    Capacity {
        #[command(flatten)]
        common: Common,
        /// Fading density (`bin_left,bin_right,probability`), e.g. a previous
        /// `density_pr.csv`.
        #[arg(long)]
        density: Option<PathBuf>,
    },
    /// Every stage end to end.
    Pipeline(Common),
    /// Quick numerical self-checks.
    Selftest,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config; defaults are used for anything missing.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma list of output kinds: csv, json, svg.
    #[arg(long)]
    pub emit: Option<String>,
}

impl Common {
    /// Config file (or defaults), then preset, then flags.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => parse_config(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = self.preset {
            p.apply(&mut cfg);
        }
        if let Some(o) = &self.out {
            cfg.output = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = &self.emit {
            cfg.emit = EmitFlags::parse_list(e)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_density(path: &PathBuf) -> CliResult<EmpiricalDensity<f64>> {
    let f = File::open(path).map_err(CliError::io(path))?;
    EmpiricalDensity::read_csv(BufReader::new(f)).map_err(|e| CliError::Invariant(e.to_string()))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let (name, common, density) = match &cli.command {
        Command::Selftest => return run_selftest(),
        Command::Field(c) => ("field", c, None),
        Command::Envelope(c) => ("envelope", c, None),
        Command::Noise(c) => ("noise", c, None),
        Command::Capacity { common, density } => ("capacity", common, density.as_ref()),
        Command::Pipeline(c) => ("pipeline", c, None),
    };
    let cfg = common.resolve()?;
    let out = OutputDir::create(&cfg.output, cfg.emit)?;
    match name {
        "field" => write_field(&out, &field_stage(&cfg)?)?,
        "envelope" => {
            let fs = field_stage(&cfg)?;
            write_envelope(&out, &cfg, &fs.medium, &envelope_stage(&cfg, &fs)?)?;
        }
        "noise" => write_noise(&out, &noise_stage(&cfg)?)?,
        "capacity" => {
            let d = density.map(read_density).transpose()?;
            let ns = noise_stage(&cfg)?;
            write_capacity(&out, &capacity_stage(&cfg, d.as_ref(), ns.psd)?, ns.psd)?;
        }
        _ => {
            let fs = field_stage(&cfg)?;
            write_field(&out, &fs)?;
            let es = envelope_stage(&cfg, &fs)?;
            write_envelope(&out, &cfg, &fs.medium, &es)?;
            let ns = noise_stage(&cfg)?;
            write_noise(&out, &ns)?;
            let cs = capacity_stage(&cfg, Some(&es.envelope_density), ns.psd)?;
            write_capacity(&out, &cs, ns.psd)?;
        }
    }
    out.write_manifest(name, &cfg)?;
    Ok(())
}

fn run_selftest() -> CliResult<()> {
    let checks = selftest::run_all();
    let mut failed = 0;
    for c in &checks {
        match &c.outcome {
            Ok(msg) => println!("PASS {}: {msg}", c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}: {msg}", c.name);
            }
        }
    }
    if failed > 0 {
        Err(CliError::SelfTest(failed))
    } else {
        Ok(())
    }
}
