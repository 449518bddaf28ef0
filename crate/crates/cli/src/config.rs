//! Flags, their defaults, and the JSON form used by `--config` and
//! `--dump-config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "fraclest", version, about = "Fractional SGS closure toolkit: DNS, filtering and a priori analysis")]
pub struct Cli {
    /// Worker threads for parallel kernels [env: FRACLEST_THREADS].
    #[arg(long, global = true, env = "FRACLEST_THREADS")]
    pub threads: Option<usize>,

    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    pub log_level: String,

    /// Run the command stored in a JSON config file.
    #[arg(long, global = true, conflicts_with = "dump_config")]
    pub config: Option<PathBuf>,

    /// Write the fully resolved command to a JSON file and exit.
    #[arg(long, global = true)]
    pub dump_config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Resolved invocation, round-trippable through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub threads: Option<usize>,
    pub log_level: String,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Random solenoidal initial condition with a model spectrum.
    GenIc(GenIcArgs),
    /// Decaying or forced DNS from an initial field.
    Dns(DnsArgs),
    /// Box-filter a velocity field and extract the residual stress.
    Filter(FilterArgs),
    /// Correlate FSGS or Smagorinsky model terms with filtered-DNS truth.
    Apriori(AprioriArgs),
    /// A priori Smagorinsky evaluation with optional model force and stress output.
    Smag(SmagArgs),
    /// Kriging surface of the optimal exponent.
    Kriging(KrigingArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenIcArgs {
    /// Grid points per axis.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Box side length.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub length: f64,
    /// Target kinetic energy ½⟨v·v⟩.
    #[arg(long, default_value_t = 0.052)]
    pub energy: f64,
    /// Spectral peak wavenumber.
    #[arg(long, default_value_t = 4.0)]
    pub peak_k: f64,
    /// Viscosity recorded in the file header.
    #[arg(long, default_value_t = 0.001)]
    pub nu: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingKind {
    None,
    Shell,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DnsArgs {
    #[arg(long)]
    pub ic: PathBuf,
    #[arg(long, default_value_t = 0.001)]
    pub nu: f64,
    #[arg(long, default_value_t = 5.0)]
    pub t_end: f64,
    /// Fixed time step; overrides CFL control when given.
    #[arg(long)]
    pub dt: Option<f64>,
    /// CFL target in (0, 0.5].
    #[arg(long, default_value_t = 0.5)]
    pub cfl: f64,
    /// Upper bound on the CFL-controlled step.
    #[arg(long, default_value_t = 0.05)]
    pub dt_max: f64,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    pub snap: Vec<f64>,
    /// Directory receiving `snap_t<time>.vfld` files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Statistics history CSV.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub stats_every: usize,
    #[arg(long, value_enum, default_value_t = ForcingKind::None)]
    pub forcing: ForcingKind,
    /// Forcing shell radius.
    #[arg(long, default_value_t = 2.0)]
    pub k_f: f64,
    /// Injected power; defaults to the initial dissipation rate.
    #[arg(long)]
    pub power: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FilterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Filter-to-grid ratio ℒ_δ (non-negative integer).
    #[arg(long)]
    pub ldelta: f64,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Residual stress output (6 components).
    #[arg(long)]
    pub stress: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fsgs,
    Smag,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct AprioriArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 8.0)]
    pub ldelta: f64,
    /// Exponent grid `start:stop:step`, inclusive.
    #[arg(long, default_value = "0.05:1.0:0.05")]
    pub alpha: String,
    #[arg(long, value_enum, default_value_t = ModelKind::Fsgs)]
    pub model: ModelKind,
    /// Viscosity; defaults to the value in the input header.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 502.0)]
    pub agitation_speed: f64,
    #[arg(long, default_value_t = 1500.0)]
    pub c_bar: f64,
    /// Smagorinsky constant.
    #[arg(long, default_value_t = 0.17)]
    pub cs: f64,
    /// Admissible band |R₁ − 1| ≤ r_tol for α_opt.
    #[arg(long, default_value_t = 0.25)]
    pub r_tol: f64,
    /// Label stored in the report; defaults to the input file stem.
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Per-α correlation table.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    #[arg(long)]
    pub pdf: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub pdf_bins: usize,
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    #[arg(long, default_value_t = 20_000)]
    pub scatter_n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// A priori Smagorinsky evaluation; the report matches `apriori --model smag`.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SmagArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 8.0)]
    pub ldelta: f64,
    #[arg(long, default_value_t = 0.17)]
    pub cs: f64,
    /// Viscosity; defaults to the value in the input header.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub pdf: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub pdf_bins: usize,
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    #[arg(long, default_value_t = 20_000)]
    pub scatter_n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Model force `∂ⱼ𝒯ᵢⱼ` (3 components).
    #[arg(long)]
    pub force: Option<PathBuf>,
    /// Model stress (6 components).
    #[arg(long)]
    pub stress: Option<PathBuf>,
}

impl SmagArgs {
    pub fn as_apriori(&self) -> AprioriArgs {
        AprioriArgs {
            input: self.input.clone(),
            ldelta: self.ldelta,
            alpha: "1".into(),
            model: ModelKind::Smag,
            nu: self.nu,
            rho: 1.0,
            agitation_speed: 502.0,
            c_bar: 1500.0,
            cs: self.cs,
            r_tol: 0.25,
            case: self.case.clone(),
            report: self.report.clone(),
            sweep: None,
            pdf: self.pdf.clone(),
            pdf_bins: self.pdf_bins,
            scatter: self.scatter.clone(),
            scatter_n: self.scatter_n,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct KrigingArgs {
    /// CSV with columns `l_delta,re_lambda,alpha_opt`.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, default_value = "1:15:1")]
    pub grid_ld: String,
    #[arg(long, default_value = "20:50:1")]
    pub grid_re: String,
    /// Length scales `θ₁,θ₂` in standardized units; omitted means fitted.
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    /// Process variance used with `--theta`; defaults to the sample variance.
    #[arg(long, requires = "theta")]
    pub sigma2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub nugget: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Inclusive `start:stop:step` grid. Values are rounded to 12 decimals so
/// that e.g. `0.05:1:0.05` contains `0.6` exactly.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad range {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        if let [single] = parts[..] {
            return Ok(vec![single]);
        }
        return Err(format!("range {s:?} must be start:stop:step"));
    };
    if !(step > 0.0) || stop < start {
        return Err(format!("range {s:?} needs step > 0 and stop >= start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
