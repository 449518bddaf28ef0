//! Pseudo-spectral incompressible Navier–Stokes solver on the periodic cube.
//!
//! The velocity is advanced in Fourier space. The viscous term is integrated
//! exactly through an integrating factor, the rotational-form nonlinear term
//! `u × ω` explicitly with classical RK4, the product is truncated by the 2/3
//! rule, and pressure is removed by Leray projection.

mod ic;
mod solver;
mod stats;

pub use ic::{generate_ic, model_spectrum};
pub use solver::{run, run_decaying, run_forced, step, RunOutput, Solver};
pub use stats::{
    compute_stats, energy_spectrum, kolmogorov_scale, re_lambda, taylor_microscale, write_stats_csv,
    FlowStats, STATS_CSV_HEADER,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// How the step size is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum TimeStep {
    Fixed { dt: f64 },
    /// `dt = cfl·dx / max(|u₁|+|u₂|+|u₃|)`, capped at `dt_max`.
    Cfl { cfl: f64, dt_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Forcing {
    #[default]
    None,
    /// Constant-power injection into modes `0 < |k| ≤ k_f`.
    LowShell { k_f: f64, power: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub nu: f64,
    pub time_step: TimeStep,
    pub t_end: f64,
    #[serde(default)]
    pub forcing: Forcing,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    /// Record full statistics every this many steps (plus start and end).
    #[serde(default = "default_stats_every")]
    pub stats_every: usize,
}

fn default_stats_every() -> usize {
    1
}

impl SolverConfig {
    pub fn new(grid: GridSpec, nu: f64, time_step: TimeStep, t_end: f64) -> Self {
        Self {
            grid,
            nu,
            time_step,
            t_end,
            forcing: Forcing::None,
            seed: 0,
            snapshot_times: Vec::new(),
            stats_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {}", self.nu)));
        }
        match self.time_step {
            TimeStep::Fixed { dt } if !(dt.is_finite() && dt > 0.0) => {
                return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
            }
            TimeStep::Cfl { cfl, dt_max } if !(cfl > 0.0 && cfl <= 0.5 && dt_max > 0.0) => {
                return Err(Error::InvalidParameter(format!(
                    "CFL target must lie in (0, 0.5] with positive dt_max, got {cfl}, {dt_max}"
                )));
            }
            _ => {}
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!("bad t_end {}", self.t_end)));
        }
        if let Forcing::LowShell { k_f, power } = self.forcing {
            if !(k_f > 0.0 && power >= 0.0 && power.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "forcing needs k_f > 0 and power >= 0, got {k_f}, {power}"
                )));
            }
        }
        if self.stats_every == 0 {
            return Err(Error::InvalidParameter("stats_every must be >= 1".into()));
        }
        Ok(())
    }
}
