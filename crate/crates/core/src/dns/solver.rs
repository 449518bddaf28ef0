use num_complex::Complex64;
use rayon::prelude::*;

use super::stats::{compute_stats, FlowStats};
use super::{Forcing, SolverConfig, TimeStep};
use crate::error::{Error, Result};
use crate::fft;
use crate::field::{ScalarField, VectorField};
use crate::grid::{mode_multiplicity, GridSpec};
use crate::ops;

type Spectral3 = [Vec<Complex64>; 3];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Per-mode tables laid out like the spectral coefficients.
struct ModeTables {
    /// Odd-derivative wavevector (Nyquist zeroed).
    k_odd: [Vec<f64>; 3],
    /// `|k|²` including Nyquist components.
    k_sq: Vec<f64>,
    /// Multiplicity of each stored coefficient in the full spectrum.
    weight: Vec<f64>,
    keep: Vec<bool>,
    /// Modes receiving forcing, empty when unforced.
    forced: Vec<bool>,
}

impl ModeTables {
    fn new(g: &GridSpec, forcing: &Forcing) -> Self {
        let wn = g.wavenumbers();
        let n = g.n();
        let nh = g.nz_spectral();
        let len = g.spectral_len();
        let mut k_odd = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let mut k_sq = vec![0.0; len];
        let mut weight = vec![0.0; len];
        let mut forced = Vec::new();
        let k_f = match forcing {
            Forcing::LowShell { k_f, .. } => {
                forced = vec![false; len];
                Some(*k_f)
            }
            Forcing::None => None,
        };
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..nh {
                    let idx = g.spectral_index(ix, iy, iz);
                    let ko = wn.k_odd(ix, iy, iz);
                    for d in 0..3 {
                        k_odd[d][idx] = ko[d];
                    }
                    k_sq[idx] = wn.k_sq(ix, iy, iz);
                    weight[idx] = mode_multiplicity(n, iz);
                    if let Some(kf) = k_f {
                        forced[idx] = k_sq[idx] > 0.0 && k_sq[idx] <= kf * kf * (1.0 + 1e-12);
                    }
                }
            }
        }
        Self {
            k_odd,
            k_sq,
            weight,
            keep: ops::dealias_mask(g).keep().to_vec(),
            forced,
        }
    }
}

/// Single-writer integrator state.
pub struct Solver {
    cfg: SolverConfig,
    u: Spectral3,
    time: f64,
    steps: usize,
    tables: ModeTables,
}

impl Solver {
    /// Starts from `ic`, which is projected onto solenoidal fields and
    /// truncated by the 2/3 mask.
    pub fn new(cfg: SolverConfig, ic: &VectorField) -> Result<Self> {
        cfg.validate()?;
        if *ic.grid() != cfg.grid {
            return Err(Error::GridMismatch);
        }
        let tables = ModeTables::new(&cfg.grid, &cfg.forcing);
        let vs = ic.to_spectral();
        let mut u: Spectral3 = [0, 1, 2].map(|c| vs.component(c).spectral().expect("spectral").to_vec());
        for c in u.iter_mut() {
            for (z, &keep) in c.iter_mut().zip(&tables.keep) {
                if !keep {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
        }
        ops::project_in_place(&cfg.grid, &mut u);
        Ok(Self {
            cfg,
            u,
            time: 0.0,
            steps: 0,
            tables,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grid(&self) -> &GridSpec {
        &self.cfg.grid
    }

    pub fn velocity_spectral(&self) -> VectorField {
        let g = self.cfg.grid;
        VectorField::new(self.u.clone().map(|c| ScalarField::from_spectral(g, c).expect("sized")))
            .expect("shared grid")
    }

    /// Physical copy of the current velocity.
    pub fn velocity(&self) -> VectorField {
        self.velocity_spectral().to_physical()
    }

    fn spectral_sum(&self, u: &Spectral3, w: impl Fn(usize) -> f64) -> f64 {
        let norm = 1.0 / (self.cfg.grid.len() as f64).powi(2);
        let mut s = 0.0;
        for c in u {
            for (idx, z) in c.iter().enumerate() {
                s += z.norm_sqr() * self.tables.weight[idx] * w(idx);
            }
        }
        s * norm
    }

    /// `½⟨v·v⟩`, exact by Parseval.
    pub fn energy(&self) -> f64 {
        0.5 * self.spectral_sum(&self.u, |_| 1.0)
    }

    /// `2ν⟨SᵢⱼSᵢⱼ⟩ = ν⟨|ω|²⟩` for the current (solenoidal) state.
    pub fn dissipation(&self) -> f64 {
        let ko = &self.tables.k_odd;
        self.cfg.nu
            * self.spectral_sum(&self.u, |i| ko[0][i] * ko[0][i] + ko[1][i] * ko[1][i] + ko[2][i] * ko[2][i])
    }

    /// Forcing term for a given spectral velocity; zero outside `|k| ≤ k_f`.
    pub fn forcing_term(&self, u: &VectorField) -> VectorField {
        let g = self.cfg.grid;
        let us = u.to_spectral();
        let arr: Spectral3 = [0, 1, 2].map(|c| us.component(c).spectral().expect("spectral").to_vec());
        let mut out: Spectral3 = [0, 1, 2].map(|_| vec![Complex64::new(0.0, 0.0); g.spectral_len()]);
        self.add_forcing(&arr, &mut out);
        VectorField::new(out.map(|c| ScalarField::from_spectral(g, c).expect("sized"))).expect("shared grid")
    }

    /// Energy injection rate of the forcing at the current state.
    pub fn injection_rate(&self) -> f64 {
        match self.cfg.forcing {
            Forcing::None => 0.0,
            Forcing::LowShell { power, .. } => {
                if self.forced_energy(&self.u) > 0.0 {
                    power
                } else {
                    0.0
                }
            }
        }
    }

    fn forced_energy(&self, u: &Spectral3) -> f64 {
        let f = &self.tables.forced;
        0.5 * self.spectral_sum(u, |i| if f[i] { 1.0 } else { 0.0 })
    }

    fn add_forcing(&self, u: &Spectral3, out: &mut Spectral3) {
        let Forcing::LowShell { power, .. } = self.cfg.forcing else {
            return;
        };
        let kf = self.forced_energy(u);
        if kf <= 0.0 {
            return;
        }
        let coef = power / (2.0 * kf);
        for c in 0..3 {
            for (idx, &on) in self.tables.forced.iter().enumerate() {
                if on {
                    out[c][idx] += coef * u[c][idx];
                }
            }
        }
    }

    /// Projected, dealiased `u × ω` plus forcing. Also returns
    /// `max(|u₁|+|u₂|+|u₃|)` over the grid.
    fn nonlinear(&self, u: &Spectral3) -> (Spectral3, f64) {
        let g = &self.cfg.grid;
        let ko = &self.tables.k_odd;
        let omega_hat: Spectral3 = [(1, 2), (2, 0), (0, 1)].map(|(a, b)| {
            (0..g.spectral_len())
                .into_par_iter()
                .map(|i| I * (ko[a][i] * u[b][i] - ko[b][i] * u[a][i]))
                .collect()
        });
        let up: [Vec<f64>; 3] = [0, 1, 2].map(|c| fft::inverse(g, &u[c]));
        let wp: [Vec<f64>; 3] = [0, 1, 2].map(|c| fft::inverse(g, &omega_hat[c]));
        let speed = (0..g.len())
            .into_par_iter()
            .map(|p| up[0][p].abs() + up[1][p].abs() + up[2][p].abs())
            .reduce(|| 0.0, f64::max);
        let cross: [Vec<f64>; 3] = [(1, 2), (2, 0), (0, 1)].map(|(a, b)| {
            (0..g.len())
                .into_par_iter()
                .map(|p| up[a][p] * wp[b][p] - up[b][p] * wp[a][p])
                .collect()
        });
        let mut out: Spectral3 = [0, 1, 2].map(|c| fft::forward(g, &cross[c]));
        for c in out.iter_mut() {
            for (z, &keep) in c.iter_mut().zip(&self.tables.keep) {
                if !keep {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
            c[0] = Complex64::new(0.0, 0.0);
        }
        ops::project_in_place(g, &mut out);
        self.add_forcing(u, &mut out);
        (out, speed)
    }

    fn choose_dt(&self, speed: f64, limit: f64) -> f64 {
        let dt = match self.cfg.time_step {
            TimeStep::Fixed { dt } => dt,
            TimeStep::Cfl { cfl, dt_max } => {
                if speed > 0.0 {
                    (cfl * self.cfg.grid.dx() / speed).min(dt_max)
                } else {
                    dt_max
                }
            }
        };
        dt.min(limit - self.time)
    }

    /// Advances one step, never past `limit`. Returns the step taken.
    pub fn step_until(&mut self, limit: f64) -> Result<f64> {
        if limit <= self.time {
            return Ok(0.0);
        }
        let (a, speed) = self.nonlinear(&self.u);
        let h = self.choose_dt(speed, limit);
        let nu = self.cfg.nu;
        let e_half: Vec<f64> = self.tables.k_sq.iter().map(|k2| (-nu * k2 * 0.5 * h).exp()).collect();
        let len = e_half.len();

        let combine = |f: &dyn Fn(usize, usize) -> Complex64| -> Spectral3 {
            [0, 1, 2].map(|c| (0..len).map(|i| f(c, i)).collect())
        };
        let u0 = &self.u;
        let ua = combine(&|c, i| e_half[i] * (u0[c][i] + 0.5 * h * a[c][i]));
        let (b, _) = self.nonlinear(&ua);
        let ub = combine(&|c, i| e_half[i] * u0[c][i] + 0.5 * h * b[c][i]);
        let (cc, _) = self.nonlinear(&ub);
        let uc = combine(&|c, i| e_half[i] * (e_half[i] * u0[c][i] + h * cc[c][i]));
        let (d, _) = self.nonlinear(&uc);
        let next = combine(&|c, i| {
            let ef = e_half[i] * e_half[i];
            ef * u0[c][i] + h / 6.0 * (ef * a[c][i] + 2.0 * e_half[i] * (b[c][i] + cc[c][i]) + d[c][i])
        });

        let finite = next.iter().all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        if !finite {
            return Err(Error::Blowup { last_time: self.time });
        }
        self.u = next;
        self.time = if limit.is_finite() && (limit - self.time - h).abs() <= 1e-12 * limit.abs().max(1.0) {
            limit
        } else {
            self.time + h
        };
        self.steps += 1;
        Ok(h)
    }

    /// One step of the configured size (or CFL choice), unbounded by `t_end`.
    pub fn step(&mut self) -> Result<f64> {
        self.step_until(f64::INFINITY)
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        while self.time < t {
            self.step_until(t)?;
        }
        Ok(())
    }

    pub fn stats(&self) -> Result<FlowStats> {
        compute_stats(&self.velocity_spectral(), self.cfg.nu, self.time)
    }
}

/// Advances `state` by one step of `cfg`'s time step.
pub fn step(state: &VectorField, cfg: &SolverConfig) -> Result<VectorField> {
    let mut s = Solver::new(cfg.clone(), state)?;
    s.step()?;
    Ok(s.velocity())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<(f64, VectorField)>,
    pub history: Vec<FlowStats>,
}

/// Integrates to `cfg.t_end`, recording statistics and the requested
/// snapshots (times are hit exactly).
pub fn run(cfg: &SolverConfig, ic: &VectorField) -> Result<RunOutput> {
    let mut solver = Solver::new(cfg.clone(), ic)?;
    let mut stops: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|t| *t >= 0.0 && *t <= cfg.t_end)
        .collect();
    stops.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    stops.dedup();

    let mut snapshots = Vec::new();
    let mut history = vec![solver.stats()?];
    let mut next_snap = 0;
    while next_snap < stops.len() && stops[next_snap] <= 0.0 {
        snapshots.push((0.0, solver.velocity()));
        next_snap += 1;
    }
    while solver.time() < cfg.t_end {
        let limit = stops.get(next_snap).copied().unwrap_or(cfg.t_end).min(cfg.t_end);
        solver.step_until(limit)?;
        if solver.time() == limit && next_snap < stops.len() && limit == stops[next_snap] {
            snapshots.push((limit, solver.velocity()));
            next_snap += 1;
        }
        if solver.steps() % cfg.stats_every == 0 || solver.time() >= cfg.t_end {
            history.push(solver.stats()?);
        }
        log::debug!("t = {:.4}, K = {:.6e}", solver.time(), solver.energy());
    }
    Ok(RunOutput { snapshots, history })
}

pub fn run_decaying(cfg: &SolverConfig, ic: &VectorField) -> Result<RunOutput> {
    if cfg.forcing != Forcing::None {
        return Err(Error::InvalidParameter("decaying run must be unforced".into()));
    }
    run(cfg, ic)
}

pub fn run_forced(cfg: &SolverConfig, ic: &VectorField) -> Result<RunOutput> {
    if !matches!(cfg.forcing, Forcing::LowShell { .. }) {
        return Err(Error::InvalidParameter("forced run needs low-shell forcing".into()));
    }
    run(cfg, ic)
}
