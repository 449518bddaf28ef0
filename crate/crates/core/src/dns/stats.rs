//! Macroscopic turbulence statistics of a velocity snapshot.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::mode_multiplicity;
use crate::ops;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowStats {
    pub time: f64,
    /// `½⟨v′ᵢv′ᵢ⟩`.
    pub k: f64,
    /// `⟨v′ᵢv′ᵢ⟩`.
    pub e_tot: f64,
    /// `√(2K/3)`.
    pub u_rms: f64,
    /// `2ν⟨SᵢⱼSᵢⱼ⟩` with the symmetric (½) strain.
    pub eps: f64,
    pub re_lambda: f64,
    pub taylor_lambda: f64,
    pub eta: f64,
    pub k_max_eta: f64,
    pub integral_scale: f64,
    pub eddy_turnover: f64,
    pub deriv_skewness: f64,
    pub deriv_flatness: f64,
}

/// `λ = √(15 ν u′² / ε)`.
pub fn taylor_microscale(nu: f64, u_rms: f64, eps: f64) -> f64 {
    (15.0 * nu * u_rms * u_rms / eps).sqrt()
}

/// `Re_λ = u′ λ / ν`.
pub fn re_lambda(u_rms: f64, lambda: f64, nu: f64) -> f64 {
    u_rms * lambda / nu
}

/// `η = (ν³/ε)^{1/4}`.
pub fn kolmogorov_scale(nu: f64, eps: f64) -> f64 {
    (nu * nu * nu / eps).powf(0.25)
}

/// Shell-summed kinetic energy spectrum; entry `s` collects modes with
/// `round(|k|/k0) = s`, so `Σ_s E_s = ½⟨v·v⟩`.
pub fn energy_spectrum(v: &VectorField) -> Vec<f64> {
    let g = *v.grid();
    let n = g.n();
    let nh = g.nz_spectral();
    let wn = g.wavenumbers();
    let k0 = g.k0();
    let norm = 1.0 / (g.len() as f64 * g.len() as f64);
    let vs = v.to_spectral();
    let comps: Vec<&[num_complex::Complex64]> =
        (0..3).map(|c| vs.component(c).spectral().expect("spectral")).collect();
    let nshell = (3f64.sqrt() * (n / 2) as f64).ceil() as usize + 2;
    let mut e = vec![0.0; nshell];
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..nh {
                let idx = g.spectral_index(ix, iy, iz);
                let s = (wn.k_sq(ix, iy, iz).sqrt() / k0).round() as usize;
                let amp: f64 = comps.iter().map(|c| c[idx].norm_sqr()).sum();
                e[s] += 0.5 * amp * norm * mode_multiplicity(n, iz);
            }
        }
    }
    while e.len() > 1 && *e.last().unwrap() == 0.0 {
        e.pop();
    }
    e
}

pub fn compute_stats(v: &VectorField, nu: f64, time: f64) -> Result<FlowStats> {
    let g = *v.grid();
    let npts = g.len() as f64;
    let vp = v.to_physical();
    let mut e_tot = 0.0;
    for c in 0..3 {
        let vals = vp.component(c).values();
        let mean = vals.iter().sum::<f64>() / npts;
        e_tot += vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / npts;
    }
    let k = 0.5 * e_tot;
    let u_rms = (2.0 * k / 3.0).sqrt();

    let vs = v.to_spectral();
    // grad[i][j] = ∂_j v_i
    let grad: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|i| (0..3).map(|j| ops::derivative(vs.component(i), j).values()).collect())
        .collect();
    let mut ss = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            ss += grad[i][j]
                .iter()
                .zip(&grad[j][i])
                .map(|(a, b)| {
                    let s = 0.5 * (a + b);
                    s * s
                })
                .sum::<f64>();
        }
    }
    let eps = 2.0 * nu * ss / npts;
    if !(eps > 0.0) {
        return Err(Error::Degenerate("dissipation rate is zero".into()));
    }

    let mut skew = 0.0;
    let mut flat = 0.0;
    for i in 0..3 {
        let d = &grad[i][i];
        let m2 = d.iter().map(|x| x * x).sum::<f64>() / npts;
        let m3 = d.iter().map(|x| x * x * x).sum::<f64>() / npts;
        let m4 = d.iter().map(|x| x * x * x * x).sum::<f64>() / npts;
        skew += m3 / m2.powf(1.5) / 3.0;
        flat += m4 / (m2 * m2) / 3.0;
    }

    let lambda = taylor_microscale(nu, u_rms, eps);
    let eta = kolmogorov_scale(nu, eps);
    let k_max = (g.n() / 2) as f64 * g.k0();

    let spec = energy_spectrum(v);
    let k0 = g.k0();
    let inv_k: f64 = spec
        .iter()
        .enumerate()
        .skip(1)
        .map(|(s, e)| e / (s as f64 * k0))
        .sum();
    let integral_scale = if k > 0.0 { 3.0 * PI / (4.0 * k) * inv_k } else { 0.0 };

    Ok(FlowStats {
        time,
        k,
        e_tot,
        u_rms,
        eps,
        re_lambda: re_lambda(u_rms, lambda, nu),
        taylor_lambda: lambda,
        eta,
        k_max_eta: k_max * eta,
        integral_scale,
        eddy_turnover: if u_rms > 0.0 { integral_scale / u_rms } else { f64::INFINITY },
        deriv_skewness: skew,
        deriv_flatness: flat,
    })
}

pub const STATS_CSV_HEADER: &str = "time,K,eps,re_lambda,eta,kmax_eta,skew,flat,L_int,tau_L";

pub fn write_stats_csv<W: Write>(history: &[FlowStats], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{STATS_CSV_HEADER}")?;
    for s in history {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            s.time,
            s.k,
            s.eps,
            s.re_lambda,
            s.eta,
            s.k_max_eta,
            s.deriv_skewness,
            s.deriv_flatness,
            s.integral_scale,
            s.eddy_turnover
        )?;
    }
    Ok(())
}
