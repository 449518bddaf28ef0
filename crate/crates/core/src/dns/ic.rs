use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{mode_multiplicity, GridSpec};
use crate::ops;
use crate::random::{gaussian_field, seeded_rng};

/// Model spectrum shape `E(k) ∝ k⁴ exp(−2(k/k_p)²)`, unnormalized.
pub fn model_spectrum(k: f64, peak_k: f64) -> f64 {
    let r = k / peak_k;
    k.powi(4) * (-2.0 * r * r).exp()
}

/// Random-phase solenoidal velocity with the model spectrum, rescaled so
/// that `½⟨v·v⟩ = target_energy`. Modes outside the 2/3 mask are empty and
/// the mean velocity is zero.
pub fn generate_ic(grid: GridSpec, target_energy: f64, peak_k: f64, seed: u64) -> Result<VectorField> {
    if !(target_energy.is_finite() && target_energy > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target energy must be positive, got {target_energy}"
        )));
    }
    if !(peak_k > 0.0) || peak_k >= grid.dealias_cutoff() {
        return Err(Error::Spectrum(format!(
            "peak wavenumber {peak_k} must lie in (0, {})",
            grid.dealias_cutoff()
        )));
    }
    let mut rng = seeded_rng(seed);
    let mask = ops::dealias_mask(&grid);
    let shaped = [0, 1, 2].map(|_| {
        let noise = gaussian_field(grid, &mut rng);
        let f = noise.apply_multiplier(|k, _| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let km = k2.sqrt();
            // per-mode amplitude so the shell sum follows E(k)
            Complex64::new((model_spectrum(km, peak_k) / (4.0 * std::f64::consts::PI * k2)).sqrt(), 0.0)
        });
        mask.apply_field(&f)
    });
    let v = ops::project_solenoidal(&VectorField::new(shaped)?);

    let n = grid.n();
    let nh = grid.nz_spectral();
    let norm = 1.0 / (grid.len() as f64).powi(2);
    let mut energy = 0.0;
    for c in v.components() {
        let coeffs = c.spectral()?;
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..nh {
                    let z = coeffs[grid.spectral_index(ix, iy, iz)];
                    energy += 0.5 * z.norm_sqr() * norm * mode_multiplicity(n, iz);
                }
            }
        }
    }
    if energy <= 0.0 {
        return Err(Error::Spectrum("generated field carries no energy".into()));
    }
    let s = (target_energy / energy).sqrt();
    let v = v.map(|c| c.scale(s).into_physical());

    // remove the O(ε) mismatch between spectral and physical quadrature
    let measured: f64 = v
        .components()
        .iter()
        .map(|c| c.values().iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>()
        * 0.5
        / grid.len() as f64;
    let s = (target_energy / measured).sqrt();
    Ok(v.map(|c: &ScalarField| c.scale(s)))
}
