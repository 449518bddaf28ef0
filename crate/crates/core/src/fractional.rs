//! Fractional operators and the fractional subgrid-scale (FSGS) closure.
//!
//! All operators are Fourier multipliers on the periodic grid:
//!
//! | operator                 | multiplier               |
//! |--------------------------|--------------------------|
//! | `(−Δ)^α`                 | `|k|^{2α}`               |
//! | Riesz potential `ℐ_α`    | `|k|^{−2α}` (k ≠ 0)      |
//! | Riesz transform `ℛ_j`    | `−i k_j / |k|` (k ≠ 0)   |
//!
//! The `k = 0` multiplier is always zero. Odd multipliers use the wavevector
//! with Nyquist components removed so real fields stay real.
//!
//! The closure models the SGS force as `ν_α (−Δ)^α V̄` with
//!
//! ```text
//! μ_α = ρ (Uτ)^{2α} / τ · Γ(2α+1) · C_α,   ν_α = μ_α / ρ,   τ = ν / U²
//! C_α = 2^{2α} Γ(α + 3/2) / (π^{3/2} Γ(−α)) · c̄ α²
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymmetricTensorField, VectorField, SYM_PAIRS};
use crate::ops;

/// Fractional order `α ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalExponent(f64);

impl FractionalExponent {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "fractional exponent must lie in (0, 1], got {alpha}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FractionalExponent {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FractionalExponent> for f64 {
    fn from(a: FractionalExponent) -> f64 {
        a.0
    }
}

/// Fields the spectral operators act on componentwise.
pub trait Componentwise: Sized {
    fn map_scalar(&self, f: &dyn Fn(&ScalarField) -> ScalarField) -> Self;
}

impl Componentwise for ScalarField {
    fn map_scalar(&self, f: &dyn Fn(&ScalarField) -> ScalarField) -> Self {
        f(self)
    }
}

impl Componentwise for VectorField {
    fn map_scalar(&self, f: &dyn Fn(&ScalarField) -> ScalarField) -> Self {
        self.map(f)
    }
}

#[inline]
fn norm_sq(k: [f64; 3]) -> f64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

/// `(−Δ)^α f`.
pub fn fractional_laplacian<F: Componentwise>(f: &F, alpha: FractionalExponent) -> F {
    let a = alpha.get();
    f.map_scalar(&|s| {
        let repr = s.repr();
        s.apply_multiplier(|k, _| {
            let k2 = norm_sq(k);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(k2.powf(a), 0.0)
            }
        })
        .into_repr(repr)
    })
}

fn require_mean_free(f: &ScalarField) -> Result<()> {
    let mean = f.mean();
    let scale = f.max_abs();
    if mean.abs() > 1e-10 * scale {
        return Err(Error::NonzeroMean(mean));
    }
    Ok(())
}

/// `ℐ_α f = (−Δ)^{−α} f` on a mean-free field.
pub fn riesz_potential(f: &ScalarField, alpha: FractionalExponent) -> Result<ScalarField> {
    require_mean_free(f)?;
    let a = alpha.get();
    let repr = f.repr();
    Ok(f.apply_multiplier(|k, _| {
        let k2 = norm_sq(k);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(k2.powf(-a), 0.0)
        }
    })
    .into_repr(repr))
}

/// `ℛ_j f` on a mean-free field, `axis` in `0..3`.
pub fn riesz_transform(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    if axis > 2 {
        return Err(Error::InvalidParameter(format!("axis {axis} out of range")));
    }
    require_mean_free(f)?;
    let repr = f.repr();
    Ok(f.apply_multiplier(|k, ko| {
        let k2 = norm_sq(k);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -ko[axis] / k2.sqrt())
        }
    })
    .into_repr(repr))
}

/// `ℛ_j (−Δ)^{α−½} f`, multiplier `−i k_j |k|^{2α−2}`; mean discarded.
fn riesz_half_order(f: &ScalarField, axis: usize, alpha: f64) -> ScalarField {
    f.apply_multiplier(|k, ko| {
        let k2 = norm_sq(k);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -ko[axis] * k2.powf(alpha - 1.0))
        }
    })
}

/// Equivalent SGS stress
/// `𝒯*_ij = ℛ_j (−Δ)^{α−½} V̄_i + ℛ_i (−Δ)^{α−½} V̄_j`.
///
/// Normalized so that `∂_j 𝒯*_ij = (−Δ)^α V̄_i` whenever `V̄` is divergence
/// free. Output is physical.
pub fn equivalent_sgs_stress(vbar: &VectorField, alpha: FractionalExponent) -> SymmetricTensorField {
    let a = alpha.get();
    let vs = vbar.to_spectral();
    let g = *vbar.grid();
    let comps = SYM_PAIRS.map(|(i, j)| {
        let x = riesz_half_order(vs.component(i), j, a);
        let y = riesz_half_order(vs.component(j), i, a);
        let sum: Vec<Complex64> = x
            .spectral()
            .expect("spectral")
            .iter()
            .zip(y.spectral().expect("spectral"))
            .map(|(p, q)| p + q)
            .collect();
        ScalarField::from_spectral(g, sum).expect("sized").into_physical()
    });
    SymmetricTensorField::new(comps).expect("shared grid")
}

/// Physical and model constants of the closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsgsParams {
    /// Density, kg/m³.
    pub rho: f64,
    /// Kinematic viscosity, m²/s.
    pub nu: f64,
    /// Molecular agitation speed `U`, m/s.
    pub agitation_speed: f64,
    /// `c̄` in `𝔠_α = c̄ α²`.
    pub c_bar: f64,
    pub alpha: FractionalExponent,
}

impl FsgsParams {
    pub const DEFAULT_AGITATION_SPEED: f64 = 502.0;
    pub const DEFAULT_C_BAR: f64 = 1500.0;

    pub fn new(nu: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            rho: 1.0,
            nu,
            agitation_speed: Self::DEFAULT_AGITATION_SPEED,
            c_bar: Self::DEFAULT_C_BAR,
            alpha: FractionalExponent::new(alpha)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha: FractionalExponent::new(alpha)?,
            ..*self
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("rho", self.rho)?;
        positive("nu", self.nu)?;
        positive("agitation speed", self.agitation_speed)?;
        if !self.c_bar.is_finite() {
            return Err(Error::InvalidParameter("c_bar must be finite".into()));
        }
        FractionalExponent::new(self.alpha.get())?;
        Ok(())
    }

    /// Relaxation time `τ = ν / U²`.
    pub fn tau(&self) -> f64 {
        self.nu / (self.agitation_speed * self.agitation_speed)
    }

    /// Dynamic viscosity `μ = ρ U² τ = ρ ν`.
    pub fn mu(&self) -> f64 {
        self.rho * self.nu
    }
}

/// Signed closure coefficients. `C_α` is negative on `(0, 1)` because
/// `Γ(−α) < 0` there; model terms use [`FsgsCoefficient::magnitude`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsgsCoefficient {
    pub mu_alpha: f64,
    pub nu_alpha: f64,
}

impl FsgsCoefficient {
    /// `|ν_α|`, the dissipative kinematic coefficient.
    pub fn magnitude(&self) -> f64 {
        self.nu_alpha.abs()
    }
}

/// `2^{2α} Γ(α + 3/2) / (π^{3/2} Γ(−α)) · c̄ α²` for `d = 3`.
///
/// `1/Γ(−α)` is evaluated as `−α(1−α)/Γ(2−α)`, which is regular on `(0, 1]`
/// and vanishes exactly at `α = 1`.
pub fn c_alpha(alpha: FractionalExponent, c_bar: f64) -> f64 {
    let a = alpha.get();
    if a == 1.0 {
        return 0.0;
    }
    let inv_gamma_neg = -a * (1.0 - a) / gamma(2.0 - a);
    2f64.powf(2.0 * a) * gamma(a + 1.5) * inv_gamma_neg / PI.powf(1.5) * c_bar * a * a
}

pub fn fsgs_coefficient(params: &FsgsParams) -> Result<FsgsCoefficient> {
    params.validate()?;
    let a = params.alpha.get();
    if a == 1.0 {
        return Ok(FsgsCoefficient {
            mu_alpha: 0.0,
            nu_alpha: 0.0,
        });
    }
    let tau = params.tau();
    let u_tau = params.nu / params.agitation_speed;
    let mu_alpha =
        params.rho * u_tau.powf(2.0 * a) / tau * gamma(2.0 * a + 1.0) * c_alpha(params.alpha, params.c_bar);
    Ok(FsgsCoefficient {
        mu_alpha,
        nu_alpha: mu_alpha / params.rho,
    })
}

/// Modeled SGS force `|ν_α| (−Δ)^α V̄`, in the input's representation.
pub fn fsgs_divergence(vbar: &VectorField, params: &FsgsParams) -> Result<VectorField> {
    let coef = fsgs_coefficient(params)?.magnitude();
    Ok(fractional_laplacian(vbar, params.alpha).map(|c| c.scale(coef)))
}

/// Outcome of the second-law admissibility check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBound {
    /// `μ · min |∇V̄:∇V̄ / (ℛ(−Δ)^{α−½}V̄ : ∇V̄)|`.
    pub mu_max: f64,
    /// Whether `|μ_α| ≤ mu_max`.
    pub satisfied: bool,
    pub mu_alpha: f64,
    /// Grid points that passed the denominator threshold.
    pub n_used: usize,
}

/// Pointwise fields entering the entropy bound: `(∇V̄:∇V̄, 𝒯:∇V̄)` where
/// `𝒯_ij = ℛ_j (−Δ)^{α−½} V̄_i`.
pub fn entropy_terms(vbar: &VectorField, alpha: FractionalExponent) -> (Vec<f64>, Vec<f64>) {
    let g = *vbar.grid();
    let vs = vbar.to_spectral();
    let mut num = vec![0.0; g.len()];
    let mut den = vec![0.0; g.len()];
    for i in 0..3 {
        for j in 0..3 {
            let grad = ops::derivative(vs.component(i), j).values();
            let t = riesz_half_order(vs.component(i), j, alpha.get()).values();
            for p in 0..g.len() {
                num[p] += grad[p] * grad[p];
                den[p] += t[p] * grad[p];
            }
        }
    }
    (num, den)
}

pub fn entropy_bound(vbar: &VectorField, params: &FsgsParams) -> Result<EntropyBound> {
    let coef = fsgs_coefficient(params)?;
    let (num, den) = entropy_terms(vbar, params.alpha);
    let rms = (den.iter().map(|d| d * d).sum::<f64>() / den.len() as f64).sqrt();
    let eps = 1e-12 * rms;
    let mut min_ratio = f64::INFINITY;
    let mut n_used = 0;
    for (n, d) in num.iter().zip(&den) {
        if d.abs() > eps && rms > 0.0 {
            min_ratio = min_ratio.min((n / d).abs());
            n_used += 1;
        }
    }
    if n_used == 0 {
        return Err(Error::Degenerate(
            "entropy-bound denominator vanishes everywhere".into(),
        ));
    }
    let mu_max = params.mu() * min_ratio;
    Ok(EntropyBound {
        mu_max,
        satisfied: coef.mu_alpha.abs() <= mu_max,
        mu_alpha: coef.mu_alpha,
        n_used,
    })
}
