//! Smagorinsky eddy-viscosity baseline: `𝒯_ij = −2 ν_sgs S_ij` with
//! `ν_sgs = (C_s ℒ)² |S|`, `|S| = √(2 S_ij S_ij)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymmetricTensorField, VectorField, SYM_PAIRS};
use crate::filter::BoxFilterSpec;
use crate::grid::GridSpec;
use crate::ops::{self, StrainConvention};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmagorinskyParams {
    pub cs: f64,
    /// Physical filter width `ℒ`.
    pub filter_width: f64,
    #[serde(default)]
    pub convention: StrainConvention,
}

impl SmagorinskyParams {
    pub const DEFAULT_CS: f64 = 0.17;

    pub fn new(cs: f64, filter_width: f64) -> Result<Self> {
        if !(cs.is_finite() && cs >= 0.0) {
            return Err(Error::InvalidParameter(format!("C_s must be non-negative, got {cs}")));
        }
        if !(filter_width.is_finite() && filter_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "filter width must be positive, got {filter_width}"
            )));
        }
        Ok(Self {
            cs,
            filter_width,
            convention: StrainConvention::Standard,
        })
    }

    /// Width taken from a box filter: `ℒ = 2·ℒ_δ·dx`.
    pub fn for_box_filter(cs: f64, spec: &BoxFilterSpec, grid: &GridSpec) -> Result<Self> {
        Self::new(cs, spec.width(grid))
    }
}

/// Pointwise `ν_sgs` and the strain tensor it was built from.
pub fn eddy_viscosity(vbar: &VectorField, p: &SmagorinskyParams) -> (Vec<f64>, SymmetricTensorField) {
    let s = ops::strain_rate(vbar, p.convention).to_physical();
    let comps: Vec<Vec<f64>> = s.components().iter().map(ScalarField::values).collect();
    let c2 = (p.cs * p.filter_width).powi(2);
    let npts = vbar.grid().len();
    let nu: Vec<f64> = (0..npts)
        .map(|q| {
            let contraction: f64 = SYM_PAIRS
                .iter()
                .enumerate()
                .map(|(c, &(i, j))| {
                    let w = if i == j { 1.0 } else { 2.0 };
                    w * comps[c][q] * comps[c][q]
                })
                .sum();
            c2 * (2.0 * contraction).sqrt()
        })
        .collect();
    (nu, s)
}

pub fn smagorinsky_stress(vbar: &VectorField, p: &SmagorinskyParams) -> SymmetricTensorField {
    let g = *vbar.grid();
    let (nu, s) = eddy_viscosity(vbar, p);
    let comps = std::array::from_fn(|c| {
        let sc = s.components()[c].values();
        let t = sc.iter().zip(&nu).map(|(x, n)| -2.0 * n * x).collect();
        ScalarField::from_physical(g, t).expect("sized")
    });
    SymmetricTensorField::new(comps).expect("shared grid")
}

/// `∂_j 𝒯_ij` of the Smagorinsky stress, with the product `ν_sgs S_ij`
/// truncated by the 2/3 mask before differentiation. Output is physical.
pub fn smagorinsky_divergence(vbar: &VectorField, p: &SmagorinskyParams) -> VectorField {
    let mask = ops::dealias_mask(vbar.grid());
    let t = smagorinsky_stress(vbar, p).map(|c| mask.apply_field(&c.to_spectral()));
    ops::tensor_divergence(&t).to_physical()
}
