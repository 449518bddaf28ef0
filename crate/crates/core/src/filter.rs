//! Isotropic box (top-hat) filtering and exact residual-stress extraction.
//!
//! The discrete kernel spans `2·ℒ_δ` cells per axis. Interior taps weigh 1,
//! the two end taps ½, and the sum is normalized by `2·ℒ_δ`. This is the
//! trapezoidal rule applied to the continuous kernel `(1/ℒ)H(ℒ/2 − |r|)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymmetricTensorField, VectorField, SYM_PAIRS};
use crate::grid::GridSpec;
use crate::ops;

/// Filter-to-grid ratio `ℒ_δ = ℒ / (2δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxFilterSpec {
    l_delta: f64,
}

impl BoxFilterSpec {
    pub fn new(l_delta: f64) -> Result<Self> {
        if !(l_delta.is_finite() && l_delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "filter ratio must be non-negative, got {l_delta}"
            )));
        }
        Ok(Self { l_delta })
    }

    pub fn l_delta(&self) -> f64 {
        self.l_delta
    }

    /// Total kernel width in grid cells.
    pub fn width_cells(&self) -> f64 {
        2.0 * self.l_delta
    }

    /// Physical filter width `ℒ = 2·ℒ_δ·dx`.
    pub fn width(&self, grid: &GridSpec) -> f64 {
        self.width_cells() * grid.dx()
    }

    /// Half-width in cells; fails unless `ℒ_δ` is a whole number.
    pub fn half_width(&self) -> Result<usize> {
        if self.l_delta.fract() != 0.0 {
            return Err(Error::UnsupportedWidth(self.l_delta));
        }
        Ok(self.l_delta as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.l_delta == 0.0
    }

    /// Taps `(offset, weight)` of the 1D stencil.
    pub fn weights(&self) -> Result<Vec<(isize, f64)>> {
        let m = self.half_width()?;
        if m == 0 {
            return Ok(vec![(0, 1.0)]);
        }
        let norm = 1.0 / (2 * m) as f64;
        let m = m as isize;
        Ok((-m..=m)
            .map(|j| {
                let w = if j.abs() == m { 0.5 } else { 1.0 };
                (j, w * norm)
            })
            .collect())
    }

    /// 1D transfer function `Σ_j w_j cos(k·j·dx)` at physical wavenumber `k`.
    pub fn transfer(&self, k: f64, dx: f64) -> Result<f64> {
        Ok(self
            .weights()?
            .iter()
            .map(|&(j, w)| w * (k * j as f64 * dx).cos())
            .sum())
    }
}

/// Filtered velocity together with its residual stress `𝒯ᴿ`.
#[derive(Debug, Clone)]
pub struct FilteredPair {
    pub filtered: VectorField,
    pub residual_stress: SymmetricTensorField,
}

/// Separable periodic box filter. Returns a field in the input's
/// representation.
pub fn box_filter(f: &ScalarField, spec: &BoxFilterSpec) -> Result<ScalarField> {
    let taps = spec.weights()?;
    if spec.is_identity() {
        return Ok(f.clone());
    }
    let g = *f.grid();
    let repr = f.repr();
    let mut data = f.values();
    let mut tmp = vec![0.0; data.len()];
    for axis in 0..3 {
        filter_axis(&g, &data, &mut tmp, axis, &taps);
        std::mem::swap(&mut data, &mut tmp);
    }
    Ok(ScalarField::from_physical(g, data)?.into_repr(repr))
}

fn filter_axis(g: &GridSpec, src: &[f64], dst: &mut [f64], axis: usize, taps: &[(isize, f64)]) {
    let n = g.n();
    let ni = n as isize;
    let stride = match axis {
        0 => n * n,
        1 => n,
        _ => 1,
    };
    // each x-plane is written independently; reads may span neighbouring planes
    dst.par_chunks_mut(n * n).enumerate().for_each(|(ix, plane)| {
        for iy in 0..n {
            for iz in 0..n {
                let pos = [ix, iy, iz][axis] as isize;
                let base = g.index(ix, iy, iz) - pos as usize * stride;
                let mut acc = 0.0;
                for &(j, w) in taps {
                    let p = (pos + j).rem_euclid(ni) as usize;
                    acc += w * src[base + p * stride];
                }
                plane[iy * n + iz] = acc;
            }
        }
    });
}

/// `V̄ = G ∗ V`, componentwise.
pub fn filter_velocity(v: &VectorField, spec: &BoxFilterSpec) -> Result<VectorField> {
    v.try_map(|c| box_filter(c, spec))
}

/// `𝒯ᴿ_ij = filt(V_i V_j) − V̄_i V̄_j`.
pub fn true_sgs_stress(v: &VectorField, spec: &BoxFilterSpec) -> Result<FilteredPair> {
    let g = *v.grid();
    spec.weights()?;
    let vp = v.to_physical();
    let filtered = filter_velocity(&vp, spec)?;
    if spec.is_identity() {
        return Ok(FilteredPair {
            filtered,
            residual_stress: SymmetricTensorField::zeros(g),
        });
    }
    let raw: Vec<Vec<f64>> = (0..3).map(|c| vp.component(c).values()).collect();
    let bar: Vec<Vec<f64>> = (0..3).map(|c| filtered.component(c).values()).collect();
    let comps: Vec<ScalarField> = SYM_PAIRS
        .iter()
        .map(|&(i, j)| {
            let prod: Vec<f64> = raw[i].iter().zip(&raw[j]).map(|(a, b)| a * b).collect();
            let fprod = box_filter(&ScalarField::from_physical(g, prod)?, spec)?;
            let t: Vec<f64> = fprod
                .physical()?
                .iter()
                .zip(bar[i].iter().zip(&bar[j]))
                .map(|(p, (a, b))| p - a * b)
                .collect();
            ScalarField::from_physical(g, t)
        })
        .collect::<Result<_>>()?;
    let residual_stress = SymmetricTensorField::new(comps.try_into().expect("six components"))?;
    Ok(FilteredPair {
        filtered,
        residual_stress,
    })
}

/// Ground-truth SGS force `∂_j 𝒯ᴿ_ij`.
pub fn true_sgs_divergence(pair: &FilteredPair) -> VectorField {
    ops::tensor_divergence(&pair.residual_stress).to_physical()
}
