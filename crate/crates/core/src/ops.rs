//! Exact spectral differential operators and the 2/3 dealiasing mask.
//!
//! Every operator accepts either representation and returns its result in
//! the representation of its input.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::{Direction, Repr, ScalarField, SymmetricTensorField, VectorField, SYM_PAIRS};
use crate::grid::GridSpec;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Scale convention for the strain-rate tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrainConvention {
    /// `S_ij = ½(∂_j v_i + ∂_i v_j)`.
    #[default]
    Standard,
    /// `S_ij = ∂_j v_i + ∂_i v_j`, without the ½.
    Paper,
}

impl StrainConvention {
    pub fn factor(self) -> f64 {
        match self {
            StrainConvention::Standard => 0.5,
            StrainConvention::Paper => 1.0,
        }
    }
}

/// Plain forward/inverse transform of a field.
pub fn transform(f: &ScalarField, direction: Direction) -> crate::Result<ScalarField> {
    f.transform(direction)
}

/// `∂f/∂x_j`; the Nyquist derivative coefficient is set to zero.
pub fn derivative(f: &ScalarField, axis: usize) -> ScalarField {
    let repr = f.repr();
    f.apply_multiplier(|_, ko| I * ko[axis]).into_repr(repr)
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let repr = f.repr();
    let fs = f.to_spectral();
    let comps = [0, 1, 2].map(|j| fs.apply_multiplier(|_, ko| I * ko[j]).into_repr(repr));
    VectorField::new(comps).expect("components share grid")
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let repr = v.repr();
    let g = *v.grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); g.spectral_len()];
    for j in 0..3 {
        let d = v.component(j).apply_multiplier(|_, ko| I * ko[j]);
        for (a, b) in acc.iter_mut().zip(d.spectral().expect("spectral")) {
            *a += b;
        }
    }
    ScalarField::from_spectral(g, acc).expect("sized").into_repr(repr)
}

/// Spectral Laplacian, multiplier `−|k|²` (Nyquist included).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let repr = f.repr();
    f.apply_multiplier(|k, _| Complex64::from(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2])))
        .into_repr(repr)
}

pub fn strain_rate(v: &VectorField, convention: StrainConvention) -> SymmetricTensorField {
    let repr = v.repr();
    let vs = v.to_spectral();
    let s = convention.factor();
    let comps = SYM_PAIRS.map(|(i, j)| {
        let a = vs.component(i).apply_multiplier(|_, ko| I * ko[j]);
        let b = vs.component(j).apply_multiplier(|_, ko| I * ko[i]);
        let sum: Vec<Complex64> = a
            .spectral()
            .expect("spectral")
            .iter()
            .zip(b.spectral().expect("spectral"))
            .map(|(x, y)| s * (x + y))
            .collect();
        ScalarField::from_spectral(*v.grid(), sum)
            .expect("sized")
            .into_repr(repr)
    });
    SymmetricTensorField::new(comps).expect("components share grid")
}

/// Row divergence `∂_j T_ij` of a symmetric tensor.
pub fn tensor_divergence(t: &SymmetricTensorField) -> VectorField {
    let repr = t.repr();
    let g = *t.grid();
    let rows = [0, 1, 2].map(|i| {
        let mut acc = vec![Complex64::new(0.0, 0.0); g.spectral_len()];
        for j in 0..3 {
            let d = t.get(i, j).apply_multiplier(|_, ko| I * ko[j]);
            for (a, b) in acc.iter_mut().zip(d.spectral().expect("spectral")) {
                *a += b;
            }
        }
        ScalarField::from_spectral(g, acc).expect("sized").into_repr(repr)
    });
    VectorField::new(rows).expect("components share grid")
}

/// Leray projection onto divergence-free fields.
pub fn project_solenoidal(v: &VectorField) -> VectorField {
    let repr = v.repr();
    let g = *v.grid();
    let vs = v.to_spectral();
    let mut c = [0, 1, 2].map(|i| vs.component(i).spectral().expect("spectral").to_vec());
    project_in_place(&g, &mut c);
    let comps = c.map(|x| ScalarField::from_spectral(g, x).expect("sized").into_repr(repr));
    VectorField::new(comps).expect("components share grid")
}

pub(crate) fn project_in_place(g: &GridSpec, c: &mut [Vec<Complex64>; 3]) {
    let wn = g.wavenumbers();
    let n = g.n();
    let nh = g.nz_spectral();
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..nh {
                let idx = g.spectral_index(ix, iy, iz);
                let k = wn.k_odd(ix, iy, iz);
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if k2 == 0.0 {
                    continue;
                }
                let kdotv = c[0][idx] * k[0] + c[1][idx] * k[1] + c[2][idx] * k[2];
                for d in 0..3 {
                    c[d][idx] -= kdotv * (k[d] / k2);
                }
            }
        }
    }
}

/// Boolean 2/3-rule multiplier on the half-complex layout.
#[derive(Debug, Clone)]
pub struct DealiasMask {
    keep: Vec<bool>,
}

impl DealiasMask {
    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    pub fn apply(&self, coeffs: &mut [Complex64]) {
        for (c, &k) in coeffs.iter_mut().zip(&self.keep) {
            if !k {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn apply_field(&self, f: &ScalarField) -> ScalarField {
        let repr = f.repr();
        let mut s = f.to_spectral();
        let mut c = s.spectral().expect("spectral").to_vec();
        self.apply(&mut c);
        s = ScalarField::from_spectral(*f.grid(), c).expect("sized");
        match repr {
            Repr::Physical => s.into_physical(),
            Repr::Spectral => s,
        }
    }
}

/// Keeps a mode iff `max(|k₁|, |k₂|, |k₃|) < n/3·k0`.
pub fn dealias_mask(g: &GridSpec) -> DealiasMask {
    let wn = g.wavenumbers();
    let cut = g.dealias_cutoff();
    let n = g.n();
    let nh = g.nz_spectral();
    let mut keep = Vec::with_capacity(g.spectral_len());
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..nh {
                let k = wn.k(ix, iy, iz);
                keep.push(k[0].abs().max(k[1].abs()).max(k[2].abs()) < cut);
            }
        }
    }
    DealiasMask { keep }
}
