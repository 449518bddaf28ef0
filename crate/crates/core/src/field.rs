//! Scalar, vector and symmetric-tensor fields on a periodic grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{GridSpec, Wavenumbers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Repr {
    Physical,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToSpectral,
    ToPhysical,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// A real scalar field held either as samples or as half-complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    data: FieldData,
}

impl ScalarField {
    pub fn from_physical(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            data: FieldData::Physical(values),
        })
    }

    pub fn from_spectral(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.spectral_len(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid,
            data: FieldData::Spectral(coeffs),
        })
    }

    /// Samples `f(x, y, z)` at every grid node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut v = Vec::with_capacity(grid.len());
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    v.push(f(grid.coord(ix), grid.coord(iy), grid.coord(iz)));
                }
            }
        }
        Self {
            grid,
            data: FieldData::Physical(v),
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            data: FieldData::Physical(vec![c; grid.len()]),
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn repr(&self) -> Repr {
        match self.data {
            FieldData::Physical(_) => Repr::Physical,
            FieldData::Spectral(_) => Repr::Spectral,
        }
    }

    pub fn data(&self) -> &FieldData {
        &self.data
    }

    pub fn physical(&self) -> Result<&[f64]> {
        match &self.data {
            FieldData::Physical(v) => Ok(v),
            FieldData::Spectral(_) => Err(Error::Representation {
                expected: Repr::Physical,
                found: Repr::Spectral,
            }),
        }
    }

    pub fn spectral(&self) -> Result<&[Complex64]> {
        match &self.data {
            FieldData::Spectral(v) => Ok(v),
            FieldData::Physical(_) => Err(Error::Representation {
                expected: Repr::Spectral,
                found: Repr::Physical,
            }),
        }
    }

    /// Strict transform: the field must currently be in the source
    /// representation of `dir`.
    pub fn transform(&self, dir: Direction) -> Result<Self> {
        match (dir, &self.data) {
            (Direction::ToSpectral, FieldData::Physical(v)) => Ok(Self {
                grid: self.grid,
                data: FieldData::Spectral(fft::forward(&self.grid, v)),
            }),
            (Direction::ToPhysical, FieldData::Spectral(c)) => Ok(Self {
                grid: self.grid,
                data: FieldData::Physical(fft::inverse(&self.grid, c)),
            }),
            (Direction::ToSpectral, FieldData::Spectral(_)) => Err(Error::Representation {
                expected: Repr::Physical,
                found: Repr::Spectral,
            }),
            (Direction::ToPhysical, FieldData::Physical(_)) => Err(Error::Representation {
                expected: Repr::Spectral,
                found: Repr::Physical,
            }),
        }
    }

    /// Spectral copy of this field, transforming only if needed.
    pub fn to_spectral(&self) -> Self {
        match &self.data {
            FieldData::Spectral(_) => self.clone(),
            FieldData::Physical(v) => Self {
                grid: self.grid,
                data: FieldData::Spectral(fft::forward(&self.grid, v)),
            },
        }
    }

    pub fn to_physical(&self) -> Self {
        match &self.data {
            FieldData::Physical(_) => self.clone(),
            FieldData::Spectral(c) => Self {
                grid: self.grid,
                data: FieldData::Physical(fft::inverse(&self.grid, c)),
            },
        }
    }

    pub fn into_spectral(self) -> Self {
        match self.data {
            FieldData::Spectral(_) => self,
            FieldData::Physical(v) => Self {
                data: FieldData::Spectral(fft::forward(&self.grid, &v)),
                grid: self.grid,
            },
        }
    }

    pub fn into_physical(self) -> Self {
        match self.data {
            FieldData::Physical(_) => self,
            FieldData::Spectral(c) => Self {
                data: FieldData::Physical(fft::inverse(&self.grid, &c)),
                grid: self.grid,
            },
        }
    }

    pub fn into_repr(self, repr: Repr) -> Self {
        match repr {
            Repr::Physical => self.into_physical(),
            Repr::Spectral => self.into_spectral(),
        }
    }

    /// Physical samples, transforming a spectral field on the fly.
    pub fn values(&self) -> Vec<f64> {
        match &self.data {
            FieldData::Physical(v) => v.clone(),
            FieldData::Spectral(c) => fft::inverse(&self.grid, c),
        }
    }

    /// Spatial mean; exact from the `k = 0` coefficient in spectral form.
    pub fn mean(&self) -> f64 {
        match &self.data {
            FieldData::Physical(v) => v.iter().sum::<f64>() / v.len() as f64,
            FieldData::Spectral(c) => c[0].re / self.grid.len() as f64,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Multiplies every coefficient by `m(k, k_odd)` and returns a spectral
    /// field. `k_odd` has Nyquist components zeroed and must be used for any
    /// multiplier odd in `k`.
    pub fn apply_multiplier<F>(&self, m: F) -> Self
    where
        F: Fn([f64; 3], [f64; 3]) -> Complex64 + Sync,
    {
        let mut out = self.to_spectral();
        if let FieldData::Spectral(c) = &mut out.data {
            multiply_in_place(&self.grid, &self.grid.wavenumbers(), c, &m);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let data = match &self.data {
            FieldData::Physical(v) => FieldData::Physical(v.iter().map(|x| x * s).collect()),
            FieldData::Spectral(c) => FieldData::Spectral(c.iter().map(|x| x * s).collect()),
        };
        Self {
            grid: self.grid,
            data,
        }
    }

    /// `self + s·other`, evaluated in `self`'s representation.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let other = other.clone().into_repr(self.repr());
        let data = match (&self.data, &other.data) {
            (FieldData::Physical(a), FieldData::Physical(b)) => {
                FieldData::Physical(a.iter().zip(b).map(|(x, y)| x + s * y).collect())
            }
            (FieldData::Spectral(a), FieldData::Spectral(b)) => {
                FieldData::Spectral(a.iter().zip(b).map(|(x, y)| x + s * y).collect())
            }
            _ => unreachable!("representations aligned above"),
        };
        Ok(Self {
            grid: self.grid,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    /// Pointwise product, computed in physical space (no dealiasing).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let a = self.values();
        let b = other.values();
        Self::from_physical(self.grid, a.iter().zip(&b).map(|(x, y)| x * y).collect())
    }
}

/// Applies a wavevector-dependent multiplier to half-complex coefficients.
pub(crate) fn multiply_in_place<F>(grid: &GridSpec, wn: &Wavenumbers, coeffs: &mut [Complex64], m: &F)
where
    F: Fn([f64; 3], [f64; 3]) -> Complex64 + Sync,
{
    let n = grid.n();
    let nh = grid.nz_spectral();
    coeffs
        .par_chunks_mut(n * nh)
        .enumerate()
        .for_each(|(ix, plane)| {
            for iy in 0..n {
                for iz in 0..nh {
                    let c = &mut plane[iy * nh + iz];
                    *c *= m(wn.k(ix, iy, iz), wn.k_odd(ix, iy, iz));
                }
            }
        });
}

/// Three components on a shared grid and representation.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(components: [ScalarField; 3]) -> Result<Self> {
        check_shared(&components)?;
        Ok(Self { components })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let n = grid.n();
        let mut v = [
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
        ];
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let u = f(grid.coord(ix), grid.coord(iy), grid.coord(iz));
                    for c in 0..3 {
                        v[c].push(u[c]);
                    }
                }
            }
        }
        let [a, b, c] = v;
        Self {
            components: [
                ScalarField::from_physical(grid, a).expect("sized"),
                ScalarField::from_physical(grid, b).expect("sized"),
                ScalarField::from_physical(grid, c).expect("sized"),
            ],
        }
    }

    pub fn constant(grid: GridSpec, c: [f64; 3]) -> Self {
        Self {
            components: c.map(|x| ScalarField::constant(grid, x)),
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, [0.0; 3])
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].grid()
    }

    pub fn repr(&self) -> Repr {
        self.components[0].repr()
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            components: [f(&self.components[0]), f(&self.components[1]), f(&self.components[2])],
        }
    }

    pub fn try_map(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        Self::new([
            f(&self.components[0])?,
            f(&self.components[1])?,
            f(&self.components[2])?,
        ])
    }

    pub fn to_physical(&self) -> Self {
        self.map(ScalarField::to_physical)
    }

    pub fn to_spectral(&self) -> Self {
        self.map(ScalarField::to_spectral)
    }

    pub fn add_constant(&self, u0: [f64; 3]) -> Self {
        let p = self.to_physical();
        Self {
            components: [0, 1, 2].map(|c| {
                let v = p.components[c].values().iter().map(|x| x + u0[c]).collect();
                ScalarField::from_physical(*self.grid(), v).expect("sized")
            }),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }
}

/// Storage order of the six independent tensor components.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Position of `(i, j)` in [`SYM_PAIRS`], symmetric in its arguments.
#[inline]
pub fn sym_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => panic!("tensor index out of range: ({i}, {j})"),
    }
}

/// Symmetric rank-2 tensor stored as its upper triangle
/// `(11, 12, 13, 22, 23, 33)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensorField {
    components: [ScalarField; 6],
}

impl SymmetricTensorField {
    pub fn new(components: [ScalarField; 6]) -> Result<Self> {
        check_shared(&components)?;
        Ok(Self { components })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            components: std::array::from_fn(|_| ScalarField::zeros(grid)),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].grid()
    }

    pub fn repr(&self) -> Repr {
        self.components[0].repr()
    }

    pub fn components(&self) -> &[ScalarField; 6] {
        &self.components
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[sym_index(i, j)]
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            components: std::array::from_fn(|c| f(&self.components[c])),
        }
    }

    pub fn to_physical(&self) -> Self {
        self.map(ScalarField::to_physical)
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }
}

fn check_shared(fields: &[ScalarField]) -> Result<()> {
    let g = fields[0].grid();
    let r = fields[0].repr();
    for f in &fields[1..] {
        if f.grid() != g {
            return Err(Error::GridMismatch);
        }
        if f.repr() != r {
            return Err(Error::Representation {
                expected: r,
                found: f.repr(),
            });
        }
    }
    Ok(())
}
