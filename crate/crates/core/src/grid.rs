//! Periodic cube discretization and its wavenumber layout.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform `n³` grid on a periodic cube of edge `length`.
///
/// Physical samples sit at `x_i = i·dx`, `i = 0..n`. Spectral coefficients use
/// the half-complex layout of a real transform: the `x` and `y` axes carry all
/// `n` wavenumbers, the `z` axis only `0..=n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    length: f64,
}

impl GridSpec {
    /// Grid on the standard `[0, 2π]³` box.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_length(n, 2.0 * PI)
    }

    pub fn with_length(n: usize, length: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 4, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Number of physical samples, `n³`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Length of the stored `z` spectral axis, `n/2 + 1`.
    #[inline]
    pub fn nz_spectral(&self) -> usize {
        self.n / 2 + 1
    }

    /// Number of stored spectral coefficients.
    #[inline]
    pub fn spectral_len(&self) -> usize {
        self.n * self.n * self.nz_spectral()
    }

    /// Fundamental wavenumber `2π / length`.
    #[inline]
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Physical coordinate of index `i` along any axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Flat index of a physical sample (z fastest).
    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    /// Flat index of a stored spectral coefficient.
    #[inline]
    pub fn spectral_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.nz_spectral() + iz
    }

    /// Signed integer wavenumber of storage index `i` on a full axis.
    ///
    /// Follows `{0, 1, …, n/2−1, −n/2, …, −1}`.
    #[inline]
    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Highest wavenumber kept by the 2/3 dealiasing rule (exclusive bound).
    #[inline]
    pub fn dealias_cutoff(&self) -> f64 {
        self.n as f64 / 3.0 * self.k0()
    }

    pub fn wavenumbers(&self) -> Wavenumbers {
        Wavenumbers::new(self)
    }
}

/// Per-axis wavenumber tables for a grid.
///
/// `full` holds the physical wavenumber of every stored index, with the
/// Nyquist entry set to `−n/2·k0`. `odd` is the same table with the Nyquist
/// entry zeroed; it is the one to use for odd-order derivative multipliers so
/// that real fields stay real.
#[derive(Debug, Clone)]
pub struct Wavenumbers {
    pub x_full: Vec<f64>,
    pub x_odd: Vec<f64>,
    pub z_full: Vec<f64>,
    pub z_odd: Vec<f64>,
}

impl Wavenumbers {
    fn new(g: &GridSpec) -> Self {
        let n = g.n();
        let k0 = g.k0();
        let x_full: Vec<f64> = (0..n).map(|i| g.signed_mode(i) as f64 * k0).collect();
        let x_odd = (0..n)
            .map(|i| if i == n / 2 { 0.0 } else { x_full[i] })
            .collect();
        let z_full: Vec<f64> = (0..g.nz_spectral())
            .map(|i| {
                if i == n / 2 {
                    -((n / 2) as f64) * k0
                } else {
                    i as f64 * k0
                }
            })
            .collect();
        let z_odd = (0..g.nz_spectral())
            .map(|i| if i == n / 2 { 0.0 } else { z_full[i] })
            .collect();
        Self {
            x_full,
            x_odd,
            z_full,
            z_odd,
        }
    }

    /// Full wavevector at a spectral storage position.
    #[inline]
    pub fn k(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        [self.x_full[ix], self.x_full[iy], self.z_full[iz]]
    }

    /// Wavevector with Nyquist components zeroed.
    #[inline]
    pub fn k_odd(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        [self.x_odd[ix], self.x_odd[iy], self.z_odd[iz]]
    }

    #[inline]
    pub fn k_sq(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        let k = self.k(ix, iy, iz);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }
}

/// Multiplicity of a stored half-complex coefficient in the full spectrum.
///
/// Planes `kz = 0` and `kz = n/2` are stored once; every other plane stands in
/// for itself and its conjugate partner.
#[inline]
pub fn mode_multiplicity(n: usize, iz: usize) -> f64 {
    if iz == 0 || iz == n / 2 {
        1.0
    } else {
        2.0
    }
}
