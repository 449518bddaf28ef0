//! Seeded random fields. All randomness in the crate flows through
//! [`seeded_rng`], a ChaCha8 counter-based stream keyed by a 64-bit seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::field::{ScalarField, VectorField};
use crate::grid::GridSpec;
use crate::ops;

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent standard normal samples at every grid node.
pub fn gaussian_field(grid: GridSpec, rng: &mut Rng) -> ScalarField {
    let v = (0..grid.len()).map(|_| StandardNormal.sample(rng)).collect();
    ScalarField::from_physical(grid, v).expect("sized")
}

/// White noise truncated to the ball `|k| ≤ k_max` and to the 2/3 mask.
/// The mean is removed.
pub fn band_limited_field(grid: GridSpec, k_max: f64, rng: &mut Rng) -> ScalarField {
    let mask = ops::dealias_mask(&grid);
    let f = gaussian_field(grid, rng).apply_multiplier(|k, _| {
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 > 0.0 && k2 <= k_max * k_max {
            1.0.into()
        } else {
            0.0.into()
        }
    });
    mask.apply_field(&f).into_physical()
}

/// Band-limited, mean-free, divergence-free random velocity field.
pub fn solenoidal_field(grid: GridSpec, k_max: f64, seed: u64) -> VectorField {
    let mut rng = seeded_rng(seed);
    let comps = [0, 1, 2].map(|_| band_limited_field(grid, k_max, &mut rng));
    let v = VectorField::new(comps).expect("shared grid");
    ops::project_solenoidal(&v)
}
