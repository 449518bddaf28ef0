//! Fractional subgrid-scale (FSGS) closure toolkit for periodic-box turbulence.
//!
//! The crate covers the full *a priori* workflow: a pseudo-spectral DNS
//! solver produces velocity snapshots, [`filter`] extracts the resolved field
//! and the exact residual stress, [`fractional`] and [`smagorinsky`] build
//! model terms, and [`apriori`] correlates the two. [`surrogate`] interpolates
//! the optimal fractional exponent over filter width and Reynolds number.

pub mod apriori;
pub mod dns;
pub mod error;
pub mod fft;
pub mod field;
pub mod filter;
pub mod fractional;
pub mod grid;
pub mod io;
pub mod ops;
pub mod random;
pub mod smagorinsky;
pub mod surrogate;

pub use error::{Error, Result};
pub use field::{Direction, Repr, ScalarField, SymmetricTensorField, VectorField};
pub use grid::GridSpec;
