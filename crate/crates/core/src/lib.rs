//! Cardinal and semi-cardinal interpolation on `Z^d` and half-space lattices.
//!
//! The semi-cardinal coefficients come from a Wiener-Hopf factorization
//! `1/σ = ω₊(ζ) ω₊(ζ⁻¹)` of the cardinal symbol, computed on a torus grid.

pub mod cardinal;
pub mod convergence;
pub mod error;
pub mod expansion;
pub mod kernels;
pub mod lattice;
pub mod semicardinal;
pub mod symbols;
pub mod verify;
pub mod wienerhopf;

pub use error::{Error, Result};
