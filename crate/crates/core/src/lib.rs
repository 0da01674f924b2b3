//! Exact construction, point location and verification for the unilateral
//! lattice tiling of `R^n` by cubes of two side lengths `p < q`.
//!
//! - [`ratlin`]: exact rational linear algebra and Hermite normal forms.
//! - [`tiling`]: lattice basis, fundamental domain, canonicalization.
//! - [`symmetry`]: the stabilizer inside the hyperoctahedral group.
//! - [`torus`]: periods, discrete-torus tilings, packing counts, lattice scans.
//! - [`render`]: SVG figures and mesh export.
//! - [`verify`]: the aggregated self-check behind `hyptile verify`.

pub mod error;
pub mod ratlin;
pub mod render;
pub mod symmetry;
pub mod tiling;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
