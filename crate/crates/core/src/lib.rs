//! Arbitrary-gauge cavity QED numerics.
//!
//! The α-gauge family interpolates between the Coulomb gauge (α = 0) and the
//! multipolar gauge (α = 1). Untruncated models are gauge invariant; their
//! material and mode truncations are not, and most of this crate exists to
//! make that difference measurable.

pub mod cavity1d;
pub mod data;
pub mod dicke;
pub mod error;
pub mod gauge;
pub mod material;
pub mod measure;
pub mod multimode;
pub mod opalg;
pub mod quad;
pub mod twolevel;
pub mod vacuumfield;

pub use error::{Error, Result};
