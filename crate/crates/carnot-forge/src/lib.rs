//! carnot-forge: privileged coordinates and nilpotent approximations on
//! Carnot manifold charts, by exact polynomial algebra.
//!
//! The crate works over polynomial vector-field frames with exact rational
//! coefficients. All structural results (coordinate adaptation, homogeneity
//! checks, nilpotent group laws) are established as exact polynomial
//! identities; floating point is confined to the numeric flow/rate module.

pub mod dsl;
pub mod error;
pub mod fixtures;
pub mod frames;
pub mod nilpotent;
pub mod numeric;
pub mod privileged;
pub mod report;
pub mod linalg;
pub mod poly;
pub mod vf;

pub use error::{Error, Result};
