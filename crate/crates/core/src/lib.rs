//! Scattering resonances of compactly supported one-dimensional potentials.

pub mod error;
pub mod identities;
pub mod jost;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod report;
pub mod spectrum;
pub mod uniqueness;

pub use error::{Error, Result};
pub use potential::{Interpolation, Potential, PotentialPair, Representation, Smoothness};
