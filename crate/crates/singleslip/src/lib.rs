//! Discrete single-slip strain-gradient plasticity in a sheared specimen.

pub mod analysis;
pub mod cli;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod minimizer;
pub mod sweep;

pub use error::{Error, Result};
