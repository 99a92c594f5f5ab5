//! Krotov optimal control towards the set of Schrödinger cat states and
//! maximally entangled qubit–oscillator cat states.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod krotov;
pub mod models;
pub mod quantum;

pub use error::{Error, Result};
