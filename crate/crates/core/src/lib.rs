//! Numerical laboratory for resonances and damped eigenmodes of open and
//! damped chaotic maps.

pub mod error;
pub mod report;
pub mod spectral;
pub mod stats;
pub mod classical;
pub mod quantum;
pub mod resonance;
pub mod analysis;

pub use error::{Error, Result};
