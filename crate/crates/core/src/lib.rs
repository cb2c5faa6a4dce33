//! Simulation and numerical study of the self-intersection local time of
//! fractional Brownian motion and of its spatial derivative.

pub mod arcs;
pub mod error;
pub mod expectation;
pub mod fbm;
pub mod mollifier;
pub mod quadrature;
pub mod regularity;
pub mod silt;
pub mod stats;

pub use error::{Result, SiltError};
pub use fbm::{FbmPath, HurstParameter};
pub use mollifier::Mollifier;
