//! Linear-optics synthesis of arbitrary two-qubit gates on the spatial and
//! polarization degrees of freedom of a single photon.

pub mod assembly;
pub mod elements;
pub mod error;
pub mod gates;
pub mod json;
pub mod measure;
pub mod numkernel;
pub mod protocols;
pub mod random;
pub mod synth;

pub use error::{Error, Result};
