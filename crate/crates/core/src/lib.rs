//! Hierarchical beamforming-training codebooks for half-wavelength uniform
//! linear arrays, binary-tree beam search over sparse multipath channels, and
//! a Monte-Carlo harness for received power and search success rate.

pub mod array;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
