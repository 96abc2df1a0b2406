//! Block-DCT image and intra-video compression testbed in which a total
//! variation minimization predicts selected transform coefficients from the
//! rest of the block and its decoded neighbourhood.

pub mod blocks;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod imagecodec;
pub mod tvcore;
pub mod videocodec;

pub use error::{Error, Result};
