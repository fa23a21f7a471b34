//! Exact Jordan-type computations for finite-dimensional modules over
//! Frobenius kernels of exponential-type group schemes.

pub mod error;
pub mod fields;
pub mod jordan;
pub mod modules;
pub mod strata;
pub mod theta;

pub use error::{Error, Result};
