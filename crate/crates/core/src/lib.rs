pub mod cli;
pub mod error;
pub mod estimators;
pub mod fields;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod lattice;
pub mod recipes;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
