pub mod ansatz;
pub mod cli;
pub mod data;
pub mod encoding;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod sim;
pub mod training;

pub use error::{QaeError, Result};

#[cfg(test)]
mod testutil;
