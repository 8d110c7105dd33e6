pub mod error;
mod fp;
pub mod padic;
pub mod series;
pub mod curve;
pub mod frobenius;
pub mod basis;
pub mod zeta;
pub mod selftest;
pub mod cli;

pub use error::{Error, Result};
