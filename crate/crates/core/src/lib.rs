pub mod cli;
pub mod entangle;
pub mod error;
pub mod estimator;
pub mod gf;
pub mod mub;
pub mod qcore;
pub mod qpd;
pub mod teleport;

pub use error::{Error, Result};
