pub mod cli;
pub mod error;
pub mod evolution;
pub mod families;
pub mod measures;
pub mod metrics;
pub mod numerics;

pub use error::{Error, Result};
