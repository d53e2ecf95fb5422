//! Optimal portfolios for an insider whose filtration is initially enlarged
//! by knowledge of the terminal Brownian value, or of an indicator of it.
//!
//! The crate evaluates the information drift in closed form, simulates the
//! optimal and arbitrage strategies, and checks numerically which expected
//! utilities stay finite.

pub mod cli;
pub mod config;
pub mod drift;
pub mod error;
pub mod estimate;
pub mod gauss;
pub mod market;
pub mod quad;
pub mod report;
pub mod rng;
pub mod sim;
pub mod strategies;
pub mod utility;
pub mod verify;

pub use error::{Error, Result};
