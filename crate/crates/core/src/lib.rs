//! Secure equilibria in multi-player turn-based games on graphs.

pub mod arena;
pub mod delta;
pub mod eliminate;
pub mod error;
pub mod generate;
pub mod eval;
pub mod format;
pub mod graph;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod par;
pub mod payoff;
pub mod product;
pub mod punish;
pub mod scalar;
pub mod secure;
pub mod solve;
pub mod strategy;
pub mod verify;
pub mod zerosum;

pub use error::{Error, Result};
