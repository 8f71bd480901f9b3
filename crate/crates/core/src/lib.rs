//! Sizing and switch-state simulation for CDC-ROADM transponder aggregators
//! that combine unfiltered variable-coupler paths with a small pool of shared
//! WSS filters.

pub mod analysis;
pub mod cli;
pub mod coupler;
pub mod error;
pub mod exec;
pub mod fabric;
pub mod grid;
pub mod linkmath;
pub mod scenario;
pub mod stress;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linkmath::Db;
