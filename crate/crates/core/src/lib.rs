//! Closed-form evolution operators of the Tavis-Cummings model for one to
//! four two-level atoms in a single-mode cavity, an exact sector-by-sector
//! reference propagator to check them against, and a small simulator.

pub mod closed_form;
pub mod decomposition;
pub mod error;
pub mod operators;
pub mod oracle;
pub mod simulator;

pub use error::{Error, Result};
