//! Localized relative-energy diagnostics for isentropic gas dynamics.

pub mod config;
pub mod cutoff;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod gas;
pub mod io;
pub mod solver;

pub use error::{LabError, Result};
