//! Presentations, covers and flow-equivalence invariants of sofic shifts, with
//! specialised tooling for renewal systems, beta-shifts and gap shifts.

pub mod error;
pub mod graph;
pub mod covers;
pub mod invariants;
pub mod renewal;
pub mod beta;
pub mod gapshift;
pub mod cli;

pub use error::{Error, Result};
