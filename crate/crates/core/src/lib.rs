//! Exact covariance-based measures of fermionic non-Gaussianity, shot-level
//! simulation of the two-copy Bell and single-copy matching protocols, and the
//! Gaussianity testers built on them.

pub mod bell;
pub mod error;
pub mod estimate;
pub mod linalg;
pub mod majorana;
pub mod matching;
pub mod numfmt;
pub mod optimize;
pub mod qstate;
pub mod rng;
pub mod statelib;

pub use error::{Error, Result};
