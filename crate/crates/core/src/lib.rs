//! Unsharp spin observables, joint measurability and CHSH auditing for two-qubit systems.
//!
//! The crate checks, numerically, that a Bell inequality derived from joint
//! measurability plus no-signalling holds for every quantum behavior in which
//! Alice's two observables are unsharp enough to be measured jointly, and it
//! classifies arbitrary correlation quadruples accordingly.

pub mod audit;
pub mod bell;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod states;

pub use error::{Error, Result};
