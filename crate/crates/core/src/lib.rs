//! Bounds on the classical capacity of single-mode bosonic thermal noise
//! channels, and a truncated Fock-space simulator that checks them.
//!
//! The coherent-state rate and the additive-extension upper bound never
//! differ by more than `1/ln 2` bits. [`bounds`] evaluates both in closed
//! form. [`fock`] re-derives the lower bound by simulating the beamsplitter
//! channel on truncated density matrices. [`chi_opt`] searches over finite
//! input ensembles for anything that beats the coherent-state rate.

pub mod bounds;
pub mod chi_opt;
pub mod cli;
pub mod fock;
pub mod error;
pub mod gaussian;
pub mod gfunc;
pub mod verify;

pub use bounds::{report, BoundReport};
pub use error::{Error, Result};
pub use gaussian::{ChannelParams, CovarianceMatrix};
pub use gfunc::PhotonNumber;
