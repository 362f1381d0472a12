//! Privacy-preserving weighted-sum computation over peer-to-peer
//! topologies.
//!
//! The core primitive is the per-node weighted sum `sum_j a_ji * m_ji`
//! computed from a node's neighbors with one of five protection schemes:
//! none (baseline), random perturbation, Shamir secret sharing, threshold
//! Paillier encryption, and a malicious-model verified scheme built on
//! Pedersen VSS plus authenticated Byzantine broadcast. A deterministic
//! synchronous simulator runs the schemes over arbitrary topologies, with
//! an iterative Jacobi solver (and its collaborative-filtering setup) as
//! the workload layer.

pub mod byzagree;
pub mod config;
pub mod error;
pub mod field;
pub mod numerics;
pub mod paillier;
pub mod pedersen;
pub mod schemes;
pub mod shamir;
pub mod simulator;
pub mod topio;

pub use error::{Error, Result};
