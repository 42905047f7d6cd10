//! Simulation of cavity–cavity entanglement swapping through atomic Bragg
//! momenta.
//!
//! Two atoms are Bragg-scattered by two remote cavities, each prepared in
//! `(|0⟩ + |1⟩)/√2`. A photon deflects the atom from `P_{+l₀}` to `P_{−l₀}`,
//! entangling momentum with photon number. The atoms' momentum modes are
//! then mixed on two 50/50 beam splitters and counted on four detectors;
//! the click pattern heralds the joint state of the cavities.
//!
//! - [`quantum`]: dense states, operators, evolution, density matrices.
//! - [`bragg`]: Hamiltonians, closed-form amplitudes and the ladder oracle.
//! - [`protocol`]: joint state, beam-splitter network, clicks, sampling.
//! - [`metrics`]: oracle comparisons, parameter sweeps, intervals.

pub mod bragg;
pub mod error;
pub mod metrics;
pub mod protocol;
pub mod quantum;

pub use error::{Error, Result};

/// Crate version, embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
