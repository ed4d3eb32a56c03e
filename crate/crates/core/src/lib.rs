//! Single-photon linear-optical network simulation with orbital angular
//! momentum (OAM) as the routing and multiplexing control channel.
//!
//! The crate is layered bottom-up:
//!
//! * [`state`]: mode labels, one-photon and few-photon amplitude maps, and
//!   the generic operator-application machinery.
//! * [`elements`]: the elementary optical toolbox (phase shifter,
//!   beamsplitter, mirror, Dove prism, holograms) as mode operators.
//! * [`multiport`]: the symmetric multiport, the Dove stage, the OAM
//!   beamsplitter and its reverse transit, explicit device matrices and
//!   triangular netlist synthesis.
//! * [`network`]: multiplexer/demultiplexer, simple and star self-routing
//!   networks, and the entanglement-distribution scenarios.
//! * [`cli`]: the command-line front end and its JSON report formats.

pub mod cli;
pub mod elements;
mod error;
pub mod linalg;
pub mod multiport;
pub mod network;
pub mod state;

pub use error::{Error, Result};

/// Entries with modulus at or below this value are dropped from amplitude maps.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Default comparison tolerance for norms, fidelities and device equivalence.
pub const TOLERANCE: f64 = 1e-9;
