//! Fermionic measurement-based quantum computation on sparse Fock states.
//!
//! The crate builds fermionic resource states out of entangled mode pairs,
//! measures sites in fixed-parity bases with exact anticommutation signs, and
//! tracks the resulting by-products so that a measured lattice reproduces a
//! circuit on encoded qubits. Dense reference implementations live in
//! [`oracle`].

pub mod encoding;
pub mod engine;
pub mod error;
pub mod fermion;
pub mod fpeps;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod teleport;
pub mod verify;

pub use error::{Error, Result};
