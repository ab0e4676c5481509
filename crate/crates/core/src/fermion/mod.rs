//! Fermionic Fock space: mode registers, sparse states and normally ordered operators.

pub mod gates;
pub mod operator;
pub mod registry;
pub mod state;

pub use gates::{encoded_gate, GateKind};
pub use operator::{Factor, FermionMonomial, FermionOperator};
pub use registry::{ModeLabel, ModeRegistry, Place, Role, MAX_MODES};
pub use state::{jw_sign, FockState, Parity, PRUNE_EPS};
