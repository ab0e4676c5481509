//! Slow, independent reference implementations used to check the core.

pub mod dense;
pub mod factor;
pub mod spin;

pub use dense::{dense_fermion_apply, operator_matrix};
pub use factor::{classify, factor_byproduct, ByproductClass, Factorization};
pub use spin::{spin_apply, spin_teleport_check, SpinState};
