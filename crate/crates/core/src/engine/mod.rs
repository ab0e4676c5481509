//! Circuit compilation and adaptive execution on the resource lattice.

pub mod circuit;
pub mod compile;
pub mod frame;
pub mod run;

pub use circuit::{CircuitIR, Gate};
pub use compile::{compile, MeasurementPattern, Site, SitePlan};
pub use frame::{sign_frame, ByproductFrame, MeasurementRecord, WireFrame};
pub use run::{run, Executor, Frontier, Mode, RunOptions, RunResult, ShotResult};
