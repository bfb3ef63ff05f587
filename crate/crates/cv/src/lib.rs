//! Fock-truncated continuous-variable simulator and the circuits that
//! prepare, measure and evolve sigma-model states on qumodes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gate;
pub mod ops;
pub mod protocols;
pub mod register;
pub mod snapshot;

pub use error::{CvError, Result};
pub use gate::{gate_matrix, CompiledGate, GateKind, GateSpec};
pub use register::QumodeRegister;
