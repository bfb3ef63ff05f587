//! Solvers for the 1+1-dimensional lattice O(3) sigma model: truncated
//! exact diagonalization, coupled-cluster estimates, and the finite-cutoff
//! scalar-field formulation with its real-time evolution oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod cc;
pub mod eigen;
pub mod error;
pub mod model;
pub mod qmc;
pub mod quad;
pub mod rotor;
pub mod sparse;
pub mod sphere;
pub mod stats;

pub use error::{Error, Result};
pub use model::{AngularBasisState, Boundary, ModelParams};
pub use sparse::SparseHermitian;
pub use stats::MCEstimate;
