//! Finite-cutoff scalar-field formulation.

pub mod evolve;
pub mod hamiltonian;
pub mod radial;

pub use evolve::{evolve_return_probability_mc, o3_return_probability, ReturnProbabilityOracle, ReturnTarget};
pub use hamiltonian::{build_sphere_hamiltonian, sphere_ed, SphereEdResult};
pub use radial::{radial_moments, vacuum_overlap, RadialMoments, RadialTable, SphereBasisSpec};
