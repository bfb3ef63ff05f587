//! Sigma-model circuits on qumodes: three modes per lattice site, mode
//! `3x + a` carrying field component `a` at site `x`.

use serde::{Deserialize, Serialize};
use sigma_core::sphere::SphereBasisSpec;
use sigma_core::ModelParams;

use crate::error::{invalid, Result};
use crate::register::DEFAULT_LEAKAGE_LIMIT;

pub mod evolve;
pub mod measure;
pub mod prep;

pub use evolve::{return_probability, return_probability_curve, trotter_evolve, ReturnProbability};
pub use measure::{
    cv_energy, interaction_components, kinetic_components, measure_interaction_energy, measure_kinetic_energy,
    CvEnergy, InteractionMethod, KineticMethod,
};
pub use prep::{omega_product, prepare_cc, prepare_cc_excited, prepare_omega_site, OmegaPrep};

/// Kinetic pairs `(a, b)` and the angular-momentum component they measure.
pub(crate) const KINETIC_PAIRS: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

pub(crate) fn mode(x: usize, a: usize) -> usize {
    3 * x + a
}

fn default_gamma() -> f64 {
    1e-3
}

fn default_capital_gamma() -> f64 {
    0.1
}

fn default_steps() -> usize {
    1
}

fn default_leakage_limit() -> Option<f64> {
    Some(DEFAULT_LEAKAGE_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub params: ModelParams,
    pub spec: SphereBasisSpec,
    pub n_max: usize,
    /// Excited-state ancilla coupling.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Measurement gate strength.
    #[serde(default = "default_capital_gamma")]
    pub capital_gamma: f64,
    #[serde(default)]
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub trotter_steps: usize,
    /// `null` disables the abort; leakage is still accumulated.
    #[serde(default = "default_leakage_limit")]
    pub leakage_limit: Option<f64>,
    #[serde(default)]
    pub omega_prep: OmegaPrep,
    /// Fock cutoff of the excited-state ancilla; defaults to `n_max`.
    #[serde(default)]
    pub ancilla_dim: Option<usize>,
}

impl ProtocolConfig {
    pub fn new(params: ModelParams, spec: SphereBasisSpec, n_max: usize) -> Self {
        ProtocolConfig {
            params,
            spec,
            n_max,
            gamma: default_gamma(),
            capital_gamma: default_capital_gamma(),
            dt: 0.0,
            trotter_steps: 1,
            leakage_limit: default_leakage_limit(),
            omega_prep: OmegaPrep::default(),
            ancilla_dim: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.spec.validate()?;
        let g = self.params.g();
        if (self.spec.g - g).abs() > 1e-12 * g {
            return Err(invalid(format!("spec.g = {} but the model has g = {g}", self.spec.g)));
        }
        if self.n_max < 2 {
            return Err(invalid("n_max must be at least 2"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(invalid("gamma must be positive"));
        }
        if !(self.capital_gamma.is_finite() && self.capital_gamma != 0.0) {
            return Err(invalid("capital_gamma must be finite and non-zero"));
        }
        if !self.dt.is_finite() {
            return Err(invalid("dt must be finite"));
        }
        if self.trotter_steps == 0 {
            return Err(invalid("trotter_steps must be at least 1"));
        }
        if matches!(self.ancilla_dim, Some(d) if d < 2) {
            return Err(invalid("ancilla_dim must be at least 2"));
        }
        Ok(())
    }

    pub fn n_modes(&self) -> usize {
        3 * self.params.n_sites
    }
}
