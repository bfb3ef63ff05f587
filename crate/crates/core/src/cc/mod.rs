//! Coupled-cluster variational energies.

pub mod closed_form;
pub mod l2;
pub mod mc;
pub mod minimize;

use serde::{Deserialize, Serialize};

pub use closed_form::{cc_energy_l2_closed_form, cc_excited_l2_closed_form};
pub use l2::cc_energy_l2_quadrature;
pub use mc::{cc_energy_mc, cc_excited_mc, CCConfig, CcEstimate, CcIntegrator, Sampler};
pub use minimize::{minimize_alpha, Minimum, DEFAULT_ALPHA_TOL};

use crate::error::Result;
use crate::stats::MCEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcState {
    Ground,
    Excited,
}

/// Result of the two-stage procedure: α from a deterministic quasi-MC
/// objective, then a stochastic estimate at that α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcOptimum {
    pub alpha: f64,
    pub at_boundary: bool,
    pub energy: MCEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub bracket: (f64, f64),
    pub qmc_points: u64,
    pub tol: f64,
}

impl OptimizeOptions {
    /// Bracket [0, 4g²], 2¹⁶ Halton points, 10⁻⁴ in α.
    pub fn for_coupling(g_sq: f64) -> Self {
        OptimizeOptions {
            bracket: (0.0, 4.0 * g_sq),
            qmc_points: 1 << 16,
            tol: DEFAULT_ALPHA_TOL,
        }
    }
}

pub fn cc_optimize(integ: &CcIntegrator, cfg: &CCConfig, state: CcState, opts: &OptimizeOptions) -> Result<CcOptimum> {
    let mut qcfg = cfg.clone();
    qcfg.sampler = Sampler::QuasiMc;
    qcfg.n_samples = opts.qmc_points;
    let m = minimize_alpha(
        |a| {
            let mut c = qcfg.clone();
            c.alpha = a;
            Ok(integ.estimate(&c, state)?.energy.mean)
        },
        opts.bracket,
        opts.tol,
    )?;
    let mut fcfg = cfg.clone();
    fcfg.alpha = m.alpha;
    Ok(CcOptimum {
        alpha: m.alpha,
        at_boundary: m.at_boundary,
        energy: integ.estimate(&fcfg, state)?.energy,
    })
}
