//! Finite-cutoff Hamiltonian `H = Σ L²/(2g²) + Σ_links [½(φ(x)−φ(x+1))² − g²]`
//! in the `|l, m; Λ⟩` product basis.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{ModelParams, DEFAULT_DIM_CAP};
use crate::rotor::{casimir_diagonal, interaction_operator, lowest_two_m0};
use crate::sparse::SparseHermitian;
use crate::sphere::radial::{radial_moments, RadialMoments, SphereBasisSpec};

pub(crate) fn check_spec(params: &ModelParams, spec: &SphereBasisSpec) -> Result<()> {
    params.validate()?;
    spec.validate()?;
    if (spec.g * spec.g - params.g_sq).abs() > 1e-10 * params.g_sq {
        return Err(invalid(format!(
            "spec radius g = {} inconsistent with g² = {}",
            spec.g, params.g_sq
        )));
    }
    Ok(())
}

/// Every basis state shares one radial profile, so each link contributes
/// `⟨r²⟩ − g²` on the diagonal and `−⟨r⟩² n(x)·n(y)` off it.
pub fn build_sphere_hamiltonian_with(
    params: &ModelParams,
    moments: &RadialMoments,
    cap: usize,
) -> Result<SparseHermitian> {
    let n_links = params.links().len() as f64;
    let shift = n_links * (moments.r2() - params.g_sq);
    let diag: Vec<f64> = casimir_diagonal(params, cap)?
        .into_iter()
        .map(|c| c / (2.0 * params.g_sq) + shift)
        .collect();
    let nn = interaction_operator(params, cap)?;
    SparseHermitian::linear_combination(&[(&nn, -moments.r1_sq())], Some(&diag))
}

pub fn build_sphere_hamiltonian(params: &ModelParams, spec: &SphereBasisSpec) -> Result<SparseHermitian> {
    check_spec(params, spec)?;
    build_sphere_hamiltonian_with(params, &radial_moments(spec)?, DEFAULT_DIM_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereEdResult {
    pub lambda_cutoff: f64,
    pub e0_per_site: f64,
    pub gap: f64,
}

pub fn sphere_ed(params: &ModelParams, spec: &SphereBasisSpec) -> Result<SphereEdResult> {
    let h = build_sphere_hamiltonian(params, spec)?;
    let (e0, e1) = lowest_two_m0(params, &h)?;
    Ok(SphereEdResult {
        lambda_cutoff: spec.lambda_cutoff,
        e0_per_site: e0 / params.n_sites as f64,
        gap: e1 - e0,
    })
}
