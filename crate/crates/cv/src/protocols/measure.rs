//! Energy estimators built from photon-number statistics.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mode, ProtocolConfig, KINETIC_PAIRS};
use crate::error::{invalid, Result};
use crate::gate::{CompiledGate, GateKind};
use crate::ops::CMatrix;
use crate::register::QumodeRegister;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionMethod {
    /// `⟨q²⟩ = (⟨N⟩_Γ + ⟨N⟩_{−Γ} − 2⟨N⟩_0)/Γ²` with quadratic-phase shifts.
    #[default]
    ParameterShift,
    /// `⟨q²⟩ = 2⟨N_c⟩/Γ²` after `CX(Γ)` onto a vacuum ancilla.
    CxAncilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KineticMethod {
    /// `⟨(N_b − N_a)²⟩` after Fourier and beam splitter.
    Pairwise,
    /// `2(⟨N_a²⟩ + ⟨N_b²⟩)` after the transform minus `⟨(N_a + N_b)²⟩` before.
    #[default]
    Split,
}

struct Branch {
    value: f64,
    leakage: f64,
}

fn branch_leak(before: &QumodeRegister, after: &QumodeRegister) -> f64 {
    after.leakage() - before.leakage()
}

/// `⟨q_m²⟩` with the chosen identity; `reg` is left untouched.
pub fn q_squared(reg: &QumodeRegister, m: usize, method: InteractionMethod, gamma: f64) -> Result<(f64, f64)> {
    if !(gamma.is_finite() && gamma != 0.0) {
        return Err(invalid("measurement strength must be finite and non-zero"));
    }
    let d = reg.dims()[m];
    match method {
        InteractionMethod::ParameterShift => {
            let n0 = reg.expectation_number(m);
            let mut shifted = [0.0; 2];
            let mut leak = 0.0;
            for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
                let mut r = reg.clone();
                r.apply_compiled(&CompiledGate::compile(GateKind::QuadPhase(sign * gamma), &[d])?, &[m])?;
                shifted[k] = r.expectation_number(m);
                leak += branch_leak(reg, &r);
            }
            Ok(((shifted[0] + shifted[1] - 2.0 * n0) / (gamma * gamma), leak))
        }
        InteractionMethod::CxAncilla => {
            let cx = CompiledGate::compile(GateKind::CX(gamma), &[d, d])?;
            let u = cx.matrix();
            // ancilla number after CX from |ψ⟩|0⟩: Σ_c c K_c†K_c, K_c = ⟨c|U|0⟩
            let mut nc = CMatrix::zeros(d, d);
            for c in 1..d {
                let k = CMatrix::from_fn(d, d, |r, col| u[(r * d + c, col * d)]);
                nc += k.adjoint() * k * Complex64::new(c as f64, 0.0);
            }
            let n_anc = reg.expectation(&[m], &nc)?.re;
            let leak = match cx.leakage_operator() {
                Some(e) => {
                    let vac = CMatrix::from_fn(d, d, |r, col| e[(r * d, col * d)]);
                    reg.expectation(&[m], &vac)?.re.max(0.0).sqrt()
                }
                None => 0.0,
            };
            Ok((2.0 * n_anc / (gamma * gamma), leak))
        }
    }
}

fn interaction_branches(
    reg: &QumodeRegister,
    cfg: &ProtocolConfig,
    method: InteractionMethod,
    gamma: f64,
) -> Result<Vec<(usize, Branch)>> {
    if reg.n_modes() != cfg.n_modes() {
        return Err(invalid(format!("register has {} modes, model needs {}", reg.n_modes(), cfg.n_modes())));
    }
    let tasks: Vec<(usize, usize, usize)> = cfg
        .params
        .links()
        .into_iter()
        .flat_map(|(x, y)| (0..3).map(move |a| (x, y, a)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(x, y, a)| {
            let (u, v) = (mode(x, a), mode(y, a));
            let bs = CompiledGate::compile(GateKind::BeamSplitter(FRAC_PI_4), &[reg.dims()[u], reg.dims()[v]])?;
            let mut r = reg.clone();
            r.apply_compiled(&bs, &[u, v])?;
            let (q2, leak) = q_squared(&r, u, method, gamma)?;
            Ok((a, Branch { value: q2, leakage: branch_leak(reg, &r) + leak }))
        })
        .collect()
}

/// `Σ_links ½⟨(φ_a(x) − φ_a(y))²⟩` for each component `a`, and the leakage
/// accumulated by the measurement circuits.
pub fn interaction_components(
    reg: &QumodeRegister,
    cfg: &ProtocolConfig,
    method: InteractionMethod,
) -> Result<([f64; 3], f64)> {
    collect(interaction_branches(reg, cfg, method, cfg.capital_gamma)?)
}

fn collect(branches: Vec<(usize, Branch)>) -> Result<([f64; 3], f64)> {
    let mut out = [0.0; 3];
    let mut leak = 0.0;
    for (a, b) in branches {
        out[a] += b.value;
        leak += b.leakage;
    }
    Ok((out, leak))
}

/// `Σ_x ½⟨(φ(x) − φ(x+1))²⟩` summed over links.
pub fn measure_interaction_energy(reg: &QumodeRegister, cfg: &ProtocolConfig, method: InteractionMethod) -> Result<f64> {
    Ok(interaction_components(reg, cfg, method)?.0.iter().sum())
}

/// `⟨L_c²⟩` for one site, reading the pair `(a, b)` with `L_c = q_a p_b − q_b p_a`.
pub fn angular_momentum_sq(reg: &QumodeRegister, a: usize, b: usize, method: KineticMethod) -> Result<(f64, f64)> {
    let mut r = reg.clone();
    r.apply_compiled(&CompiledGate::compile(GateKind::Fourier, &[reg.dims()[a]])?, &[a])?;
    let bs = CompiledGate::compile(GateKind::BeamSplitter(FRAC_PI_4), &[reg.dims()[a], reg.dims()[b]])?;
    r.apply_compiled(&bs, &[a, b])?;
    let (na2, nb2) = (r.expectation_number_sq(a), r.expectation_number_sq(b));
    let v = match method {
        KineticMethod::Pairwise => na2 + nb2 - 2.0 * r.expectation_cross_number(a, b),
        KineticMethod::Split => 2.0 * (na2 + nb2) - reg.expectation_pair_number_sq(a, b),
    };
    Ok((v, branch_leak(reg, &r)))
}

/// `Σ_x ⟨L_c²(x)⟩` for `c = 1, 2, 3` and the measurement leakage.
pub fn kinetic_components(reg: &QumodeRegister, cfg: &ProtocolConfig, method: KineticMethod) -> Result<([f64; 3], f64)> {
    if reg.n_modes() != cfg.n_modes() {
        return Err(invalid(format!("register has {} modes, model needs {}", reg.n_modes(), cfg.n_modes())));
    }
    let tasks: Vec<(usize, usize, usize, usize)> = (0..cfg.params.n_sites)
        .flat_map(|x| KINETIC_PAIRS.iter().map(move |&(a, b, c)| (x, a, b, c)))
        .collect();
    let branches = tasks
        .into_par_iter()
        .map(|(x, a, b, c)| {
            let (v, leak) = angular_momentum_sq(reg, mode(x, a), mode(x, b), method)?;
            Ok((c, Branch { value: v, leakage: leak }))
        })
        .collect::<Result<Vec<_>>>()?;
    collect(branches)
}

/// `Σ_x ⟨L²(x)⟩/(2g²)`.
pub fn measure_kinetic_energy(reg: &QumodeRegister, cfg: &ProtocolConfig, method: KineticMethod) -> Result<f64> {
    Ok(kinetic_components(reg, cfg, method)?.0.iter().sum::<f64>() / (2.0 * cfg.params.g_sq))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvEnergy {
    pub energy_per_site: f64,
    /// Per-site energy read along each Cartesian direction, `3(K_a + V_a)`.
    pub directional: [f64; 3],
    /// Largest deviation of a directional value from the mean.
    pub spread: f64,
    pub kinetic_per_site: f64,
    pub interaction_per_site: f64,
    pub success_probability: f64,
    /// State-preparation plus measurement leakage.
    pub leakage: f64,
    /// Change in `energy_per_site` when the measurement strength is halved.
    pub half_gamma_shift: f64,
}

pub fn cv_energy(
    reg: &QumodeRegister,
    cfg: &ProtocolConfig,
    imethod: InteractionMethod,
    kmethod: KineticMethod,
) -> Result<CvEnergy> {
    cfg.validate()?;
    let l = cfg.params.n_sites as f64;
    let n_links = cfg.params.links().len() as f64;
    let g_sq = cfg.params.g_sq;
    let (kin, kleak) = kinetic_components(reg, cfg, kmethod)?;
    let (int, ileak) = interaction_components(reg, cfg, imethod)?;
    let (int_half, _) = collect(interaction_branches(reg, cfg, imethod, 0.5 * cfg.capital_gamma)?)?;
    let constant = n_links * g_sq;
    let kinetic: f64 = kin.iter().sum::<f64>() / (2.0 * g_sq);
    let interaction: f64 = int.iter().sum();
    let energy = (kinetic + interaction - constant) / l;
    let half = (kinetic + int_half.iter().sum::<f64>() - constant) / l;
    let directional: [f64; 3] = std::array::from_fn(|a| (3.0 * (kin[a] / (2.0 * g_sq) + int[a]) - constant) / l);
    let spread = directional.iter().map(|e| (e - energy).abs()).fold(0.0, f64::max);
    Ok(CvEnergy {
        energy_per_site: energy,
        directional,
        spread,
        kinetic_per_site: kinetic / l,
        interaction_per_site: (interaction - constant) / l,
        success_probability: reg.success_probability(),
        leakage: reg.leakage() + kleak + ileak,
        half_gamma_shift: half - energy,
    })
}
