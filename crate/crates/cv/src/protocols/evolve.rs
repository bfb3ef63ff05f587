//! First-order Trotter evolution and the vacuum return probability.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mode, ProtocolConfig, KINETIC_PAIRS};
use crate::error::{invalid, Result};
use crate::gate::{CompiledGate, GateKind};
use crate::register::QumodeRegister;

struct StepGates {
    bs: CompiledGate,
    bs_inv: CompiledGate,
    quad: CompiledGate,
    fourier: CompiledGate,
    fourier_inv: CompiledGate,
    kerr: CompiledGate,
    cross_kerr: CompiledGate,
}

impl StepGates {
    fn new(n: usize, dt: f64, g_sq: f64) -> Result<Self> {
        let one = |k| CompiledGate::compile(k, &[n]);
        let two = |k| CompiledGate::compile(k, &[n, n]);
        Ok(StepGates {
            bs: two(GateKind::BeamSplitter(FRAC_PI_4))?,
            bs_inv: two(GateKind::BeamSplitter(-FRAC_PI_4))?,
            quad: one(GateKind::QuadPhase(-2.0 * dt))?,
            fourier: one(GateKind::Fourier)?,
            fourier_inv: one(GateKind::Rotate(-FRAC_PI_2))?,
            kerr: one(GateKind::Kerr(-dt / (2.0 * g_sq)))?,
            cross_kerr: two(GateKind::CrossKerr(dt / g_sq))?,
        })
    }
}

/// Applies `trotter_steps` steps of length `cfg.dt`, each the interaction
/// layer followed by the kinetic layer.
pub fn trotter_evolve(reg: &mut QumodeRegister, cfg: &ProtocolConfig) -> Result<()> {
    cfg.validate()?;
    if reg.n_modes() != cfg.n_modes() || reg.dims().iter().any(|&d| d != cfg.n_max) {
        return Err(invalid(format!("register dims {:?} do not match {} modes at n_max {}", reg.dims(), cfg.n_modes(), cfg.n_max)));
    }
    if cfg.dt == 0.0 {
        return Ok(());
    }
    let g = StepGates::new(cfg.n_max, cfg.dt, cfg.params.g_sq)?;
    let links = cfg.params.links();
    for _ in 0..cfg.trotter_steps {
        // exp(−iΔt (φ_a(x) − φ_a(y))²/2) in the beam-split frame
        for &(x, y) in &links {
            for a in 0..3 {
                let (u, v) = (mode(x, a), mode(y, a));
                reg.apply_compiled(&g.bs, &[u, v])?;
                reg.apply_compiled(&g.quad, &[u])?;
                reg.apply_compiled(&g.bs_inv, &[u, v])?;
            }
        }
        // exp(−iΔt L_c²/(2g²)) with L_c = N_b − N_a after Fourier and beam splitter
        for x in 0..cfg.params.n_sites {
            for &(a, b, _) in &KINETIC_PAIRS {
                let (u, v) = (mode(x, a), mode(x, b));
                reg.apply_compiled(&g.fourier, &[u])?;
                reg.apply_compiled(&g.bs, &[u, v])?;
                reg.apply_compiled(&g.kerr, &[u])?;
                reg.apply_compiled(&g.kerr, &[v])?;
                reg.apply_compiled(&g.cross_kerr, &[u, v])?;
                reg.apply_compiled(&g.bs_inv, &[u, v])?;
                reg.apply_compiled(&g.fourier_inv, &[u])?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnProbability {
    pub t: f64,
    pub probability: f64,
    pub success_probability: f64,
    pub leakage: f64,
    pub trotter_steps: usize,
}

fn evolve_from(start: &QumodeRegister, cfg: &ProtocolConfig, t: f64) -> Result<ReturnProbability> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("time must be finite and non-negative, got {t}")));
    }
    let mut step = cfg.clone();
    step.dt = t / cfg.trotter_steps as f64;
    let mut reg = start.clone();
    trotter_evolve(&mut reg, &step)?;
    let probability = reg.amplitudes()[0].norm_sqr() / reg.norm_sq();
    Ok(ReturnProbability {
        t,
        probability,
        success_probability: reg.success_probability(),
        leakage: reg.leakage(),
        trotter_steps: cfg.trotter_steps,
    })
}

/// Probability of finding the photon-number vacuum after evolving `|Ω(Λ)⟩`
/// for time `t` in `cfg.trotter_steps` steps.
pub fn return_probability(cfg: &ProtocolConfig, t: f64) -> Result<ReturnProbability> {
    let start = super::prep::omega_product(cfg)?;
    evolve_from(&start, cfg, t)
}

/// [`return_probability`] at several times, sharing one prepared state.
pub fn return_probability_curve(cfg: &ProtocolConfig, times: &[f64]) -> Result<Vec<ReturnProbability>> {
    let start = super::prep::omega_product(cfg)?;
    times.par_iter().map(|&t| evolve_from(&start, cfg, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::prep::omega_product;
    use approx::assert_abs_diff_eq;
    use sigma_core::sphere::{vacuum_overlap, SphereBasisSpec};
    use sigma_core::ModelParams;

    fn cfg(n_max: usize, steps: usize) -> ProtocolConfig {
        let p = ModelParams::new(2, 1.0, 3).unwrap();
        let mut c = ProtocolConfig::new(p, SphereBasisSpec::new(1.0, 1.0).unwrap(), n_max);
        c.trotter_steps = steps;
        c.leakage_limit = None;
        c
    }

    #[test]
    fn zero_step_is_identity() {
        let c = cfg(4, 3);
        let start = omega_product(&c).unwrap();
        let mut r = start.clone();
        trotter_evolve(&mut r, &c).unwrap();
        assert_abs_diff_eq!(r.overlap(&start).unwrap().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn kinetic_only_layers_preserve_norm() {
        // with a vanishing interaction step the beam splitters still act; the
        // diagonal gates themselves must not change the norm
        let mut c = cfg(5, 1);
        c.dt = 0.4;
        let mut r = omega_product(&c).unwrap();
        let n0 = r.norm_sq();
        trotter_evolve(&mut r, &c).unwrap();
        assert_abs_diff_eq!(r.norm_sq(), n0, epsilon = 1e-10);
    }

    #[test]
    fn initial_probability_is_vacuum_overlap() {
        let c = cfg(8, 1);
        let rp = return_probability(&c, 0.0).unwrap();
        let exact = vacuum_overlap(&c.spec).unwrap().powi(4);
        assert!((rp.probability - exact).abs() < 0.02, "{} vs {exact}", rp.probability);
    }

    #[test]
    fn step_refinement_converges() {
        let t = 0.6;
        let p: Vec<f64> = [2, 4, 8]
            .iter()
            .map(|&s| return_probability(&cfg(5, s), t).unwrap().probability)
            .collect();
        let (d1, d2) = ((p[1] - p[0]).abs(), (p[2] - p[1]).abs());
        assert!(d2 < d1 / 1.8, "{p:?}");
    }
}
