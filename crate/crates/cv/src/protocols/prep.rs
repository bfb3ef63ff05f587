//! State preparation by post-selected ancillas.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{mode, ProtocolConfig};
use crate::error::Result;
use crate::gate::{CompiledGate, GateKind};
use crate::ops::{kron, momentum, position, CMatrix};
use crate::register::QumodeRegister;

/// How `exp(−is q_a² p_b)` is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaPrep {
    /// Fourier, cubic-phase and beam-splitter gates.
    #[default]
    Decomposed,
    /// The two-mode generator exponentiated directly.
    Direct,
}

/// `exp(−is q_a² p_b)` as a sequence of catalogue gates, listed in
/// application order with `(gate, targets)` where `0 = a`, `1 = b`.
///
/// Built from `6q²p = (q+p)³ − (q−p)³ − 2p³` with the Fourier gate turning
/// `q_b` into `−p_b`; the lone `p_b³` phase therefore enters with the sign
/// opposite to the two beam-split cubic phases.
pub fn uab_sequence(s: f64, n: usize) -> Result<Vec<(CompiledGate, [usize; 2], usize)>> {
    let single = |k: GateKind| CompiledGate::compile(k, &[n]);
    let bs = CompiledGate::compile(GateKind::BeamSplitter(FRAC_PI_4), &[n, n])?;
    Ok(vec![
        (single(GateKind::Fourier)?, [1, 0], 1),
        (single(GateKind::CubicPhase(-s))?, [1, 0], 1),
        (bs.clone(), [0, 1], 2),
        (single(GateKind::CubicPhase(SQRT_2 * s))?, [1, 0], 1),
        (single(GateKind::CubicPhase(-SQRT_2 * s))?, [0, 1], 1),
        (bs, [1, 0], 2),
        (single(GateKind::Rotate(-FRAC_PI_2))?, [1, 0], 1),
    ])
}

pub fn uab_direct(s: f64, n: usize) -> Result<CompiledGate> {
    CompiledGate::from_generator(
        &[n, n],
        |d| {
            let q = position(d[0]);
            kron(&(&q * &q), &momentum(d[1])) * num_complex::Complex64::new(-s, 0.0)
        },
        "u_ab",
    )
}

fn apply_uab(reg: &mut QumodeRegister, a: usize, b: usize, s: f64, n: usize, how: OmegaPrep) -> Result<()> {
    match how {
        OmegaPrep::Decomposed => {
            let modes = [a, b];
            for (g, t, arity) in uab_sequence(s, n)? {
                let targets: Vec<usize> = t[..arity].iter().map(|&k| modes[k]).collect();
                reg.apply_compiled(&g, &targets)?;
            }
        }
        OmegaPrep::Direct => {
            reg.apply_compiled(&uab_direct(s, n)?, &[a, b])?;
        }
    }
    Ok(())
}

/// Three-mode state of one site with radial profile `ψ_Λ`.
///
/// Each field mode shifts a shared ancilla by `Λq²/(√2g)`; the ancilla is
/// moved back by `gΛ(1 + 2/Λ²)/√2` and post-selected on `|0⟩`. The success
/// probability is kept on the returned register.
pub fn prepare_omega_site(cfg: &ProtocolConfig) -> Result<QumodeRegister> {
    cfg.validate()?;
    let n = cfg.n_max;
    let (lam, g) = (cfg.spec.lambda_cutoff, cfg.spec.g);
    let mut reg = QumodeRegister::vacuum(4, n)?;
    reg.set_leakage_limit(cfg.leakage_limit);
    let s = lam / (SQRT_2 * g);
    for a in 0..3 {
        apply_uab(&mut reg, a, 3, s, n, cfg.omega_prep)?;
    }
    let shift = g * lam * (1.0 + 2.0 / (lam * lam)) / SQRT_2;
    reg.apply_compiled(&CompiledGate::compile(GateKind::Displace(-shift), &[n])?, &[3])?;
    Ok(reg.project_mode(3, 0)?.0)
}

/// `|Ω(Λ)⟩` on all `3L` modes.
pub fn omega_product(cfg: &ProtocolConfig) -> Result<QumodeRegister> {
    let site = prepare_omega_site(cfg)?;
    let mut reg = site.clone();
    for _ in 1..cfg.params.n_sites {
        reg = reg.tensor(&site)?;
    }
    Ok(reg)
}

/// Map on the field pair `(u, v)` from attaching a vacuum ancilla, applying
/// `CX(s)` from `u` and `CX(−s)` from `v`, and keeping the ancilla's `|0⟩`.
///
/// Also returns the single-mode leakage operators for the incoming `u` side
/// and the outgoing `v` side.
pub(crate) fn link_kraus(n: usize, s: f64) -> Result<(CompiledGate, Option<CMatrix>, Option<CMatrix>)> {
    let g1 = CompiledGate::compile(GateKind::CX(s), &[n, n])?;
    let g2 = CompiledGate::compile(GateKind::CX(-s), &[n, n])?;
    let (u1, u2) = (g1.matrix(), g2.matrix());
    let mut k = CMatrix::zeros(n * n, n * n);
    for ip in 0..n {
        for jp in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = num_complex::Complex64::new(0.0, 0.0);
                    for c in 0..n {
                        acc += u1[(ip * n + c, i * n)] * u2[(jp * n, j * n + c)];
                    }
                    k[(ip * n + jp, i * n + j)] = acc;
                }
            }
        }
    }
    let vac_block = |m: CMatrix| CMatrix::from_fn(n, n, |r, c| m[(r * n, c * n)]);
    Ok((
        CompiledGate::from_matrix(&[n, n], &k, "cc_link")?,
        g1.leakage_operator().map(vac_block),
        g2.leakage_operator().map(vac_block),
    ))
}

/// Multiplies by `exp(−(α/2L)(φ(x) − φ(y))²)` for every link.
pub fn apply_cc_entangler(reg: &mut QumodeRegister, cfg: &ProtocolConfig, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(crate::error::invalid(format!("alpha must be non-negative, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(());
    }
    let s = (2.0 * alpha / cfg.params.n_sites as f64).sqrt();
    let (kraus, leak_u, leak_v) = link_kraus(cfg.n_max, s)?;
    for (x, y) in cfg.params.links() {
        for a in 0..3 {
            let (u, v) = (mode(x, a), mode(y, a));
            let before = match &leak_u {
                Some(m) => reg.expectation(&[u], m)?.re.max(0.0).sqrt(),
                None => 0.0,
            };
            reg.apply_kraus(&kraus, &[u, v])?;
            let after = match &leak_v {
                Some(m) => reg.expectation(&[v], m)?.re.max(0.0).sqrt(),
                None => 0.0,
            };
            reg.record_leakage(before + after, 2)?;
        }
    }
    Ok(())
}

/// Coupled-cluster ground state at parameter `alpha`.
pub fn prepare_cc(cfg: &ProtocolConfig, alpha: f64) -> Result<QumodeRegister> {
    let mut reg = omega_product(cfg)?;
    apply_cc_entangler(&mut reg, cfg, alpha)?;
    Ok(reg)
}

/// Coupled-cluster first excited state: `Σ_x φ₃(x)` inserted through a
/// shared ancilla kept on `|1⟩`, then the ground-state entangler.
pub fn prepare_cc_excited(cfg: &ProtocolConfig, alpha: f64) -> Result<QumodeRegister> {
    let d_anc = cfg.ancilla_dim.unwrap_or(cfg.n_max);
    let mut reg = omega_product(cfg)?.append_vacuum(d_anc)?;
    let anc = cfg.n_modes();
    let cx = CompiledGate::compile(GateKind::CX(cfg.gamma), &[cfg.n_max, d_anc])?;
    for x in 0..cfg.params.n_sites {
        reg.apply_compiled(&cx, &[mode(x, 2), anc])?;
    }
    let (mut reg, _) = reg.project_mode(anc, 1)?;
    apply_cc_entangler(&mut reg, cfg, alpha)?;
    Ok(reg)
}
