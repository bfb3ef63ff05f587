//! One experiment, one table.

use std::io::BufWriter;
use std::path::Path;

use serde_json::{json, Value};
use sigma_core::cc::{
    cc_energy_l2_closed_form, cc_energy_l2_quadrature, cc_excited_l2_closed_form, cc_optimize, minimize_alpha,
    CCConfig, CcIntegrator, CcState, OptimizeOptions, Sampler, DEFAULT_ALPHA_TOL,
};
use sigma_core::rotor::{build_rotor_hamiltonian, ed_summary};
use sigma_core::sphere::{
    build_sphere_hamiltonian, o3_return_probability, sphere_ed, ReturnProbabilityOracle, ReturnTarget,
    SphereBasisSpec,
};
use sigma_core::{MCEstimate, ModelParams, SparseHermitian};
use sigma_cv::protocols::{cv_energy, prepare_cc, prepare_cc_excited, return_probability_curve};

use crate::cache::radial_table;
use crate::compare::run_compare;
use crate::config::{Backend, CcMethod, CcSection, Command, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{num, Table};

/// Tighter than the Monte-Carlo default because closed-form evaluations are free.
const CLOSED_FORM_TOL: f64 = 1e-8;

pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let model = cfg.model.params()?;
    match cfg.command {
        Command::Ed => run_ed(cfg, &model),
        Command::Cc => run_cc(cfg, &model),
        Command::SphereEd => run_sphere_ed(cfg, &model),
        Command::CvEnergy => run_cv_energy(cfg, &model),
        Command::Evolve => run_evolve(cfg, &model),
        Command::Compare => run_compare(cfg, &model),
    }
}

fn export_hamiltonian(h: &SparseHermitian, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    h.write_triplets(BufWriter::new(f)).map_err(|e| CliError::io(path, e))
}

fn run_ed(cfg: &ExperimentConfig, model: &ModelParams) -> Result<Table> {
    if model.l_max < 2 {
        return Err(CliError::config("model.l_max", "ed reports a truncation error and needs l_max >= 2"));
    }
    if let Some(path) = &cfg.output.hamiltonian {
        export_hamiltonian(&build_rotor_hamiltonian(model)?, path)?;
    }
    let s = ed_summary(model)?;
    let mut t = Table::new(&[
        "n_sites",
        "g_sq",
        "l_max",
        "e0_per_site",
        "e0_truncation_error",
        "gap",
        "gap_truncation_error",
    ]);
    t.push(vec![
        json!(model.n_sites),
        num(model.g_sq),
        json!(model.l_max),
        num(s.e0_per_site),
        num(s.e0_truncation_error),
        num(s.gap),
        num(s.gap_truncation_error),
    ]);
    Ok(t)
}

/// Energy per site of one CC state, with α minimized when not fixed.
pub struct CcResult {
    pub alpha: f64,
    pub energy: MCEstimate,
}

pub fn resolve_method(cc: &CcSection, model: &ModelParams, lambda: Option<f64>) -> CcMethod {
    match cc.method {
        CcMethod::Auto if model.n_sites == 2 && lambda.is_none() => CcMethod::ClosedForm,
        CcMethod::Auto if model.n_sites == 2 => CcMethod::Quadrature,
        CcMethod::Auto => CcMethod::MonteCarlo,
        m => m,
    }
}

pub fn cc_state(
    cc: &CcSection,
    model: &ModelParams,
    spec: Option<&SphereBasisSpec>,
    state: CcState,
) -> Result<CcResult> {
    let lambda = spec.map(|s| s.lambda_cutoff);
    let g_sq = model.g_sq;
    let bracket = (0.0, 4.0 * g_sq);
    let deterministic = |f: &dyn Fn(f64) -> sigma_core::Result<f64>, tol: f64| -> Result<CcResult> {
        let alpha = match cc.alpha {
            Some(a) => a,
            None => minimize_alpha(f, bracket, tol)?.alpha,
        };
        Ok(CcResult {
            alpha,
            energy: MCEstimate::exact(f(alpha)?, 0),
        })
    };
    match resolve_method(cc, model, lambda) {
        CcMethod::ClosedForm => {
            let f = |a: f64| {
                Ok(match state {
                    CcState::Ground => cc_energy_l2_closed_form(g_sq, a),
                    CcState::Excited => cc_excited_l2_closed_form(g_sq, a),
                })
            };
            deterministic(&f, CLOSED_FORM_TOL)
        }
        CcMethod::Quadrature => {
            let f = |a: f64| cc_energy_l2_quadrature(g_sq, a, spec, state);
            deterministic(&f, DEFAULT_ALPHA_TOL)
        }
        CcMethod::MonteCarlo | CcMethod::Auto => {
            let integ = match spec {
                Some(s) => CcIntegrator::with_table(model, radial_table(s)?)?,
                None => CcIntegrator::new(model, None)?,
            };
            let mcfg = CCConfig {
                alpha: cc.alpha.unwrap_or(0.0),
                n_samples: cc.n_samples.unwrap_or_else(|| CCConfig::default_samples(g_sq)),
                sampler: cc.sampler.unwrap_or_else(|| Sampler::for_cutoff(lambda)),
                seed: cc.seed,
                lambda_cutoff: lambda,
                blocks: cc.blocks,
            };
            mcfg.validate(model).map_err(|e| CliError::from(e).at("cc"))?;
            if cc.alpha.is_some() {
                let energy = integ.estimate(&mcfg, state)?.energy;
                Ok(CcResult { alpha: mcfg.alpha, energy })
            } else {
                let opt = cc_optimize(&integ, &mcfg, state, &OptimizeOptions::for_coupling(g_sq))?;
                Ok(CcResult {
                    alpha: opt.alpha,
                    energy: opt.energy,
                })
            }
        }
    }
}

fn method_name(m: CcMethod) -> &'static str {
    match m {
        CcMethod::Auto => "auto",
        CcMethod::ClosedForm => "closed_form",
        CcMethod::Quadrature => "quadrature",
        CcMethod::MonteCarlo => "monte_carlo",
    }
}

/// Gap `L(E₁/L − E₀/L)` with independent errors combined in quadrature.
pub fn cc_gap(model: &ModelParams, e0: &MCEstimate, e1: &MCEstimate) -> (f64, f64) {
    let l = model.n_sites as f64;
    (l * (e1.mean - e0.mean), l * e0.stderr.hypot(e1.stderr))
}

fn run_cc(cfg: &ExperimentConfig, model: &ModelParams) -> Result<Table> {
    let cc = cfg.cc.as_ref().expect("validated");
    let spec = cfg.sphere.as_ref().map(|s| s.spec(model)).transpose()?;
    let method = method_name(resolve_method(cc, model, spec.map(|s| s.lambda_cutoff)));
    let e0 = cc_state(cc, model, spec.as_ref(), CcState::Ground)?;
    let e1 = cc_state(cc, model, spec.as_ref(), CcState::Excited)?;
    let (gap, gap_err) = cc_gap(model, &e0.energy, &e1.energy);
    let mut t = Table::new(&["quantity", "method", "alpha", "mean", "stderr", "n_samples", "seed"]);
    for (name, r) in [("e0_per_site", &e0), ("e1_per_site", &e1)] {
        t.push(vec![
            json!(name),
            json!(method),
            num(r.alpha),
            num(r.energy.mean),
            num(r.energy.stderr),
            json!(r.energy.n_samples),
            json!(cc.seed),
        ]);
    }
    t.push(vec![
        json!("gap"),
        json!(method),
        Value::Null,
        num(gap),
        num(gap_err),
        json!(e0.energy.n_samples),
        json!(cc.seed),
    ]);
    Ok(t)
}

fn run_sphere_ed(cfg: &ExperimentConfig, model: &ModelParams) -> Result<Table> {
    let spec = cfg.sphere.as_ref().expect("validated").spec(model)?;
    if let Some(path) = &cfg.output.hamiltonian {
        export_hamiltonian(&build_sphere_hamiltonian(model, &spec)?, path)?;
    }
    let r = sphere_ed(model, &spec)?;
    let mut t = Table::new(&["lambda_cutoff", "g_sq", "l_max", "e0_per_site", "gap"]);
    t.push(vec![
        num(r.lambda_cutoff),
        num(model.g_sq),
        json!(model.l_max),
        num(r.e0_per_site),
        num(r.gap),
    ]);
    Ok(t)
}

pub const CV_ENERGY_COLUMNS: [&str; 13] = [
    "n_max",
    "alpha",
    "state",
    "energy_per_site",
    "spread",
    "energy_x",
    "energy_y",
    "energy_z",
    "kinetic_per_site",
    "interaction_per_site",
    "half_gamma_shift",
    "success_probability",
    "leakage",
];

pub fn cv_energy_row(
    cfg: &sigma_cv::protocols::ProtocolConfig,
    section: &crate::config::ProtocolSection,
    alpha: f64,
) -> Result<Vec<Value>> {
    let reg = match section.state {
        CcState::Ground => prepare_cc(cfg, alpha)?,
        CcState::Excited => prepare_cc_excited(cfg, alpha)?,
    };
    let e = cv_energy(&reg, cfg, section.interaction, section.kinetic)?;
    Ok(vec![
        json!(cfg.n_max),
        num(alpha),
        serde_json::to_value(section.state).expect("enum serializes"),
        num(e.energy_per_site),
        num(e.spread),
        num(e.directional[0]),
        num(e.directional[1]),
        num(e.directional[2]),
        num(e.kinetic_per_site),
        num(e.interaction_per_site),
        num(e.half_gamma_shift),
        num(e.success_probability),
        num(e.leakage),
    ])
}

fn run_cv_energy(cfg: &ExperimentConfig, model: &ModelParams) -> Result<Table> {
    let spec = cfg.sphere.as_ref().expect("validated").spec(model)?;
    let section = cfg.protocol.as_ref().expect("validated");
    let pcfg = section.protocol(model, &spec)?;
    let mut t = Table::new(&CV_ENERGY_COLUMNS);
    t.push(cv_energy_row(&pcfg, section, section.alpha.expect("validated"))?);
    Ok(t)
}

pub const EVOLVE_COLUMNS: [&str; 5] = ["t", "probability", "stderr", "success_probability", "leakage"];

/// Return-probability curve for `model` at cutoff `spec` from the sampled
/// matrix evolution.
pub fn matrix_mc_curve(
    model: &ModelParams,
    spec: &SphereBasisSpec,
    times: &[f64],
    samples: u64,
    seed: u64,
    target: ReturnTarget,
) -> Result<Vec<MCEstimate>> {
    let oracle = ReturnProbabilityOracle::with_table(model, radial_table(spec)?)?;
    let mut mcfg = CCConfig::new(0.0, samples, Some(spec.lambda_cutoff));
    mcfg.seed = seed;
    mcfg.blocks = mcfg.blocks.min(samples as usize);
    Ok(oracle.curve(times, &mcfg, target)?)
}

pub fn matrix_mc_trotter_curve(
    model: &ModelParams,
    spec: &SphereBasisSpec,
    times: &[f64],
    samples: u64,
    seed: u64,
    steps: usize,
) -> Result<Vec<MCEstimate>> {
    let oracle = ReturnProbabilityOracle::with_table(model, radial_table(spec)?)?;
    let mut mcfg = CCConfig::new(0.0, samples, Some(spec.lambda_cutoff));
    mcfg.seed = seed;
    mcfg.blocks = mcfg.blocks.min(samples as usize);
    Ok(oracle.trotter_curve(times, &mcfg, ReturnTarget::FockVacuum, steps)?)
}

fn run_evolve(cfg: &ExperimentConfig, model: &ModelParams) -> Result<Table> {
    let ev = cfg.evolve.as_ref().expect("validated");
    let mut t = Table::new(&EVOLVE_COLUMNS);
    match ev.backend {
        Backend::O3 => {
            for (time, p) in ev.times.iter().zip(o3_return_probability(model, &ev.times)?) {
                t.push(vec![num(*time), num(p), num(0.0), num(1.0), num(0.0)]);
            }
        }
        Backend::MatrixMc => {
            let spec = cfg.sphere.as_ref().expect("validated").spec(model)?;
            let target = ev.target.unwrap_or(ReturnTarget::Omega);
            let est = matrix_mc_curve(model, &spec, &ev.times, ev.samples, ev.seed, target)?;
            for (time, e) in ev.times.iter().zip(est) {
                t.push(vec![num(*time), num(e.mean), num(e.stderr), num(1.0), num(0.0)]);
            }
        }
        Backend::Cv => {
            let spec = cfg.sphere.as_ref().expect("validated").spec(model)?;
            let pcfg = cfg.protocol.as_ref().expect("validated").protocol(model, &spec)?;
            for r in return_probability_curve(&pcfg, &ev.times)? {
                t.push(vec![num(r.t), num(r.probability), Value::Null, num(r.success_probability), num(r.leakage)]);
            }
        }
    }
    Ok(t)
}
