//! Cross-method comparison tables, selected by figure number.

use rayon::prelude::*;
use serde_json::{json, Value};
use sigma_core::cc::{cc_energy_l2_quadrature, minimize_alpha, CcState, DEFAULT_ALPHA_TOL};
use sigma_core::rotor::{build_rotor_hamiltonian, ed_summary, lowest_two_m0};
use sigma_core::sphere::{o3_return_probability, sphere_ed, ReturnTarget, SphereBasisSpec};
use sigma_core::ModelParams;
use sigma_cv::protocols::{return_probability_curve, KineticMethod};

use crate::config::{CcMethod, CcSection, CompareSection, ExperimentConfig, ProtocolSection};
use crate::error::{CliError, Result};
use crate::output::{num, Table};
use crate::run::{cc_gap, cc_state, cv_energy_row, matrix_mc_curve, matrix_mc_trotter_curve, CV_ENERGY_COLUMNS};

const FIG1_G_SQ: [f64; 8] = [0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0];
const FINITE_CUTOFF_G_SQ: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
const FIG2_LAMBDAS: [f64; 3] = [1.0, 3.2, 10.0];
const FIG4_LAMBDAS: [f64; 8] = [1.0, 2.0, 3.2, 4.5, 6.3, 10.0, 14.0, 20.0];
const FIG8_LAMBDAS: [f64; 6] = [3.2, 4.5, 6.3, 10.0, 14.0, 20.0];
const LARGE_L_SITES: [usize; 4] = [2, 3, 4, 5];
const CV_N_MAX: [usize; 3] = [8, 10, 12];

fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|i| from + step * i as f64).collect()
}

fn need_two_sites(model: &ModelParams, fig: u32) -> Result<()> {
    if model.n_sites != 2 {
        return Err(CliError::config(
            "model.n_sites",
            format!("figure {fig} compares against two-site results; set n_sites = 2"),
        ));
    }
    Ok(())
}

pub fn run_compare(cfg: &ExperimentConfig, model: &ModelParams) -> Result<Table> {
    let cmp = cfg.compare.as_ref().expect("validated");
    match cmp.fig {
        1 => fig1(cmp, model),
        2 | 3 => fig_finite_cutoff(cmp, model),
        4 => fig4(cmp, model),
        5 => fig5(cmp, model),
        8 => fig8(cmp, model),
        9 => fig9(cfg, cmp, model),
        10 => fig_cv_energy(cfg, cmp, model, KineticMethod::Pairwise),
        11 => fig_cv_energy(cfg, cmp, model, KineticMethod::Split),
        other => Err(CliError::config("compare.fig", format!("no comparison for figure {other}"))),
    }
}

fn closed_form() -> CcSection {
    CcSection {
        method: CcMethod::ClosedForm,
        ..CcSection::default()
    }
}

/// ED against the minimized closed-form CC energies.
fn fig1(cmp: &CompareSection, model: &ModelParams) -> Result<Table> {
    need_two_sites(model, 1)?;
    let g_values = cmp.g_sq_values.clone().unwrap_or_else(|| FIG1_G_SQ.to_vec());
    let rows: Vec<Vec<Value>> = g_values
        .par_iter()
        .map(|&g_sq| {
            let p = ModelParams { g_sq, ..model.clone() };
            p.validate()?;
            let ed = ed_summary(&p)?;
            let cc = closed_form();
            let e0 = cc_state(&cc, &p, None, CcState::Ground)?;
            let e1 = cc_state(&cc, &p, None, CcState::Excited)?;
            let (gap, _) = cc_gap(&p, &e0.energy, &e1.energy);
            Ok(vec![
                num(g_sq),
                num(ed.e0_per_site),
                num(ed.e0_truncation_error),
                num(e0.energy.mean),
                num(e0.alpha),
                num(ed.gap),
                num(ed.gap_truncation_error),
                num(gap),
                num(e1.alpha),
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "g_sq",
        "ed_e0_per_site",
        "ed_e0_error",
        "cc_e0_per_site",
        "cc_alpha",
        "ed_gap",
        "ed_gap_error",
        "cc_gap",
        "cc_excited_alpha",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Lowest two levels of the rotor model as `(E₀/L, gap)`.
fn o3_levels(p: &ModelParams) -> Result<(f64, f64)> {
    let (e0, e1) = lowest_two_m0(p, &build_rotor_hamiltonian(p)?)?;
    Ok((e0 / p.n_sites as f64, e1 - e0))
}

fn cutoff_levels(p: &ModelParams, lambda: f64) -> Result<(f64, f64)> {
    let r = sphere_ed(p, &SphereBasisSpec::new(lambda, p.g())?)?;
    Ok((r.e0_per_site, r.gap))
}

/// Finite-cutoff ground energy (figure 2) or gap (figure 3) against O(3).
fn fig_finite_cutoff(cmp: &CompareSection, model: &ModelParams) -> Result<Table> {
    let g_values = cmp.g_sq_values.clone().unwrap_or_else(|| FINITE_CUTOFF_G_SQ.to_vec());
    let lambdas = cmp.lambdas.clone().unwrap_or_else(|| FIG2_LAMBDAS.to_vec());
    let gap = cmp.fig == 3;
    let points: Vec<(f64, f64)> = g_values.iter().flat_map(|&g| lambdas.iter().map(move |&l| (g, l))).collect();
    let rows: Vec<Vec<Value>> = points
        .par_iter()
        .map(|&(g_sq, lambda)| {
            let p = ModelParams { g_sq, ..model.clone() };
            p.validate()?;
            let pick = |x: (f64, f64)| if gap { x.1 } else { x.0 };
            let v = pick(cutoff_levels(&p, lambda)?);
            let o3 = pick(o3_levels(&p)?);
            Ok(vec![num(g_sq), num(lambda), num(v), num(o3), num(v - o3)])
        })
        .collect::<Result<_>>()?;
    let name = if gap { "gap" } else { "e0_per_site" };
    let o3_name = format!("o3_{name}");
    let mut t = Table::new(&["g_sq", "lambda_cutoff", name, &o3_name, "deviation"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Cutoff scan at the model coupling.
fn fig4(cmp: &CompareSection, model: &ModelParams) -> Result<Table> {
    let lambdas = cmp.lambdas.clone().unwrap_or_else(|| FIG4_LAMBDAS.to_vec());
    let (o3_e0, o3_gap) = o3_levels(model)?;
    let rows: Vec<Vec<Value>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let (e0, gap) = cutoff_levels(model, lambda)?;
            Ok(vec![num(lambda), num(e0), num(gap), num(o3_e0), num(o3_gap)])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["lambda_cutoff", "e0_per_site", "gap", "o3_e0_per_site", "o3_gap"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Monte-Carlo CC gap against the number of sites.
fn fig5(cmp: &CompareSection, model: &ModelParams) -> Result<Table> {
    let sites = cmp.sites.clone().unwrap_or_else(|| LARGE_L_SITES.to_vec());
    let cc = CcSection {
        method: CcMethod::MonteCarlo,
        n_samples: Some(cmp.samples.unwrap_or(500_000)),
        seed: cmp.seed,
        alpha: cmp.alpha,
        ..CcSection::default()
    };
    let mut t = Table::new(&[
        "n_sites",
        "alpha",
        "e0_per_site",
        "e0_stderr",
        "excited_alpha",
        "e1_per_site",
        "e1_stderr",
        "gap",
        "gap_stderr",
    ]);
    for &n in &sites {
        let p = ModelParams { n_sites: n, ..model.clone() };
        p.validate().map_err(|e| CliError::from(e).at("compare.sites"))?;
        let e0 = cc_state(&cc, &p, None, CcState::Ground)?;
        let e1 = cc_state(&cc, &p, None, CcState::Excited)?;
        let (gap, err) = cc_gap(&p, &e0.energy, &e1.energy);
        t.push(vec![
            json!(n),
            num(e0.alpha),
            num(e0.energy.mean),
            num(e0.energy.stderr),
            num(e1.alpha),
            num(e1.energy.mean),
            num(e1.energy.stderr),
            num(gap),
            num(err),
        ]);
    }
    Ok(t)
}

/// Return probability of `|Ω(Λ)⟩` for several cutoffs, with the O(3) curve.
fn fig8(cmp: &CompareSection, model: &ModelParams) -> Result<Table> {
    let lambdas = cmp.lambdas.clone().unwrap_or_else(|| FIG8_LAMBDAS.to_vec());
    let times = cmp.times.clone().unwrap_or_else(|| grid(0.0, 4.0, 0.25));
    let samples = cmp.samples.unwrap_or(500_000);
    let o3 = o3_return_probability(model, &times)?;
    let mut t = Table::new(&["t", "lambda_cutoff", "probability", "stderr", "o3_probability"]);
    for &lambda in &lambdas {
        let spec = SphereBasisSpec::new(lambda, model.g()).map_err(|e| CliError::from(e).at("compare.lambdas"))?;
        let est = matrix_mc_curve(model, &spec, &times, samples, cmp.seed, ReturnTarget::Omega)?;
        for ((time, e), o) in times.iter().zip(est).zip(&o3) {
            t.push(vec![num(*time), num(lambda), num(e.mean), num(e.stderr), num(*o)]);
        }
    }
    Ok(t)
}

fn cv_cutoff(cfg: &ExperimentConfig, cmp: &CompareSection, model: &ModelParams, default: f64) -> Result<SphereBasisSpec> {
    match (&cfg.sphere, cmp.lambdas.as_deref()) {
        (Some(s), _) => s.spec(model),
        (None, Some([l, ..])) => SphereBasisSpec::new(*l, model.g()).map_err(|e| CliError::from(e).at("compare.lambdas")),
        _ => Ok(SphereBasisSpec::new(default, model.g())?),
    }
}

/// Protocol settings for one cutoff. Without a protocol section the
/// leakage abort is off and leakage is reported as a column instead.
fn protocol_at(cfg: &ExperimentConfig, n_max: usize) -> ProtocolSection {
    match &cfg.protocol {
        Some(p) => ProtocolSection { n_max, ..p.clone() },
        None => ProtocolSection {
            leakage_limit: None,
            ..ProtocolSection::with_n_max(n_max)
        },
    }
}

/// CV Trotter return probability against the sampled matrix evolution,
/// exact and split into the same number of steps, all projected on the
/// photon-number vacuum.
fn fig9(cfg: &ExperimentConfig, cmp: &CompareSection, model: &ModelParams) -> Result<Table> {
    let spec = cv_cutoff(cfg, cmp, model, 3.2)?;
    let times = cmp.times.clone().unwrap_or_else(|| grid(0.0, 2.0, 0.25));
    let n_values = cmp.n_max_values.clone().unwrap_or_else(|| CV_N_MAX.to_vec());
    let steps = cmp.trotter_steps.clone().unwrap_or_else(|| vec![2]);
    let samples = cmp.samples.unwrap_or(500_000);
    let oracle = matrix_mc_curve(model, &spec, &times, samples, cmp.seed, ReturnTarget::FockVacuum)?;
    let mut t = Table::new(&[
        "t",
        "n_max",
        "trotter_steps",
        "cv_probability",
        "success_probability",
        "leakage",
        "oracle_probability",
        "oracle_stderr",
        "oracle_trotter_probability",
        "oracle_trotter_stderr",
    ]);
    for &n in &n_values {
        for &s in &steps {
            let section = ProtocolSection {
                trotter_steps: s,
                ..protocol_at(cfg, n)
            };
            let pcfg = section.protocol(model, &spec)?;
            let split = matrix_mc_trotter_curve(model, &spec, &times, samples, cmp.seed, s)?;
            for ((r, o), so) in return_probability_curve(&pcfg, &times)?.iter().zip(&oracle).zip(&split) {
                t.push(vec![
                    num(r.t),
                    json!(n),
                    json!(s),
                    num(r.probability),
                    num(r.success_probability),
                    num(r.leakage),
                    num(o.mean),
                    num(o.stderr),
                    num(so.mean),
                    num(so.stderr),
                ]);
            }
        }
    }
    Ok(t)
}

/// CV energy of the CC state against the quadrature CC energy, versus the
/// Fock cutoff.
fn fig_cv_energy(cfg: &ExperimentConfig, cmp: &CompareSection, model: &ModelParams, kinetic: KineticMethod) -> Result<Table> {
    let spec = cv_cutoff(cfg, cmp, model, 1.0)?;
    let n_values = cmp.n_max_values.clone().unwrap_or_else(|| CV_N_MAX.to_vec());
    let fixed = cmp.alpha.or(cfg.protocol.as_ref().and_then(|p| p.alpha));
    let state = cfg.protocol.as_ref().map_or(CcState::Ground, |p| p.state);
    let reference = |a: f64| cc_energy_l2_quadrature(model.g_sq, a, Some(&spec), state);
    let (alpha, reference) = match (fixed, model.n_sites) {
        (Some(a), 2) => (a, reference(a)?),
        (Some(a), _) => (a, f64::NAN),
        (None, 2) => {
            let m = minimize_alpha(reference, (0.0, 4.0 * model.g_sq), DEFAULT_ALPHA_TOL)?;
            (m.alpha, m.value)
        }
        (None, _) => return Err(CliError::config("compare.alpha", "alpha is required away from two sites")),
    };
    let mut columns = CV_ENERGY_COLUMNS.to_vec();
    columns.extend(["cc_reference", "deviation"]);
    let mut t = Table::new(&columns);
    for &n in &n_values {
        let section = ProtocolSection {
            kinetic,
            ..protocol_at(cfg, n)
        };
        let pcfg = section.protocol(model, &spec)?;
        let mut row = cv_energy_row(&pcfg, &section, alpha)?;
        let e = row[3].as_f64().unwrap_or(f64::NAN);
        row.extend([num(reference), num(e - reference)]);
        t.push(row);
    }
    Ok(t)
}
