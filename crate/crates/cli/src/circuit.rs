//! Run a gate list from a JSON file on a fresh register.

use std::io::BufWriter;
use std::path::Path;

use serde_json::json;
use sigma_cv::ops::position;
use sigma_cv::snapshot::{write_snapshot, Precision};
use sigma_cv::{GateSpec, QumodeRegister};

use crate::error::{CliError, Result};
use crate::output::{num, Table};

pub struct CircuitRun {
    pub register: QumodeRegister,
    pub table: Table,
}

pub fn load_gates(path: &Path) -> Result<Vec<GateSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config("gates", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config("gates", format!("{}: {e}", path.display())))
}

pub fn run_circuit(
    gates: &[GateSpec],
    n_modes: usize,
    n_max: usize,
    fock: Option<&[usize]>,
    leakage_limit: Option<f64>,
) -> Result<CircuitRun> {
    let dims = vec![n_max; n_modes];
    let mut reg = match fock {
        Some(occ) => QumodeRegister::fock(&dims, occ).map_err(|e| CliError::from(e).at("fock"))?,
        None => QumodeRegister::vacuum_with_dims(&dims).map_err(|e| CliError::from(e).at("modes"))?,
    };
    reg.set_leakage_limit(leakage_limit);
    for (i, g) in gates.iter().enumerate() {
        reg.apply_gate(g).map_err(|e| CliError::from(e).at(&format!("gates[{i}]")))?;
    }
    let q = position(n_max);
    let q2 = &q * &q;
    let mut t = Table::new(&["mode", "mean_n", "var_n", "mean_q", "var_q", "leakage", "gates"]);
    for m in 0..n_modes {
        let n = reg.expectation_number(m);
        let mq = reg.expectation(&[m], &q)?.re;
        let mq2 = reg.expectation(&[m], &q2)?.re;
        t.push(vec![
            json!(m),
            num(n),
            num(reg.expectation_number_sq(m) - n * n),
            num(mq),
            num(mq2 - mq * mq),
            num(reg.leakage()),
            json!(reg.gate_count()),
        ]);
    }
    Ok(CircuitRun { register: reg, table: t })
}

pub fn save_snapshot(reg: &QumodeRegister, precision: Precision, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(write_snapshot(reg, precision, BufWriter::new(f))?)
}
