//! One run per value of a scalar parameter, merged into one table.

use rayon::prelude::*;
use serde_json::Value;

use crate::config::{parse_scalar, set_path, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::Table;
use crate::run::run;

/// Comma-separated values; an empty string is an empty list.
pub fn parse_values(s: &str) -> Vec<Value> {
    s.split(',').map(str::trim).filter(|v| !v.is_empty()).map(parse_scalar).collect()
}

fn lookup<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(root, |v, k| v.get(k))
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub table: Table,
    /// Failed values with their errors, in value order.
    pub failures: Vec<(Value, CliError)>,
}

pub fn sweep(base: &Value, axis: &str, values: &[Value], keep_going: bool) -> Result<SweepOutcome> {
    if matches!(lookup(base, axis), Some(Value::Object(_) | Value::Array(_))) {
        return Err(CliError::config(axis, "sweep axis must name a scalar field"));
    }
    if let Some(v) = values.iter().find(|v| v.is_object() || v.is_array()) {
        return Err(CliError::config(axis, format!("sweep value {v} is not a scalar")));
    }
    let results: Vec<Result<Table>> = values
        .par_iter()
        .map(|v| {
            let mut cfg = base.clone();
            set_path(&mut cfg, axis, v.clone())?;
            run(&ExperimentConfig::from_value(cfg)?)
        })
        .collect();
    let mut table: Option<Table> = None;
    let mut failures = Vec::new();
    for (v, r) in values.iter().zip(results) {
        match r {
            Ok(t) => {
                let t = t.with_leading(axis, v);
                match &mut table {
                    None => table = Some(t),
                    Some(acc) if acc.columns == t.columns => acc.rows.extend(t.rows),
                    Some(_) => return Err(CliError::numeric(format!("columns changed at {axis} = {v}"))),
                }
            }
            Err(e) if keep_going => failures.push((v.clone(), e)),
            Err(e) => return Err(e),
        }
    }
    Ok(SweepOutcome {
        table: table.unwrap_or_else(|| Table::new(&[axis])),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_values_give_empty_table() {
        let base = json!({"command": "ed", "model": {"g_sq": 1.0}});
        let out = sweep(&base, "model.g_sq", &parse_values(""), false).unwrap();
        assert!(out.table.rows.is_empty());
        assert_eq!(out.table.columns, vec!["model.g_sq"]);
    }

    #[test]
    fn rejects_object_axis() {
        let base = json!({"command": "ed", "model": {"g_sq": 1.0}});
        assert_eq!(sweep(&base, "model", &[json!(1)], false).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn keep_going_collects_failures() {
        let base = json!({"command": "ed", "model": {"g_sq": 1.0, "l_max": 2}});
        let vals = parse_values("1, -1, 2");
        assert!(sweep(&base, "model.g_sq", &vals, false).is_err());
        let out = sweep(&base, "model.g_sq", &vals, true).unwrap();
        assert_eq!(out.table.rows.len(), 2);
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.failures[0].0, json!(-1));
    }
}
