//! Inverse-CDF radial tables, memoized in-process and optionally on disk
//! under the directory named by `SIGMA_TABLE_CACHE`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use sigma_core::sphere::{RadialTable, SphereBasisSpec};
use sigma_core::sphere::radial::DEFAULT_TABLE_POINTS;

use crate::error::Result;

pub const CACHE_ENV: &str = "SIGMA_TABLE_CACHE";

type Key = (u64, u64);

fn memo() -> &'static Mutex<HashMap<Key, Arc<RadialTable>>> {
    static MEMO: OnceLock<Mutex<HashMap<Key, Arc<RadialTable>>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn file_for(spec: &SphereBasisSpec) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!(
        "radial-{:016x}-{:016x}-{DEFAULT_TABLE_POINTS}.json",
        spec.lambda_cutoff.to_bits(),
        spec.g.to_bits()
    )))
}

fn load(path: &PathBuf, spec: &SphereBasisSpec) -> Option<RadialTable> {
    let text = std::fs::read_to_string(path).ok()?;
    let t: RadialTable = serde_json::from_str(&text).ok()?;
    (t.matches(spec) && t.r.len() == DEFAULT_TABLE_POINTS).then_some(t)
}

/// Cache write failures are not fatal; the table is simply rebuilt next time.
fn store(path: &PathBuf, table: &RadialTable) {
    let Some(dir) = path.parent() else { return };
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    if let Ok(text) = serde_json::to_string(table) {
        if std::fs::write(&tmp, text).is_ok() && std::fs::rename(&tmp, path).is_err() {
            let _ = std::fs::remove_file(&tmp);
        }
    }
}

pub fn radial_table(spec: &SphereBasisSpec) -> Result<Arc<RadialTable>> {
    let key = (spec.lambda_cutoff.to_bits(), spec.g.to_bits());
    if let Some(t) = memo().lock().expect("cache lock").get(&key) {
        return Ok(t.clone());
    }
    let path = file_for(spec);
    let table = match path.as_ref().and_then(|p| load(p, spec)) {
        Some(t) => t,
        None => {
            let t = RadialTable::build(spec, DEFAULT_TABLE_POINTS)?;
            if let Some(p) = &path {
                store(p, &t);
            }
            t
        }
    };
    let table = Arc::new(table);
    memo().lock().expect("cache lock").insert(key, table.clone());
    Ok(table)
}
