//! Experiment files: a JSON object merged with command-line overrides, then
//! checked against the requirements of the selected command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sigma_core::cc::{CcState, Sampler};
use sigma_core::sphere::{ReturnTarget, SphereBasisSpec};
use sigma_core::stats::DEFAULT_BLOCKS;
use sigma_core::{Boundary, ModelParams};
use sigma_cv::protocols::{InteractionMethod, KineticMethod, OmegaPrep, ProtocolConfig};

use crate::error::{CliError, ErrorKind, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ed,
    Cc,
    SphereEd,
    CvEnergy,
    Evolve,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ed => "ed",
            Command::Cc => "cc",
            Command::SphereEd => "sphere-ed",
            Command::CvEnergy => "cv-energy",
            Command::Evolve => "evolve",
            Command::Compare => "compare",
        }
    }
}

fn two() -> usize {
    2
}

fn three() -> u32 {
    3
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "two")]
    pub n_sites: usize,
    pub g_sq: f64,
    #[serde(default = "three")]
    pub l_max: u32,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ModelSection {
    pub fn params(&self) -> Result<ModelParams> {
        let p = ModelParams {
            n_sites: self.n_sites,
            g_sq: self.g_sq,
            l_max: self.l_max,
            boundary: self.boundary,
        };
        p.validate().map_err(|e| {
            let field = ["n_sites", "g_sq", "l_max"]
                .into_iter()
                .find(|f| e.to_string().contains(f))
                .map_or("model".to_string(), |f| format!("model.{f}"));
            CliError::from(e).at(&field)
        })?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSection {
    pub lambda_cutoff: f64,
    /// Taken from the model when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
}

impl SphereSection {
    pub fn spec(&self, model: &ModelParams) -> Result<SphereBasisSpec> {
        let g = model.g();
        if let Some(sg) = self.g {
            if (sg - g).abs() > 1e-12 * g {
                return Err(CliError::config("sphere.g", format!("sphere.g = {sg} but the model has g = {g}")));
            }
        }
        SphereBasisSpec::new(self.lambda_cutoff, g).map_err(|e| CliError::from(e).at("sphere.lambda_cutoff"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcMethod {
    /// Closed form for two O(3) sites, quadrature for two finite-cutoff
    /// sites, Monte Carlo otherwise.
    #[default]
    Auto,
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

fn default_blocks() -> usize {
    DEFAULT_BLOCKS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcSection {
    /// Minimized separately for each state when absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub n_samples: Option<u64>,
    #[serde(default)]
    pub sampler: Option<Sampler>,
    #[serde(default = "one")]
    pub seed: u64,
    #[serde(default)]
    pub method: CcMethod,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
}

impl Default for CcSection {
    fn default() -> Self {
        CcSection {
            alpha: None,
            n_samples: None,
            sampler: None,
            seed: 1,
            method: CcMethod::Auto,
            blocks: DEFAULT_BLOCKS,
        }
    }
}

fn default_gamma() -> f64 {
    1e-3
}

fn default_capital_gamma() -> f64 {
    0.1
}

fn default_steps() -> usize {
    1
}

fn default_leakage() -> Option<f64> {
    Some(sigma_cv::register::DEFAULT_LEAKAGE_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub n_max: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_capital_gamma")]
    pub capital_gamma: f64,
    #[serde(default = "default_steps")]
    pub trotter_steps: usize,
    /// `null` keeps accumulating leakage without aborting.
    #[serde(default = "default_leakage")]
    pub leakage_limit: Option<f64>,
    #[serde(default)]
    pub omega_prep: OmegaPrep,
    #[serde(default)]
    pub ancilla_dim: Option<usize>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "ground")]
    pub state: CcState,
    #[serde(default)]
    pub interaction: InteractionMethod,
    #[serde(default)]
    pub kinetic: KineticMethod,
}

fn ground() -> CcState {
    CcState::Ground
}

impl ProtocolSection {
    pub fn with_n_max(n_max: usize) -> Self {
        ProtocolSection {
            n_max,
            gamma: default_gamma(),
            capital_gamma: default_capital_gamma(),
            trotter_steps: default_steps(),
            leakage_limit: default_leakage(),
            omega_prep: OmegaPrep::default(),
            ancilla_dim: None,
            alpha: None,
            state: CcState::Ground,
            interaction: InteractionMethod::default(),
            kinetic: KineticMethod::default(),
        }
    }

    pub fn protocol(&self, model: &ModelParams, spec: &SphereBasisSpec) -> Result<ProtocolConfig> {
        let cfg = ProtocolConfig {
            params: model.clone(),
            spec: *spec,
            n_max: self.n_max,
            gamma: self.gamma,
            capital_gamma: self.capital_gamma,
            dt: 0.0,
            trotter_steps: self.trotter_steps,
            leakage_limit: self.leakage_limit,
            omega_prep: self.omega_prep,
            ancilla_dim: self.ancilla_dim,
        };
        cfg.validate().map_err(|e| CliError::from(e).at("protocol"))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    MatrixMc,
    Cv,
    O3,
}

fn default_samples() -> u64 {
    500_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub times: Vec<f64>,
    #[serde(default)]
    pub backend: Backend,
    /// Defaults to `omega`, or `fock_vacuum` for the `cv` backend.
    #[serde(default)]
    pub target: Option<ReturnTarget>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "one")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub fig: u32,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default)]
    pub g_sq_values: Option<Vec<f64>>,
    #[serde(default)]
    pub n_max_values: Option<Vec<usize>>,
    #[serde(default)]
    pub sites: Option<Vec<usize>>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub trotter_steps: Option<Vec<usize>>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default = "one")]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Standard output when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Triplet dump of the assembled Hamiltonian (`ed`, `sphere-ed`).
    #[serde(default)]
    pub hamiltonian: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere: Option<SphereSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc: Option<CcSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
    #[serde(default)]
    pub output: OutputSection,
}

fn require<'a, T>(section: &'a Option<T>, name: &str, command: Command) -> Result<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| CliError::config(name, format!("command '{}' requires a '{name}' section", command.name())))
}

impl ExperimentConfig {
    pub fn from_value(v: Value) -> Result<Self> {
        serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner().to_string();
            let field = match inner.strip_prefix("missing field `").and_then(|s| s.split('`').next()) {
                Some(name) if path == "." => name.to_string(),
                Some(name) => format!("{path}.{name}"),
                None => path,
            };
            CliError::config(field, inner)
        })
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Section requirements and cross-field checks for `command`.
    pub fn validate(&self) -> Result<()> {
        let model = self.model.params()?;
        let c = self.command;
        match c {
            Command::Ed => {}
            Command::Cc => {
                let cc = require(&self.cc, "cc", c)?;
                if let Some(a) = cc.alpha {
                    if !(a.is_finite() && a >= 0.0) {
                        return Err(CliError::config("cc.alpha", format!("alpha must be non-negative, got {a}")));
                    }
                }
                if cc.n_samples == Some(0) {
                    return Err(CliError::config("cc.n_samples", "n_samples must be positive"));
                }
                let two_sites = model.n_sites == 2;
                match cc.method {
                    CcMethod::ClosedForm if !two_sites || self.sphere.is_some() => {
                        return Err(CliError::config(
                            "cc.method",
                            "closed_form needs two sites and no sphere section",
                        ))
                    }
                    CcMethod::Quadrature if !two_sites => {
                        return Err(CliError::config("cc.method", "quadrature needs two sites"))
                    }
                    _ => {}
                }
                if let Some(s) = &self.sphere {
                    s.spec(&model)?;
                }
            }
            Command::SphereEd => {
                require(&self.sphere, "sphere", c)?.spec(&model)?;
            }
            Command::CvEnergy => {
                let spec = require(&self.sphere, "sphere", c)?.spec(&model)?;
                let p = require(&self.protocol, "protocol", c)?;
                p.protocol(&model, &spec)?;
                if p.alpha.is_none() {
                    return Err(CliError::config("protocol.alpha", "cv-energy requires protocol.alpha"));
                }
            }
            Command::Evolve => {
                let ev = require(&self.evolve, "evolve", c)?;
                if ev.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                    return Err(CliError::config("evolve.times", "times must be finite and non-negative"));
                }
                match ev.backend {
                    Backend::O3 => {}
                    Backend::MatrixMc => {
                        require(&self.sphere, "sphere", c)?.spec(&model)?;
                        if ev.samples < 2 {
                            return Err(CliError::config("evolve.samples", "need at least two samples"));
                        }
                    }
                    Backend::Cv => {
                        let spec = require(&self.sphere, "sphere", c)?.spec(&model)?;
                        require(&self.protocol, "protocol", c)?.protocol(&model, &spec)?;
                        if ev.target == Some(ReturnTarget::Omega) {
                            return Err(CliError::config(
                                "evolve.target",
                                "the cv backend measures the photon-number vacuum only",
                            ));
                        }
                    }
                }
            }
            Command::Compare => {
                let cmp = require(&self.compare, "compare", c)?;
                if !matches!(cmp.fig, 1..=5 | 8..=11) {
                    return Err(CliError::config(
                        "compare.fig",
                        format!("no comparison for figure {}; choose 1-5 or 8-11", cmp.fig),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Set `path` (dotted) in a JSON object tree, creating objects as needed.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(path, "empty component in parameter path"));
    }
    let mut cur = root;
    for (i, key) in parts.iter().enumerate() {
        if !cur.is_object() {
            if cur.is_null() {
                *cur = Value::Object(Map::new());
            } else {
                return Err(CliError::config(parts[..i].join("."), "not an object"));
            }
        }
        let obj = cur.as_object_mut().expect("object");
        if i + 1 == parts.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(key.to_string()).or_insert(Value::Null);
    }
    unreachable!()
}

/// Parse a flag value: JSON when it parses, a bare string otherwise.
pub fn parse_scalar(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

pub fn load_file(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError {
        kind: ErrorKind::Config,
        field: Some("config".into()),
        message: format!("{}: {e}", path.display()),
    })?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
    if !v.is_object() {
        return Err(CliError::config("config", "experiment file must hold a JSON object"));
    }
    Ok(v)
}

/// File contents, then overrides in order, then the command name.
pub fn merge(file: Option<Value>, command: Command, overrides: &[(String, Value)]) -> Result<Value> {
    let mut v = file.unwrap_or_else(|| Value::Object(Map::new()));
    for (path, val) in overrides {
        set_path(&mut v, path, val.clone())?;
    }
    set_path(&mut v, "command", Value::String(command.name().into()))?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn missing_section_names_the_field() {
        let cfg = ExperimentConfig::from_value(json!({"command": "cc", "model": {"g_sq": 1.0}})).unwrap();
        let e = cfg.validate().unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(e.field.as_deref(), Some("cc"));
    }

    #[test]
    fn missing_nested_field_reports_path() {
        let e = ExperimentConfig::from_value(json!({"command": "ed", "model": {"n_sites": 2}})).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("model.g_sq"));
        let e = ExperimentConfig::from_value(json!({"command": "ed", "model": {"g_sq": 1, "lmax": 2}})).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("model.lmax"));
    }

    #[test]
    fn overrides_win_over_file() {
        let file = json!({"model": {"g_sq": 2.0, "l_max": 2}});
        let v = merge(Some(file), Command::Ed, &[("model.g_sq".into(), json!(1.0))]).unwrap();
        let cfg = ExperimentConfig::from_value(v).unwrap();
        assert_eq!(cfg.model.g_sq, 1.0);
        assert_eq!(cfg.model.l_max, 2);
        assert_eq!(cfg.command, Command::Ed);
    }

    #[test]
    fn sphere_g_mismatch_is_a_config_error() {
        let cfg = ExperimentConfig::from_value(json!({
            "command": "sphere-ed",
            "model": {"g_sq": 4.0},
            "sphere": {"lambda_cutoff": 3.0, "g": 1.0}
        }))
        .unwrap();
        assert_eq!(cfg.validate().unwrap_err().field.as_deref(), Some("sphere.g"));
    }

    #[test]
    fn null_leakage_limit_survives_round_trip() {
        let cfg = ExperimentConfig::from_value(json!({
            "command": "cv-energy",
            "model": {"g_sq": 1.0},
            "sphere": {"lambda_cutoff": 1.0},
            "protocol": {"n_max": 6, "leakage_limit": null, "alpha": 0.5}
        }))
        .unwrap();
        assert_eq!(cfg.protocol.as_ref().unwrap().leakage_limit, None);
        let again = ExperimentConfig::from_value(cfg.to_value()).unwrap();
        assert_eq!(again, cfg);
        cfg.validate().unwrap();
    }

    #[test]
    fn set_path_rejects_scalars_in_the_way() {
        let mut v = json!({"model": 3});
        assert!(set_path(&mut v, "model.g_sq", json!(1)).is_err());
        assert_eq!(parse_scalar("0.5"), json!(0.5));
        assert_eq!(parse_scalar("split"), json!("split"));
    }
}
