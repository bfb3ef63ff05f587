//! `sigma` command-line driver: experiment files, flag overrides, sweeps and
//! comparison tables for the rotor, coupled-cluster, finite-cutoff and qumode
//! solvers.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sigma_cv::snapshot::Precision;

pub mod cache;
pub mod circuit;
pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sweep;

use config::{load_file, merge, parse_scalar, Command, ExperimentConfig, Format};
use error::{CliError, Result};
use output::write_output;

#[derive(Debug, Parser)]
#[command(name = "sigma", version, about = "Lattice O(3) sigma-model solvers")]
pub struct Cli {
    /// Worker threads shared by all parallel work.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Exact diagonalization of the truncated rotor Hamiltonian.
    Ed(RunArgs),
    /// Coupled-cluster ground and excited energies.
    Cc(RunArgs),
    /// Exact diagonalization at finite radial cutoff.
    SphereEd(RunArgs),
    /// Energy measured on the qumode circuit.
    CvEnergy(RunArgs),
    /// Return-probability curves.
    Evolve(RunArgs),
    /// Cross-method comparison table.
    Compare(RunArgs),
    /// Repeat a command over values of one parameter.
    Sweep(SweepArgs),
    /// Run a gate list on a fresh register.
    Circuit(CircuitArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON experiment file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override any field: `--set protocol.kinetic=pairwise`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub set: Vec<String>,
    #[arg(long = "L", value_name = "SITES")]
    pub sites: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub g2: Option<f64>,
    #[arg(long)]
    pub lmax: Option<u32>,
    /// Radial cutoff Λ.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<f64>>,
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub fig: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long = "g2-values", value_delimiter = ',', allow_hyphen_values = true)]
    pub g2_values: Option<Vec<f64>>,
    #[arg(long = "n-max-values", value_delimiter = ',')]
    pub n_max_values: Option<Vec<usize>>,
    #[arg(long = "sites", value_delimiter = ',')]
    pub site_values: Option<Vec<usize>>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    /// Write the assembled Hamiltonian as a triplet file.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Command to repeat.
    #[arg(value_name = "COMMAND")]
    pub command_name: String,
    /// Dotted path of the swept field, e.g. `model.g_sq`.
    #[arg(long)]
    pub axis: String,
    /// Comma-separated values; may be empty.
    #[arg(long, allow_hyphen_values = true)]
    pub values: String,
    #[arg(long)]
    pub keep_going: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CircuitArgs {
    /// JSON array of `{kind, params, targets}`.
    #[arg(long)]
    pub gates: PathBuf,
    #[arg(long)]
    pub modes: usize,
    #[arg(long = "n-max")]
    pub n_max: usize,
    /// Initial Fock occupation per mode; vacuum otherwise.
    #[arg(long, value_delimiter = ',')]
    pub fock: Option<Vec<usize>>,
    /// Abort above this accumulated leakage; `none` disables the check.
    #[arg(long, default_value = "1e-3")]
    pub leakage_limit: String,
    /// Binary snapshot of the final register.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long, default_value = "complex128")]
    pub precision: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
}

impl RunArgs {
    /// Flag values as `(path, value)` overrides for `command`.
    pub fn overrides(&self, command: Command) -> Result<Vec<(String, Value)>> {
        let mut o: Vec<(String, Value)> = Vec::new();
        let mut put = |p: &str, v: Value| o.push((p.to_string(), v));
        if let Some(v) = self.sites {
            put("model.n_sites", json!(v));
        }
        if let Some(v) = self.g2 {
            put("model.g_sq", json!(v));
        }
        if let Some(v) = self.lmax {
            put("model.l_max", json!(v));
        }
        if let Some(v) = self.lambda {
            put("sphere.lambda_cutoff", json!(v));
        }
        let section = match command {
            Command::Cc => "cc",
            Command::CvEnergy => "protocol",
            Command::Evolve => "evolve",
            _ => "compare",
        };
        if let Some(v) = self.alpha {
            if command == Command::Evolve {
                return Err(CliError::config("alpha", "evolve has no alpha parameter"));
            }
            put(&format!("{section}.alpha"), json!(v));
        }
        if let Some(v) = self.samples {
            let key = if command == Command::Cc { "cc.n_samples" } else { &format!("{section}.samples") };
            put(key, json!(v));
        }
        if let Some(v) = self.seed {
            put(&format!("{section}.seed"), json!(v));
        }
        if let Some(v) = &self.method {
            put("cc.method", json!(v));
        }
        if let Some(v) = self.n_max {
            put("protocol.n_max", json!(v));
        }
        if let Some(v) = self.steps {
            put("protocol.trotter_steps", json!(v));
        }
        if let Some(v) = &self.times {
            put(&format!("{section}.times"), json!(v));
        }
        if let Some(v) = &self.backend {
            put("evolve.backend", json!(v));
        }
        if let Some(v) = &self.target {
            put("evolve.target", json!(v));
        }
        if let Some(v) = self.fig {
            put("compare.fig", json!(v));
        }
        if let Some(v) = &self.lambdas {
            put("compare.lambdas", json!(v));
        }
        if let Some(v) = &self.g2_values {
            put("compare.g_sq_values", json!(v));
        }
        if let Some(v) = &self.n_max_values {
            put("compare.n_max_values", json!(v));
        }
        if let Some(v) = &self.site_values {
            put("compare.sites", json!(v));
        }
        if let Some(v) = &self.output {
            put("output.path", json!(v));
        }
        if let Some(v) = &self.format {
            put("output.format", json!(v));
        }
        if let Some(v) = &self.hamiltonian {
            put("output.hamiltonian", json!(v));
        }
        for s in &self.set {
            let (path, val) = s
                .split_once('=')
                .ok_or_else(|| CliError::config("set", format!("expected PATH=VALUE, got '{s}'")))?;
            o.push((path.trim().to_string(), parse_scalar(val.trim())));
        }
        Ok(o)
    }

    pub fn merged(&self, command: Command) -> Result<Value> {
        let file = self.config.as_deref().map(load_file).transpose()?;
        merge(file, command, &self.overrides(command)?)
    }
}

fn parse_command(name: &str) -> Result<Command> {
    serde_json::from_value(Value::String(name.to_string()))
        .map_err(|_| CliError::config("command", format!("unknown command '{name}'")))
}

fn parse_format(s: Option<&str>) -> Result<Format> {
    match s {
        None => Ok(Format::Csv),
        Some(f) => serde_json::from_value(json!(f)).map_err(|_| CliError::config("output.format", format!("unknown format '{f}'"))),
    }
}

fn run_single(command: Command, args: &RunArgs) -> Result<()> {
    let cfg = ExperimentConfig::from_value(args.merged(command)?)?;
    let table = run::run(&cfg)?;
    let text = table.render(command.name(), &cfg.to_value(), cfg.output.format);
    write_output(&text, cfg.output.path.as_deref())
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let command = parse_command(&args.command_name)?;
    let base = args.run.merged(command)?;
    let values = sweep::parse_values(&args.values);
    let format = parse_format(base.pointer("/output/format").and_then(Value::as_str))?;
    let path = base.pointer("/output/path").and_then(Value::as_str).map(PathBuf::from);
    let out = sweep::sweep(&base, &args.axis, &values, args.keep_going)?;
    let echo = json!({ "base": base, "axis": args.axis, "values": values });
    write_output(&out.table.render(command.name(), &echo, format), path.as_deref())?;
    let mut failures = out.failures.into_iter();
    match failures.next() {
        None => Ok(()),
        Some((v, first)) => {
            for (v, e) in failures {
                report(&CliError { message: format!("{} = {v}: {}", args.axis, e.message), ..e });
            }
            Err(CliError { message: format!("{} = {v}: {}", args.axis, first.message), ..first })
        }
    }
}

fn run_circuit_cmd(args: &CircuitArgs) -> Result<()> {
    let limit = match args.leakage_limit.as_str() {
        "none" | "null" => None,
        s => Some(s.parse::<f64>().map_err(|_| CliError::config("leakage_limit", format!("not a number: {s}")))?),
    };
    let precision: Precision = serde_json::from_value(json!(args.precision))
        .map_err(|_| CliError::config("precision", format!("unknown precision '{}'", args.precision)))?;
    let format = parse_format(args.format.as_deref())?;
    let gates = circuit::load_gates(&args.gates)?;
    let r = circuit::run_circuit(&gates, args.modes, args.n_max, args.fock.as_deref(), limit)?;
    if let Some(p) = &args.snapshot {
        circuit::save_snapshot(&r.register, precision, p)?;
    }
    let echo = json!({
        "gates": gates,
        "modes": args.modes,
        "n_max": args.n_max,
        "fock": args.fock,
        "leakage_limit": limit,
    });
    write_output(&r.table.render("circuit", &echo, format), args.output.as_deref())
}

fn report(e: &CliError) {
    eprintln!("{}", e.to_json());
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            report(&CliError::config("arguments", e.kind().to_string()));
            return 2;
        }
    };
    if let Some(n) = cli.jobs {
        // a second build only fails if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Sub::Ed(a) => run_single(Command::Ed, a),
        Sub::Cc(a) => run_single(Command::Cc, a),
        Sub::SphereEd(a) => run_single(Command::SphereEd, a),
        Sub::CvEnergy(a) => run_single(Command::CvEnergy, a),
        Sub::Evolve(a) => run_single(Command::Evolve, a),
        Sub::Compare(a) => run_single(Command::Compare, a),
        Sub::Sweep(a) => run_sweep(a),
        Sub::Circuit(a) => run_circuit_cmd(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            report(&e);
            e.exit_code()
        }
    }
}
