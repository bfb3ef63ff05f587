use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sigma_cli::config::ExperimentConfig;
use sigma_core::eigen::low_eigenvalues;
use sigma_core::SparseHermitian;
use sigma_cv::snapshot::read_snapshot;

fn sigma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigma"))
        .args(args)
        .env_remove("SIGMA_TABLE_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    let line = err.lines().rev().find(|l| l.starts_with('{')).expect("error JSON on stderr");
    serde_json::from_str(line).unwrap()
}

/// Header lines, column row, data rows.
fn split_csv(text: &str) -> (Vec<&str>, Vec<&str>, Vec<Vec<&str>>) {
    let (head, body): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    let rows = body[1..].iter().map(|l| l.split(',').collect()).collect();
    (head, body[0].split(',').collect(), rows)
}

fn without_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("# generated")).collect::<Vec<_>>().join("\n")
}

fn field(cols: &[&str], row: &[&str], name: &str) -> f64 {
    let i = cols.iter().position(|c| *c == name).unwrap_or_else(|| panic!("no column {name}"));
    row[i].parse().unwrap()
}

#[test]
fn ed_two_sites() {
    let o = sigma(&["ed", "--L", "2", "--g2", "1", "--lmax", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let (head, cols, rows) = split_csv(&text);
    assert!(head[0].starts_with("# sigma "));
    assert_eq!(head[1], "# command: ed");
    assert_eq!(rows.len(), 1);
    assert!((field(&cols, &rows[0], "e0_per_site") + 0.278_641_900_131_750_7).abs() < 1e-9);
    assert!((field(&cols, &rows[0], "gap") - 0.648_232_557_572_767_2).abs() < 1e-9);
}

#[test]
fn missing_section_is_a_config_error() {
    let o = sigma(&["cc", "--g2", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["exit_code"], 2);
    assert_eq!(e["error"]["kind"], "config");
    assert_eq!(e["error"]["field"], "cc");
}

#[test]
fn bad_value_names_the_field() {
    let o = sigma(&["ed", "--g2", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["field"], "model.g_sq");

    let o = sigma(&["ed", "--g2", "1", "--set", "model.l_max=\"three\""]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["field"], "model.l_max");
}

#[test]
fn unknown_flag_exits_with_config_code() {
    let o = sigma(&["ed", "--g2", "1", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "config");
}

#[test]
fn seeded_monte_carlo_is_reproducible() {
    let args = ["cc", "--L", "3", "--g2", "1", "--alpha", "1.2", "--samples", "20000", "--seed", "9", "--method", "monte_carlo"];
    let a = sigma(&args);
    let b = sigma(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(without_timestamp(&stdout(&a)), without_timestamp(&stdout(&b)));
    let other = sigma(&["cc", "--L", "3", "--g2", "1", "--alpha", "1.2", "--samples", "20000", "--seed", "10", "--method", "monte_carlo"]);
    assert_ne!(without_timestamp(&stdout(&a)), without_timestamp(&stdout(&other)));
}

#[test]
fn echoed_config_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = sigma(&["sphere-ed", "--g2", "2", "--lambda", "3.2"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let text = stdout(&first);
    let echoed = text.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();

    let value: Value = serde_json::from_str(echoed).unwrap();
    let cfg = ExperimentConfig::from_value(value.clone()).unwrap();
    assert_eq!(cfg.to_value(), value);
    assert_eq!(ExperimentConfig::from_value(cfg.to_value()).unwrap(), cfg);

    let path = dir.path().join("exp.json");
    std::fs::write(&path, echoed).unwrap();
    let again = sigma(&["sphere-ed", "--config", path.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(without_timestamp(&text), without_timestamp(&stdout(&again)));
}

#[test]
fn empty_sweep_gives_empty_table() {
    let o = sigma(&["sweep", "ed", "--axis", "model.g_sq", "--values", "", "--g2", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let (_, cols, rows) = split_csv(&text);
    assert_eq!(cols, ["model.g_sq"]);
    assert!(rows.is_empty());
}

#[test]
fn sweep_adds_axis_column() {
    let o = sigma(&["sweep", "ed", "--axis", "model.g_sq", "--values", "0.5,1", "--lmax", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let (_, cols, rows) = split_csv(&text);
    assert_eq!(cols[0], "model.g_sq");
    assert_eq!(rows.len(), 2);
    assert_eq!(field(&cols, &rows[1], "model.g_sq"), 1.0);
}

#[test]
fn sweep_keep_going_reports_failures() {
    let o = sigma(&["sweep", "ed", "--axis", "model.g_sq", "--values", "1,-1", "--lmax", "2", "--keep-going"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    let (_, _, rows) = split_csv(&text);
    assert_eq!(rows.len(), 1);
}

#[test]
fn json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cc.json");
    let o = sigma(&["cc", "--g2", "1", "--method", "closed_form", "--format", "json", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "cc");
    assert_eq!(v["config"]["cc"]["method"], "closed_form");
    let alpha_col = v["columns"].as_array().unwrap().iter().position(|c| c == "alpha").unwrap();
    let alpha = v["rows"][0][alpha_col].as_f64().unwrap();
    assert!((alpha - 0.839).abs() < 1e-3);
}

fn read_triplets(path: &Path) -> SparseHermitian {
    SparseHermitian::parse_triplets(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn hamiltonian_export_matches_reported_energy() {
    let dir = tempfile::tempdir().unwrap();
    let h_path = dir.path().join("h.txt");
    let o = sigma(&["ed", "--g2", "1", "--lmax", "2", "--hamiltonian", h_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let h = read_triplets(&h_path);
    assert_eq!(h.dim(), 81);
    let text = stdout(&o);
    let (_, cols, rows) = split_csv(&text);
    let e0 = low_eigenvalues(&h, 1).unwrap()[0];
    assert!((e0 / 2.0 - field(&cols, &rows[0], "e0_per_site")).abs() < 1e-9);
}

#[test]
fn circuit_snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let gates = dir.path().join("gates.json");
    std::fs::write(
        &gates,
        r#"[{"kind":"displace","params":[0.3],"targets":[0]},
            {"kind":"beam_splitter","params":[0.785398],"targets":[0,1]}]"#,
    )
    .unwrap();
    let snap = dir.path().join("reg.bin");
    let o = sigma(&[
        "circuit",
        "--gates",
        gates.to_str().unwrap(),
        "--modes",
        "2",
        "--n-max",
        "8",
        "--snapshot",
        snap.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let (_, cols, rows) = split_csv(&text);
    // ⟨q⟩ = 0.3 gives |α|² = 0.045, split evenly
    for row in &rows {
        assert!((field(&cols, row, "mean_n") - 0.0225).abs() < 1e-6);
        assert!((field(&cols, row, "mean_q") - 0.3 / 2f64.sqrt()).abs() < 1e-6);
    }
    let (_, reg) = read_snapshot(std::io::BufReader::new(std::fs::File::open(&snap).unwrap())).unwrap();
    assert_eq!(reg.dims(), &[8, 8]);
    assert!((reg.expectation_number(0) - field(&cols, &rows[0], "mean_n")).abs() < 1e-12);
}

#[test]
fn circuit_rejects_bad_targets() {
    let dir = tempfile::tempdir().unwrap();
    let gates = dir.path().join("gates.json");
    std::fs::write(&gates, r#"[{"kind":"beam_splitter","params":[0.5],"targets":[0,0]}]"#).unwrap();
    let o = sigma(&["circuit", "--gates", gates.to_str().unwrap(), "--modes", "2", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["field"], "gates");
}
