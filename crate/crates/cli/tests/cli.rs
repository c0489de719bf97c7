use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use incgreen::{point, Scenario};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_incgreen"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, s: &Scenario) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, s.to_json_string()).unwrap();
    p
}

fn table1(dir: &TempDir) -> String {
    write_config(dir.path(), "table1.json", &Scenario::table1()).display().to_string()
}

#[test]
fn eval_prints_breakdown() {
    let dir = TempDir::new().unwrap();
    let cfg = table1(&dir);
    let o = run(&["eval", "--config", &cfg, "--x", "10,10", "--y", "-10,-80", "--quantity", "reps"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("value=")));
    assert_eq!(text.lines().filter(|l| l.starts_with("term.model[")).count(), 6);
    assert!(text.contains("region_x=matrix\n"));
    assert!(text.lines().any(|l| l.starts_with("nearest_interface_x=") && l.contains("distance=")));
    let value: f64 = text.lines().find_map(|l| l.strip_prefix("value=")).unwrap().parse().unwrap();
    let expected = incgreen::AsymptoticModel::new(&Scenario::table1())
        .r_eps(&point(10.0, 10.0), &point(-10.0, -80.0))
        .unwrap()
        .value;
    assert_eq!(value, expected);
}

#[test]
fn eval_without_inclusions_shows_only_the_unperturbed_term() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "empty.json", &Scenario::new(150.0, 5.6e10));
    let o = run(&["eval", "--config", cfg.to_str().unwrap(), "--x", "10,10", "--y=-10,-80", "--quantity", "neps"]);
    assert_eq!(o.status.code(), Some(0));
    let terms: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("term.")).map(String::from).collect();
    assert_eq!(terms.len(), 1);
    assert!(terms[0].starts_with("term.unperturbed="));
}

#[test]
fn eval_gradient() {
    let dir = TempDir::new().unwrap();
    let cfg = table1(&dir);
    let o = run(&["eval", "--config", &cfg, "--x", "10,10", "--y", "-10,-80", "--quantity", "grad"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("grad_x=") && text.contains("grad_y="));
}

#[test]
fn singular_point_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let cfg = table1(&dir);
    let o = run(&["eval", "--config", &cfg, "--x", "10,10", "--y", "10,10", "--quantity", "neps"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
    let o = run(&["eval", "--config", &cfg, "--x", "500,0", "--y", "10,10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"outer_radius_m\": 10 ").unwrap();
    let o = run(&["eval", "--config", bad.to_str().unwrap(), "--x", "1,1", "--y", "2,2"]);
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    let o = run(&["eval", "--config", missing.to_str().unwrap(), "--x", "1,1", "--y", "2,2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["reproduce", "fig7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn grid_output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let cfg = table1(&dir);
    let mut files = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.path().join(sub);
        let o = run(&[
            "grid", "--config", &cfg, "--y", "-10,-80", "--grid", "33x17", "--extent", "-150,150,-100,100",
            "--quantity", "reps", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(std::fs::read(out.join("grid_reps.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 1 + 33 * 17);
    assert_eq!(text.lines().next(), Some("x_m,y_m,value,region"));
}

#[test]
fn validate_overlapping_config_fails_on_geometry() {
    let dir = TempDir::new().unwrap();
    let s = Scenario::new(10.0, 1.0)
        .with_inclusion(point(0.0, 0.0), 2.0, 3.0)
        .with_inclusion(point(1.0, 0.0), 2.0, 3.0);
    let cfg = write_config(dir.path(), "overlap.json", &s);
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("geometry") && l.contains("FAIL")));
    assert!(text.contains("SKIPPED"));
}

#[test]
fn validate_empty_config_passes_exactly() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "empty.json", &Scenario::new(150.0, 5.6e10));
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--y", "1,-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("exact"));
}

#[test]
fn validate_table1_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = table1(&dir);
    let out = dir.path().join("report");
    let o = run(&["validate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    assert!(out.join("validate_report.json").exists());
}

#[test]
fn reproduce_writes_grid_and_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig1");
    let o = run(&["reproduce", "fig1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("fig1_grad.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 256 * 256);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("fig1_report.json")).unwrap()).unwrap();
    assert!(report["discrepancy"]["relative_sup_grad"].as_f64().unwrap() <= 0.05);
    assert!(stdout(&o).contains("result=PASS"));
}

#[test]
fn reproduce_homogeneous_override_is_at_the_floor() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ex2");
    let o = run(&["reproduce", "example2", "--homogeneous", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rel: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("relative_sup_value="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rel <= 1e-10, "{rel}");
}

#[test]
fn convergence_reports_order() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "three.json", &Scenario::three_symmetric());
    let out = dir.path().join("conv");
    let o = run(&[
        "convergence", "--config", cfg.to_str().unwrap(), "--y", "5,-10", "--scales", "0.5,0.25,0.125",
        "--n-modes", "24", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let slope: f64 = stdout(&o).lines().find_map(|l| l.strip_prefix("fitted_slope=")).unwrap().parse().unwrap();
    assert!(slope >= 1.8);
    assert!(out.join("convergence_report.json").exists());
    let o = run(&["convergence", "--config", cfg.to_str().unwrap(), "--y", "5,-10", "--scales", "0.5,0.25"]);
    assert_eq!(o.status.code(), Some(3));
}
