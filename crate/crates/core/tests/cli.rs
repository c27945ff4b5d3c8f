//! The binary: output layout, exit codes and reproducibility.

use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir-pulse"))
        .args(args)
        .env_remove("CASIMIR_PULSE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data lines of a CSV report: header first, comments dropped.
fn csv_lines(o: &Output) -> Vec<String> {
    stdout(o).lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

#[test]
fn roots_table_layout_and_residuals() {
    let o = run(&["roots", "--chi", "1", "--jmax", "10"]);
    assert!(o.status.success());
    let lines = csv_lines(&o);
    assert_eq!(lines[0], "j,Z,eps,A2,residual");
    assert_eq!(lines.len(), 11);
    for (i, l) in lines[1..].iter().enumerate() {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[0], (i + 1).to_string());
        let r: f64 = f[4].parse().unwrap();
        assert!(r < 1e-12);
    }
    let z1: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((z1 - 0.8603335890).abs() < 1e-10);
}

#[test]
fn manifest_leads_csv_output() {
    let o = run(&["roots", "--xi", "2", "--jmax", "3"]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    let json = first.strip_prefix("# manifest ").expect("manifest line");
    let m: Value = serde_json::from_str(json).unwrap();
    assert_eq!(m["command"], "roots");
    assert_eq!(m["parameters"]["chi"], "1");
    assert_eq!(m["truncations"]["j_max"], 3);
    assert_eq!(m["tolerances"]["tol_root"], "1e-12");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["roots", "--chi", "-1"]).status.code(), Some(3));
    assert_eq!(run(&["roots", "--chi", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["roots"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["eta", "--xi", "0", "--a", "1"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        &["table1", "--jmax", "200"][..],
        &["fig2", "--chi", "0.5,1,2", "--jmax", "1024", "--format", "json"][..],
        &["qwei", "--chi", "1", "--v", "0.5", "--jmax", "512"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let one = run(&["table1", "--threads", "1"]);
    let many = Command::new(env!("CARGO_BIN_EXE_casimir-pulse"))
        .args(["table1"])
        .env("CASIMIR_PULSE_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn table1_shape_and_spot_cells() {
    let o = run(&["table1"]);
    let lines = csv_lines(&o);
    assert_eq!(lines[0], "n,xi=1,xi=5,xi=10,xi=100");
    assert_eq!(lines.len(), 12);
    assert!(lines[1].starts_with("0,0.023987,"));
    assert_eq!(lines[3].split(',').nth(3), Some("0.011781"));
    for l in &lines[1..] {
        for cell in l.split(',').skip(1) {
            assert_eq!(cell.split('.').nth(1).map(str::len), Some(6), "{cell}");
        }
    }
}

#[test]
fn fig2_c_column_is_linear() {
    let o = run(&["fig2", "--chi", "0.5,1,3", "--jmax", "4096", "--format", "json"]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["columns"][3], "C");
    for row in doc["rows"].as_array().unwrap() {
        let chi = row[0].as_f64().unwrap();
        assert!((row[3].as_f64().unwrap() - chi / PI).abs() < 1e-15);
        let bmc = row[4].as_f64().unwrap();
        assert!((0.0..=PI / 6.0).contains(&bmc));
    }
}

#[test]
fn energy_conditions_all_violated() {
    let o = run(&["energy-conditions", "--jmax", "512"]);
    let lines = csv_lines(&o);
    assert_eq!(lines.len(), 17);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(2) == Some("true")));
}

#[test]
fn qwei_reports_positive_margin() {
    let o = run(&["qwei", "--chi", "10", "--v", "0.9", "--jmax", "512", "--format", "json"]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["columns"][2], "margin");
    assert!(doc["rows"][0][2].as_f64().unwrap() > 0.0);
}

#[test]
fn stress_marks_points_on_pulses() {
    let o = run(&["stress", "--chi", "1", "--jmax", "256", "--x", "0.125,0.25", "--t", "0.25"]);
    let lines = csv_lines(&o);
    assert!(lines[1].ends_with(','));
    assert!(lines[2].ends_with(",right"));
}

#[test]
fn greens_and_eta_commands() {
    let o = run(&["greens", "--x", "0.1", "--t", "0.3", "--nmax", "1000000"]);
    let row: Vec<f64> = csv_lines(&o)[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[0] - row[1]).abs() < 1e-6);
    let o = run(&["eta", "--xi", "1", "--a", "1"]);
    let row: Vec<f64> = csv_lines(&o)[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert!(row[2] > 0.0 && row[5] < 1e-8);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("casimir-pulse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("roots.csv");
    let o = run(&["roots", "--chi", "1", "--jmax", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("j,Z,eps,A2,residual"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn stamp_only_touches_the_manifest() {
    let o = run(&["roots", "--chi", "1", "--jmax", "2", "--stamp"]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.contains("\"timestamp\""));
    assert_eq!(csv_lines(&o), csv_lines(&run(&["roots", "--chi", "1", "--jmax", "2"])));
}

#[test]
fn help_documents_truncation_defaults() {
    for (cmd, needle) in [
        ("roots", "[default: 100]"),
        ("table1", "[default: 500]"),
        ("fig2", "[default: 32768]"),
        ("stress", "[default: 4096]"),
        ("qwei", "at most 10000"),
        ("greens", "[default: 4096]"),
    ] {
        let o = run(&[cmd, "--help"]);
        assert!(stdout(&o).contains(needle), "{cmd}");
    }
}
