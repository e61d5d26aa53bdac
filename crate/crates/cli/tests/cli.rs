use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdstack"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(&workspace_root(), args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn readme() -> String {
    std::fs::read_to_string(workspace_root().join("README.md")).unwrap()
}

fn fenced_blocks(text: &str, lang: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<String> = None;
    for line in text.lines() {
        match &mut current {
            None if line.trim_start() == format!("```{lang}") => current = Some(String::new()),
            Some(body) if line.trim_start() == "```" => {
                blocks.push(std::mem::take(body));
                current = None;
            }
            Some(body) => {
                body.push_str(line);
                body.push('\n');
            }
            None => {}
        }
    }
    blocks
}

#[test]
fn readme_commands_all_succeed() {
    let commands: Vec<String> = fenced_blocks(&readme(), "sh")
        .iter()
        .flat_map(|b| b.lines().map(str::to_owned).collect::<Vec<_>>())
        .filter(|l| l.starts_with("qdstack "))
        .collect();
    assert!(commands.len() >= 10, "README lost its examples");
    for cmd in commands {
        let args: Vec<&str> = cmd.split_whitespace().skip(1).collect();
        let out = run(&args);
        assert!(
            out.status.success(),
            "`{cmd}` failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "`{cmd}` printed nothing");
    }
}

#[test]
fn readme_config_example_parses_and_writes_output() {
    let json = fenced_blocks(&readme(), "json").remove(0);
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), json).unwrap();
    let out = run_in(
        dir.path(),
        &["g-factor", "--config", "run.json", "--material", "myinas", "--energy-mev", "50"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert!(written.starts_with("material,energy_mev,g,mass\nInAs,50,"));
}

#[test]
fn table_fixture_passes() {
    let out = run(&["validate", "--fixture", "table1", "--tsw-ps", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["k-l", "dE00_meV", "dE11_meV", "pass17"]);
    assert_eq!(rows.len(), 9);
    assert!(rows[1..].iter().all(|r| r[3] == "true"));
    assert_eq!(rows[1][..3], ["1-2", "13.2029", "12.4829"]);
}

#[test]
fn long_switching_time_breaks_the_fixture() {
    // Ω_op shrinks with T_sw, so the fixture only fails when T_sw is short
    let out = run(&["validate", "--fixture", "table1", "--tsw-ps", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(",false"));
}

#[test]
fn vee_example_suppresses_third_level() {
    let out = run(&["vee", "--rabi12-mev", "0.2078", "--det13-mev", "0.72", "--duration-ps", "12"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0], ["t_ps", "p1", "p2", "p3"]);
    let last = rows.last().unwrap();
    let p: Vec<f64> = last[1..].iter().map(|x| x.parse().unwrap()).collect();
    assert!(p[2] < 0.05, "p3 = {}", p[2]);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
}

#[test]
fn ideal_cnot_truth_table() {
    for (input, expect) in [("00", "1u3u"), ("01", "1u3d"), ("10", "1d3d"), ("11", "1d3u")] {
        let out = run(&["gate", "--mode", "ideal", "--input", input]);
        assert!(out.status.success());
        let rows = csv_rows(&stdout(&out));
        let col = rows[0].iter().position(|c| c == expect).unwrap();
        assert_eq!(rows.last().unwrap()[col], "1", "input {input}");
    }
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(run(&["pulse", "--rabi-mev", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["gate", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--fixture", "table9"]).status.code(), Some(2));
    assert_eq!(run(&["g-factor", "--material", "unobtainium"]).status.code(), Some(2));
    assert_eq!(run(&["gate", "--mode", "ideal", "--sequence", "C:7:1-3"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&["pulse", "--rabi-mev", "0.2", "--duration-ps=-1"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["well-solve", "--half-width-nm", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn config_with_unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"pulses": [], "colour": "blue"}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "pulse"]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    let out = run(&["--config", missing.to_str().unwrap(), "pulse"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pulse_from_config_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    std::fs::write(
        &cfg,
        r#"{"pulses": [{"kind": "two-level", "rabi_mev": 0.2068, "detuning_mev": 0.1, "duration_ps": 10}]}"#,
    )
    .unwrap();
    let from_cfg = run(&["pulse", "--config", cfg.to_str().unwrap(), "--samples", "50"]);
    let from_flags = run(&[
        "pulse", "--rabi-mev", "0.2068", "--detuning-mev", "0.1", "--duration-ps", "10", "--samples", "50",
    ]);
    assert!(from_cfg.status.success() && from_flags.status.success());
    assert_eq!(from_cfg.stdout, from_flags.stdout);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("levels.csv");
    let out = run(&[
        "levels", "--half-widths-nm", "12,1,6.16", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("dot,half_width_nm,energy_mev,g,E0_meV,E1_meV\n"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let design = ["design", "--n-dots", "3", "--seed", "5", "--starts", "8", "--iterations", "200"];
    assert_eq!(run(&design).stdout, run(&design).stdout);
    let gate = ["gate", "--mode", "pulsed", "--half-widths-nm", "12,1,6.16", "--report", "--steps-per-tsw", "4000"];
    let a = run(&gate);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&gate).stdout);
}

#[test]
fn check_reports_selectivity() {
    let out = run(&["check", "--half-widths-nm", "12,1,6.16", "--tsw-ps", "10"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());
    let same = run(&["check", "--half-widths-nm", "4,4,4", "--tsw-ps", "10"]);
    assert!(same.status.success());
    assert_ne!(out.stdout, same.stdout);
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    let text = stdout(&out);
    for sub in [
        "g-factor", "sphere-g", "well-solve", "levels", "transitions", "check", "pulse", "vee", "gate",
        "design", "validate",
    ] {
        assert!(text.contains(sub), "{sub} missing from help");
        assert!(run(&[sub, "--help"]).status.success());
    }
}
