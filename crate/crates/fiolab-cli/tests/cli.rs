//! End-to-end checks of the command-line surface: exit codes, file outputs,
//! report round-trips, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fiolab")
}

fn workspace_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fiolab_cli_{}_{}", tag, std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// A small, fast config written into `dir`; returns the config path.
fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn small_sharpness_config(dir: &Path) -> String {
    format!(
        r#"
dimension = 1
seed = 11

[grid]
points_per_axis = 1024
half_width = 2.0

[phase]
kind = "phi_product"
rank = 1
bump_scale = 0.1

[symbol]
order = 0.0
plateau = 1.0
support = 1.5

[experiment]
p = 1.0
j_min = 3
j_max = 5
family = "fixed_width"
tolerance = 0.3

[output]
csv = "{0}/sweep.csv"
report = "{0}/sweep_report.toml"
svg = "{0}/sweep.svg"
"#,
        dir.display()
    )
}

#[test]
fn sharpness_writes_all_outputs_and_passes() {
    let dir = temp_dir("sharp");
    let cfg = write_config(&dir, &small_sharpness_config(&dir));
    let out = run(&["sharpness", "--config", cfg.to_str().unwrap(), "--strict"]);
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "j,ratio,log2_ratio");
    assert_eq!(lines.count(), 3);

    // the report file parses back and matches the CSV
    let report: toml::Value =
        toml::from_str(&fs::read_to_string(dir.join("sweep_report.toml")).unwrap()).unwrap();
    assert_eq!(report["seed"].as_integer(), Some(11));
    assert_eq!(report["verdict"].as_bool(), Some(true));
    assert_eq!(report["scales"].as_array().unwrap().len(), 3);
    let ratio_in_report = report["ratios"].as_array().unwrap()[0].as_float().unwrap();
    let ratio_in_csv: f64 = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((ratio_in_report - ratio_in_csv).abs() < 1e-15);

    let svg = fs::read_to_string(dir.join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("polyline"));
}

#[test]
fn identical_configs_give_bit_identical_csv() {
    let dir_a = temp_dir("det_a");
    let dir_b = temp_dir("det_b");
    let cfg_a = write_config(&dir_a, &small_sharpness_config(&dir_a));
    let cfg_b = write_config(&dir_b, &small_sharpness_config(&dir_b));
    assert!(run(&["sharpness", "--config", cfg_a.to_str().unwrap()])
        .status
        .success());
    assert!(run(&["sharpness", "--config", cfg_b.to_str().unwrap()])
        .status
        .success());
    let a = fs::read(dir_a.join("sweep.csv")).unwrap();
    let b = fs::read(dir_b.join("sweep.csv")).unwrap();
    assert_eq!(a, b);

    // parallel reduction mode is also reproducible run-to-run
    let body =
        small_sharpness_config(&dir_a).replace("seed = 11", "seed = 11\nreduction = \"parallel\"");
    let cfg = write_config(&dir_a, &body);
    assert!(run(&["sharpness", "--config", cfg.to_str().unwrap()])
        .status
        .success());
    let first = fs::read(dir_a.join("sweep.csv")).unwrap();
    assert!(run(&["sharpness", "--config", cfg.to_str().unwrap()])
        .status
        .success());
    let second = fs::read(dir_a.join("sweep.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn malformed_config_exits_2() {
    let dir = temp_dir("bad");
    let cfg = write_config(&dir, "not_a_field = 3\n");
    let out = run(&["sharpness", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let missing = dir.join("nope.toml");
    let out = run(&["apply", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unresolvable_scale_exits_2() {
    let dir = temp_dir("scale");
    let body = small_sharpness_config(&dir).replace("j_max = 5", "j_max = 9");
    let cfg = write_config(&dir, &body);
    let out = run(&["sharpness", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_verdict_failure_exits_4() {
    let dir = temp_dir("strict");
    let body = small_sharpness_config(&dir).replace("tolerance = 0.3", "tolerance = 0.001");
    let cfg = write_config(&dir, &body);
    let out = run(&["sharpness", "--config", cfg.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(4));
    // without --strict the same run exits 0
    let out = run(&["sharpness", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn apply_check_identity_and_translation() {
    let dir = temp_dir("apply");
    let body = format!(
        r#"
dimension = 1
seed = 3

[grid]
points_per_axis = 1024
half_width = 8.0

[phase]
kind = "linear"

[symbol]
order = 0.0

[experiment]
p = 2.0
j_min = 1
j_max = 3

[input]
kind = "modulated_gaussian"
width = 0.5
modulation = 6.0

[output]
csv = "{0}/apply.csv"
report = "{0}/apply_report.toml"
"#,
        dir.display()
    );
    let cfg = write_config(&dir, &body);
    let out = run(&[
        "apply",
        "--config",
        cfg.to_str().unwrap(),
        "--check",
        "--strict",
    ]);
    assert!(out.status.success());
    let report: toml::Value =
        toml::from_str(&fs::read_to_string(dir.join("apply_report.toml")).unwrap()).unwrap();
    assert_eq!(report["verdict"].as_bool(), Some(true));

    // shifted variant: the shift is 32 grid cells
    let body = body.replace("kind = \"linear\"", "kind = \"shifted\"\nshift = [0.5]");
    let cfg = write_config(&dir, &body);
    let out = run(&[
        "apply",
        "--config",
        cfg.to_str().unwrap(),
        "--check",
        "--strict",
    ]);
    assert!(out.status.success());

    // off-grid shift cannot be checked
    let body = body.replace("shift = [0.5]", "shift = [0.507]");
    let cfg = write_config(&dir, &body);
    let out = run(&["apply", "--config", cfg.to_str().unwrap(), "--check"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nan_in_computation_exits_3() {
    let dir = temp_dir("nan");
    let body = format!(
        r#"
dimension = 1
seed = 3

[grid]
points_per_axis = 256
half_width = 8.0

[phase]
kind = "linear"

[symbol]
order = 0.0

[experiment]
p = 2.0
j_min = 1
j_max = 3

[input]
kind = "modulated_gaussian"
width = 0.5
modulation = inf

[output]
csv = "{0}/nan.csv"
report = "{0}/nan_report.toml"
"#,
        dir.display()
    );
    let cfg = write_config(&dir, &body);
    let out = run(&["apply", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn check_phase_rejects_oversized_bump() {
    let dir = temp_dir("phase");
    let body = small_sharpness_config(&dir).replace("bump_scale = 0.1", "bump_scale = 2.0");
    let cfg = write_config(&dir, &body);
    let out = run(&["check-phase", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("min slope"), "stderr: {}", msg);
}

#[test]
fn check_phase_passes_on_linear() {
    let dir = temp_dir("phase_ok");
    let body = small_sharpness_config(&dir)
        .replace("kind = \"phi_product\"", "kind = \"linear\"")
        .replace("rank = 1\n", "")
        .replace("bump_scale = 0.1\n", "");
    let cfg = write_config(&dir, &body);
    let out = run(&["check-phase", "--config", cfg.to_str().unwrap(), "--strict"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fibration_rank: 0"), "stdout: {}", text);
}

#[test]
fn shipped_configs_parse() {
    for name in [
        "sharpness_p1.toml",
        "sharpness_threshold.toml",
        "sharpness_p2.toml",
        "identity_check.toml",
        "shifted_check.toml",
        "schur_d1.toml",
        "commutation.toml",
        "r0_control_d2.toml",
        "check_phase.toml",
        "decompose.toml",
    ] {
        let path = workspace_config(name);
        let text = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", name));
        let parsed: Result<toml::Value, _> = toml::from_str(&text);
        assert!(parsed.is_ok(), "config {} does not parse", name);
    }
}

#[test]
fn shipped_sharpness_config_passes_strict() {
    // run the canonical shipped configuration end to end; outputs land in a
    // scratch working directory
    let dir = temp_dir("shipped");
    let cfg = workspace_config("sharpness_p1.toml");
    let out = Command::new(bin())
        .current_dir(&dir)
        .args(["sharpness", "--config", cfg.to_str().unwrap(), "--strict"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let report: toml::Value =
        toml::from_str(&fs::read_to_string(dir.join("out/sharpness_p1_report.toml")).unwrap())
            .unwrap();
    assert_eq!(report["verdict"].as_bool(), Some(true));
    let slope = report["slope"].as_float().unwrap();
    assert!((0.35..=0.65).contains(&slope), "slope {}", slope);
}

#[test]
fn commutation_small_run() {
    let dir = temp_dir("comm");
    let body = format!(
        r#"
dimension = 1
seed = 5

[grid]
points_per_axis = 1024
half_width = 2.0

[phase]
kind = "phi_product"
rank = 1
bump_scale = 0.1

[symbol]
order = 0.0
plateau = 1.0
support = 1.5

[experiment]
p = 1.0
j_min = 1
j_max = 5

[output]
csv = "{0}/comm.csv"
report = "{0}/comm_report.toml"
"#,
        dir.display()
    );
    let cfg = write_config(&dir, &body);
    let out = run(&["commutation", "--config", cfg.to_str().unwrap(), "--strict"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.join("comm.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "k,j,value");
    assert_eq!(csv.lines().count(), 26); // header + 5x5 entries
}
