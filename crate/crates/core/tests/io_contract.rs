#![allow(clippy::excessive_precision)]

//! Configuration echo, sweep CSV and exit-status contract.
//!
//! Golden files live in `tests/golden`; run with `ECBRAKE_BLESS=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ecbrake::io::config::{load_config, RunConfig, Source};
use ecbrake::io::export::{parse_sweep_csv, sweep_csv_string, CSV_HEADER};
use ecbrake::search::run_sweep;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("ECBRAKE_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{} differs", path.display());
}

fn ecbrake(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecbrake"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn default_echo_matches_golden() {
    golden("default_echo.txt", &RunConfig::default().echo_text());
}

#[test]
fn user_echo_matches_golden() {
    let cfg = load_config(&data("solution2.toml")).unwrap();
    golden("solution2_echo.txt", &cfg.echo_text());
}

#[test]
fn default_echo_lists_design_table_values() {
    let cfg = RunConfig::default();
    let line = |key: &str| {
        cfg.echo
            .iter()
            .find(|l| l.key == key)
            .unwrap_or_else(|| panic!("{key}"))
            .clone()
    };
    for (key, value, source) in [
        ("geometry.r3", "0.14 m", Source::Table(1)),
        ("geometry.r2", "0.112 m", Source::Table(1)),
        ("requirement.per_wheel_torque", "243 N·m", Source::Table(1)),
        ("requirement.speed_min", "1000 rpm", Source::Table(1)),
        ("requirement.speed_max", "8000 rpm", Source::Table(1)),
        ("magnets.pole_pairs", "4", Source::Table(2)),
        ("magnets.pole_arc_ratio", "0.444", Source::Table(2)),
        ("geometry.air_gap", "0.001 m", Source::Table(2)),
        ("geometry.back_iron_thickness", "0.002 m", Source::Table(2)),
        ("geometry.plate_thickness", "0.002 m", Source::Table(2)),
        (
            "materials.mu0",
            "1.2566370614359173e-6 H/m",
            Source::Table(3),
        ),
        ("materials.conductivity", "5.7e8 S/m", Source::Table(3)),
        ("magnets.remanence", "1.25 T", Source::Table(3)),
    ] {
        let l = line(key);
        assert_eq!((l.value.as_str(), l.source), (value, source), "{key}");
    }
}

#[test]
fn sweep_csv_matches_golden_and_round_trips() {
    let cfg = load_config(&data("small_grid.toml")).unwrap();
    let result = run_sweep(&cfg.model, &cfg.grid, cfg.convention.unwrap()).unwrap();
    let text = sweep_csv_string(&result);
    golden("small_sweep.csv", &text);

    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
    assert!(!text.contains('\r'));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        for f in &fields[..4] {
            let mantissa = f
                .split('e')
                .next()
                .unwrap()
                .trim_start_matches('-')
                .replace('.', "");
            assert_eq!(mantissa.len(), 17, "{f}");
        }
    }

    let back = parse_sweep_csv(text.as_bytes(), "golden").unwrap();
    let keys: Vec<(f64, f64, f64)> = back.iter().map(|e| (e.b, e.w_m, e.speed.value())).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(keys, sorted, "rows are b-major");
    for (x, y) in back.iter().zip(&result.entries) {
        assert_eq!(x.torque.unwrap().to_bits(), y.torque.unwrap().to_bits());
    }
}

#[test]
fn cli_sweep_writes_the_same_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = ecbrake(&[
        "sweep",
        "--config",
        data("small_grid.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--sidecar-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = load_config(&data("small_grid.toml")).unwrap();
    let expected =
        sweep_csv_string(&run_sweep(&cfg.model, &cfg.grid, cfg.convention.unwrap()).unwrap());
    assert_eq!(std::fs::read_to_string(out).unwrap(), expected);
}

#[test]
fn exit_status_success() {
    let o = ecbrake(&["requirement"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("160.0 km/h"));
    assert!(text.contains("971.6000 N·m (rounded 972 N·m)"));
    assert!(text.contains("242.9000 N·m (rounded 243 N·m)"));
    assert!(text.contains("9.722 s"));

    let dir = tempfile::tempdir().unwrap();
    let o = ecbrake(&[
        "torque",
        "--speed",
        "0",
        "--sidecar-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("torque_Nm = 0.0000000000000000e0"));
}

#[test]
fn exit_status_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let cases = [
        (
            write("unit.toml", "[geometry]\nb = \"30 kg\"\n"),
            "UNIT_ERROR",
        ),
        (
            write("range.toml", "[geometry]\nb = \"-1 mm\"\n"),
            "RANGE_ERROR",
        ),
        (
            write("parse.toml", "[geometry]\nb = \"30 mm\"\nextra = 3\n"),
            "PARSE_ERROR",
        ),
    ];
    for (path, code) in &cases {
        let o = ecbrake(&["--config", path, "requirement"]);
        assert_eq!(o.status.code(), Some(2), "{code}: {}", stderr(&o));
        assert!(stderr(&o).contains(code), "{}", stderr(&o));
    }
    assert!(stderr(&ecbrake(&["--config", &cases[2].0, "requirement"])).contains(":3:1:"));

    assert_eq!(
        ecbrake(&["--speed-convention", "hz", "requirement"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(ecbrake(&["torque"]).status.code(), Some(2));
    assert_eq!(
        ecbrake(&["--lambda", "-1", "torque", "--speed", "1000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ecbrake(&["oracle-check", "--mesh", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn exit_status_numerical_errors() {
    let dir = tempfile::tempdir().unwrap();
    let sidecars = dir.path().to_str().unwrap();
    let o = ecbrake(&[
        "--config",
        data("strict_truncation.toml").to_str().unwrap(),
        "--sidecar-dir",
        sidecars,
        "torque",
        "--speed",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NON_CONVERGED"));

    let o = ecbrake(&[
        "--config",
        data("small_grid.toml").to_str().unwrap(),
        "--sidecar-dir",
        sidecars,
        "rank",
        "--target",
        "5000",
        "--feasible-only",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("EMPTY_FEASIBLE_SET"));
    assert!(stderr(&o).contains("hint"));
}

#[test]
fn exit_status_io_errors() {
    let o = ecbrake(&["--config", "/nonexistent/ecbrake.toml", "requirement"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("IO_ERROR"));
    let o = ecbrake(&["--out", "/nonexistent/dir/out.txt", "requirement"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn calibration_sidecar_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let sidecars = dir.path().to_str().unwrap();
    let o = ecbrake(&["--sidecar-dir", sidecars, "calibrate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("lambda_star"));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);

    let o = ecbrake(&["--sidecar-dir", sidecars, "torque", "--speed", "8000"]);
    let text = stdout(&o);
    assert!(text.contains("lambda_source = \"sidecar\""), "{text}");
    let field = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        line.split('=').nth(1).unwrap().trim().parse().unwrap()
    };
    let (torque, lambda) = (field("torque_Nm"), field("lambda"));
    assert!(text.contains("speed_convention = \"rpm\""), "{text}");
    assert_eq!(torque, 253.802, "reference point is reproduced");
    assert!(
        (torque / lambda - 20.6190685300884779).abs() < 1e-9,
        "{text}"
    );

    let o = ecbrake(&[
        "--sidecar-dir",
        sidecars,
        "--lambda",
        "1",
        "torque",
        "--speed",
        "8000",
    ]);
    assert!(stdout(&o).contains("lambda_source = \"flag\""));
}

#[test]
fn oracle_check_passes_at_default_mesh() {
    let o = ecbrake(&["oracle-check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains(": PASS"));
}
