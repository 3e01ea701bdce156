use fracrd::cli::output::{Cell, Format};
use fracrd::cli::{run_green, run_solve_text, GridArgs, ModelArgs};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracrd"))
}

fn scenario_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn num(c: &Cell) -> f64 {
    match c {
        Cell::Num(v) => *v,
        Cell::Text(t) => panic!("expected a number, got {t}"),
    }
}

#[test]
fn green_at_origin_row() {
    let out = bin()
        .args(["green", "--alpha", "2", "--beta", "1", "--x-min", "0", "--x-count", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 4);
    let v: f64 = fields[1].parse().unwrap();
    assert!((v - 0.2820947918).abs() < 1e-10, "{row}");
}

#[test]
fn cauchy_rows() {
    let model = ModelArgs { alpha: 1.0, beta: 1.0, eta: 1.0, t: 1.0 };
    let grid = GridArgs { x_min: -4.0, x_max: 4.0, x_count: 17 };
    let t = run_green(&model, &grid).unwrap();
    assert_eq!(t.columns, ["x", "value", "err_estimate", "method"]);
    for row in &t.rows {
        let x = num(&row[0]);
        let exact = 1.0 / (std::f64::consts::PI * (1.0 + x * x));
        assert!((num(&row[1]) - exact).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn parameter_errors_exit_2() {
    let out = bin().args(["green", "--alpha", "1", "--beta", "2.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));
}

#[test]
fn malformed_scenario_exits_2_with_position() {
    let dir = std::env::temp_dir().join(format!("fracrd-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(&path, "[model]\nalpha = 1.5\nbeta = = 0.9\n").unwrap();
    let out = bin().args(["solve", "--scenario"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    let out = bin().args(["solve", "--scenario"]).arg(dir.join("missing.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_stable() {
    let run = |fmt: &str| {
        bin()
            .args(["green", "--alpha", "1.5", "--beta", "0.8", "--x-count", "21", "--format", fmt])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("csv"), run("csv"));
    let a = run("json");
    assert_eq!(a, run("json"));
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 21);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("fracrd-out-{}.csv", std::process::id()));
    let status = bin()
        .args(["moments", "--alpha", "1.5", "--beta", "0.8", "--delta", "0.5", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("delta,value,err_estimate,method"));
    assert!(text.contains("closed-form") && text.contains("quadrature"));
}

#[test]
fn verify_exit_codes() {
    let ok = bin().args(["verify", "--suite", "identities"]).output().unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = bin().args(["verify", "--suite", "identities", "--tol", "1e-30"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(4));
    // the failing case's inputs are echoed
    assert!(String::from_utf8_lossy(&bad.stderr).contains("z = "));
}

#[test]
fn zero_scenario_gives_zero_field() {
    let text = std::fs::read_to_string(scenario_dir().join("zero.toml")).unwrap();
    let t = run_solve_text(&text).unwrap();
    assert!(t.rows.iter().all(|r| num(&r[1]) == 0.0));
}

#[test]
fn delta_scenario_matches_green() {
    let text = std::fs::read_to_string(scenario_dir().join("delta.toml")).unwrap();
    let solved = run_solve_text(&text).unwrap();
    let err: f64 = solved
        .metadata
        .iter()
        .find(|(k, _)| k == "err_estimate")
        .unwrap()
        .1
        .parse()
        .unwrap();
    let model = ModelArgs { alpha: 1.5, beta: 0.9, eta: 1.0, t: 1.0 };
    let mut checked = 0;
    for row in solved.rows.iter().filter(|r| num(&r[0]).abs() <= 5.0) {
        let x = num(&row[0]);
        let g = run_green(&model, &GridArgs { x_min: x, x_max: x, x_count: 1 }).unwrap();
        let diff = (num(&row[1]) - num(&g.rows[0][1])).abs();
        assert!(diff <= err, "x = {x}: diff {diff:e} > {err:e}");
        checked += 1;
    }
    assert!(checked > 40);
    assert!(solved.render(Format::Csv).unwrap().contains("spectral"));
}
