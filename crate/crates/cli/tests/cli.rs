use std::path::Path;
use std::process::{Command, Output};

fn polynet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polynet"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden"))
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = polynet(&[], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flags_and_bad_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = polynet(
        &[
            "diagnose-range",
            "--activation",
            "tanh",
            "--order",
            "3",
            "--bogus",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = polynet(
        &["diagnose-range", "--activation", "relu", "--order", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = polynet(
        &["diagnose-range", "--activation", "tanh", "--order", "11"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_inputs_are_reported_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = polynet(
        &[
            "--json-errors",
            "transcode",
            "--weights",
            "absent.json",
            "--order",
            "2",
            "--out",
            "p.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "validation");
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("absent.json"));
    assert!(!dir.path().join("p.json").exists());
}

#[test]
fn malformed_files_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "x1,y\n1,oops\n").unwrap();
    let out = polynet(
        &[
            "fit-ols", "--data", "d.csv", "--degree", "1", "--out", "p.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    std::fs::write(dir.path().join("c.toml"), "[run]\nreps = 0\n").unwrap();
    let out = polynet(
        &["simulate", "--config", "c.toml", "--out", "o"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.path().join("c.toml"), "[nonsense]\n").unwrap();
    let out = polynet(
        &["simulate", "--config", "c.toml", "--out", "o"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diagnose_range_reports_the_tanh_interval() {
    let dir = tempfile::tempdir().unwrap();
    let text = ok(&polynet(
        &["diagnose-range", "--activation", "tanh", "--order", "1"],
        dir.path(),
    ));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["hi"].as_f64().unwrap() - 0.711811554865).abs() < 1e-5);
    assert_eq!(v["lo"].as_f64().unwrap(), -v["hi"].as_f64().unwrap());
}

#[test]
fn transcode_and_ols_give_comparable_polynomials() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&polynet(
        &[
            "generate",
            "--seed",
            "5",
            "--p",
            "2",
            "--out",
            "d.csv",
            "--generator",
            "g.json",
        ],
        d,
    ));
    let summary = ok(&polynet(
        &[
            "train",
            "--data",
            "d.csv",
            "--seed",
            "1",
            "--max-epochs",
            "500",
            "--out",
            "w.json",
            "--scaling-out",
            "s.json",
        ],
        d,
    ));
    let s: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(s["epochs"], 500);
    ok(&polynet(
        &[
            "transcode",
            "--weights",
            "w.json",
            "--order",
            "2",
            "--scaling",
            "s.json",
            "--out",
            "p.json",
        ],
        d,
    ));
    ok(&polynet(
        &[
            "fit-ols", "--data", "d.csv", "--degree", "2", "--out", "o.json",
        ],
        d,
    ));
    let nn = polynet::poly::load_polynomial(&d.join("p.json")).unwrap();
    let ols = polynet::poly::load_polynomial(&d.join("o.json")).unwrap();
    assert_eq!((nn.p(), nn.degree()), (ols.p(), ols.degree()));
    let cmp: serde_json::Value = serde_json::from_str(&ok(&polynet(
        &["compare-coeffs", "--a", "o.json", "--b", "g.json"],
        d,
    )))
    .unwrap();
    assert_eq!(cmp["terms"].as_array().unwrap().len(), 6);
    let cov: serde_json::Value = serde_json::from_str(&ok(&polynet(
        &[
            "coverage",
            "--weights",
            "w.json",
            "--data",
            "d.csv",
            "--order",
            "3",
            "--scaling",
            "s.json",
        ],
        d,
    )))
    .unwrap();
    let overall = cov["overall"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&overall));
}

#[test]
fn training_is_byte_identical_for_the_same_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&polynet(&["generate", "--seed", "9", "--out", "d.csv"], d));
    for name in ["a.json", "b.json"] {
        ok(&polynet(
            &[
                "train",
                "--data",
                "d.csv",
                "--seed",
                "4",
                "--max-epochs",
                "300",
                "--out",
                name,
            ],
            d,
        ));
    }
    assert_eq!(
        std::fs::read(d.join("a.json")).unwrap(),
        std::fs::read(d.join("b.json")).unwrap()
    );
    ok(&polynet(
        &[
            "train",
            "--data",
            "d.csv",
            "--seed",
            "5",
            "--max-epochs",
            "300",
            "--out",
            "c.json",
        ],
        d,
    ));
    assert_ne!(
        std::fs::read(d.join("a.json")).unwrap(),
        std::fs::read(d.join("c.json")).unwrap()
    );
}

#[test]
fn simulate_matches_golden_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = golden_dir().join("smoke.toml");
    let config = config.to_str().unwrap();
    for out in ["run1", "run2"] {
        ok(&polynet(
            &["simulate", "--config", config, "--out", out],
            dir.path(),
        ));
    }
    for table in ["records.csv", "summary.csv"] {
        let first = std::fs::read(dir.path().join("run1").join(table)).unwrap();
        let second = std::fs::read(dir.path().join("run2").join(table)).unwrap();
        assert_eq!(first, second, "{table} differs between runs");
        let golden = golden_dir().join(format!("smoke_{table}"));
        if std::env::var_os("POLYNET_BLESS").is_some() {
            std::fs::write(&golden, &first).unwrap();
        }
        assert_eq!(
            first,
            std::fs::read(&golden).unwrap(),
            "{table} differs from {}",
            golden.display()
        );
    }
    let records =
        String::from_utf8(std::fs::read(dir.path().join("run1/records.csv")).unwrap()).unwrap();
    assert_eq!(records.lines().count(), 1 + 2 * 2 * 3);
}

#[test]
fn surfaces_writes_deterministic_grids() {
    let dir = tempfile::tempdir().unwrap();
    let config = golden_dir().join("smoke.toml");
    let config = config.to_str().unwrap();
    for out in ["s1", "s2"] {
        ok(&polynet(
            &["surfaces", "--config", config, "--seed", "3", "--out", out],
            dir.path(),
        ));
    }
    let names: Vec<String> = [
        "coefficients.csv",
        "surface_generator_data.csv",
        "surface_nn2_extended.csv",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for name in names {
        let a = std::fs::read(dir.path().join("s1").join(&name)).unwrap();
        assert_eq!(
            a,
            std::fs::read(dir.path().join("s2").join(&name)).unwrap(),
            "{name}"
        );
    }
    let grid = std::fs::read_to_string(dir.path().join("s1/surface_ols_data.csv")).unwrap();
    assert_eq!(grid.lines().count(), 1 + 16);
}
