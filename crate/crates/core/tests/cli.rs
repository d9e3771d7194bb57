use std::path::PathBuf;
use std::process::{Command, Output};

fn nmecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmecut"))
        .args(args)
        .env_remove("NMECUT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    csv::Reader::from_reader(out.stdout.as_slice())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nmecut-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn overhead_table_rows() {
    let out = nmecut(&["overhead", "--table"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert!(rows
        .iter()
        .any(|r| r[0] == "1" && r[1] == "0" && r[2] == "3" && r[3] == "3"));
    assert!(rows.iter().any(|r| r[0] == "2" && r[2] == "7"));
    assert!(rows.iter().any(|r| r[0] == "3" && r[2] == "15"));
}

#[test]
fn overhead_single_value() {
    let out = nmecut(&["overhead", "--n", "1", "--robustness", "0.6"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["result"]["gamma"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    let out = nmecut(&[
        "overhead",
        "--n",
        "1",
        "--schmidt",
        "0.9486832980505138,0.31622776601683794",
    ]);
    assert!((json(&out)["result"]["gamma"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn verify_example_succeeds() {
    let out = nmecut(&["verify", "--n", "2", "--schmidt", "0.8,0.4,0.4,0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["max_abs_error"].as_f64().unwrap() <= 1e-10);
    let alpha: Vec<f64> = v["spec"]["decomposition"]["schmidt"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((alpha.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn verify_streamlined_and_baseline() {
    for args in [
        &["verify", "--n", "3", "--baseline"][..],
        &[
            "verify",
            "--n",
            "3",
            "--streamlined",
            "2",
            "--schmidt",
            "0.7,0.5,0.4,0.3",
        ][..],
        &["verify", "--n", "2", "--streamlined", "0"][..],
    ] {
        let out = nmecut(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(json(&out)["max_abs_error"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn verify_failure_exits_with_two() {
    let out = nmecut(&[
        "verify",
        "--n",
        "2",
        "--schmidt",
        "0.8,0.4,0.4,0.2",
        "--tol",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mub_check_passes() {
    let out = nmecut(&["mub-check", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["status"], "ok");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(nmecut(&[]).status.code(), Some(1));
    assert_eq!(
        nmecut(&["verify", "--n", "2", "--schmidt", "0.5,0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(nmecut(&["mub-check", "--n", "9"]).status.code(), Some(1));
    assert_eq!(
        nmecut(&["sweep", "--n", "1", "--observable", "X", "--points", "65"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        nmecut(&["estimate", "--n", "1", "--baseline", "--observable", "XX"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn estimate_is_deterministic() {
    let args = [
        "estimate",
        "--n",
        "2",
        "--schmidt",
        "0.9,0.3,0.3,0.1",
        "--input",
        "random:4",
        "--observable",
        "ZY",
        "--shots",
        "20000",
        "--seed",
        "17",
    ];
    let a = nmecut(&args);
    let b = nmecut(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let est = v["result"]["estimate"].as_f64().unwrap();
    let exact = v["result"]["exact"].as_f64().unwrap();
    let se = v["result"]["std_error"].as_f64().unwrap();
    assert!((est - exact).abs() <= 5.0 * se);
    assert_eq!(v["spec"]["seed"], 17);
}

#[test]
fn sweep_endpoints() {
    let out = nmecut(&[
        "sweep",
        "--n",
        "1",
        "--points",
        "6",
        "--observable",
        "X",
        "--shots",
        "20000",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    let kappa: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(kappa.len(), 6);
    assert!((kappa[0] - 3.0).abs() < 1e-12);
    assert!((kappa[3] - 1.5).abs() < 1e-12);
    assert!((kappa[5] - 1.0).abs() < 1e-12);
    assert!(kappa.windows(2).all(|w| w[1] < w[0]));

    let out = nmecut(&[
        "sweep",
        "--n",
        "2",
        "--points",
        "2",
        "--observable",
        "XZ",
        "--shots",
        "5000",
    ]);
    let rows = csv_rows(&out);
    assert!((rows[0][1].parse::<f64>().unwrap() - 7.0).abs() < 1e-12);
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch_dir("env");
    let out = Command::new(env!("CARGO_BIN_EXE_nmecut"))
        .args(["overhead", "--table"])
        .env("NMECUT_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = std::fs::read(dir.join("overhead_table.csv")).unwrap();
    assert_eq!(written, out.stdout);

    let file = dir.join("nested").join("v.json");
    let out = nmecut(&[
        "verify",
        "--n",
        "1",
        "--baseline",
        "--output",
        file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&file).unwrap(), out.stdout);
    let _ = std::fs::remove_dir_all(&dir);
}
