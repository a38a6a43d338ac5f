use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-capacity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bounds_zero_temperature() {
    let o = bin(&["bounds", "--lambda", "0.5", "--ne", "0", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("lower_bits             2.754887502"), "{text}");
    assert!(text.contains("upper_bits             2.754887502"), "{text}");
    assert!(text.contains("gap_bits               0\n"), "{text}");
}

#[test]
fn bounds_thermal_gap_chain() {
    let o = bin(&["bounds", "--lambda", "0.5", "--ne", "1", "--n", "10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let gap = v["gap_bits"].as_f64().unwrap();
    let refined = v["refined_gap_bound_bits"].as_f64().unwrap();
    let universal = v["universal_gap_bound_bits"].as_f64().unwrap();
    assert!((gap - 0.7286).abs() < 1e-4);
    assert!(gap < refined && refined < universal);
    assert!((refined - 0.7925).abs() < 1e-4 && (universal - 1.4427).abs() < 1e-4);
    assert_eq!(v["certified"], true);
}

#[test]
fn invalid_transmissivity_is_a_usage_error() {
    let o = bin(&["bounds", "--lambda", "1.5", "--ne", "0", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("transmissivity"));
    let o = bin(&["bounds", "--lambda", "0.5", "--ne", "-1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

fn read_csv(path: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn log_sweep_has_increasing_gap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = bin(&[
        "sweep", "--lambda", "0.5", "--ne", "1", "--n", "0.1:1000:10:log", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&path);
    assert_eq!(
        header,
        [
            "lambda",
            "n_env",
            "n_signal",
            "lower_bits",
            "upper_bits",
            "gap_bits",
            "refined_gap_bound_bits",
            "certified"
        ]
    );
    assert_eq!(rows.len(), 10);
    let gaps: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
    assert!(rows.iter().all(|r| r[7] == "true"));
}

#[test]
fn zero_temperature_sweep_has_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.csv");
    let o = bin(&[
        "sweep", "--lambda", "0.1:1:4", "--ne", "0", "--n", "0.5:50:5:log", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_csv(&path);
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r[5].parse::<f64>().unwrap() == 0.0 && r[7] == "true"));
    // λ outer, N inner
    assert_eq!(rows[0][0], "0.1");
    assert_eq!(rows[4][0], "0.1");
    assert_eq!(rows[5][0], "0.4");
}

#[test]
fn sweep_json_and_errors() {
    let o = bin(&["sweep", "--lambda", "0.3:0.9:3", "--ne", "0:20:3", "--n", "1:100:4:log", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| r["certified"] == true));

    let o = bin(&["sweep", "--lambda", "0.5:2:3", "--ne", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["sweep", "--lambda", "0.5", "--ne", "1", "--n", "0:10:3:log"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["sweep", "--lambda", "0.5", "--ne", "1", "--n", "1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_quick_passes() {
    let o = bin(&["verify", "--level", "quick", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.contains("thermal channel equals amplifier after pure loss"))
        .unwrap();
    assert!(line.starts_with("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_full_passes() {
    let o = bin(&["verify", "--level", "full", "--seed", "7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rep: serde_json::Value = serde_json::from_str(stdout(&o).split("\nall ").next().unwrap()).unwrap();
    let chi = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["invariant"].as_str().unwrap().contains("χ equals"))
        .unwrap();
    assert!(chi["max_discrepancy"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn optimize_vacuum_and_iteration_cap() {
    let o = bin(&["optimize", "--lambda", "0.6", "--ne", "0.5", "--n", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["best_chi_bits"], 0.0);
    assert_eq!(v["weights"].as_array().unwrap().len(), 1);

    let o = bin(&["optimize", "--lambda", "0.6", "--ne", "0", "--n", "1", "--members", "4", "--max-iters", "1"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["converged"], false);

    let o = bin(&["optimize", "--lambda", "0.6", "--ne", "0", "--n", "1", "--members", "40"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn optimize_pure_loss_reaches_capacity() {
    let o = bin(&["optimize", "--lambda", "0.6", "--ne", "0", "--n", "1", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let best = v["best_chi_bits"].as_f64().unwrap();
    let capacity = thermal_capacity::gfunc::g(0.6).unwrap() / std::f64::consts::LN_2;
    assert!((best - capacity).abs() <= 5e-3);
    assert!(v["below_upper_bits"].as_f64().unwrap() >= -1e-6);
}
