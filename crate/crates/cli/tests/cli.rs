use std::process::{Command, Output};

fn dlpad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlpad")).args(args).output().expect("spawn dlpad")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn cumulants_default_table() {
    let o = dlpad(&["cumulants", "--nu", "0.9", "--L", "1024,2048,4096", "--orders", "1,2,4"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["L", "n", "kappa_c", "kappa_star", "ratio"]);
    assert_eq!(rows.len(), 9);
    // n = 4 ratio approaches κ*_4 from above in |.|
    let r4: Vec<f64> = rows.iter().filter(|r| r[1] == "4").map(|r| num(&r[4])).collect();
    let k4 = num(&rows[2][3]);
    assert!((r4[2] / k4 - 1.0).abs() < 1e-3);
    assert!((r4[2] - k4).abs() < (r4[0] - k4).abs());
}

#[test]
fn cumulants_rate_scaling() {
    let a = dlpad(&["cumulants", "--nu", "0.5", "--L", "64", "--orders", "2", "--format", "json"]);
    let b = dlpad(&["cumulants", "--w", "2", "--mu", "1", "--L", "64", "--orders", "2", "--format", "json"]);
    let ja: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let jb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    let ka = ja["rows"][0]["kappa_c"].as_f64().unwrap();
    let kb = jb["rows"][0]["kappa_c"].as_f64().unwrap();
    assert!((kb / ka - 4.0).abs() < 1e-14);
    assert_eq!(jb["meta"]["rate_scale"], 4.0);
}

#[test]
fn collapse_table_shape() {
    let o = dlpad(&["collapse", "--nu", "0.9", "--L", "64,128", "--u-min", "-3", "--u-max", "3", "--u-steps", "61"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["L", "u", "L2_K0_tilde", "h_limit"]);
    assert_eq!(rows.len(), 122);
    for r in rows.iter().filter(|r| num(&r[1]) == 0.0) {
        assert_eq!(num(&r[2]), 0.0);
        assert_eq!(num(&r[3]), 0.0);
    }
    let h: Vec<f64> = rows[..61].iter().map(|r| num(&r[3])).collect();
    for i in 0..61 {
        assert_eq!(h[i], h[60 - i]);
    }
}

#[test]
fn collapse_json_metadata() {
    let o = dlpad(&["collapse", "--L", "64", "--u-steps", "5", "--format", "json"]);
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["meta"]["schema"], "collapse/1");
    assert_eq!(j["meta"]["kappa_star_calibration"], 2.0);
    assert_eq!(j["meta"]["h_calibration"], 1.0);
    assert!(j["meta"]["theta"].as_f64().unwrap() > 2.0);
    assert_eq!(j["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn oracle_check_passes_and_detects_perturbation() {
    let o = dlpad(&["oracle-check", "--L", "4,6", "--nu", "0.3,0.9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let (header, rows) = csv_rows(&o);
    assert_eq!(header.last().unwrap(), "status");
    assert_eq!(rows.len(), 2 * 2 * 2 * 4);
    assert!(rows.iter().all(|r| r.last().unwrap() == "ok"));

    let bad = dlpad(&["oracle-check", "--L", "4", "--nu", "0.5", "--perturb", "1e-6"]);
    assert_eq!(bad.status.code(), Some(1));
    let (_, rows) = csv_rows(&bad);
    assert!(rows.iter().any(|r| r.last().unwrap() == "fail"));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--nu", "0.5", "--L", "16", "--t-max", "200", "--replicas", "4", "--seed", "7"];
    let a = dlpad(&args);
    let b = dlpad(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let j: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(j["meta"]["schema"], "simulate/1");
    assert!(j["rows"][0]["density_z"].as_f64().unwrap().abs() < 5.0);
    let c = dlpad(&["simulate", "--nu", "0.5", "--L", "16", "--t-max", "200", "--replicas", "4", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn simulate_rejects_odd_ring() {
    let o = dlpad(&["simulate", "--L", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn phi_table_base_case() {
    let o = dlpad(&["phi-table", "--m", "0", "--N", "1"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["m", "N", "exact", "asymptotic", "diff_N4"]);
    assert_eq!(num(&rows[0][2]), std::f64::consts::SQRT_2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dlpad(&["cumulants", "--nu", "0.5", "--w", "1"]).status.code(), Some(2));
    assert_eq!(dlpad(&["cumulants", "--nu", "1.5"]).status.code(), Some(2));
    assert_eq!(dlpad(&["cumulants", "--L", "7"]).status.code(), Some(2));
    assert_eq!(dlpad(&["collapse", "--u-steps", "0"]).status.code(), Some(2));
    assert_eq!(dlpad(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dlpad-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("phi.csv");
    let o = dlpad(&["phi-table", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 6 * 5);
    std::fs::remove_dir_all(&dir).unwrap();
}
