use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn chatter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chatter"))
        .args(args)
        .env("CHATTER_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn field(row: &[String], i: usize) -> f64 {
    row[i].parse().unwrap()
}

#[test]
fn predict_lsv_nominal_point() {
    let o = chatter(&["predict", "--controller", "lsv", "--k", "5.5", "--b", "3", "--mu", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("controller,mu,amplitude,omega,power"));
    let row = &csv_rows(&text)[0];
    assert!((field(row, 2) - 0.014712).abs() < 1e-5);
    assert!((field(row, 3) - 16.733).abs() < 1e-3);
    assert!((field(row, 4) - 4.611e-3).abs() < 1e-6);
}

#[test]
fn predict_stc_nominal_point() {
    let o = chatter(&["predict", "--controller", "stc", "--k1", "4.4721", "--k2", "5.5", "--mu", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let row = &csv_rows(&stdout(&o))[0];
    assert!((field(row, 2) - 0.0703).abs() < 1e-4);
    assert!((field(row, 3) - 13.70).abs() < 1e-2);
    assert!((field(row, 4) - 0.0862).abs() < 1e-4);
}

#[test]
fn predict_beyond_bound_exits_2() {
    let o = chatter(&["predict", "--controller", "lsv", "--k", "5.5", "--b", "3", "--mu", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.1666"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(chatter(&["predict", "--bogus"]).status.code(), Some(64));
    assert_eq!(chatter(&["nyquist", "--points", "0"]).status.code(), Some(64));
    assert_eq!(chatter(&["predict", "--controller", "lsv", "--k", "-1"]).status.code(), Some(64));
    assert_eq!(chatter(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_marks_unstable_cells() {
    let o = chatter(&["sweep"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 48);
    assert!(rows.iter().all(|r| r[5] == "ok"));

    let o = chatter(&["sweep", "--mu-start", "0.15", "--mu-stop", "0.18", "--mu-step", "0.01"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 12);
    for r in &rows {
        let past = field(r, 1) > 1.0 / 6.0;
        if r[0] == "lsv" && past {
            assert_eq!(r[5], "unstable");
            assert!(r[2].is_empty() && r[3].is_empty() && r[4].is_empty());
        } else {
            assert_eq!(r[5], "ok", "{r:?}");
        }
    }

    let o = chatter(&["sweep", "--mu-start", "0.05", "--mu-stop", "0.05"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 3);
}

#[test]
fn simulate_measure_and_divergence() {
    let dir = tempdir().unwrap();
    let run = dir.path().join("run.csv");
    let o = chatter(&["simulate", "--out", run.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.csv.json")).unwrap()).unwrap();
    assert!(side["diverged_at"].is_null());
    assert!(dir.path().join("run.csv.manifest.json").exists());

    let o = chatter(&["measure", "--input", run.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let a = m["amplitude"].as_f64().unwrap();
    assert!(((a - 0.0147) / 0.0147).abs() < 0.15, "{a}");

    let o = chatter(&["measure", "--input", run.to_str().unwrap(), "--power-mode", "integral"]);
    let mi: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(mi["power_mode"], "integral");
    assert!(mi["average_power"].as_f64().unwrap() < m["average_power"].as_f64().unwrap());

    let bad = dir.path().join("bad.csv");
    let o = chatter(&["simulate", "--mu", "0.2", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bad.csv.json")).unwrap()).unwrap();
    assert!(side["diverged_at"].as_f64().is_some());
    assert_eq!(chatter(&["measure", "--input", bad.to_str().unwrap()]).status.code(), Some(3));

    let short = dir.path().join("short.csv");
    let o = chatter(&["simulate", "--horizon", "0.001", "--out", short.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn measure_synthetic_sine() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("sine.csv");
    let mut text = String::from("t,x1,x1dot,u,sigma\n");
    for i in 0..=20_000 {
        let t = i as f64 * 1e-3;
        text.push_str(&format!("{t},{},{},0,0\n", (10.0 * t).sin(), 10.0 * (10.0 * t).cos()));
    }
    std::fs::write(&path, text).unwrap();
    let o = chatter(&["measure", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((m["omega"].as_f64().unwrap() - 10.0).abs() < 0.05);
    assert!((m["amplitude"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn critical_mu_hb() {
    let o = chatter(&["critical-mu", "--method", "hb"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let a = r["hb"]["amplitude"]["mu_values"][0].as_f64().unwrap();
    let w = r["hb"]["frequency"]["mu_values"][0].as_f64().unwrap();
    let p = &r["hb"]["power"];
    assert!((a - 0.1323).abs() < 5e-4);
    assert!((w - 0.0885).abs() < 5e-4);
    assert!((p["mu_values"][0].as_f64().unwrap() - 0.1392).abs() < 5e-4);
    assert_eq!(p["mu_values"].as_array().unwrap().len(), 1);
    assert_eq!(p["discarded_roots"].as_array().unwrap().len(), 6);
}

#[test]
fn critical_mu_simulation() {
    let o = chatter(&["critical-mu", "--method", "simulation"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (key, reference) in [("amplitude", 0.1255), ("frequency", 0.0811), ("power", 0.1325)] {
        let mu = r[key]["mu"].as_f64().unwrap();
        assert!((mu - reference).abs() < 0.01, "{key}: {mu}");
    }
}

#[test]
fn nyquist_curves() {
    let o = chatter(&["nyquist", "--mu", "0.05", "--points", "500", "--omega-min", "1", "--omega-max", "1e4"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let w: Vec<_> = rows.iter().filter(|r| r[0] == "w").collect();
    assert_eq!(w.len(), 500);
    // phase runs from -90 to -270 degrees: left half-plane, quadrant III below w = 1/mu
    assert!(w.iter().all(|r| field(r, 3) < 0.0));
    assert!(w.iter().filter(|r| field(r, 1) < 20.0).all(|r| field(r, 4) < 0.0));

    // the -1/N curve at the predicted frequency passes the loop value there
    let n: Vec<_> = rows.iter().filter(|r| r[0] == "neg_inv_n").collect();
    let omega = field(n[0], 2);
    let target = loop_value(omega);
    let best = n
        .iter()
        .map(|r| ((field(r, 3) - target.0).powi(2) + (field(r, 4) - target.1).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-2 * (target.0.hypot(target.1)), "{best}");
}

/// `W(j w)` for `mu = 0.05`.
fn loop_value(omega: f64) -> (f64, f64) {
    let mu = 0.05;
    // W = 1 / (jw (1 + j mu w)^2)
    let (re1, im1) = (1.0 - mu * mu * omega * omega, 2.0 * mu * omega);
    let (re, im) = (-omega * im1, omega * re1);
    let d = re * re + im * im;
    (re / d, -im / d)
}

fn replay_matches(args: &[&str], dir: &Path, name: &str) {
    let first = dir.join(name);
    let second = dir.join(format!("again-{name}"));
    let mut a: Vec<&str> = args.to_vec();
    let first_s = first.to_str().unwrap().to_string();
    a.extend(["--out", &first_s]);
    let o = chatter(&a);
    assert!(matches!(o.status.code(), Some(0) | Some(3)));
    let manifest = format!("{first_s}.manifest.json");
    let o2 = chatter(&["replay", &manifest, "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), o2.status.code());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap(), "{args:?}");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], args[0]);
    assert!(m["parameters"].as_object().unwrap().len() >= 5);
}

#[test]
fn replay_is_byte_identical() {
    let dir = tempdir().unwrap();
    replay_matches(&["predict", "--controller", "tsv", "--mu", "0.07"], dir.path(), "p.csv");
    replay_matches(&["sweep", "--controllers", "lsv,stc", "--mu-stop", "0.2"], dir.path(), "s.csv");
    replay_matches(&["simulate", "--controller", "stc", "--horizon", "2", "--x1-0", "-0.5"], dir.path(), "t.csv");
    replay_matches(&["simulate", "--mu", "0.2", "--every", "10"], dir.path(), "d.csv");
    replay_matches(&["measure", "--controller", "tsv", "--power-mode", "integral"], dir.path(), "m.json");
    replay_matches(&["critical-mu"], dir.path(), "c.json");
    replay_matches(&["nyquist", "--controller", "stc", "--points", "50"], dir.path(), "n.csv");
}
