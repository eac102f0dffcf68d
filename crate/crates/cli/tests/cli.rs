use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gravloc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gravloc")).current_dir(dir).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const REFERENCE: &str = "# reference ball\nmass_g = 1e-9\nradius_cm = 1e-3\nwidth_cm = 0.1\n";

#[test]
fn estimate_reports_localization_time() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("ref.cfg"), REFERENCE).unwrap();
    let out = gravloc(tmp.path(), &["estimate", "--config", "ref.cfg", "--out", "est", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&tmp.path().join("est/summary.json"));
    let tau = s["results"]["report"]["localization_time"].as_f64().unwrap();
    assert!((tau / 1.6e-3 - 1.0).abs() < 0.05, "tau_l = {tau}");
    let z = s["results"]["monte_carlo"]["z_score"].as_f64().unwrap();
    assert!(z.abs() < 5.0);
    let m = json(&tmp.path().join("est/manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["config_hash"], s["config_hash"]);
    assert!(m["started_unix"].as_f64().unwrap() > 0.0);
}

#[test]
fn identical_runs_give_identical_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("ref.cfg"), REFERENCE).unwrap();
    for dir in ["a", "b"] {
        let out = gravloc(tmp.path(), &["estimate", "--config", "ref.cfg", "--out", dir, "--seed", "11"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(tmp.path().join("a/summary.json")).unwrap();
    let b = fs::read(tmp.path().join("b/summary.json")).unwrap();
    assert_eq!(a, b);
    let out = gravloc(tmp.path(), &["estimate", "--config", "ref.cfg", "--out", "c", "--seed", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(a, fs::read(tmp.path().join("c/summary.json")).unwrap());
}

#[test]
fn evolve_writes_growing_entropy_series() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "kappa = 25\nlambda0 = 10\nextent = 128\npoints = 256\ndt = 0.05\ntime = 10\nsnapshot_every = 50\n";
    fs::write(tmp.path().join("demo.cfg"), cfg).unwrap();
    for dir in ["run1", "run2"] {
        let out = gravloc(tmp.path(), &["evolve", "--config", "demo.cfg", "--out", dir]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut rd = csv::Reader::from_path(tmp.path().join("run1/entropy.csv")).unwrap();
    let col = rd.headers().unwrap().iter().position(|h| h == "entropy").unwrap();
    let entropy: Vec<f64> = rd.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
    assert_eq!(entropy.len(), 5);
    assert!(entropy[0] < 1e-6);
    assert!(*entropy.last().unwrap() > entropy[0] + 0.1);
    assert!(tmp.path().join("run1/snapshots/snap_0004_relative.csv").exists());
    assert_eq!(
        fs::read(tmp.path().join("run1/summary.json")).unwrap(),
        fs::read(tmp.path().join("run2/summary.json")).unwrap()
    );
    let s = json(&tmp.path().join("run1/summary.json"));
    assert_eq!(s["results"]["density_valid_every_snapshot"], true);
}

#[test]
fn single_precision_evolve() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("f32.cfg"), "precision = f32\nextent = 64\npoints = 64\nlambda0 = 5\n").unwrap();
    let out = gravloc(tmp.path(), &["evolve", "--config", "f32.cfg", "--kappa", "25", "--time", "2", "--out", "f32"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&tmp.path().join("f32/summary.json"));
    assert_eq!(s["results"]["precision"], "f32");
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("s.cfg"), "kappa = 4\nout = from_file\n").unwrap();
    let out = gravloc(tmp.path(), &["spectrum", "--config", "s.cfg", "--kappa", "25", "--out", "from_flag"]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&tmp.path().join("from_flag/summary.json"));
    assert_eq!(s["results"]["kappa"].as_f64(), Some(25.0));
    assert!(!tmp.path().join("from_file").exists());
}

#[test]
fn configuration_errors_exit_with_two_and_leave_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gravloc(tmp.path(), &["spectrum", "--out", "bad"]);
    assert_eq!(out.status.code(), Some(2));
    let m = json(&tmp.path().join("bad/manifest.json"));
    assert_eq!(m["failed"], true);

    fs::write(tmp.path().join("typo.cfg"), "kapa = 3\n").unwrap();
    let out = gravloc(tmp.path(), &["evolve", "--config", "typo.cfg", "--out", "typo"]);
    assert_eq!(out.status.code(), Some(2));

    let out = gravloc(tmp.path(), &["evolve", "--kappa", "25", "--grid", "100", "--out", "grid"]);
    assert_eq!(out.status.code(), Some(2));

    let out = gravloc(tmp.path(), &["evolve", "--kappa", "25", "--dt", "5", "--out", "dt"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&tmp.path().join("dt/manifest.json"))["status"], "failed");

    let out = gravloc(tmp.path(), &["estimate", "--config", "missing.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_fans_out_and_keeps_partial_results_on_failure() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("ok.cfg"), "sweep_mode = spectrum\nsweep_kappas = 2, 25\n").unwrap();
    let out = gravloc(tmp.path(), &["sweep", "--config", "ok.cfg", "--out", "ok"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&tmp.path().join("ok/summary.json"));
    let runs = s["results"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert!(tmp.path().join("ok/run_001/spectrum.csv").exists());
    assert!(tmp.path().join("ok/run_000/manifest.json").exists());

    // The second coupling is beyond the shooting grid: the sweep reports a
    // numerical failure but keeps the first run's artifacts.
    fs::write(tmp.path().join("mixed.cfg"), "sweep_mode = spectrum\nsweep_kappas = 2, 6e16\n").unwrap();
    let out = gravloc(tmp.path(), &["sweep", "--config", "mixed.cfg", "--out", "mixed"]);
    assert_eq!(out.status.code(), Some(3));
    let m = json(&tmp.path().join("mixed/manifest.json"));
    assert_eq!(m["failed"], true);
    assert_eq!(m["exit_code"], 3);
    assert!(tmp.path().join("mixed/run_000/spectrum.csv").exists());
    assert_eq!(json(&tmp.path().join("mixed/run_001/manifest.json"))["failed"], true);
    assert!(tmp.path().join("mixed/summary.json").exists());
}

#[test]
fn threshold_and_potential() {
    let tmp = tempfile::tempdir().unwrap();
    let out = gravloc(tmp.path(), &["threshold", "--out", "thr"]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&tmp.path().join("thr/summary.json"));
    let protons = s["results"]["threshold_mass_protons"].as_f64().unwrap();
    assert!((1e9..1e12).contains(&protons));
    assert_eq!(s["results"]["self_localized_above"], 1);
    assert_eq!(s["results"]["self_localized_below"], 0);

    let out = gravloc(tmp.path(), &["potential", "--out", "pot"]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&tmp.path().join("pot/summary.json"));
    assert!(s["results"]["max_oracle_deviation"].as_f64().unwrap() < 1e-5);
}
