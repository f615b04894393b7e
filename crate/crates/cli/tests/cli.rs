use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wgqed(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgqed")).args(args).arg("--out").arg(out).output().unwrap()
}

fn error_doc(o: &Output) -> Value {
    assert!(!o.status.success());
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    let line = text.lines().last().unwrap();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

const SMALL: &str = r#"{
  "name": "small", "J2": 1.0, "VA_over_2J": 0.1, "VB_over_2J": 1.2,
  "DeltaA_over_2J": 0.0, "DeltaB_over_2J": 0.0, "MA": 1, "MB": 2, "dx": 3,
  "t_max": 20.0, "dt_out": 0.2,
  "sweep": {"param": "dx", "values": [3, 4]},
  "solvers": ["resolvent", "closed_form"]
}"#;

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn sweep_writes_curves_and_manifest_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tmp.path().join("small.json");
    std::fs::write(&scenario, SMALL).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = wgqed(&["sweep", scenario.to_str().unwrap()], dir);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<String> =
        std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "small_000_closed_form.csv",
            "small_000_oracle.csv",
            "small_000_resolvent.csv",
            "small_001_closed_form.csv",
            "small_001_oracle.csv",
            "small_001_resolvent.csv",
            "small_manifest.json"
        ]
    );
    for n in &names {
        assert_eq!(read(&a, n), read(&b, n), "{n} differs between runs");
    }
    let oracle = String::from_utf8(read(&a, "small_000_oracle.csv")).unwrap();
    assert_eq!(oracle.lines().next().unwrap(), "t_2J,value,solver");
    assert_eq!(oracle.lines().count(), 102);
    let manifest: Value = serde_json::from_slice(&read(&a, "small_manifest.json")).unwrap();
    let p = &manifest["points"][1];
    assert_eq!(p["parameters"]["dx"], 4);
    assert_eq!(p["t0_2j"], 8.0);
    assert_eq!(p["predicted_parity"], "suppressed");
    assert!(p["rate_fit"]["after"]["rate"].is_number());
    assert_eq!(manifest["scenario_hash"].as_str().unwrap().len(), 64);
    assert_eq!(p["curves"][0]["config_hash"], p["config_hash"]);
}

#[test]
fn evolve_and_laplace_select_solvers() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = tmp.path().join("small.json");
    std::fs::write(&scenario, SMALL).unwrap();
    let out = tmp.path().join("e");
    assert!(wgqed(&["evolve", scenario.to_str().unwrap()], &out).status.success());
    assert!(out.join("small_001_oracle.csv").exists());
    assert!(!out.join("small_001_resolvent.csv").exists());
    let out = tmp.path().join("l");
    assert!(wgqed(&["laplace", scenario.to_str().unwrap()], &out).status.success());
    assert!(out.join("small_001_resolvent.csv").exists());
    assert!(!out.join("small_001_closed_form.csv").exists());
}

#[test]
fn figure_and_spectrum() {
    let tmp = tempfile::tempdir().unwrap();
    let o = wgqed(&["figure", "fig3b"], tmp.path());
    assert!(o.status.success());
    let csv = String::from_utf8(read(tmp.path(), "fig3b_spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "k,omega_2J,Re(r),Im(r),R,T");
    assert_eq!(csv.lines().count(), 1002);
    // The written preset can be fed back in.
    let again = tmp.path().join("again");
    let o = wgqed(&["spectrum", tmp.path().join("fig3b.json").to_str().unwrap()], &again);
    assert!(o.status.success());
    assert_eq!(read(&again, "fig3b_spectrum.csv"), csv.as_bytes());
}

#[test]
fn fit_reads_a_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let curve = tmp.path().join("c.csv");
    let mut text = String::from("t_2J,value,solver\n");
    for i in 0..=400 {
        let t = i as f64 * 0.1;
        let v = if t < 10.0 { (-0.02 * t).exp() } else { (-0.2f64).exp() * (-0.05 * (t - 10.0)).exp() };
        text.push_str(&format!("{t:e},{v:e},oracle\n"));
    }
    std::fs::write(&curve, text).unwrap();
    let o = wgqed(&["fit", curve.to_str().unwrap(), "--t0", "10"], tmp.path());
    assert!(o.status.success());
    let fit: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((fit["before"]["rate"].as_f64().unwrap() - 0.02).abs() < 1e-9);
    assert!((fit["after"]["rate"].as_f64().unwrap() - 0.05).abs() < 1e-9);
    let o = wgqed(&["fit", curve.to_str().unwrap()], tmp.path());
    assert!(o.status.success());
}

#[test]
fn errors_are_json_on_stderr() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, SMALL.replace(r#""J2": 1.0, "#, "")).unwrap();
    let e = error_doc(&wgqed(&["sweep", bad.to_str().unwrap()], tmp.path()));
    assert!(e["error"]["message"].as_str().unwrap().contains("J2"));

    std::fs::write(&bad, SMALL.replace(r#""dx": 3,"#, r#""dx": 3, "colour": 1,"#)).unwrap();
    let e = error_doc(&wgqed(&["sweep", bad.to_str().unwrap()], tmp.path()));
    assert_eq!(e["error"]["kind"], "config");
    assert!(e["error"]["message"].as_str().unwrap().contains("colour"));

    let e = error_doc(&wgqed(&["sweep", tmp.path().join("missing.json").to_str().unwrap()], tmp.path()));
    assert_eq!(e["error"]["kind"], "io");

    let e = error_doc(&wgqed(&["figure", "fig9"], tmp.path()));
    assert_eq!(e["error"]["kind"], "usage");

    let garbage = tmp.path().join("g.csv");
    std::fs::write(&garbage, "a,b\n1,2\n").unwrap();
    let e = error_doc(&wgqed(&["fit", garbage.to_str().unwrap()], tmp.path()));
    assert_eq!(e["error"]["kind"], "parse");
}
