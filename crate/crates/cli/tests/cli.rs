use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
[scenario]
num_cues = 3
num_d2d_links = 2
seed = 11

[run]
num_scenarios = 2
num_ttis = 30
";

fn fdcell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdcell")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn simulate_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = fdcell(&["simulate", "--mode", "hd", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    for name in ["cdf_dl.csv", "cdf_ul.csv", "cdf_d2d.csv", "combos.csv", "manifest.json"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let dl = read_csv(&out.join("cdf_dl.csv"));
    assert_eq!(dl.len(), 6);
    assert_eq!(dl.last().unwrap()[1], "1.0");
    let d2d = read_csv(&out.join("cdf_d2d.csv"));
    assert_eq!(d2d.len(), 4);

    let combos = read_csv(&out.join("combos.csv"));
    let full_duplex: f64 = combos.iter().filter(|r| r[0].contains("UL+DL")).map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert_eq!(full_duplex, 0.0);

    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seeds"], serde_json::json!([11, 12]));
    assert_eq!(manifest["modes"], serde_json::json!(["hd"]));
    assert_eq!(manifest["config"]["run"]["num_ttis"], 30);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let o = fdcell(&[
        "simulate", "--mode", "fpa", "--config", &cfg, "--scenarios", "1", "--ttis", "5", "--seed", "3", "--sic-db",
        "90", "--w-d2d", "0.5", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seeds"], serde_json::json!([3]));
    assert_eq!(manifest["config"]["scenario"]["sic"], 90.0);
    assert_eq!(manifest["config"]["utility"]["w_d2d"], 0.5);
}

#[test]
fn sic_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("s");
    let o = fdcell(&[
        "sweep-sic", "--values", "65,105", "--modes", "fpa,hd", "--config", &cfg, "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("sic_sweep.csv"));
    assert_eq!(rows.len(), 4);
    let hd: Vec<_> = rows.iter().filter(|r| r[1] == "hd").map(|r| r[2].clone()).collect();
    assert_eq!(hd[0], hd[1]);
}

#[test]
fn weight_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("num_ttis = 30", "num_ttis = 10"));
    let out = dir.path().join("w");
    let o = fdcell(&["sweep-weight", "--values", "0.2,1.0", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("weight_sweep.csv"));
    // per weight: 2 scenarios x (3 DL + 3 UL + 2 D2D) links
    assert_eq!(rows.len(), 2 * 16);
    assert!(rows.iter().any(|r| r[0] == "0.2" && r[1] == "d2d"));
}

#[test]
fn config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[scenario]\nnum_cues = 0\n");
    let o = fdcell(&["simulate", "--config", &bad, "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("num_cues"));

    let unknown = write_config(dir.path(), "[scenario]\nfoo = 1\n");
    let o = fdcell(&["simulate", "--config", &unknown]);
    assert!(!o.status.success());

    let o = fdcell(&["simulate", "--config", "/nonexistent/exp.toml"]);
    assert!(!o.status.success());

    let o = fdcell(&["simulate", "--mode", "tdd"]);
    assert!(!o.status.success());
}

#[test]
fn default_config_round_trips() {
    let o = fdcell(&["default-config"]);
    assert!(o.status.success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &String::from_utf8(o.stdout).unwrap());
    let out = dir.path().join("d");
    let o = fdcell(&["simulate", "--mode", "fpa", "--config", &cfg, "--scenarios", "1", "--ttis", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
