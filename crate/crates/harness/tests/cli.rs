use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn vbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vbm")).args(args).env_remove("VBM_OUT").output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, cfg: &Value) -> String {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_config(out: &Path, trials: usize) -> Value {
    json!({
        "regime": "exact-recovery",
        "grid": { "n": [40], "eps": [0.05], "p": [0.6], "lambda": [0.1], "q": [0.05], "alpha": [0.25] },
        "trials": trials,
        "seedBase": 7,
        "outDir": out,
        "c": 2
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn text(out: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
}

#[test]
fn generate_is_deterministic_with_distinct_trial_seeds() {
    let dir = scratch("generate");
    let cfg = write_config(&dir, &small_config(&dir.join("a"), 3));
    let b = dir.join("b");
    for out in [None, Some(b.to_str().unwrap())] {
        let mut args = vec!["generate", "--config", &cfg];
        if let Some(o) = out {
            args.extend(["--out", o]);
        }
        let res = vbm(&args);
        assert_eq!(code(&res), 0, "{}", text(&res));
    }
    let mut seeds = Vec::new();
    for t in 0..3 {
        let name = format!("instances/c0000-t{t:04}.json");
        let a = fs::read(dir.join("a").join(&name)).unwrap();
        assert_eq!(a, fs::read(b.join(&name)).unwrap());
        let inst: Value = serde_json::from_slice(&a).unwrap();
        seeds.push(inst["seed"].as_u64().unwrap());
    }
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 3);
}

#[test]
fn invalid_grid_is_a_config_error() {
    let dir = scratch("invalid");
    let mut cfg = small_config(&dir, 1);
    cfg["grid"]["p"] = json!([0.01]);
    let path = write_config(&dir, &cfg);
    let res = vbm(&["generate", "--config", &path]);
    assert_eq!(code(&res), 2);
    assert!(text(&res).contains("c1·ln n"), "{}", text(&res));
    let res = vbm(&["pipeline", "--preset", "no-such-regime"]);
    assert_eq!(code(&res), 2);
}

#[test]
fn empty_grid_writes_header_only_csvs() {
    let dir = scratch("empty");
    let mut cfg = small_config(&dir.join("out"), 2);
    cfg["grid"]["n"] = json!([]);
    let path = write_config(&dir, &cfg);
    let res = vbm(&["pipeline", "--config", &path, "--threads", "1"]);
    assert_eq!(code(&res), 0, "{}", text(&res));
    for (file, schema) in [("trials.csv", "vbm-trials/1"), ("summary.csv", "vbm-summary/1")] {
        let body = fs::read_to_string(dir.join("out").join(file)).unwrap();
        assert_eq!(body.lines().count(), 1, "{file}");
        assert!(body.starts_with(schema));
    }
}

#[test]
fn pipeline_rates_and_resume() {
    let dir = scratch("pipeline");
    let out = dir.join("out");
    let path = write_config(&dir, &small_config(&out, 2));
    let first = vbm(&["pipeline", "--config", &path, "--threads", "2"]);
    assert_eq!(code(&first), 0, "{}", text(&first));
    assert!(text(&first).contains("0 trials resumed"));
    let trials = fs::read(out.join("trials.csv")).unwrap();
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();

    let mut reader = csv::Reader::from_reader(summary.as_bytes());
    let header = reader.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "recoveryRate").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let rate: f64 = rows[0][col].parse().unwrap();
    assert!((0.0..=1.0).contains(&rate));

    let second = vbm(&["pipeline", "--config", &path, "--threads", "1"]);
    assert_eq!(code(&second), 0);
    assert!(text(&second).contains("2 trials resumed"), "{}", text(&second));
    assert_eq!(fs::read(out.join("trials.csv")).unwrap(), trials);
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap(), summary);
    assert!(out.join("meta.json").exists());
}

#[test]
fn separation_regime_emits_the_table() {
    let dir = scratch("separation");
    let out = dir.join("out");
    let cfg = json!({
        "regime": "hn-separation",
        "grid": { "n": [96], "eps": [0.2], "alpha": [0.25] },
        "trials": 1,
        "seedBase": 3,
        "outDir": out,
        "solver": { "tolFeas": 1e-4 }
    });
    let path = write_config(&dir, &cfg);
    let res = vbm(&["pipeline", "--config", &path]);
    assert_eq!(code(&res), 0, "{}", text(&res));
    let table = fs::read_to_string(out.join("separation.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with("vbm-separation/1,"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn verify_exit_codes() {
    let dir = scratch("verify");
    let out = dir.to_str().unwrap();
    let res = vbm(&["generate", "--preset", "exact-recovery", "--trials", "1", "--out", out]);
    assert_eq!(code(&res), 0, "{}", text(&res));
    let inst = dir.join("instances/c0000-t0000.json");
    let inst = inst.to_str().unwrap();
    let cert = dir.join("cert.json");
    let cert_s = cert.to_str().unwrap();
    let res = vbm(&["certify", "--instance", inst, "--out", cert_s]);
    assert_eq!(code(&res), 0, "{}", text(&res));

    let ok = vbm(&["verify", inst, cert_s]);
    assert_eq!(code(&ok), 0, "{}", text(&ok));

    let mut value: Value = serde_json::from_slice(&fs::read(&cert).unwrap()).unwrap();
    for b in value["B"].as_array_mut().unwrap() {
        *b = json!("0");
    }
    let tampered = dir.join("tampered.json");
    fs::write(&tampered, serde_json::to_string(&value).unwrap()).unwrap();
    let bad = vbm(&["verify", inst, tampered.to_str().unwrap()]);
    assert_eq!(code(&bad), 1);
    assert!(text(&bad).contains("FAIL check (2)"), "{}", text(&bad));

    let missing = vbm(&["verify", inst, dir.join("nope.json").to_str().unwrap()]);
    assert_eq!(code(&missing), 2);

    let sol = dir.join("sol.json");
    let res = vbm(&["solve", "--instance", inst, "--out", sol.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", text(&res));
    assert_eq!(code(&vbm(&["verify", inst, sol.to_str().unwrap()])), 0);
}

#[test]
fn expand_on_an_edge_list() {
    let dir = scratch("expand");
    let path = dir.join("c6.txt");
    fs::write(&path, "0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n").unwrap();
    let res = vbm(&["expand", "--graph", path.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", text(&res));
    let report: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["A"], json!([0, 1, 2]));
    assert_eq!(report["boundary"], json!(4));
}
