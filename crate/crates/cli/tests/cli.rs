use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use silt_core::expectation::mean_alpha_prime;
use silt_core::HurstParameter;

fn silt(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_silt"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("SILT_OUT")
        .output()
        .expect("spawn silt")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is json")
}

/// Data rows of a versioned CSV, header included.
fn csv(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema=silt-"));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap()
}

#[test]
fn expectation_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = silt(dir.path(), &["expectation", "--H", "0.25", "--y", "0.001"]);
    let v = stdout_json(&o);
    let lib = mean_alpha_prime(1.0, 0.001, HurstParameter::new(0.25).unwrap()).unwrap();
    let r = &v["summary"]["results"][0];
    assert_eq!(r["value"].as_f64().unwrap(), lib.value);
    let rows = csv(&dir.path().join("expectation.csv"));
    assert_eq!(rows[0], ["H", "t", "y", "epsilon", "value", "abs_error", "value_over_y"]);
    assert_eq!(rows[1][4].parse::<f64>().unwrap(), lib.value);
    // Slope near zero approaches the subcritical constant.
    let ratio = r["value_over_y"].as_f64().unwrap();
    assert!((ratio + 3.2 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 0.01, "{ratio}");
}

#[test]
fn simulate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["simulate", "--H", "0.3", "--n_steps", "128", "--seed", "7"];
    stdout_json(&silt(a.path(), &args));
    stdout_json(&silt(b.path(), &args));
    assert_eq!(read(&a.path().join("path.csv")), read(&b.path().join("path.csv")));
    let rows = csv(&a.path().join("path.csv"));
    assert_eq!(rows.len(), 1 + 129);
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 0.0);
    let other = tempfile::tempdir().unwrap();
    stdout_json(&silt(other.path(), &["simulate", "--H", "0.3", "--n_steps", "128", "--seed", "8"]));
    assert_ne!(read(&a.path().join("path.csv")), read(&other.path().join("path.csv")));
}

#[test]
fn arcs_analyze_reproduces_figure_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = silt(dir.path(), &["arcs", "analyze", "--word", "r1 r2 s2 r3 r4 s1 s3 r5 s4 s5 r6 s6"]);
    stdout_json(&o);
    let v: Value = serde_json::from_slice(&read(&dir.path().join("arcs.json"))).unwrap();
    assert_eq!(v["schema"], "silt-arcs/1");
    let u: Vec<&str> = v["u_vectors"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(
        u,
        ["p_1", "p_1+p_2", "p_1", "p_1+p_3", "p_1+p_3+p_4", "p_3+p_4", "p_4", "p_4+p_5", "p_5", "0", "p_6"]
    );
    assert_eq!(v["isolated"], serde_json::json!([2, 6]));
    assert!(v["spanning"].is_null());
}

#[test]
fn sweep_aggregates_match_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = silt(
        dir.path(),
        &["sweep", "--grid", "H=0.3,0.4,0.5", "--replicates", "10", "--n_steps", "64"],
    );
    stdout_json(&o);
    let rows = csv(&dir.path().join("sweep.csv"));
    let runs: Vec<_> = rows.iter().filter(|r| r[0] == "run").collect();
    let aggs: Vec<_> = rows.iter().filter(|r| r[0] == "aggregate").collect();
    assert_eq!((runs.len(), aggs.len()), (30, 3));
    for (i, agg) in aggs.iter().enumerate() {
        let vals: Vec<f64> = runs
            .iter()
            .filter(|r| r[1] == i.to_string())
            .map(|r| r[9].parse().unwrap())
            .collect();
        assert_eq!(vals.len(), 10);
        // Common random numbers: the same seeds at every point.
        let seeds: Vec<&str> = runs.iter().filter(|r| r[1] == i.to_string()).map(|r| r[8].as_str()).collect();
        assert_eq!(seeds, ["0", "1", "2", "3", "4", "5", "6", "7", "8", "9"]);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let reported: f64 = agg[9].parse().unwrap();
        assert!((reported - mean).abs() <= 1e-12 * mean.abs().max(1.0), "{reported} vs {mean}");
        assert_eq!(agg[10], "10");
        let (lo, hi): (f64, f64) = (agg[13].parse().unwrap(), agg[14].parse().unwrap());
        assert!(lo <= reported && reported <= hi);
    }
}

#[test]
fn empty_sweep_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let v = stdout_json(&silt(dir.path(), &["sweep"]));
    assert_eq!(v["summary"]["points"], 0);
    let rows = csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 1);
}

#[test]
fn sweep_over_budget_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = silt(&out, &["sweep", "--grid", "H=0.3,0.4;y=0,1", "--replicates", "10", "--budget", "39"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["field"], "budget");
    let written = fs::read_dir(&out).map(|d| d.count()).unwrap_or(0);
    assert_eq!(written, 0);
}

#[test]
fn invalid_hurst_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = silt(dir.path(), &["simulate", "--H", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["field"], "H");
    assert_eq!(e["error"]["exit_code"], 2);
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = silt(dir.path(), &["simulate", "--H", "0.3", "--set", "hurst=0.3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["field"], "hurst");
    let o = silt(dir.path(), &["simulate", "--H", "0.3", "--bogus", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn layer_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# base\nH = 0.3\nn_steps = 16\nseed = 5\n").unwrap();
    let out = dir.path().join("o");
    let conf_s = conf.to_str().unwrap();
    let o = silt(&out, &["--config", conf_s, "simulate", "--n_steps", "32", "--set", "seed=9"]);
    stdout_json(&o);
    let m: Value = serde_json::from_slice(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(m["config"]["H"], "0.3");
    assert_eq!(m["config"]["n_steps"], "32");
    assert_eq!(m["config"]["seed"], "9");
    assert_eq!(m["config"]["t"], "1");
}

#[test]
fn replay_reproduces_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orig");
    stdout_json(&silt(
        &out,
        &["estimate", "--H", "0.4", "--n_steps", "256", "--replicates", "2", "--y", "0,0.3"],
    ));
    let manifest = out.join("manifest.json");
    let o = Command::new(env!("CARGO_BIN_EXE_silt"))
        .args(["replay", manifest.to_str().unwrap()])
        .output()
        .unwrap();
    let v = stdout_json(&o);
    assert_eq!(v["identical"], true);
    assert_eq!(read(&out.join("estimates.csv")), read(&out.join("replay").join("estimates.csv")));

    let mut m: Value = serde_json::from_slice(&read(&manifest)).unwrap();
    m["outputs"][0]["sha256"] = Value::String("0".repeat(64));
    fs::write(&manifest, serde_json::to_vec_pretty(&m).unwrap()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_silt"))
        .args(["replay", manifest.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"]["kind"], "mismatch");
}

#[test]
fn estimate_extrapolates_default_ladder() {
    let dir = tempfile::tempdir().unwrap();
    stdout_json(&silt(dir.path(), &["estimate", "--H", "0.4", "--n_steps", "256", "--y", "0.2"]));
    let rows = csv(&dir.path().join("estimates.csv"));
    assert_eq!(rows[0][0], "kind");
    assert_eq!(rows.len(), 1 + 5);
    assert_eq!(rows[5][6].parse::<f64>().unwrap(), 0.0);
    assert!(rows[5][9] == "true" || rows[5][9] == "false");
    assert!(rows[1][9].is_empty());
}

#[test]
fn enumeration_limit_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let o = silt(dir.path(), &["arcs", "enumerate", "--n", "6"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"]["module"], "arcs");
    // Labelled words with r_k before s_k: 6!/2^3.
    let ok = silt(dir.path(), &["arcs", "enumerate", "--n", "3"]);
    assert_eq!(stdout_json(&ok)["summary"]["configurations"], 90);
}

#[test]
fn holder_writes_loglog_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = silt(
        dir.path(),
        &["holder", "--H", "0.4", "--n_steps", "128", "--replicates", "32", "--y_len", "5", "--y_start", "-0.1", "--y_step", "0.05"],
    );
    stdout_json(&o);
    let text = fs::read_to_string(dir.path().join("holder_loglog.dat")).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(data.len() >= 3);
    assert!(data.iter().all(|l| l.split_whitespace().count() == 2));
    let report: Value = serde_json::from_slice(&read(&dir.path().join("holder.json"))).unwrap();
    assert_eq!(report["axis"], "time");
}

#[test]
fn thread_count_does_not_change_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--grid", "H=0.35,0.45", "--replicates", "6", "--n_steps", "64"];
    let mut one = vec!["--threads", "1", "sweep"];
    one.extend(args);
    let mut four = vec!["--threads", "4", "sweep"];
    four.extend(args);
    stdout_json(&silt(a.path(), &one));
    stdout_json(&silt(b.path(), &four));
    assert_eq!(read(&a.path().join("sweep.csv")), read(&b.path().join("sweep.csv")));
}
