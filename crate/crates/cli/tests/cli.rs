use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photon-reader"))
        .args(args)
        .env_remove("PHOTON_READER_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json", "--deterministic"]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn rows(v: &Value) -> &Vec<Value> {
    v["rows"].as_array().expect("rows array")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

/// Data lines of a CSV report, without the `#` metadata.
fn csv_records(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn wstate_curve_is_log_of_inverse_photons() {
    let v = json(&["pie-curve", "--schemes", "W_STATE", "--ns-min", "1e-4", "--ns-max", "0.5", "--ns-points", "25"]);
    let r = rows(&v);
    assert_eq!(r.len(), 25);
    for row in r {
        let n = num(row, "n_s");
        assert!((num(row, "pie_bpp") - (1.0 / n).log2()).abs() < 1e-9, "n_s = {n}");
    }
}

#[test]
fn points_beyond_a_scheme_range_are_skipped_with_a_note() {
    let v = json(&["pie-curve", "--schemes", "W_STATE", "--ns-min", "0.1", "--ns-max", "10", "--ns-points", "5"]);
    assert!(rows(&v).iter().all(|r| num(r, "n_s") <= 0.5));
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn ook_curve_starts_near_its_cap() {
    let v = json(&["pie-curve", "--schemes", "OOK_DIRECT", "--ns-min", "1e-4", "--ns-max", "1", "--ns-points", "10"]);
    let first = &rows(&v)[0];
    assert!((num(first, "pie_bpp") - 0.5307).abs() < 0.005);
}

#[test]
fn csv_is_plain_and_parses() {
    let out = run(&["pie-curve", "--ns-points", "12", "--deterministic"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# tool: photon-reader"));
    assert!(!text.contains("generated_at_unix"));
    let recs = csv_records(&text);
    assert_eq!(recs[0][..4], ["scheme", "n_s", "capacity_bits_per_pixel", "pie_bpp"]);
    for rec in &recs[1..] {
        for field in &rec[1..4] {
            field.parse::<f64>().unwrap_or_else(|_| panic!("{field:?} is not a number"));
        }
    }
}

#[test]
fn timestamp_only_without_deterministic() {
    let out = run(&["pie-curve", "--ns-points", "3"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("# generated_at_unix: "));
}

#[test]
fn tradeoff_columns_are_consistent() {
    let v = json(&["tradeoff", "--ns-min", "1e-6", "--ns-max", "1", "--ns-points", "30"]);
    let mut gm_best = 0f64;
    for row in rows(&v) {
        let n = num(row, "n_s");
        let bpp = num(row, "bits_per_pixel");
        assert!((num(row, "bits_per_photon") - bpp / n).abs() <= 1e-9 * bpp / n);
        assert_eq!(row["within_holevo"], Value::Bool(true));
        if row["scheme"] == "GM_HADAMARD" {
            gm_best = gm_best.max(num(row, "bits_per_photon"));
        }
    }
    // Beats the Dolinar receiver's 2/ln 2 cap at low photon numbers.
    assert!(gm_best > 2.89, "GM peaks at {gm_best}");
}

#[test]
fn empty_grid_is_a_usage_error() {
    let out = run(&["pie-curve", "--ns-points", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["pie-curve", "--ns-min", "1", "--ns-max", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_scheme_is_rejected() {
    let out = run(&["pie-curve", "--schemes", "LASER_MAGIC"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("LASER_MAGIC"));
}

#[test]
fn simulate_wstate_is_error_free() {
    let v = json(&["simulate", "--schemes", "W", "--m", "64", "--trials", "5000"]);
    let r = &v["result"];
    assert_eq!(r["errors"], 0);
    assert_eq!(num(r, "p_e_hat"), 0.0);
    assert!(r["z_score"].is_null());
}

#[test]
fn simulate_gm_matches_analytic() {
    let v = json(&["simulate", "--schemes", "GM", "--m", "512", "--trials", "200000", "--seed", "4"]);
    let z = num(&v["result"], "z_score");
    assert!(z.abs() < 4.0, "z = {z}");
}

#[test]
fn simulate_output_is_reproducible() {
    let args = ["simulate", "--m", "128", "--trials", "20000", "--seed", "17", "--deterministic"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["simulate", "--m", "128", "--trials", "20000", "--seed", "18", "--deterministic"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn oversized_simulation_is_refused() {
    let out = run(&["simulate", "--m", "2097152", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "--m", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_photon-reader"))
        .args(["pie-curve", "--ns-points", "2"])
        .env("PHOTON_READER_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exponent_summary_and_epsilon_scaling() {
    let base = ["exponent", "--ns-points", "15", "--pie-points", "6"];
    let v = json(&base);
    let s = &v["summary"][0];
    let m = s["m_ub"].as_u64().unwrap();
    assert!((4080..=5520).contains(&m), "M_UB = {m}");
    assert_eq!(s["green_machine"]["log2_m"], 35);
    assert_eq!(s["w_state"]["m"], 32);

    let mut squared = base.to_vec();
    squared.extend(["--epsilon", "1e-6"]);
    let w = json(&squared);
    for (a, b) in rows(&v).iter().zip(rows(&w)) {
        match (a["m_ub"].as_f64(), b["m_ub"].as_f64()) {
            (Some(x), Some(y)) => assert!((y / x - 2.0).abs() < 1e-9),
            (None, None) => {}
            other => panic!("bounded in one run only: {other:?}"),
        }
    }
}

#[test]
fn budget_rows_cover_losses() {
    let v = json(&["budget", "--kappa", "1,0.999,0.998,0.01"]);
    let find = |scheme: &str, kappa: f64| {
        rows(&v)
            .iter()
            .find(|r| r["scheme"] == scheme && num(r, "kappa") == kappa)
            .unwrap_or_else(|| panic!("no {scheme} row at {kappa}"))
            .clone()
    };
    assert_eq!(find("COHERENT_GM", 1.0)["log2_m"], 35);
    assert_eq!(find("W_STATE", 1.0)["m"], 32);
    assert_eq!(find("W_STATE_SINGLE_SHOT", 0.999)["feasible"], true);
    let off = find("W_STATE_SINGLE_SHOT", 0.998);
    assert_eq!(off["feasible"], false);
    assert!(off["reason"].as_str().unwrap().contains("cannot reach"));
    let lossy = find("W_STATE", 0.01);
    assert!(lossy["log2_m"].as_u64().unwrap().abs_diff(35) <= 1);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "m = 64\ntrials = 3000\nseed = 5\nschemes = \"W\"\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["simulate", "--config", p, "--seed", "9"]);
    assert_eq!(v["config"]["m"], 64);
    assert_eq!(v["config"]["trials"], 3000);
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["epsilon"], 0.001);
    assert_eq!(v["result"]["probe"], "W_STATE");
}

#[test]
fn malformed_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "frobnicate = 1\n").unwrap();
    let out = run(&["pie-curve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml"));
}

#[test]
fn writes_svg_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["pie-curve", "tradeoff", "exponent"] {
        let path = dir.path().join(format!("{cmd}.svg"));
        let out = run(&[cmd, "--format", "svg", "--ns-points", "10", "--pie-points", "5", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        let svg = std::fs::read_to_string(&path).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"), "{cmd}");
    }
    let out = run(&["budget", "--format", "svg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lossy_curves_report_detected_photons() {
    let v = json(&["pie-curve", "--schemes", "OOK_DIRECT", "--kappa", "0.5", "--ns-points", "5"]);
    let lossless = json(&["pie-curve", "--schemes", "OOK_DIRECT", "--ns-min", "5e-5", "--ns-max", "5", "--ns-points", "5"]);
    for (row, reference) in rows(&v).iter().zip(rows(&lossless)) {
        let n = num(row, "n_s");
        let c = num(row, "capacity_bits_per_pixel");
        assert!((c - num(reference, "capacity_bits_per_pixel")).abs() < 1e-12, "n_s = {n}");
        assert!((num(row, "pie_bpp") - c / (0.5 * n)).abs() < 1e-9 * c / n);
    }
}

#[test]
fn wstate_curves_have_no_loss_substitution() {
    let out = run(&["pie-curve", "--schemes", "W_STATE", "--kappa", "0.5", "--ns-points", "3", "--ns-max", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no loss substitution"));
}
