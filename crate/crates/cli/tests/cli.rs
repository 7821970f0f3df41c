use serde_json::Value;
use std::process::{Command, Output};

fn squeeze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeeze")).args(args).output().expect("run squeeze")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = squeeze(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// (q, re ψ, im ψ, |ψ|²) rows of a wavefn CSV, skipping comments and header.
fn csv_rows(text: &str) -> Vec<[f64; 4]> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

#[test]
fn vacuum_moments() {
    let v = json(&["moments", "--u0", "0", "--z", "0"]);
    for key in ["q0", "p0", "dq", "dp", "corr", "phi", "theta_bar_plus", "theta_bar_minus"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!((f(&v, "q0"), f(&v, "p0"), f(&v, "corr")), (0.0, 0.0, 0.0));
    assert!((f(&v, "dq") - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((f(&v, "dp") - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn polar_moments_match_fock() {
    let v = json(&["moments", "--z", "0.5@1.5707963267948966", "--oracle", "fock"]);
    assert!((f(&v, "corr") - 1f64.sinh()).abs() < 1e-14);
    assert!(f(&v, "abs_diff") <= 1e-8);
}

#[test]
fn inverse_moments_round_trip() {
    let fwd = json(&["--hbar", "2", "moments", "--u0", "0.3-1.2i", "--z", "0.8@2.5"]);
    let spec = format!(
        "dq={},dp={},corr={},q0={},p0={}",
        fwd["dq"], fwd["dp"], fwd["corr"], fwd["q0"], fwd["p0"]
    );
    let back = json(&["--hbar", "2", "moments", "--from-moments", &spec]);
    assert!((f(&back, "r") - 0.8).abs() < 1e-12);
    assert!((f(&back, "theta") - 2.5).abs() < 1e-12);
    assert!((f(&back, "u0_re") - 0.3).abs() < 1e-12 && (f(&back, "u0_im") + 1.2).abs() < 1e-12);

    let out = squeeze(&["moments", "--from-moments", "dq=1", "dp=1", "corr=0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("saturate"));
}

#[test]
fn malformed_input_is_a_usage_error() {
    for args in [
        &["moments", "--z", "1+"][..],
        &["overlap", "--u1", "abc"],
        &["--hbar", "-1", "moments"],
        &["wavefn", "--samples", "1"],
        &["verify", "--mutation", "nope"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&squeeze(args)), 2, "{args:?}");
    }
}

#[test]
fn overlap_of_identical_states() {
    let v = json(&["overlap", "--z2", "0.7@1", "--u2", "1-i", "--z1", "0.7@1", "--u1", "1-i"]);
    assert!((f(&v, "modulus") - 1.0).abs() < 1e-14);
}

#[test]
fn overlap_at_common_origin() {
    let (r2, t2, r1, t1) = (0.6f64, 0.4f64, 1.1f64, -2.0f64);
    let v = json(&["overlap", "--z2", &format!("{r2}@{t2}"), "--z1", &format!("{r1}@{t1}")]);
    let (a2, a1) = (polar(r2.tanh(), t2), polar(r1.tanh(), t1));
    // 1 − ζ̄₂ζ₁
    let d = (1.0 - (a2.0 * a1.0 + a2.1 * a1.1), -(a2.0 * a1.1 - a2.1 * a1.0));
    let (m, ph) = ((d.0 * d.0 + d.1 * d.1).sqrt(), d.1.atan2(d.0));
    let modulus = (r2.cosh() * r1.cosh()).powf(-0.5) * m.powf(-0.5);
    assert!((f(&v, "modulus") - modulus).abs() < 1e-14);
    assert!((f(&v, "phase") + 0.5 * ph).abs() < 1e-14);
}

fn polar(r: f64, t: f64) -> (f64, f64) {
    (r * t.cos(), r * t.sin())
}

#[test]
fn overlap_oracles_agree() {
    let args = ["overlap", "--z2", "0.9@-0.3", "--u2", "0.4+1.1i", "--z1", "0.5@2", "--u1", "-0.6"];
    for oracle in ["fock", "quad"] {
        let mut a = args.to_vec();
        a.extend(["--oracle", oracle]);
        let v = json(&a);
        assert_eq!(v["oracle"], oracle);
        assert!(f(&v, "abs_diff") <= 1e-8, "{oracle}: {v}");
    }
}

#[test]
fn vacuum_wavefunction_is_a_symmetric_real_gaussian() {
    let out = squeeze(&["wavefn", "--q-min", "-4", "--q-max", "4", "--samples", "129"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with('#'));
    assert!(text.lines().any(|l| l == "q,re_psi,im_psi,abs2"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 129);
    assert_eq!((rows[0][0], rows[128][0]), (-4.0, 4.0));
    for i in 0..129 {
        let [q, re, im, abs2] = rows[i];
        assert_eq!(im, 0.0);
        assert!((re - rows[128 - i][1]).abs() < 1e-16);
        let want = std::f64::consts::PI.powf(-0.25) * (-q * q / 2.0).exp();
        assert!((re - want).abs() < 1e-15 && (abs2 - want * want).abs() < 1e-15);
    }
}

#[test]
fn coherent_peak_sits_at_q0() {
    let out = squeeze(&["wavefn", "--u0", "1", "--q-min", "-3", "--q-max", "5", "--samples", "8001"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let peak = rows.iter().max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert!((peak[0] - 2f64.sqrt()).abs() <= 1e-3);
}

#[test]
fn squeezed_width_matches_dq() {
    let m = json(&["moments", "--z", "1@1.5707963267948966"]);
    let out = squeeze(&["--ell0", "1", "wavefn", "--z", "1@1.5707963267948966", "--q-min", "-12", "--q-max", "12", "--samples", "4001"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let h = rows[1][0] - rows[0][0];
    let norm: f64 = rows.iter().map(|r| r[3]).sum::<f64>() * h;
    let var: f64 = rows.iter().map(|r| r[0] * r[0] * r[3]).sum::<f64>() * h;
    assert!((norm - 1.0).abs() < 1e-12);
    assert!((var.sqrt() - f(&m, "dq")).abs() < 1e-12);
}

#[test]
fn wavefn_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let out = squeeze(&["wavefn", "--samples", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(csv_rows(&std::fs::read_to_string(&path).unwrap()).len(), 3);
    let bad = dir.path().join("missing").join("psi.csv");
    let out = squeeze(&["wavefn", "--out", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}

#[test]
fn verify_subset_passes() {
    let v = json(&["verify", "--only", "params.*"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["check_id"].as_str().unwrap().starts_with("params.") && r["passed"] == true));
    assert!(rows.iter().all(|r| r.get("runtime_ms").is_none()));
}

#[test]
fn verify_reports_truncation_failures() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = squeeze(&["--fock-dim", "16", "verify", "--only", "scan.*,fock.*", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scan.defining_residual") && err.contains("scan.tail_mass"), "{err}");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["passed"], false);
    assert_eq!(doc["config"]["fock_dim"], 16);
    let failing = doc["results"].as_array().unwrap().iter().find(|r| r["check_id"] == "scan.defining_residual").unwrap();
    assert!(failing["measured"].as_f64().unwrap() > failing["bound"].as_f64().unwrap());
}

#[test]
fn verify_catches_a_mutation() {
    let out = squeeze(&["verify", "--only", "params.*", "--mutation", "swapped_rho"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.rho_identity"));
}

#[test]
fn output_is_reproducible() {
    for args in [
        &["--format", "json", "verify", "--only", "params.*,bch.f_*,scan.sr_positivity"][..],
        &["--format", "csv", "overlap", "--z2", "0.3", "--u1", "1+i", "--oracle", "quad"],
        &["wavefn", "--z", "0.4@1", "--u0", "0.2-0.1i"],
    ] {
        let (a, b) = (squeeze(args), squeeze(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"hbar": 3.0, "ell0": 2.0, "output": "json"}"#).unwrap();
    let out = squeeze(&["--config", path.to_str().unwrap(), "--ell0", "1", "moments"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((f(&v, "dq") - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((f(&v, "dp") - 3.0 * 0.5f64.sqrt()).abs() < 1e-15);

    std::fs::write(&path, r#"{"hbar": 1.0, "fockdim": 3}"#).unwrap();
    let out = squeeze(&["--config", path.to_str().unwrap(), "moments"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("fockdim"));
}

#[test]
fn number_operator_kernel() {
    let v = json(&["kernel", "--observable", "N", "--z", "0"]);
    let terms: Vec<(u64, u64, f64)> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["p"].as_u64().unwrap(), r["q"].as_u64().unwrap(), f(r, "re")))
        .collect();
    assert_eq!(terms, vec![(0, 0, -1.0), (1, 1, 1.0)]);
}

#[test]
fn kernel_check_reconstructs_the_operator() {
    let v = json(&["kernel", "--observable", "QP+PQ", "--z", "0.4", "--check"]);
    assert!(f(&v, "reconstruction_defect") <= 1e-8);
}

#[test]
fn resolution_of_identity() {
    let v = json(&["resolve-identity", "--z", "0.5"]);
    assert_eq!(v["passed"], true);
    assert!(f(&v, "defect") <= 1e-5);
    let csv = squeeze(&["--format", "csv", "resolve-identity", "--z", "0", "--dim", "4"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("z_re,z_im,dim,order,defect,bound,passed"));
}
