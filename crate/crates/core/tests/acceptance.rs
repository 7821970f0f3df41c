//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits non-zero only when a criterion fails that is not listed in
//! `KNOWN_UNATTAINABLE`.

use sr_squeeze::config::SuiteConfig;
use sr_squeeze::mutation::Mutation;
use sr_squeeze::verify::{self, CheckResult};
use sr_squeeze::{fock, linalg, C64};
use std::f64::consts::FRAC_PI_3;
use std::process::ExitCode;
use std::time::{Duration, Instant};

/// Criteria whose failure is expected and explained in the project notes.
const KNOWN_UNATTAINABLE: &[&str] = &["5b"];

const DUAL_BOUND: f64 = 1e-9;

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    elapsed: Duration,
    limit: Duration,
    detail: String,
}

fn run(only: &str) -> Vec<CheckResult> {
    let cfg = SuiteConfig { only: Some(only.into()), ..SuiteConfig::default() };
    verify::run_suite(&cfg).expect("suite configuration")
}

fn summarize(results: &[CheckResult]) -> (bool, String) {
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} ({:.3e} > {:.1e})", r.check_id, r.measured, r.bound))
        .collect();
    let worst = results
        .iter()
        .filter(|r| r.bound > 0.0)
        .map(|r| r.measured / r.bound)
        .fold(0.0f64, f64::max);
    if results.is_empty() {
        return (false, "no checks ran".into());
    }
    if failed.is_empty() {
        (true, format!("{} checks, worst measured/bound {:.2e}", results.len(), worst))
    } else {
        (false, format!("failed: {}", failed.join(", ")))
    }
}

fn criterion(
    id: &'static str,
    title: &'static str,
    limit_s: u64,
    body: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_s);
    Outcome { id, title, passed: ok && elapsed <= limit, elapsed, limit, detail }
}

fn suite(patterns: &str) -> impl FnOnce() -> (bool, String) + '_ {
    move || summarize(&run(patterns))
}

/// Reversed-order product at r = 1 against the padded exponential, evaluated
/// by truncating every factor at `inner` levels.
fn dual_at_unit_r() -> (bool, String) {
    let z = C64::from_polar(1.0, FRAC_PI_3);
    let n = 64;
    let exact = fock::squeeze_exp_padded(z, n, 256).expect("exp");
    let mut parts = Vec::new();
    let mut ok = true;
    for inner in [128, 256] {
        let dual = fock::squeeze_dual_truncated(z, n, inner).expect("dual");
        let d = linalg::spectral_norm(linalg::top(&(&exact.mat - &dual.mat), n / 2));
        ok &= d <= DUAL_BOUND;
        parts.push(format!("inner {inner}: {d:.3e}"));
    }
    let exact_form = fock::squeeze_dual(z, n).map(|_| "built").unwrap_or("rejected");
    (ok, format!("r=1, block {}: {}; exact product {exact_form}", n / 2, parts.join(", ")))
}

fn canaries() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in Mutation::ALL {
        let cfg = SuiteConfig {
            only: Some("params.*,wavefn.*,kernels.*".into()),
            mutation: Some(m),
            ..SuiteConfig::default()
        };
        let results = verify::run_suite(&cfg).expect("suite configuration");
        let caught: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.check_id.as_str()).collect();
        ok &= !caught.is_empty();
        parts.push(format!("{} caught by {}", m.name(), caught.len()));
    }
    let (canary_ok, canary_detail) = summarize(&run("canary.*"));
    ok &= canary_ok;
    parts.push(format!("canary group: {canary_detail}"));
    (ok, parts.join("; "))
}

fn main() -> ExitCode {
    let outcomes = vec![
        criterion("1", "parametrization round-trip", 1, suite("params.roundtrip,params.saturation_identity")),
        criterion("2", "defining-equation residual", 10, suite("scan.defining_residual,scan.probe_residual")),
        criterion("3", "overlap oracle triangle", 60, suite("kernels.overlap_triangle")),
        criterion("4", "special values", 5, suite("wavefn.phase_anchor,kernels.coherent_modulus")),
        criterion(
            "5a",
            "disentangling, r <= 1 factored and sinh r < 1 reversed",
            20,
            suite("bch.factored_vs_exp,bch.dual_vs_exp,bch.f_origin,bch.f_symmetry"),
        ),
        criterion("5b", "reversed-order product at r = 1", 20, dual_at_unit_r),
        criterion("6", "resolution of identity", 300, suite("overcomplete.*")),
        criterion("7", "diagonal kernel reconstruction", 120, suite("diagkernel.*")),
        criterion("8", "wavefunction forms and synthesis", 30, suite("wavefn.forms,wavefn.synthesis")),
        criterion("9", "uncertainty checker", 5, suite("scan.sr_positivity,scan.sr_slack,scan.probe_slack")),
        criterion("10", "mutation canaries", 60, canaries),
    ];

    let mut unexpected = 0;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        let known = !o.passed && KNOWN_UNATTAINABLE.contains(&o.id);
        if !o.passed && !known {
            unexpected += 1;
        }
        println!(
            "{status} criterion {:<3} {:<55} {:>7.2}s/{:>4}s  {}{}",
            o.id,
            o.title,
            o.elapsed.as_secs_f64(),
            o.limit.as_secs(),
            o.detail,
            if known { "  [known unattainable]" } else { "" }
        );
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
