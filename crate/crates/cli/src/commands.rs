use crate::config::{CliConfig, Format};
use crate::output::{num, Report};
use crate::{Command, Failure, Oracle};
use serde_json::{json, Map, Value};
use sr_squeeze::config::SuiteConfig;
use sr_squeeze::kernels::{self, Observable, MAX_KERNEL_DEGREE};
use sr_squeeze::mutation::Mutation;
use sr_squeeze::params::{derived_angles, labels_to_moments, lambda0, moments_to_labels_tol};
use sr_squeeze::wavefn::{self, WavefnParams};
use sr_squeeze::{fock, verify, Labels, Moments, C64};
use std::io::Write;
use std::path::{Path, PathBuf};

type Row = Map<String, Value>;

/// A report to print plus the failure to exit with afterwards, if any.
struct Outcome {
    report: Report,
    default_format: Format,
    failure: Option<Failure>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, default_format: Format::Table, failure: None }
    }
}

pub fn run(cmd: &Command, cfg: &CliConfig) -> Result<(), Failure> {
    let (outcome, out_file) = match cmd {
        Command::Moments { u0, z, from_moments, oracle } => (moments(*u0, *z, from_moments.as_deref(), *oracle, cfg)?, None),
        Command::Overlap { z2, u2, z1, u1, oracle } => (overlap(*z2, *u2, *z1, *u1, *oracle, cfg)?, None),
        Command::Wavefn { z, u0, q_min, q_max, samples, out } => (wavefunction(*z, *u0, *q_min, *q_max, *samples, cfg)?, out.clone()),
        Command::Verify { out, only, mutation, timings } => (verify_suite(out.as_deref(), only.clone(), *mutation, *timings, cfg)?, None),
        Command::Kernel { observable, z, check, rows } => (kernel(*observable, *z, *check, *rows, cfg)?, None),
        Command::ResolveIdentity { z, dim, order } => (resolve_identity(*z, *dim, *order, cfg)?, None),
    };
    let format = cfg.format_or(outcome.default_format);
    match out_file {
        Some(path) => {
            let mut f = std::fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
            outcome.report.render(format, &mut f).map_err(|e| io_failure(&path, e))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match outcome.report.render(format, &mut lock).and_then(|_| lock.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    return Err(Failure::Usage(format!("writing output: {e}")));
                }
                _ => {}
            }
        }
    }
    outcome.failure.map_or(Ok(()), Err)
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("writing {}: {e}", path.display()))
}

pub fn parse_mutation(s: &str) -> Result<Mutation, String> {
    Mutation::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
        let names: Vec<&str> = Mutation::ALL.iter().map(|m| m.name()).collect();
        format!("unknown mutation {s:?}; expected one of {}", names.join(", "))
    })
}

pub fn parse_observable(s: &str) -> Result<Observable, String> {
    let key = s.to_ascii_lowercase();
    Observable::ALL
        .into_iter()
        .find(|o| o.name().to_ascii_lowercase() == key || serde_json::to_value(o).ok() == Some(Value::String(key.clone())))
        .ok_or_else(|| {
            let names: Vec<&str> = Observable::ALL.iter().map(|o| o.name()).collect();
            format!("unknown observable {s:?}; expected one of {}", names.join(", "))
        })
}

fn put(row: &mut Row, key: &str, v: f64) {
    row.insert(key.into(), num(v));
}

fn put_c(row: &mut Row, key: &str, z: C64) {
    put(row, &format!("{key}_re"), z.re);
    put(row, &format!("{key}_im"), z.im);
}

fn parse_moments(items: &[String]) -> Result<Moments, Failure> {
    let mut m = Moments { q0: 0.0, p0: 0.0, dq: f64::NAN, dp: f64::NAN, corr: f64::NAN };
    for item in items.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--from-moments expects key=value, got {item:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| Failure::Usage(format!("--from-moments: {k} is not a number: {v:?}")))?;
        let slot = match k.trim() {
            "q0" => &mut m.q0,
            "p0" => &mut m.p0,
            "dq" => &mut m.dq,
            "dp" => &mut m.dp,
            "corr" => &mut m.corr,
            other => return Err(Failure::Usage(format!("--from-moments: unknown key {other:?} (use q0, p0, dq, dp, corr)"))),
        };
        *slot = v;
    }
    for (name, v) in [("dq", m.dq), ("dp", m.dp), ("corr", m.corr)] {
        if v.is_nan() {
            return Err(Failure::Usage(format!("--from-moments: {name} is required")));
        }
    }
    Ok(m)
}

fn moments(u0: C64, z: C64, from: Option<&[String]>, oracle: Oracle, cfg: &CliConfig) -> Result<Outcome, Failure> {
    let k = cfg.constants();
    let labels = match from {
        Some(items) => moments_to_labels_tol(&parse_moments(items)?, &k, cfg.tolerances.saturation_input)?,
        None => Labels::new(u0, z),
    };
    let m = labels_to_moments(&labels, &k);
    let a = derived_angles(&labels, &m, &k);
    let mut row = Row::new();
    put(&mut row, "q0", m.q0);
    put(&mut row, "p0", m.p0);
    put(&mut row, "dq", m.dq);
    put(&mut row, "dp", m.dp);
    put(&mut row, "corr", m.corr);
    put(&mut row, "phi", a.phi);
    put(&mut row, "theta_bar_plus", a.thetabar_plus);
    put(&mut row, "theta_bar_minus", a.thetabar_minus);
    put(&mut row, "rho_plus", a.rho_plus);
    put(&mut row, "rho_minus", a.rho_minus);
    put(&mut row, "theta_plus", a.theta_plus);
    put(&mut row, "theta_minus", a.theta_minus);
    put_c(&mut row, "zeta", a.zeta);
    put_c(&mut row, "lambda0", lambda0(&m, &k));
    put_c(&mut row, "u0", labels.u0);
    put(&mut row, "r", labels.r());
    put(&mut row, "theta", labels.theta());
    let mut failure = None;
    match oracle {
        Oracle::None => {}
        Oracle::Quad => return Err(Failure::Usage("moments supports --oracle fock or none".into())),
        Oracle::Fock => {
            let dim = 2 * cfg.fock_dim;
            let tail = cfg.tolerances.tail_bound;
            let fm = fock::expectations(&fock::saturating_state(&labels, dim, tail)?, &k, tail)?;
            let diff = [(m.q0, fm.q0), (m.p0, fm.p0), (m.dq, fm.dq), (m.dp, fm.dp), (m.corr, fm.corr)]
                .iter()
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            row.insert("oracle".into(), json!("fock"));
            row.insert("oracle_dim".into(), json!(dim));
            put(&mut row, "oracle_q0", fm.q0);
            put(&mut row, "oracle_p0", fm.p0);
            put(&mut row, "oracle_dq", fm.dq);
            put(&mut row, "oracle_dp", fm.dp);
            put(&mut row, "oracle_corr", fm.corr);
            put(&mut row, "abs_diff", diff);
            let bound = cfg.tolerances.moments_fock;
            if !(diff <= bound) {
                failure = Some(Failure::Check(format!("Fock moments differ by {diff:.3e} > {bound:.1e}")));
            }
        }
    }
    Ok(Outcome { failure, ..Outcome::ok(Report::single(row)) })
}

fn overlap(z2: C64, u2: C64, z1: C64, u1: C64, oracle: Oracle, cfg: &CliConfig) -> Result<Outcome, Failure> {
    let k = cfg.constants();
    let res = kernels::squeezed_overlap(z2, u2, z1, u1);
    let mut row = Row::new();
    put_c(&mut row, "value", res.value);
    put(&mut row, "modulus", res.modulus);
    put(&mut row, "phase", res.phase);
    let (l2, l1) = (Labels::new(u2, z2), Labels::new(u1, z1));
    let mut failure = None;
    let other = match oracle {
        Oracle::None => None,
        Oracle::Fock => {
            let (dim, tail) = (2 * cfg.fock_dim, cfg.tolerances.tail_bound);
            let v = fock::saturating_state(&l2, dim, tail)?.inner(&fock::saturating_state(&l1, dim, tail)?);
            row.insert("oracle".into(), json!("fock"));
            row.insert("oracle_dim".into(), json!(dim));
            Some(v)
        }
        Oracle::Quad => {
            let rep = verify::overlap_by_quadrature(&l2, &l1, &k)?;
            row.insert("oracle".into(), json!("quad"));
            put(&mut row, "est_error", rep.est_error);
            row.insert("nodes".into(), json!(rep.nodes_used));
            if !rep.converged {
                failure = Some(Failure::NonConvergence(format!(
                    "quadrature oracle did not converge (est. error {:.3e} after {} nodes)",
                    rep.est_error, rep.nodes_used
                )));
            }
            Some(rep.value)
        }
    };
    if let Some(v) = other {
        let diff = (v - res.value).norm();
        put_c(&mut row, "oracle", v);
        put(&mut row, "abs_diff", diff);
        let bound = cfg.tolerances.overlap_triangle;
        if failure.is_none() && !(diff <= bound) {
            failure = Some(Failure::Check(format!("closed form and oracle differ by {diff:.3e} > {bound:.1e}")));
        }
    }
    Ok(Outcome { failure, ..Outcome::ok(Report::single(row)) })
}

fn wavefunction(z: C64, u0: C64, q_min: Option<f64>, q_max: Option<f64>, samples: usize, cfg: &CliConfig) -> Result<Outcome, Failure> {
    if samples < 2 {
        return Err(Failure::Usage(format!("--samples must be at least 2, got {samples}")));
    }
    let k = cfg.constants();
    let labels = Labels::new(u0, z);
    let p = WavefnParams::new(labels, k);
    let m = p.moments;
    let lo = q_min.unwrap_or(m.q0 - 6.0 * m.dq);
    let hi = q_max.unwrap_or(m.q0 + 6.0 * m.dq);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Failure::Usage(format!("need a finite range with q-min < q-max, got [{lo}, {hi}]")));
    }
    let mut report = Report::default();
    for (key, v) in [("hbar", k.hbar), ("ell0", k.ell0), ("u0_re", u0.re), ("u0_im", u0.im), ("r", labels.r()), ("theta", labels.theta())] {
        report.meta.insert(key.into(), num(v));
    }
    for (key, v) in [("q0", m.q0), ("p0", m.p0), ("dq", m.dq), ("dp", m.dp), ("corr", m.corr)] {
        report.meta.insert(key.into(), num(v));
    }
    let step = (hi - lo) / (samples - 1) as f64;
    for i in 0..samples {
        let q = if i + 1 == samples { hi } else { lo + step * i as f64 };
        let v = wavefn::psi(q, &p);
        let mut row = Row::new();
        put(&mut row, "q", q);
        put(&mut row, "re_psi", v.re);
        put(&mut row, "im_psi", v.im);
        put(&mut row, "abs2", v.norm_sqr());
        report.rows.push(row);
    }
    Ok(Outcome { default_format: Format::Csv, ..Outcome::ok(report) })
}

fn verify_suite(out: Option<&Path>, only: Option<String>, mutation: Option<Mutation>, timings: bool, cfg: &CliConfig) -> Result<Outcome, Failure> {
    let suite = SuiteConfig {
        constants: cfg.constants(),
        fock_dim: cfg.fock_dim,
        tolerances: cfg.tolerances,
        seed: cfg.seed,
        only,
        mutation,
    };
    let results = verify::run_suite(&suite)?;
    if results.is_empty() {
        return Err(Failure::Usage(format!("--only {:?} matched no checks", suite.only.unwrap_or_default())));
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.check_id.as_str()).collect();
    let mut report = Report::default();
    report.meta.insert("checks".into(), json!(results.len()));
    report.meta.insert("failed".into(), json!(failed.len()));
    for r in &results {
        let mut row = Row::new();
        row.insert("check_id".into(), json!(r.check_id));
        row.insert("passed".into(), json!(r.passed));
        put(&mut row, "measured", r.measured);
        put(&mut row, "bound", r.bound);
        row.insert("params".into(), r.params.clone());
        if timings {
            put(&mut row, "runtime_ms", r.runtime_ms);
        }
        report.rows.push(row);
    }
    if let Some(path) = out {
        let mut res = serde_json::to_value(&results).map_err(|e| Failure::Usage(e.to_string()))?;
        if !timings {
            for r in res.as_array_mut().into_iter().flatten() {
                r.as_object_mut().map(|m| m.remove("runtime_ms"));
            }
        }
        let doc = json!({"config": suite, "passed": failed.is_empty(), "results": res});
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Usage(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| io_failure(&PathBuf::from(path), e))?;
    }
    let failure = (!failed.is_empty())
        .then(|| Failure::Check(format!("{} of {} checks failed: {}", failed.len(), results.len(), failed.join(", "))));
    Ok(Outcome { failure, ..Outcome::ok(report) })
}

fn kernel(obs: Observable, z: C64, check: bool, rows: usize, cfg: &CliConfig) -> Result<Outcome, Failure> {
    let k = cfg.constants();
    let kern = kernels::diagonal_kernel(&obs.symbol(z, &k), MAX_KERNEL_DEGREE)?;
    let mut report = Report::default();
    report.meta.insert("observable".into(), json!(obs.name()));
    report.meta.insert("z_re".into(), num(z.re));
    report.meta.insert("z_im".into(), num(z.im));
    report.meta.insert("terms".into(), json!("sum of c * w^p * conj(w)^q with w = u0(z)"));
    let deg = kern.degree();
    for p in 0..=deg {
        for q in 0..=deg - p {
            let c = kern.coeff(p, q);
            if c != C64::new(0.0, 0.0) {
                let mut row = Row::new();
                row.insert("p".into(), json!(p));
                row.insert("q".into(), json!(q));
                put(&mut row, "re", c.re);
                put(&mut row, "im", c.im);
                report.rows.push(row);
            }
        }
    }
    let mut failure = None;
    if check {
        if !(1..=32).contains(&rows) {
            return Err(Failure::Usage(format!("--rows must lie in 1..=32, got {rows}")));
        }
        let bound = cfg.tolerances.kernel_reconstruction;
        let defects = verify::kernel_reconstruction(z, rows, verify::PLANE_ORDER, &k, bound)?;
        let d = defects.iter().find(|(o, _)| *o == obs).map_or(f64::NAN, |(_, d)| *d);
        report.meta.insert("rows_checked".into(), json!(rows));
        report.meta.insert("reconstruction_defect".into(), num(d));
        report.meta.insert("bound".into(), num(bound));
        if !(d <= bound) {
            failure = Some(Failure::Check(format!("reconstruction differs from the Fock matrix by {d:.3e} > {bound:.1e}")));
        }
    }
    Ok(Outcome { failure, ..Outcome::ok(report) })
}

fn resolve_identity(z: C64, dim: usize, order: usize, cfg: &CliConfig) -> Result<Outcome, Failure> {
    if !(1..=64).contains(&dim) {
        return Err(Failure::Usage(format!("--dim must lie in 1..=64, got {dim}")));
    }
    if !(4..=128).contains(&order) {
        return Err(Failure::Usage(format!("--order must lie in 4..=128, got {order}")));
    }
    let spec = verify::resolution_spec(z, order);
    let (d, rep) = verify::resolution_defect(z, dim, &spec)?;
    let bound = cfg.tolerances.resolution;
    let mut row = Row::new();
    put_c(&mut row, "z", z);
    row.insert("dim".into(), json!(dim));
    row.insert("order".into(), json!(order));
    put(&mut row, "defect", d);
    put(&mut row, "bound", bound);
    row.insert("passed".into(), json!(d <= bound));
    put(&mut row, "est_error", rep.est_error);
    row.insert("nodes".into(), json!(rep.nodes_used));
    let failure = (!(d <= bound)).then(|| Failure::Check(format!("max |M - I| = {d:.3e} > {bound:.1e}")));
    Ok(Outcome { failure, ..Outcome::ok(Report::single(row)) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_parse() {
        for m in Mutation::ALL {
            assert_eq!(parse_mutation(m.name()).unwrap(), m);
        }
        assert!(parse_mutation("nope").unwrap_err().contains("swapped_rho"));
        assert_eq!(parse_observable("QP+PQ").unwrap(), Observable::QpAnti);
        assert_eq!(parse_observable("number").unwrap(), Observable::Number);
        assert_eq!(parse_observable("q2").unwrap(), Observable::Q2);
        assert!(parse_observable("X").is_err());
    }

    #[test]
    fn moment_spec() {
        let m = parse_moments(&["dq=1,dp=0.5".into(), "corr=0.2".into(), "q0=-1".into()]).unwrap();
        assert_eq!((m.q0, m.p0, m.dq, m.dp, m.corr), (-1.0, 0.0, 1.0, 0.5, 0.2));
        assert!(parse_moments(&["dq=1,dp=1".into()]).is_err());
        assert!(parse_moments(&["dq=1,dp=1,corr=0,x=2".into()]).is_err());
    }
}
