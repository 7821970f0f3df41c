//! The identity-verification suite: every closed form checked against an
//! independent oracle with an explicit bound.
//!
//! Check ids are `group.name`; a group runs when any of its ids matches the
//! `only` filter (comma-separated globs), and each id it declares must come
//! back exactly once.

use crate::bch;
use crate::config::{SuiteConfig, Tolerances};
use crate::error::{Error, Result};
use crate::fock::{self, FockVector};
use crate::kernels::{self, Observable, MAX_KERNEL_DEGREE};
use crate::linalg::{self, CMat};
use crate::mutation::Mutation;
use crate::params::{self, angle_distance, Constants, Labels};
use crate::quadrature::{self, MuSpec, QuadratureSpec};
use crate::symbol::PolySymbol;
use crate::wavefn::{self, WavefnParams, WfForm};
use crate::C64;
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, SQRT_2};
use std::sync::Mutex;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub params: Value,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
    pub runtime_ms: f64,
}

impl CheckResult {
    fn new(check_id: impl Into<String>, params: Value, measured: f64, bound: f64, runtime_ms: f64) -> Self {
        Self { check_id: check_id.into(), params, measured, bound, passed: measured <= bound, runtime_ms }
    }

    fn failed(check_id: impl Into<String>, params: Value, err: &Error) -> Self {
        let mut params = params;
        if let Value::Object(map) = &mut params {
            map.insert("error".into(), Value::String(err.to_string()));
        }
        Self::new(check_id, params, f64::INFINITY, 0.0, 0.0)
    }
}

/// Run one check. `f` returns the measured value and optional detail, which is
/// stored under `params.detail`.
fn check<F>(id: &str, params: Value, bound: f64, f: F) -> CheckResult
where
    F: FnOnce() -> Result<(f64, Value)>,
{
    let t = Instant::now();
    match f() {
        Ok((measured, detail)) => {
            let mut params = params;
            if !detail.is_null() {
                if let Value::Object(map) = &mut params {
                    map.insert("detail".into(), detail);
                }
            }
            let ms = t.elapsed().as_secs_f64() * 1e3;
            CheckResult::new(id, params, measured, bound, ms)
        }
        Err(e) => {
            let mut r = CheckResult::failed(id, params, &e);
            r.runtime_ms = t.elapsed().as_secs_f64() * 1e3;
            r
        }
    }
}

fn plain(m: f64) -> Result<(f64, Value)> {
    Ok((m, Value::Null))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

pub const GRID_U0: [(f64, f64); 5] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 2.0), (-1.5, 0.5)];
pub const GRID_R: [f64; 3] = [0.25, 0.7, 1.2];
pub const GRID_THETA: [f64; 4] = [0.0, FRAC_PI_3, FRAC_PI_2, PI];

/// u₀ × z grid: every u₀ with z = 0 and with each (r, θ) pair, 65 labels.
pub fn standard_grid() -> Vec<Labels> {
    let mut out = Vec::new();
    for (re, im) in GRID_U0 {
        let u0 = c(re, im);
        out.push(Labels::from_polar(u0, 0.0, 0.0));
        for r in GRID_R {
            for th in GRID_THETA {
                out.push(Labels::from_polar(u0, r, th));
            }
        }
    }
    out
}

/// The distinct squeezing parameters of the standard grid.
pub fn grid_z() -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0)];
    for r in GRID_R {
        for th in GRID_THETA {
            out.push(C64::from_polar(r, th));
        }
    }
    out
}

/// Squeezing values with r ≤ 1 used by the disentangling checks.
fn bch_z() -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0)];
    for r in [0.25, 0.7, 1.0] {
        for th in GRID_THETA {
            out.push(C64::from_polar(r, th));
        }
    }
    out
}

/// Values inside the convergence disc sinh r < 1 of the reversed-order product.
fn dual_z() -> Vec<C64> {
    vec![c(0.0, 0.0), c(0.25, 0.0), C64::from_polar(0.7, FRAC_PI_2), C64::from_polar(0.8, FRAC_PI_3)]
}

pub const RESOLUTION_Z: [(f64, f64); 3] = [(0.0, 0.0), (0.5, 0.0), (0.8, FRAC_PI_3)];
pub const MU_SIGMAS: [f64; 2] = [0.3, 0.5];
pub const KERNEL_Z: [f64; 2] = [0.0, 0.4];
pub const RESOLUTION_DIM: usize = 16;
pub const KERNEL_DIM: usize = 8;
/// Per-axis order of the u-plane rule (doubled for the error estimate).
pub const PLANE_ORDER: usize = 24;
/// Per-axis order of the z-plane rule (halved for the error estimate).
pub const Z_ORDER: usize = 4;

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m: f64, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

// ---------------------------------------------------------------- params

fn params_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let k = cfg.constants;
    let t = &cfg.tolerances;
    let grid = standard_grid();
    let g = json!({"grid": "standard", "points": grid.len()});
    let moments: Vec<_> = grid.iter().map(|l| params::labels_to_moments(l, &k)).collect();
    let angles: Vec<_> =
        grid.iter().zip(&moments).map(|(l, m)| params::derived_angles_mut(l, m, &k, cfg.mutation)).collect();
    let pairs = || grid.iter().zip(&moments).zip(&angles).map(|((l, m), a)| (l, m, a));
    let mut out = Vec::new();
    out.push(check("params.roundtrip", g.clone(), t.roundtrip, || {
        let mut worst = 0.0f64;
        for (l, m) in grid.iter().zip(&moments) {
            let back = params::moments_to_labels(m, &k)?;
            let mut e = (back.u0 - l.u0).norm().max((back.r() - l.r()).abs());
            if l.r() > 0.0 {
                e = e.max(angle_distance(back.theta(), l.theta()));
            }
            worst = worst.max(e);
        }
        plain(worst)
    }));
    out.push(check("params.saturation_identity", g.clone(), t.saturation_identity, || {
        plain(max_of(grid.iter().zip(&moments).map(|(l, m)| {
            let s = l.theta().sin() * (2.0 * l.r()).sinh();
            let rhs = k.hbar * k.hbar * (1.0 + s * s) / 4.0;
            ((m.dq * m.dq * m.dp * m.dp) - rhs).abs() / rhs
        })))
    }));
    out.push(check("params.uncertainty_band", g.clone(), 1e-14, || {
        plain(max_of(grid.iter().zip(&moments).map(|(l, m)| {
            let (lo, hi) = ((-l.r()).exp() / SQRT_2, l.r().exp() / SQRT_2);
            [m.dq / k.ell0, m.dp / k.p_scale()]
                .iter()
                .map(|x| (lo - x).max(x - hi).max(0.0) / x)
                .fold(0.0, f64::max)
        })))
    }));
    out.push(check("params.rho_identity", g.clone(), t.angle_identity, || {
        plain(max_of(pairs().map(|(l, _, a)| {
            let unit = (a.rho_plus * a.rho_plus - a.rho_minus * a.rho_minus - 1.0).abs();
            let ch = (a.rho_plus - l.r().cosh()).abs() / l.r().cosh();
            let sh = (a.rho_minus - l.r().sinh()).abs() / l.r().cosh();
            unit.max(ch).max(sh)
        })))
    }));
    out.push(check("params.theta_from_angles", g.clone(), t.angle_identity, || {
        plain(max_of(
            pairs().filter(|(l, _, _)| l.r() > 0.0).map(|(l, _, a)| angle_distance(params::theta_from_angles(a), l.theta())),
        ))
    }));
    out.push(check("params.tan_phi", g.clone(), t.angle_identity, || {
        plain(max_of(pairs().map(|(_, m, a)| {
            let y = m.corr / k.hbar;
            (a.phi.tan() - y).abs() / y.abs().max(1.0)
        })))
    }));
    out.push(check("params.zeta", g.clone(), t.angle_identity, || {
        plain(max_of(pairs().map(|(l, _, a)| {
            let m = (a.zeta.norm() - l.r().tanh()).abs();
            if l.r() > 0.0 {
                m.max(angle_distance(a.zeta.arg(), l.theta()))
            } else {
                m
            }
        })))
    }));
    out.push(check("params.thetabar_difference", g.clone(), t.angle_identity, || {
        plain(max_of(pairs().map(|(l, _, a)| {
            let (r, th) = (l.r(), l.theta());
            let (ch2, sh2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
            let den = (ch2 * ch2 - (th.cos() * sh2).powi(2)).sqrt();
            let want = c(1.0, th.sin() * sh2) / den;
            (C64::from_polar(1.0, a.thetabar_plus - a.thetabar_minus) - want).norm()
        })))
    }));
    out.push(check("params.lambda0_forms", g.clone(), t.angle_identity, || {
        plain(max_of(moments.iter().map(|m| {
            let l0 = params::lambda0(m, &k);
            (l0 - params::lambda0_polar(m, &k)).norm() / l0.norm()
        })))
    }));
    out.push(check("params.rejects_unsaturated", json!({"perturbation": 1.01}), 0.5, || {
        let m = params::labels_to_moments(&Labels::from_polar(c(0.5, 0.0), 0.7, 1.0), &k);
        let bad = params::Moments { dq: m.dq * 1.01, ..m };
        let caught = matches!(params::moments_to_labels(&bad, &k), Err(Error::NotSaturated { .. }));
        plain(if caught { 0.0 } else { 1.0 })
    }));
    out
}

// ---------------------------------------------------------------- bch

fn f_sample_points() -> Vec<C64> {
    vec![
        c(0.0, 0.0),
        c(1e-7, 0.0),
        c(0.0, -3e-6),
        c(0.5, 0.0),
        c(-1.0, 0.0),
        c(2.0, 0.0),
        c(-2.0, 0.0),
        c(1.0, 1.0),
        c(-2.0, 2.0),
        c(2.0, -2.0),
        c(0.0, 0.5),
        c(0.3, -1.7),
    ]
}

fn bch_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let t = &cfg.tolerances;
    let pts = f_sample_points();
    let mut out = Vec::new();
    out.push(check("bch.f_origin", json!({}), 0.0, || plain((bch::f_uv(c(0.0, 0.0), c(0.0, 0.0)) - 0.5).norm())));
    out.push(check("bch.f_symmetry", json!({"points": pts.len()}), t.f_symmetry, || {
        let mut worst = 0.0f64;
        for &u in &pts {
            for &v in &pts {
                let (a, b) = (bch::f_uv(u, v), bch::f_uv(v, u));
                worst = worst.max((a - b).norm() / a.norm().max(1.0));
            }
        }
        plain(worst)
    }));
    out.push(check("bch.f_closed_form", json!({"min_separation": 0.1}), t.f_symmetry, || {
        // the literal quotient is trustworthy only away from u=0, v=0, u=v
        let mut worst = 0.0f64;
        for &u in &pts {
            for &v in &pts {
                if u.norm() < 0.1 || v.norm() < 0.1 || (u - v).norm() < 0.1 || (u - v).im.abs() > 3.0 {
                    continue;
                }
                let (a, b) = (bch::f_uv(u, v), bch::f_uv_closed(u, v));
                worst = worst.max((a - b).norm() / a.norm().max(1.0));
            }
        }
        plain(worst)
    }));
    out.push(check("bch.f_continuity", json!({"relative_gap": 1e-9}), 1e-10, || {
        // straddle each switch between evaluation branches
        let mut worst = 0.0f64;
        let dirs = [c(1.0, 0.0), C64::from_polar(1.0, 1.0), c(0.0, 1.0)];
        for &m in &[c(0.0, 0.0), c(0.7, -0.2), c(-1.5, 1.0)] {
            for &d in &dirs {
                let r = bch::F_DIAGONAL_RADIUS / 2.0;
                let (lo, hi) = (d * (r * (1.0 - 1e-9)), d * (r * (1.0 + 1e-9)));
                worst = worst.max((bch::f_uv(m + lo, m - lo) - bch::f_uv(m + hi, m - hi)).norm());
                let (lo, hi) = (d * (1e-4 * (1.0 - 1e-9)), d * (1e-4 * (1.0 + 1e-9)));
                worst = worst.max((bch::f_uv(lo, m + c(0.3, 0.0)) - bch::f_uv(hi, m + c(0.3, 0.0))).norm());
            }
        }
        plain(worst)
    }));
    out.push(check("bch.phi_psi_inverse", json!({}), t.phi_psi, || {
        let xs = [c(0.1, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(std::f64::consts::E, 0.0), c(3.0, 1.0), c(0.2, -0.7), c(1.0 + 1e-9, 0.0), c(1.0, 1e-6)];
        let mut worst = 0.0f64;
        for x in xs {
            worst = worst.max((bch::phi(-x.ln()) * bch::psi(x)? - 1.0).norm());
        }
        plain(worst)
    }));
    out.push(check("bch.vis1", json!({}), t.vis1, || {
        let pairs = [
            bch::Vis1Pair { a: [c(0.3, 0.1), c(0.2, -0.1), c(0.05, 0.0)], b: [c(-0.2, 0.05), c(0.4, 0.2), c(0.1, -0.1)] },
            bch::Vis1Pair { a: [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)], b: [c(0.0, 0.0), c(0.0, 0.3), c(0.2, 0.0)] },
            bch::Vis1Pair { a: [c(0.4, 0.0), c(0.0, 0.0), c(0.0, 0.0)], b: [c(0.4, 0.0), c(0.3, 0.0), c(0.0, 0.1)] },
            bch::Vis1Pair { a: [c(-0.5, 0.3), c(0.1, 0.1), c(0.0, 0.2)], b: [c(0.2, -0.4), c(-0.3, 0.2), c(0.0, 0.0)] },
        ];
        plain(max_of(pairs.iter().map(|p| p.residual())))
    }));
    let zs = bch_z();
    out.push(check("bch.su11_2x2_factored", json!({"r_max": 1.0}), t.bch_block, || {
        plain(max_of(zs.iter().map(|&z| linalg::max_abs(&(bch::squeeze_2x2_exp(z) - bch::squeeze_2x2_factored(z))))))
    }));
    out.push(check("bch.su11_2x2_dual", json!({"r_max": 1.0}), t.bch_block, || {
        plain(max_of(zs.iter().map(|&z| linalg::max_abs(&(bch::squeeze_2x2_exp(z) - bch::squeeze_2x2_dual(z))))))
    }));
    out.push(check("bch.disentangle_gamma", json!({}), t.angle_identity, || {
        plain(max_of(zs.iter().map(|&z| {
            let d = bch::disentangle_squeeze(z);
            let r = z.norm();
            (d.gamma + 2.0 * r.cosh().ln()).abs().max((d.alpha.norm() - r.tanh()).abs())
        })))
    }));
    out
}

/// ‖S_exp − S_factored‖₂ on the top N/2 block, the exponential padded to 2N.
pub fn disentangling_defect(z: C64, n: usize) -> Result<f64> {
    let exact = fock::squeeze_exp_padded(z, n, 2 * n)?;
    let fact = fock::squeeze_factored(z, n)?;
    Ok(linalg::spectral_norm(linalg::top(&(exact.mat - fact.mat), n / 2)))
}

/// The same for the reversed-order product, which exists only for sinh r < 1.
pub fn dual_defect(z: C64, n: usize) -> Result<f64> {
    let exact = fock::squeeze_exp_padded(z, n / 2, 2 * n)?;
    let dual = fock::squeeze_dual(z, n / 2)?;
    Ok(linalg::spectral_norm((&exact.mat - &dual.op.mat).view()))
}

/// Unpadded exponential against the factored product on a fixed top block,
/// showing the truncation error of the exponential.
pub fn truncated_exp_defect(z: C64, n: usize, block: usize) -> Result<f64> {
    let exp = fock::squeeze_exp(z, n)?;
    let fact = fock::squeeze_factored(z, n)?;
    Ok(linalg::spectral_norm(linalg::top(&(exp.mat - fact.mat), block.min(n))))
}

fn bch_fock_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let n = cfg.fock_dim;
    let t = &cfg.tolerances;
    let mut out = Vec::new();
    let zs = bch_z();
    out.push(check("bch.factored_vs_exp", json!({"N": n, "block": n / 2, "r_max": 1.0}), t.bch_block, || {
        let d: Result<Vec<f64>> = zs.par_iter().map(|&z| disentangling_defect(z, n)).collect();
        plain(max_of(d?.into_iter()))
    }));
    let dz = dual_z();
    out.push(
        check("bch.dual_vs_exp", json!({"N": n, "block": n / 2, "z": dz.iter().map(|&z| cjson(z)).collect::<Vec<_>>()}), t.bch_block, || {
            let d: Result<Vec<f64>> = dz.par_iter().map(|&z| dual_defect(z, n)).collect();
            plain(max_of(d?.into_iter()))
        }),
    );
    let z = C64::from_polar(0.8, FRAC_PI_3);
    let block = (n / 8).max(2);
    out.push(check("bch.truncation_monotone", json!({"z": cjson(z), "N": [n / 2, n], "block": block}), 1e-13, || {
        let (small, big) = (truncated_exp_defect(z, n / 2, block)?, truncated_exp_defect(z, n, block)?);
        Ok((big - small, json!({"defect_small": small, "defect_big": big})))
    }));
    out
}

// ---------------------------------------------------------------- fock operators

fn fock_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let n = cfg.fock_dim;
    let k = cfg.constants;
    let t = &cfg.tolerances;
    let half = n / 2;
    let g = json!({"N": n, "block": half});
    let zs = grid_z();
    let grid = standard_grid();
    let mut out = Vec::new();
    out.push(check("fock.ladder_commutator", json!({"N": n, "block": n - 1}), t.operator_identity, || {
        let (a, ad) = fock::ladder(n)?;
        let d = linalg::commutator(&a.mat, &ad.mat) - linalg::eye(n);
        plain(linalg::max_abs_view(linalg::top(&d, n - 1)))
    }));
    out.push(check("fock.qp_commutator", json!({"N": n, "block": n - 1}), t.operator_identity, || {
        let (q, p) = fock::position_momentum(n, &k)?;
        let d = linalg::commutator(&q.mat, &p.mat) - linalg::eye(n) * c(0.0, k.hbar);
        plain(linalg::max_abs_view(linalg::top(&d, n - 1)) / k.hbar)
    }));
    out.push(check("fock.bogoliubov_closure", json!({"N": n, "block": n - 1}), t.operator_identity, || {
        let mut worst = 0.0f64;
        for &z in &zs {
            let a = fock::bogoliubov(z, n)?.mat;
            let d = linalg::commutator(&a, &linalg::adjoint(&a)) - linalg::eye(n);
            worst = worst.max(linalg::max_abs_view(linalg::top(&d, n - 1)));
        }
        plain(worst)
    }));
    out.push(check("fock.annihilates_squeezed_vacuum", g.clone(), t.operator_identity, || {
        let mut worst = 0.0f64;
        for &z in &zs {
            let a = fock::bogoliubov(z, n)?.mat;
            let v = a.dot(&fock::squeezed_vacuum(z, n)?.amps);
            worst = worst.max(v.iter().take(half).map(|x| x.norm()).fold(0.0, f64::max));
        }
        plain(worst)
    }));
    out.push(check("fock.displaced_eigenvector", json!({"N": n, "rows": half, "grid": "standard"}), t.operator_identity, || {
        let mut worst = 0.0f64;
        for l in &grid {
            let a = fock::bogoliubov(l.z(), n)?.mat;
            let s = fock::saturating_state_unchecked(l, n)?.amps;
            let v = a.dot(&s) - &s * l.u0_z();
            worst = worst.max(v.iter().take(half).map(|x| x.norm()).fold(0.0, f64::max));
        }
        plain(worst)
    }));
    out.push(check("fock.displacement_shift", g.clone(), t.operator_identity, || {
        let (q, p) = fock::position_momentum(n, &k)?;
        let mut worst = 0.0f64;
        for (re, im) in GRID_U0 {
            let u = c(re, im);
            let d = fock::displacement(u, n)?.mat;
            let dd = linalg::adjoint(&d);
            let m = params::labels_to_moments(&Labels::new(u, c(0.0, 0.0)), &k);
            let eq = d.dot(&q.mat).dot(&dd) - (&q.mat - &(linalg::eye(n) * c(m.q0, 0.0)));
            let ep = d.dot(&p.mat).dot(&dd) - (&p.mat - &(linalg::eye(n) * c(m.p0, 0.0)));
            worst = worst.max(linalg::max_abs_view(linalg::top(&eq, half)) / k.ell0);
            worst = worst.max(linalg::max_abs_view(linalg::top(&ep, half)) / k.p_scale());
        }
        plain(worst)
    }));
    out.push(check("fock.invariant_combination", json!({"N": n, "grid": "standard"}), t.operator_identity, || {
        let (a, ad) = fock::ladder(n)?;
        let mut worst = 0.0f64;
        for l in &grid {
            let az = fock::bogoliubov(l.z(), n)?.mat;
            let w = l.u0_z();
            let lhs = linalg::adjoint(&az) * w - &az * w.conj();
            let rhs = &ad.mat * l.u0 - &a.mat * l.u0.conj();
            worst = worst.max(linalg::max_abs(&(lhs - rhs)));
        }
        plain(worst)
    }));
    out.push(check("fock.displacement_vs_exp", g.clone(), t.operator_identity, || {
        let mut worst = 0.0f64;
        for u in [c(1.0, 1.0), c(0.5, -0.3), c(-1.5, 0.5)] {
            let d = fock::displacement(u, n)?.mat - fock::displacement_exp(u, n)?.mat;
            worst = worst.max(linalg::spectral_norm(linalg::top(&d, half)));
        }
        plain(worst)
    }));
    out.push(check("fock.vacuum_amplitude", json!({"N": n}), t.operator_identity, || {
        let mut worst = 0.0f64;
        for &z in &zs {
            let want = z.norm().cosh().powf(-0.5);
            let s0 = fock::squeeze_exp_padded(z, 2, n)?.mat[[0, 0]];
            let v0 = fock::squeezed_vacuum(z, n)?.amps[0];
            worst = worst.max((s0 - want).norm()).max((v0 - want).norm());
        }
        plain(worst)
    }));
    out.push(check("fock.parity", json!({"N": n}), 0.0, || {
        let mut worst = 0.0f64;
        for &z in &zs {
            let s = fock::squeeze_exp(z, n)?.mat;
            for ((i, j), x) in s.indexed_iter() {
                if (i + j) % 2 == 1 {
                    worst = worst.max(x.norm());
                }
            }
        }
        plain(worst)
    }));
    out
}

// ---------------------------------------------------------------- saturation scan

/// Residual of the defining equation, moments, and SR-UR slack for each label
/// at Fock dimension `dim`, plus the convergence comparison with `dim/2`.
pub fn saturation_scan(grid: &[Labels], dim: usize, k: &Constants, t: &Tolerances) -> Vec<CheckResult> {
    struct Row {
        residual: f64,
        residual_half: f64,
        slack: f64,
        moments: f64,
        tail: f64,
    }
    let g = json!({"N": dim, "points": grid.len()});
    let t0 = Instant::now();
    let rows: Result<Vec<Row>> = grid
        .par_iter()
        .map(|l| {
            let (q, p) = fock::position_momentum(dim, k)?;
            let m = params::labels_to_moments(l, k);
            let s = fock::saturating_state_unchecked(l, dim)?;
            let sh = fock::saturating_state_unchecked(l, dim / 2)?;
            let fm = fock::expectations_unchecked(&s, k);
            let moments = [
                (fm.q0 - m.q0).abs() / k.ell0,
                (fm.p0 - m.p0).abs() / k.p_scale(),
                (fm.dq - m.dq).abs() / m.dq,
                (fm.dp - m.dp).abs() / m.dp,
                (fm.corr - m.corr).abs() / k.hbar,
            ]
            .into_iter()
            .fold(0.0, f64::max);
            Ok(Row {
                residual: fock::defining_residual(&s, &m, k),
                residual_half: fock::defining_residual(&sh, &m, k),
                slack: fock::sr_ur_check(&q, &p, &s)?.slack.abs() / (k.hbar * k.hbar),
                moments,
                tail: s.tail_mass,
            })
        })
        .collect();
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    let ids = ["scan.defining_residual", "scan.sr_slack", "scan.moments_fock", "scan.tail_mass", "scan.convergence"];
    let rows = match rows {
        Ok(r) => r,
        Err(e) => return ids.iter().map(|id| CheckResult::failed(*id, g.clone(), &e)).collect(),
    };
    let worst = |f: &dyn Fn(&Row) -> f64| max_of(rows.iter().map(f));
    let (res, res_half) = (worst(&|r| r.residual), worst(&|r| r.residual_half));
    vec![
        CheckResult::new(ids[0], g.clone(), res, t.defining_residual, ms),
        CheckResult::new(ids[1], g.clone(), worst(&|r| r.slack), t.sr_saturating, 0.0),
        CheckResult::new(ids[2], g.clone(), worst(&|r| r.moments), t.moments_fock, 0.0),
        CheckResult::new(ids[3], g.clone(), worst(&|r| r.tail), t.tail_bound, 0.0),
        CheckResult::new(
            ids[4],
            json!({"N": [dim / 2, dim], "residual_half": res_half, "residual": res}),
            res - res_half,
            1e-13,
            0.0,
        ),
    ]
}

fn scan_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let dim = cfg.state_dim();
    let k = cfg.constants;
    let t = &cfg.tolerances;
    let mut out = saturation_scan(&standard_grid(), dim, &k, t);
    out.push(check("scan.probe_residual", json!({"state": "|1>", "N": dim, "min": t.probe_residual_min}), -t.probe_residual_min, || {
        let s = FockVector::basis(1, dim);
        let m = fock::expectations_unchecked(&s, &k);
        let r = fock::defining_residual(&s, &m, &k);
        Ok((-r, json!({"residual": r})))
    }));
    out.push(check("scan.probe_slack", json!({"state": "|1>", "N": dim, "expected": 2.0 * k.hbar * k.hbar}), t.sr_probe, || {
        let (q, p) = fock::position_momentum(dim, &k)?;
        let rep = fock::sr_ur_check(&q, &p, &FockVector::basis(1, dim))?;
        plain((rep.slack - 2.0 * k.hbar * k.hbar).abs())
    }));
    let n = cfg.fock_dim;
    out.push(check("scan.sr_positivity", json!({"vectors": 100, "N": n, "seed": cfg.seed}), t.sr_positive, || {
        let (q, p) = fock::position_momentum(n, &k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst = f64::INFINITY;
        for _ in 0..100 {
            let amps: Array1<C64> = (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    c(re, im)
                })
                .collect();
            let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let v = FockVector::new(amps / c(norm, 0.0));
            worst = worst.min(fock::sr_ur_check(&q, &p, &v)?.slack);
        }
        Ok((-worst, json!({"min_slack": worst})))
    }));
    out
}

// ---------------------------------------------------------------- wavefunctions

fn q_grid(p: &WavefnParams) -> impl Iterator<Item = f64> + '_ {
    (0..129).map(move |i| p.moments.q0 + p.moments.dq * (-6.0 + 12.0 * i as f64 / 128.0))
}

/// Fock–Hermite synthesis against the closed form on a 129-point grid.
fn synthesis_defect(grid: &[Labels], dim: usize, k: &Constants, mutation: Option<Mutation>) -> Result<f64> {
    let d: Result<Vec<f64>> = grid
        .par_iter()
        .map(|l| {
            let p = WavefnParams::new(*l, *k);
            let amps = fock::saturating_state_unchecked(l, dim)?.amps.to_vec();
            let scale = k.ell0.sqrt();
            Ok(max_of(q_grid(&p).map(|q| (wavefn::synthesize(&amps, q, k) - wavefn::psi_mut(q, &p, mutation)).norm() * scale)))
        })
        .collect();
    Ok(max_of(d?.into_iter()))
}

/// |∫⟨Ω₀|q⟩⟨q|Ω_z⟩dq − (cosh r)^{−1/2}| by Gauss–Hermite quadrature.
fn phase_anchor_defect(z: C64, k: &Constants, mutation: Option<Mutation>) -> Result<f64> {
    let vac = WavefnParams::new(Labels::vacuum(), *k);
    let p = WavefnParams::new(Labels::new(c(0.0, 0.0), z), *k);
    // |ψ₀ψ_z| ∝ exp(−q²/(2ℓ₀²) − q²/(4dq²))
    let a = 1.0 / (2.0 * k.ell0 * k.ell0) + 1.0 / (4.0 * p.moments.dq * p.moments.dq);
    let s = a.sqrt().recip();
    let spec = QuadratureSpec::gauss_hermite(64).centered((0.0, 0.0), (s, s)).with_tol(1e-13);
    let rep = quadrature::integrate_line(|q| wavefn::psi(q, &vac).conj() * wavefn::psi_mut(q, &p, mutation), &spec)?;
    Ok((rep.value - z.norm().cosh().powf(-0.5)).norm())
}

fn wavefn_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let k = cfg.constants;
    let t = &cfg.tolerances;
    let grid = standard_grid();
    let g = json!({"grid": "standard", "q_points": 129});
    let mut out = Vec::new();
    out.push(check("wavefn.forms", g.clone(), t.wf_forms, || {
        let scale = k.ell0.sqrt();
        plain(max_of(grid.iter().map(|l| {
            let p = WavefnParams::new(*l, k);
            max_of(q_grid(&p).map(|q| {
                let base = wavefn::psi(q, &p);
                max_of(WfForm::ALL.iter().map(|&f| (wavefn::psi_form(q, &p, f) - base).norm() * scale))
            }))
        })))
    }));
    let dim = cfg.state_dim();
    out.push(check("wavefn.synthesis", json!({"grid": "standard", "q_points": 129, "N": dim}), t.wf_synthesis, || {
        plain(synthesis_defect(&grid, dim, &k, cfg.mutation)?)
    }));
    out.push(check("wavefn.normalization", g.clone(), t.wf_normalization, || {
        let mut worst = 0.0f64;
        for l in &grid {
            let p = WavefnParams::new(*l, k);
            let s = SQRT_2 * p.moments.dq;
            let spec = QuadratureSpec::gauss_hermite(16).centered((p.moments.q0, 0.0), (s, s));
            let rep = quadrature::integrate_line(|q| c(wavefn::psi(q, &p).norm_sqr(), 0.0), &spec)?;
            worst = worst.max((rep.value - 1.0).norm());
        }
        plain(worst)
    }));
    let zs = grid_z();
    out.push(check("wavefn.phase_anchor", json!({"z": "standard"}), t.phase_anchor, || {
        let d: Result<Vec<f64>> = zs.iter().map(|&z| phase_anchor_defect(z, &k, cfg.mutation)).collect();
        plain(max_of(d?.into_iter()))
    }));
    out
}

// ---------------------------------------------------------------- kernels

/// Deterministic pairs drawn from the standard grid.
pub fn overlap_pairs(count: usize) -> Vec<(Labels, Labels)> {
    let g = standard_grid();
    let n = g.len();
    (0..count).map(|i| (g[i % n], g[(7 * i + 11) % n])).collect()
}

/// ⟨Ω₂|Ω₁⟩ by quadrature of the two wavefunctions over q.
pub fn overlap_by_quadrature(l2: &Labels, l1: &Labels, k: &Constants) -> Result<quadrature::QuadratureReport> {
    let (p2, p1) = (WavefnParams::new(*l2, *k), WavefnParams::new(*l1, *k));
    let (w2, w1) = (0.25 / p2.moments.dq.powi(2), 0.25 / p1.moments.dq.powi(2));
    let centre = (w2 * p2.moments.q0 + w1 * p1.moments.q0) / (w2 + w1);
    let s = (w2 + w1).sqrt().recip();
    let spec = QuadratureSpec::gauss_hermite(192).centered((centre, 0.0), (s, s));
    quadrature::integrate_line_report(|q| (wavefn::log_psi(q, &p2).conj() + wavefn::log_psi(q, &p1)).exp(), &spec)
}

/// Largest pairwise gap between the closed form, the Fock inner product and
/// q-quadrature, with the largest quadrature error estimate as detail.
fn overlap_triangle(pairs: &[(Labels, Labels)], dim: usize, k: &Constants, mutation: Option<Mutation>) -> Result<(f64, Value)> {
    let rows: Result<Vec<(f64, f64)>> = pairs
        .par_iter()
        .map(|(l2, l1)| {
            let closed = kernels::squeezed_overlap_mut(l2.z(), l2.u0, l1.z(), l1.u0, mutation).value;
            let fock = fock::saturating_state_unchecked(l2, dim)?.inner(&fock::saturating_state_unchecked(l1, dim)?);
            let quad = overlap_by_quadrature(l2, l1, k)?;
            let gap = (closed - fock).norm().max((closed - quad.value).norm()).max((fock - quad.value).norm());
            Ok((gap, quad.est_error))
        })
        .collect();
    let rows = rows?;
    Ok((max_of(rows.iter().map(|r| r.0)), json!({"max_quad_est_error": max_of(rows.iter().map(|r| r.1))})))
}

fn kernels_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let k = cfg.constants;
    let t = &cfg.tolerances;
    let pairs = overlap_pairs(48);
    let g = json!({"pairs": pairs.len()});
    let mut out = Vec::new();
    let dim = cfg.state_dim();
    out.push(check("kernels.overlap_triangle", json!({"pairs": pairs.len(), "N": dim}), t.overlap_triangle, || {
        overlap_triangle(&pairs, dim, &k, cfg.mutation)
    }));
    out.push(check("kernels.hermitian_symmetry", g.clone(), t.overlap_forms, || {
        plain(max_of(pairs.iter().map(|(a, b)| {
            let x = kernels::squeezed_overlap(a.z(), a.u0, b.z(), b.u0).value;
            let y = kernels::squeezed_overlap(b.z(), b.u0, a.z(), a.u0).value;
            (x - y.conj()).norm()
        })))
    }));
    out.push(check("kernels.cauchy_schwarz", g.clone(), t.overlap_forms, || {
        let diag = max_of(standard_grid().iter().map(|l| (kernels::squeezed_overlap(l.z(), l.u0, l.z(), l.u0).value - 1.0).norm()));
        let off = max_of(pairs.iter().map(|(a, b)| (kernels::squeezed_overlap(a.z(), a.u0, b.z(), b.u0).modulus - 1.0).max(0.0)));
        plain(diag.max(off))
    }));
    out.push(check("kernels.qp_form", g.clone(), t.overlap_forms, || {
        plain(max_of(pairs.iter().map(|(a, b)| {
            let x = kernels::squeezed_overlap(a.z(), a.u0, b.z(), b.u0);
            let y = kernels::squeezed_overlap_qp(a.z(), a.u0, b.z(), b.u0, &k);
            (x.value - y.value).norm()
        })))
    }));
    out.push(check("kernels.parts_product", g.clone(), t.overlap_forms, || {
        plain(max_of(pairs.iter().map(|(a, b)| {
            let x = kernels::squeezed_overlap(a.z(), a.u0, b.z(), b.u0);
            (x.parts.prefactor * x.parts.symplectic_phase * x.parts.gaussian - x.value).norm()
        })))
    }));
    out.push(check("kernels.coherent_modulus", g.clone(), t.coherent_modulus, || {
        plain(max_of(pairs.iter().map(|(a, b)| {
            let v = kernels::coherent_overlap(a.u0, b.u0);
            (v.modulus - (-(a.u0 - b.u0).norm_sqr() / 2.0).exp()).abs()
        })))
    }));
    let n = cfg.fock_dim;
    out.push(check("kernels.general_element_fock", json!({"N": n}), t.overlap_triangle, || {
        // e^{ζa†²/2}|0⟩ = (cosh r)^{1/2} S(z)|0⟩ with ζ = e^{iθ}tanh r
        let unnorm = |zeta: C64| -> Result<Array1<C64>> {
            let r = zeta.norm().atanh();
            let z = if r == 0.0 { c(0.0, 0.0) } else { zeta * (r / zeta.norm()) };
            Ok(fock::squeezed_vacuum(z, n)?.amps * c(r.cosh().sqrt(), 0.0))
        };
        let cases = [(c(0.0, 0.4), c(1.0, 0.5), c(-0.2, 0.0)), (c(0.3, -0.3), c(-0.5, 0.2), c(0.1, 0.5)), (c(0.0, 0.0), c(0.7, 0.7), c(0.5, 0.0))];
        let mut worst = 0.0f64;
        for (z2, u, z1) in cases {
            let closed = kernels::general_matrix_element(z2, u, z1)?;
            let (v2, v1) = (unnorm(z2)?, unnorm(z1)?);
            let dv = fock::displacement(u, n)?.mat.dot(&v1);
            let f: C64 = v2.iter().zip(dv.iter()).map(|(a, b)| a.conj() * b).sum();
            worst = worst.max((closed - f).norm());
        }
        plain(worst)
    }));
    out.push(check("kernels.general_element_reduction", json!({}), t.overlap_forms, || {
        let mut worst = 0.0f64;
        for (u2, z1, u1) in [(c(0.3, -0.2), C64::from_polar(0.6, 1.0), c(-0.4, 0.8)), (c(1.0, 0.0), c(0.2, 0.0), c(0.0, 1.0))] {
            let l1 = Labels::new(u1, z1);
            let g = kernels::general_matrix_element(c(0.0, 0.0), u1 - u2, l1.zeta())?;
            let sym = kernels::displacement_composition(u2, u1).phase;
            let want = kernels::squeezed_overlap(c(0.0, 0.0), u2, z1, u1).value;
            worst = worst.max((g * sym * l1.r().cosh().powf(-0.5) - want).norm());
        }
        plain(worst)
    }));
    out.push(check("kernels.displacement_composition", json!({"N": n, "block": n / 2}), t.operator_identity, || {
        let mut worst = 0.0f64;
        for (u2, u1) in [(c(1.0, 0.0), c(0.0, 1.0)), (c(-0.5, 0.3), c(0.8, -0.6))] {
            let dc = kernels::displacement_composition(u2, u1);
            let lhs = linalg::adjoint(&fock::displacement(u2, n)?.mat).dot(&fock::displacement(u1, n)?.mat);
            let rhs = fock::displacement(dc.shifted, n)?.mat * dc.phase;
            worst = worst.max(linalg::max_abs_view(linalg::top(&(lhs - rhs), n / 2)));
        }
        plain(worst)
    }));
    out.push(check("kernels.reproducing_coherent", json!({"order": 24}), t.reproducing_coherent, || {
        let zero = c(0.0, 0.0);
        let mut worst = 0.0f64;
        for (u2, u1) in [(c(0.3, -0.2), c(-0.4, 0.6)), (c(1.0, 1.0), c(0.0, 0.5))] {
            let rep = kernels::reproducing_compose(zero, u2, zero, u1, zero, &kernels::compose_spec(zero, u2, u1, 24))?;
            worst = worst.max((rep.value - kernels::coherent_overlap(u2, u1).value).norm());
        }
        plain(worst)
    }));
    out.push(check("kernels.reproducing_squeezed", json!({"order": 40}), t.reproducing_squeezed, || {
        let mut worst = 0.0f64;
        let cases = [
            (c(0.4, 0.0), c(0.5, 0.1), c(0.0, 0.2), c(-0.2, 0.3), c(0.3, 0.0)),
            (C64::from_polar(0.3, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.4, -0.4), C64::from_polar(0.2, -2.0)),
        ];
        for (z2, u2, z1, u1, z3) in cases {
            let spec = kernels::compose_spec(z3, u2, u1, 40).with_tol(1e-9);
            let rep = kernels::reproducing_compose(z2, u2, z1, u1, z3, &spec)?;
            worst = worst.max((rep.value - kernels::squeezed_overlap(z2, u2, z1, u1).value).norm());
        }
        plain(worst)
    }));
    out.push(check("kernels.variable_change", json!({}), 1e-11, || {
        let g = PolySymbol::monomial(3, 2, c(1.0, 0.5)).add(&PolySymbol::monomial(1, 4, c(-0.3, 0.0)));
        plain(max_of(grid_z().into_iter().map(|z| kernels::variable_change_defect(z, &g, &k))))
    }));
    out.push(check("kernels.jacobian", json!({}), 1e-13, || plain(max_of(grid_z().into_iter().map(|z| (kernels::jacobian_det(z) - 1.0).abs())))));
    out.push(check("kernels.degree_guard", json!({"max": MAX_KERNEL_DEGREE}), 0.5, || {
        let f = PolySymbol::linear_power(c(1.0, 0.0), c(1.0, 0.0), MAX_KERNEL_DEGREE + 1);
        plain(if matches!(kernels::diagonal_kernel(&f, MAX_KERNEL_DEGREE), Err(Error::DegreeTooHigh { .. })) { 0.0 } else { 1.0 })
    }));
    out
}

// ---------------------------------------------------------------- overcompleteness

/// Tensor rule for u-plane integrals of |Ω_z(u)⟩⟨Ω_z(u)|, in the frame rotated by
/// e^{iθ/2} where the Gaussian factor separates.
pub fn resolution_spec(z: C64, order: usize) -> QuadratureSpec {
    kernels::compose_spec(z, c(0.0, 0.0), c(0.0, 0.0), order).with_tol(1e-10)
}

/// Amplitudes ⟨m|Ω_z(u)⟩, m < rows, summed over `inner` intermediate levels.
fn top_amplitudes(u: C64, rows: usize, sv: &Array1<C64>) -> Array1<C64> {
    fock::displacement_block(u, rows, sv.len()).dot(sv)
}

/// Levels needed for the amplitudes to be accurate at every node with a
/// non-negligible weight.
fn inner_levels(spec: &QuadratureSpec, rows: usize) -> usize {
    let reach = 50f64.sqrt() * spec.scale.0.max(spec.scale.1) + spec.center.0.hypot(spec.center.1);
    rows + ((reach + 6.0).powi(2)).ceil() as usize
}

/// ∫(du dū/π) Σ_j K_j(u₀(z)) |Ω_z(u)⟩⟨Ω_z(u)| restricted to the first `rows`
/// levels, one block per kernel, stacked side by side.
fn plane_blocks(z: C64, rows: usize, kernels_w: &[PolySymbol], spec: &QuadratureSpec) -> Result<(CMat, quadrature::QuadratureReport)> {
    let sv = fock::squeezed_vacuum(z, inner_levels(spec, rows))?.amps;
    let rot = C64::from_polar(1.0, Labels::new(c(0.0, 0.0), z).theta() / 2.0);
    let cols = rows * kernels_w.len();
    let f = |v: C64| {
        let u = rot * v;
        let amp = top_amplitudes(u, rows, &sv);
        let w = Labels::new(u, z).u0_z();
        let mut m = Array2::zeros((rows, cols));
        for (j, kern) in kernels_w.iter().enumerate() {
            let kw = kern.eval(w);
            for a in 0..rows {
                for b in 0..rows {
                    m[[a, j * rows + b]] = kw * amp[a] * amp[b].conj();
                }
            }
        }
        m
    };
    let (m, rep) = quadrature::integrate_plane_matrix(f, (rows, cols), spec)?;
    Ok((m, rep.require(spec.rel_tol)?))
}

/// ‖∫(du dū/π)|Ω_z(u)⟩⟨Ω_z(u)| − I‖_max on the first `dim_check` levels.
pub fn resolution_defect(z: C64, dim_check: usize, spec: &QuadratureSpec) -> Result<(f64, quadrature::QuadratureReport)> {
    let (m, rep) = plane_blocks(z, dim_check, &[PolySymbol::constant(c(1.0, 0.0))], spec)?;
    Ok((linalg::max_abs(&(m - linalg::eye(dim_check))), rep))
}

pub fn resolution_of_identity(z: C64, dim_check: usize, spec: &QuadratureSpec, bound: f64) -> CheckResult {
    let id = format!("overcomplete.resolution[z={}]", fmt_c(z));
    check(&id, json!({"z": cjson(z), "dim_check": dim_check, "order": spec.order_or_nodes}), bound, || {
        let (d, rep) = resolution_defect(z, dim_check, spec)?;
        Ok((d, json!({"est_error": rep.est_error, "nodes": rep.nodes_used})))
    })
}

/// The double integral over z (weighted by μ) and u of the projectors, against
/// the identity on the first `dim_check` levels.
pub fn mu_weighted_identity(mu: &MuSpec, dim_check: usize, zspec: &QuadratureSpec, inner_order: usize, bound: f64) -> CheckResult {
    let id = format!("overcomplete.mu_identity[sigma={}]", mu.sigma);
    let params = json!({"sigma": mu.sigma, "dim_check": dim_check, "z_order": zspec.order_or_nodes, "u_order": inner_order});
    check(&id, params, bound, || {
        let failure: Mutex<Option<Error>> = Mutex::new(None);
        let inner_err = Mutex::new(0.0f64);
        let f = |z: C64| match plane_blocks(z, dim_check, &[PolySymbol::constant(c(1.0, 0.0))], &resolution_spec(z, inner_order)) {
            Ok((m, rep)) => {
                let mut e = inner_err.lock().unwrap();
                *e = e.max(rep.est_error);
                m
            }
            Err(err) => {
                failure.lock().unwrap().get_or_insert(err);
                Array2::from_elem((dim_check, dim_check), c(f64::NAN, 0.0))
            }
        };
        let (m, rep) = quadrature::integrate_z_matrix(f, (dim_check, dim_check), mu, zspec)?;
        if let Some(err) = failure.into_inner().unwrap() {
            return Err(err);
        }
        let rep = rep.require(zspec.rel_tol)?;
        let detail = json!({"z_est_error": rep.est_error, "u_est_error": inner_err.into_inner().unwrap()});
        Ok((linalg::max_abs(&(m - linalg::eye(dim_check))), detail))
    })
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}@{:.6}", z.norm(), z.arg())
    }
}

fn resolution_z() -> Vec<C64> {
    RESOLUTION_Z.iter().map(|&(r, th)| C64::from_polar(r, th)).collect()
}

fn overcomplete_ids() -> Vec<String> {
    let mut ids: Vec<String> = resolution_z().into_iter().map(|z| format!("overcomplete.resolution[z={}]", fmt_c(z))).collect();
    ids.extend(MU_SIGMAS.iter().map(|s| format!("overcomplete.mu_identity[sigma={s}]")));
    ids.push("overcomplete.mu_normalization".into());
    ids
}

fn overcomplete_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let t = &cfg.tolerances;
    let mut out: Vec<CheckResult> = resolution_z()
        .par_iter()
        .map(|&z| resolution_of_identity(z, RESOLUTION_DIM, &resolution_spec(z, PLANE_ORDER), t.resolution))
        .collect();
    out.extend(MU_SIGMAS.par_iter().map(|&sigma| {
        mu_weighted_identity(&MuSpec { sigma }, RESOLUTION_DIM, &QuadratureSpec::tensor(Z_ORDER).with_tol(1e-8), PLANE_ORDER, t.mu_identity)
    }).collect::<Vec<_>>());
    out.push(check("overcomplete.mu_normalization", json!({"sigma": MU_SIGMAS}), 1e-12, || {
        let mut worst = 0.0f64;
        for sigma in MU_SIGMAS {
            let rep = quadrature::integrate_z(|_| c(1.0, 0.0), &MuSpec { sigma }, &QuadratureSpec::tensor(Z_ORDER))?;
            worst = worst.max((rep.value - 1.0).norm());
        }
        plain(worst)
    }));
    out
}

// ---------------------------------------------------------------- diagonal kernels

fn diagonal_ids() -> Vec<String> {
    let mut ids = Vec::new();
    for z in KERNEL_Z {
        for o in Observable::ALL {
            ids.push(diagonal_id(o, z));
        }
    }
    ids
}

fn diagonal_id(o: Observable, z: f64) -> String {
    format!("diagkernel.{}[z={z}]", o.name())
}

/// Rebuild each observable's top `rows`×`rows` block from its diagonal kernel
/// and compare with the Fock matrix; one result per observable.
pub fn kernel_reconstruction(z: C64, rows: usize, order: usize, k: &Constants, bound: f64) -> Result<Vec<(Observable, f64)>> {
    let kerns: Result<Vec<PolySymbol>> =
        Observable::ALL.iter().map(|o| kernels::diagonal_kernel(&o.symbol(z, k), MAX_KERNEL_DEGREE)).collect();
    let spec = resolution_spec(z, order).with_tol(bound * 1e-2);
    let (m, _) = plane_blocks(z, rows, &kerns?, &spec)?;
    Observable::ALL
        .iter()
        .enumerate()
        .map(|(j, &o)| {
            let want = o.fock_matrix(rows + 4, k)?;
            let got = m.slice(ndarray::s![.., j * rows..(j + 1) * rows]);
            let diff = max_of(got.indexed_iter().map(|((a, b), x)| (x - want[[a, b]]).norm()));
            Ok((o, diff))
        })
        .collect()
}

fn diagonal_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let t = &cfg.tolerances;
    let k = cfg.constants;
    let mut out = Vec::new();
    for zr in KERNEL_Z {
        let z = c(zr, 0.0);
        let t0 = Instant::now();
        let res = kernel_reconstruction(z, KERNEL_DIM, PLANE_ORDER, &k, t.kernel_reconstruction);
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        for (j, o) in Observable::ALL.iter().enumerate() {
            let params = json!({"z": zr, "block": KERNEL_DIM, "observable": o.name()});
            out.push(match &res {
                Ok(v) => CheckResult::new(diagonal_id(*o, zr), params, v[j].1, t.kernel_reconstruction, ms),
                Err(e) => CheckResult::failed(diagonal_id(*o, zr), params, e),
            });
        }
    }
    out
}

// ---------------------------------------------------------------- canaries

/// The mutation-sensitive checks, run on reduced grids.
fn sensitive_checks(cfg: &SuiteConfig, mutation: Mutation) -> Vec<CheckResult> {
    let k = cfg.constants;
    let t = &cfg.tolerances;
    let m = Some(mutation);
    let few: Vec<Labels> = standard_grid().into_iter().step_by(9).collect();
    let mut out = Vec::new();
    out.push(check("params.rho_identity", json!({}), t.angle_identity, || {
        plain(max_of(few.iter().map(|l| {
            let a = params::derived_angles_mut(l, &params::labels_to_moments(l, &k), &k, m);
            (a.rho_plus * a.rho_plus - a.rho_minus * a.rho_minus - 1.0).abs()
        })))
    }));
    out.push(check("wavefn.synthesis", json!({}), t.wf_synthesis, || plain(synthesis_defect(&few, cfg.state_dim(), &k, m)?)));
    out.push(check("wavefn.phase_anchor", json!({}), t.phase_anchor, || {
        plain(max_of([c(0.0, 0.0), C64::from_polar(0.7, 1.1)].iter().map(|&z| phase_anchor_defect(z, &k, m).unwrap_or(f64::INFINITY))))
    }));
    out.push(check("kernels.overlap_triangle", json!({}), t.overlap_triangle, || {
        overlap_triangle(&overlap_pairs(6), cfg.state_dim(), &k, m)
    }));
    out
}

fn canary_ids() -> Vec<String> {
    Mutation::ALL.iter().map(|m| format!("canary.{}", m.name())).collect()
}

fn canary_group(cfg: &SuiteConfig) -> Vec<CheckResult> {
    Mutation::ALL
        .par_iter()
        .map(|&m| {
            let id = format!("canary.{}", m.name());
            let t0 = Instant::now();
            let caught: Vec<String> = sensitive_checks(cfg, m).into_iter().filter(|r| !r.passed).map(|r| r.check_id).collect();
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            let measured = if caught.is_empty() { 1.0 } else { 0.0 };
            CheckResult::new(id, json!({"mutation": m.name(), "caught_by": caught}), measured, 0.5, ms)
        })
        .collect()
}

// ---------------------------------------------------------------- registry

struct Group {
    ids: Vec<String>,
    run: fn(&SuiteConfig) -> Vec<CheckResult>,
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn registry() -> Vec<Group> {
    vec![
        Group {
            ids: ids(&[
                "params.roundtrip",
                "params.saturation_identity",
                "params.uncertainty_band",
                "params.rho_identity",
                "params.theta_from_angles",
                "params.tan_phi",
                "params.zeta",
                "params.thetabar_difference",
                "params.lambda0_forms",
                "params.rejects_unsaturated",
            ]),
            run: params_group,
        },
        Group {
            ids: ids(&[
                "bch.f_origin",
                "bch.f_symmetry",
                "bch.f_closed_form",
                "bch.f_continuity",
                "bch.phi_psi_inverse",
                "bch.vis1",
                "bch.su11_2x2_factored",
                "bch.su11_2x2_dual",
                "bch.disentangle_gamma",
            ]),
            run: bch_group,
        },
        Group { ids: ids(&["bch.factored_vs_exp", "bch.dual_vs_exp", "bch.truncation_monotone"]), run: bch_fock_group },
        Group {
            ids: ids(&[
                "fock.ladder_commutator",
                "fock.qp_commutator",
                "fock.bogoliubov_closure",
                "fock.annihilates_squeezed_vacuum",
                "fock.displaced_eigenvector",
                "fock.displacement_shift",
                "fock.invariant_combination",
                "fock.displacement_vs_exp",
                "fock.vacuum_amplitude",
                "fock.parity",
            ]),
            run: fock_group,
        },
        Group {
            ids: ids(&[
                "scan.defining_residual",
                "scan.sr_slack",
                "scan.moments_fock",
                "scan.tail_mass",
                "scan.convergence",
                "scan.probe_residual",
                "scan.probe_slack",
                "scan.sr_positivity",
            ]),
            run: scan_group,
        },
        Group { ids: ids(&["wavefn.forms", "wavefn.synthesis", "wavefn.normalization", "wavefn.phase_anchor"]), run: wavefn_group },
        Group {
            ids: ids(&[
                "kernels.overlap_triangle",
                "kernels.hermitian_symmetry",
                "kernels.cauchy_schwarz",
                "kernels.qp_form",
                "kernels.parts_product",
                "kernels.coherent_modulus",
                "kernels.general_element_fock",
                "kernels.general_element_reduction",
                "kernels.displacement_composition",
                "kernels.reproducing_coherent",
                "kernels.reproducing_squeezed",
                "kernels.variable_change",
                "kernels.jacobian",
                "kernels.degree_guard",
            ]),
            run: kernels_group,
        },
        Group { ids: overcomplete_ids(), run: overcomplete_group },
        Group { ids: diagonal_ids(), run: diagonal_group },
        Group { ids: canary_ids(), run: canary_group },
    ]
}

/// Every registered check id, in registry order.
pub fn registered_ids() -> Vec<String> {
    registry().into_iter().flat_map(|g| g.ids).collect()
}

/// Compiled form of the `only` filter.
pub struct IdFilter(Vec<glob::Pattern>);

impl IdFilter {
    pub fn parse(only: Option<&str>) -> Result<Self> {
        let mut pats = Vec::new();
        for p in only.unwrap_or("*").split(',').map(str::trim).filter(|p| !p.is_empty()) {
            pats.push(glob::Pattern::new(p).map_err(|e| Error::Domain(format!("bad --only pattern {p:?}: {e}")))?);
        }
        Ok(Self(pats))
    }

    pub fn matches(&self, id: &str) -> bool {
        let opts = glob::MatchOptions { require_literal_separator: false, ..Default::default() };
        self.0.iter().any(|p| p.matches_with(id, opts))
    }
}

/// Run every registered check selected by `cfg.only`, sorted by check id.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    let filter = IdFilter::parse(cfg.only.as_deref())?;
    let groups: Vec<Group> = registry().into_iter().filter(|g| g.ids.iter().any(|id| filter.matches(id))).collect();
    let mut out: Vec<CheckResult> = groups
        .par_iter()
        .flat_map(|g| {
            let mut got = (g.run)(cfg);
            for id in &g.ids {
                match got.iter().filter(|r| &r.check_id == id).count() {
                    1 => {}
                    n => got.push(CheckResult::new(format!("suite.registry[{id}]"), json!({"returned": n}), f64::INFINITY, 0.0, 0.0)),
                }
            }
            got
        })
        .collect();
    out.retain(|r| filter.matches(&r.check_id) || r.check_id.starts_with("suite."));
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Ok(out)
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Fixed-width table for terminals.
pub fn format_table(results: &[CheckResult]) -> String {
    let w = results.iter().map(|r| r.check_id.len()).max().unwrap_or(8).max(8);
    let mut s = format!("{:<w$}  {:>12}  {:>12}  {:>10}  status\n", "check", "measured", "bound", "ms");
    for r in results {
        s += &format!(
            "{:<w$}  {:>12.3e}  {:>12.3e}  {:>10.1}  {}\n",
            r.check_id,
            r.measured,
            r.bound,
            r.runtime_ms,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    s += &format!("{} checks, {} failed\n", results.len(), failed);
    s
}
