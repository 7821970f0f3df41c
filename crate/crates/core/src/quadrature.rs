//! Deterministic quadrature over the q-line, the complex u₀-plane and the z-plane.
//!
//! Every rule sums its nodes in a fixed order with compensated summation;
//! node evaluation may run in parallel, the reduction never does.

use crate::error::{Error, Result};
use crate::hermite::{GaussHermite, MAX_ORDER};
use crate::linalg::CMat;
use crate::C64;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuadKind {
    GaussHermite,
    TensorGaussHermite2d,
    Adaptive1d,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub kind: QuadKind,
    /// Rule order per axis, number of adaptive panels, or number of samples.
    pub order_or_nodes: usize,
    pub center: (f64, f64),
    pub scale: (f64, f64),
    pub rel_tol: f64,
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn gauss_hermite(order: usize) -> Self {
        Self { kind: QuadKind::GaussHermite, order_or_nodes: order, center: (0.0, 0.0), scale: (1.0, 1.0), rel_tol: 1e-12, seed: 0 }
    }

    pub fn tensor(order: usize) -> Self {
        Self { kind: QuadKind::TensorGaussHermite2d, ..Self::gauss_hermite(order) }
    }

    pub fn adaptive(max_panels: usize) -> Self {
        Self { kind: QuadKind::Adaptive1d, ..Self::gauss_hermite(max_panels) }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self { kind: QuadKind::MonteCarlo, seed, rel_tol: 1e-2, ..Self::gauss_hermite(samples) }
    }

    pub fn centered(mut self, center: (f64, f64), scale: (f64, f64)) -> Self {
        self.center = center;
        self.scale = scale;
        self
    }

    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.order_or_nodes < 2 {
            return Err(Error::Domain(format!("order_or_nodes must be ≥ 2, got {}", self.order_or_nodes)));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.scale.0 > 0.0 && self.scale.1 > 0.0) {
            return Err(Error::Domain("quadrature scales must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    pub value: C64,
    pub est_error: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

impl QuadratureReport {
    fn new(value: C64, est_error: f64, nodes_used: usize, rel_tol: f64, magnitude: f64) -> Self {
        let converged = est_error <= rel_tol * magnitude.max(1e-300);
        Self { value, est_error, nodes_used, converged }
    }

    pub fn require(self, rel_tol: f64) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { est_error: self.est_error, rel_tol, nodes: self.nodes_used })
        }
    }
}

/// Neumaier-compensated running sum of complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: C64,
    comp: C64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, e)
}

impl Compensated {
    pub fn add(&mut self, x: C64) {
        let (sr, er) = two_sum(self.sum.re, x.re);
        let (si, ei) = two_sum(self.sum.im, x.im);
        self.sum = C64::new(sr, si);
        self.comp += C64::new(er, ei);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

/// Entrywise compensated sum of equally shaped matrices.
#[derive(Clone, Debug)]
pub struct CompensatedMat {
    acc: Vec<Compensated>,
    shape: (usize, usize),
}

impl CompensatedMat {
    pub fn new(shape: (usize, usize)) -> Self {
        Self { acc: vec![Compensated::default(); shape.0 * shape.1], shape }
    }

    pub fn add_scaled(&mut self, m: &CMat, w: f64) {
        for (a, x) in self.acc.iter_mut().zip(m.iter()) {
            a.add(x * w);
        }
    }

    pub fn add_mat(&mut self, m: &CMat) {
        self.add_scaled(m, 1.0);
    }

    pub fn value(&self) -> CMat {
        Array2::from_shape_vec(self.shape, self.acc.iter().map(|c| c.value()).collect()).expect("shape")
    }
}

fn doubled_order(n: usize) -> (usize, usize) {
    let n = n.min(MAX_ORDER);
    if 2 * n <= MAX_ORDER {
        (n, 2 * n)
    } else {
        (n / 2, n)
    }
}

fn gh_line<F: Fn(f64) -> C64 + Sync>(f: &F, n: usize, c: f64, s: f64) -> C64 {
    let gh = GaussHermite::new(n);
    let vals: Vec<C64> = gh.nodes.par_iter().zip(&gh.mod_weights).map(|(x, w)| f(c + s * x) * *w).collect();
    let mut acc = Compensated::default();
    vals.into_iter().for_each(|v| acc.add(v));
    acc.value() * s
}

/// ∫ f(q) dq for Gaussian-tailed f.
pub fn integrate_line<F: Fn(f64) -> C64 + Sync>(f: F, spec: &QuadratureSpec) -> Result<QuadratureReport> {
    integrate_line_report(f, spec)?.require(spec.rel_tol)
}

/// As [`integrate_line`], but returns the report even when not converged.
pub fn integrate_line_report<F: Fn(f64) -> C64 + Sync>(f: F, spec: &QuadratureSpec) -> Result<QuadratureReport> {
    spec.validate()?;
    let (c, s) = (spec.center.0, spec.scale.0);
    match spec.kind {
        QuadKind::GaussHermite => {
            let (lo, hi) = doubled_order(spec.order_or_nodes);
            let coarse = gh_line(&f, lo, c, s);
            let fine = gh_line(&f, hi, c, s);
            Ok(QuadratureReport::new(fine, (fine - coarse).norm(), lo + hi, spec.rel_tol, fine.norm()))
        }
        QuadKind::Adaptive1d => Ok(adaptive_line(&f, c, s, spec.order_or_nodes, spec.rel_tol)),
        QuadKind::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let n = spec.order_or_nodes;
            let (mut acc, mut acc2) = (Compensated::default(), 0.0);
            for _ in 0..n {
                let x: f64 = StandardNormal.sample(&mut rng);
                let x = x * std::f64::consts::FRAC_1_SQRT_2;
                // density e^{−x²}/√π in the scaled variable
                let v = f(c + s * x) * s * PI.sqrt() * (x * x).exp();
                acc.add(v);
                acc2 += v.norm_sqr();
            }
            let mean = acc.value() / n as f64;
            let var = (acc2 / n as f64 - mean.norm_sqr()).max(0.0);
            Ok(QuadratureReport::new(mean, 3.0 * (var / n as f64).sqrt(), n, spec.rel_tol, mean.norm()))
        }
        QuadKind::TensorGaussHermite2d => Err(Error::Domain("a 2-D rule cannot integrate over a line".into())),
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod and embedded 7-point Gauss estimates on [a, b].
fn kronrod<G: Fn(f64) -> C64>(g: &G, a: f64, b: f64) -> (C64, f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let center = g(mid);
    let mut k = center * WGK[7];
    let mut gs = center * WG[3];
    for i in 0..7 {
        let (x1, x2) = (mid - half * XGK[i], mid + half * XGK[i]);
        let pair = g(x1) + g(x2);
        k += pair * WGK[i];
        if i % 2 == 1 {
            gs += pair * WG[i / 2];
        }
    }
    (k * half, ((k - gs) * half).norm())
}

/// Adaptive Gauss–Kronrod after mapping the line onto (−1, 1) by q = c + s·t/(1−t²).
fn adaptive_line<F: Fn(f64) -> C64>(f: &F, c: f64, s: f64, max_panels: usize, rel_tol: f64) -> QuadratureReport {
    let g = |t: f64| {
        let d = 1.0 - t * t;
        f(c + s * t / d) * (s * (1.0 + t * t) / (d * d))
    };
    let mut panels: Vec<(f64, f64, C64, f64)> = [(-1.0, 0.0), (0.0, 1.0)]
        .iter()
        .map(|&(a, b)| {
            let (v, e) = kronrod(&g, a, b);
            (a, b, v, e)
        })
        .collect();
    loop {
        let mut total = Compensated::default();
        panels.iter().for_each(|p| total.add(p.2));
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let value = total.value();
        if err <= rel_tol * value.norm().max(1e-300) || panels.len() >= max_panels {
            return QuadratureReport::new(value, err, panels.len() * 15, rel_tol, value.norm());
        }
        let worst = (0..panels.len()).max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3)).unwrap();
        let (a, b, _, _) = panels.remove(worst);
        let m = 0.5 * (a + b);
        for (lo, hi) in [(a, m), (m, b)] {
            let (v, e) = kronrod(&g, lo, hi);
            panels.insert(worst.min(panels.len()), (lo, hi, v, e));
        }
        panels.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
}

/// Tensor Gauss–Hermite over u = x + iy with measure dx dy/π; the integrand
/// carries its own Gaussian decay, nodes are x = cₓ + sₓξ, y = c_y + s_yη.
fn gh_plane<F: Fn(C64) -> CMat + Sync>(f: &F, n: usize, spec: &QuadratureSpec, shape: (usize, usize), modified: bool) -> CMat {
    let gh = GaussHermite::new(n);
    let w = if modified { &gh.mod_weights } else { &gh.weights };
    let (cx, cy) = spec.center;
    let (sx, sy) = spec.scale;
    let rows: Vec<CMat> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedMat::new(shape);
            for j in 0..n {
                let u = C64::new(cx + sx * gh.nodes[i], cy + sy * gh.nodes[j]);
                acc.add_scaled(&f(u), w[i] * w[j]);
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedMat::new(shape);
    rows.iter().for_each(|r| total.add_mat(r));
    total.value() * C64::new(sx * sy / PI, 0.0)
}

fn entrywise_change(a: &CMat, b: &CMat) -> (f64, f64) {
    let diff = a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    let mag = a.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    (diff, mag)
}

/// ∫ (du dū/π) f(u) for matrix-valued f of the given shape. The report's
/// `value` is the (0,0) entry; `est_error` is the largest entrywise change
/// under order doubling, judged against the largest entry.
pub fn integrate_plane_matrix<F: Fn(C64) -> CMat + Sync>(
    f: F,
    shape: (usize, usize),
    spec: &QuadratureSpec,
) -> Result<(CMat, QuadratureReport)> {
    spec.validate()?;
    match spec.kind {
        QuadKind::TensorGaussHermite2d => {
            let (lo, hi) = doubled_order(spec.order_or_nodes);
            let coarse = gh_plane(&f, lo, spec, shape, true);
            let fine = gh_plane(&f, hi, spec, shape, true);
            let (err, mag) = entrywise_change(&fine, &coarse);
            let rep = QuadratureReport::new(fine[[0, 0]], err, lo * lo + hi * hi, spec.rel_tol, mag);
            Ok((fine, rep))
        }
        QuadKind::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let n = spec.order_or_nodes;
            let (sx, sy) = spec.scale;
            let mut acc = CompensatedMat::new(shape);
            let mut acc2 = Array2::<f64>::zeros(shape);
            for _ in 0..n {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                let (xi, eta) = (a * std::f64::consts::FRAC_1_SQRT_2, b * std::f64::consts::FRAC_1_SQRT_2);
                let u = C64::new(spec.center.0 + sx * xi, spec.center.1 + sy * eta);
                let v = f(u) * C64::new(sx * sy * (xi * xi + eta * eta).exp(), 0.0);
                acc2.zip_mut_with(&v, |s, x| *s += x.norm_sqr());
                acc.add_mat(&v);
            }
            let mean = acc.value() / C64::new(n as f64, 0.0);
            let err = mean
                .iter()
                .zip(acc2.iter())
                .fold(0.0f64, |m, (mu, s2)| m.max(3.0 * ((s2 / n as f64 - mu.norm_sqr()).max(0.0) / n as f64).sqrt()));
            let mag = mean.iter().fold(0.0f64, |m, x| m.max(x.norm()));
            let rep = QuadratureReport::new(mean[[0, 0]], err, n, spec.rel_tol, mag);
            Ok((mean, rep))
        }
        _ => Err(Error::Domain("plane integrals need a TENSOR_GAUSS_HERMITE_2D or MONTE_CARLO spec".into())),
    }
}

/// Scalar version of [`integrate_plane_matrix`].
pub fn integrate_plane<F: Fn(C64) -> C64 + Sync>(f: F, spec: &QuadratureSpec) -> Result<QuadratureReport> {
    let (_, rep) = integrate_plane_matrix(|u| Array2::from_elem((1, 1), f(u)), (1, 1), spec)?;
    rep.require(spec.rel_tol)
}

/// The z-plane weight μ(z, z̄) = e^{−|z|²/σ²}/σ², normalised against dz dz̄/π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuSpec {
    pub sigma: f64,
}

impl Default for MuSpec {
    fn default() -> Self {
        Self { sigma: 0.5 }
    }
}

impl MuSpec {
    pub fn density(&self, z: C64) -> f64 {
        (-z.norm_sqr() / (self.sigma * self.sigma)).exp() / (self.sigma * self.sigma)
    }
}

/// ∫ (dz dz̄/π) μ(z, z̄) f(z) for matrix-valued f, on a tensor Gauss–Hermite rule
/// matched to μ. The error estimate compares the rule with the one of half
/// its order, which keeps the outermost nodes (and so the squeezing the
/// integrand must resolve) bounded by the requested order.
pub fn integrate_z_matrix<F: Fn(C64) -> CMat + Sync>(
    f: F,
    shape: (usize, usize),
    mu: &MuSpec,
    spec: &QuadratureSpec,
) -> Result<(CMat, QuadratureReport)> {
    spec.validate()?;
    if !(mu.sigma > 0.0) {
        return Err(Error::BadMeasure(f64::NAN));
    }
    if spec.kind != QuadKind::TensorGaussHermite2d {
        return Err(Error::Domain("z-plane integrals need a TENSOR_GAUSS_HERMITE_2D spec".into()));
    }
    let zspec = QuadratureSpec { center: (0.0, 0.0), scale: (mu.sigma, mu.sigma), ..*spec };
    // with ξ = z/σ the measure is e^{−|ξ|²} dξ/π: plain weights, density folded in
    let norm = gh_plane(&|_| Array2::from_elem((1, 1), C64::new(1.0, 0.0)), spec.order_or_nodes, &zspec, (1, 1), false)[[0, 0]]
        / (mu.sigma * mu.sigma);
    if (norm.re - 1.0).abs() > 1e-12 || norm.im != 0.0 {
        return Err(Error::BadMeasure(norm.re));
    }
    let scale = C64::new(1.0 / (mu.sigma * mu.sigma), 0.0);
    let n = spec.order_or_nodes.min(MAX_ORDER);
    let fine = gh_plane(&f, n, &zspec, shape, false) * scale;
    let coarse = gh_plane(&f, (n / 2).max(1), &zspec, shape, false) * scale;
    let (err, mag) = entrywise_change(&fine, &coarse);
    let rep = QuadratureReport::new(fine[[0, 0]], err, n * n + (n / 2).pow(2), spec.rel_tol, mag);
    Ok((fine, rep))
}

/// Scalar version of [`integrate_z_matrix`].
pub fn integrate_z<F: Fn(C64) -> C64 + Sync>(f: F, mu: &MuSpec, spec: &QuadratureSpec) -> Result<QuadratureReport> {
    let (_, rep) = integrate_z_matrix(|z| Array2::from_elem((1, 1), f(z)), (1, 1), mu, spec)?;
    rep.require(spec.rel_tol)
}
