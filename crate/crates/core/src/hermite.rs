//! Normalised Hermite functions and Gauss–Hermite rules.

use std::f64::consts::PI;

const RESCALE: f64 = 1e100;

/// φ₀(x), …, φ_{n−1}(x) with φ_k(x) = H_k(x) e^{−x²/2} / (2^k k! √π)^{1/2}.
///
/// The recurrence runs on the polynomial part and carries the Gaussian in a
/// separate log scale, so large |x| neither overflows nor loses the tail.
pub fn hermite_functions(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    let mut log_scale = -x * x / 2.0;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out[0] = cur * log_scale.exp();
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out[k + 1] = cur * log_scale.exp();
    }
    out
}

/// φ_n'(x) = √(2n) φ_{n−1}(x) − x φ_n(x), for all n < len.
pub fn hermite_derivatives(x: f64, phis: &[f64]) -> Vec<f64> {
    (0..phis.len())
        .map(|n| {
            let lower = if n == 0 { 0.0 } else { (2.0 * n as f64).sqrt() * phis[n - 1] };
            lower - x * phis[n]
        })
        .collect()
}

/// Nodes and weights for ∫ e^{−x²} g(x) dx ≈ Σ wᵢ g(xᵢ), together with the
/// modified weights w̃ᵢ = wᵢ e^{xᵢ²} for integrands that carry their own Gaussian.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub mod_weights: Vec<f64>,
}

/// Largest supported order; beyond it the outermost weights underflow.
pub const MAX_ORDER: usize = 512;

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!((1..=MAX_ORDER).contains(&n), "Gauss–Hermite order must lie in 1..={MAX_ORDER}");
        // bracket the non-negative roots on a grid finer than their spacing, then polish
        let nf = n as f64;
        let edge = (2.0 * nf + 1.0).sqrt() + 1.0;
        let h = std::f64::consts::PI / (8.0 * (2.0 * nf + 1.0).sqrt());
        let mut pos = Vec::with_capacity(n.div_ceil(2));
        if n % 2 == 1 {
            pos.push(0.0);
        }
        let mut a = if n % 2 == 1 { h / 2.0 } else { 0.0 };
        let mut fa = scaled_pair(a, n).0;
        while a < edge && pos.len() < n.div_ceil(2) {
            let b = a + h;
            let fb = scaled_pair(b, n).0;
            if fa.signum() != fb.signum() {
                pos.push(polish(a, b, n));
            }
            a = b;
            fa = fb;
        }
        assert_eq!(pos.len(), n.div_ceil(2), "Gauss–Hermite root bracketing failed at order {n}");
        pos.reverse();
        let mut nodes: Vec<f64> = pos.iter().map(|&p| -p).collect();
        let mut upper: Vec<f64> = pos.iter().rev().copied().collect();
        if n % 2 == 1 {
            upper.remove(0);
        }
        nodes.extend(upper);
        let mod_weights: Vec<f64> =
            nodes.iter().map(|&x| 1.0 / hermite_functions(x, n).iter().map(|p| p * p).sum::<f64>()).collect();
        let weights = nodes.iter().zip(&mod_weights).map(|(x, w)| w * (-x * x).exp()).collect();
        Self { nodes, weights, mod_weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

/// (p_n(x), p_{n−1}(x)) for the orthonormal Hermite polynomials, both
/// multiplied by the same positive factor.
fn scaled_pair(x: f64, n: usize) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > RESCALE {
            prev /= m;
            cur /= m;
        }
    }
    (cur, prev)
}

/// Safeguarded Newton iteration for the root of p_n inside [a, b].
fn polish(mut a: f64, mut b: f64, n: usize) -> f64 {
    let sa = scaled_pair(a, n).0.signum();
    let mut x = 0.5 * (a + b);
    for _ in 0..100 {
        let (pn, pn1) = scaled_pair(x, n);
        if pn == 0.0 {
            return x;
        }
        if pn.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        let step = pn / ((2.0 * n as f64).sqrt() * pn1);
        let mut next = x - step;
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}
