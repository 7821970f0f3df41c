//! BCH helper functions Φ, Ψ, f(u,v) and the SU(1,1) disentangling of S(z).

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;
use ndarray::{array, Array2};
use serde::{Deserialize, Serialize};

const PHI_SERIES_RADIUS: f64 = 1e-4;
const PSI_SERIES_RADIUS: f64 = 1e-4;
/// Inside this distance from the diagonal u = v, f is evaluated by its even
/// expansion in δ = (u − v)/2.
pub const F_DIAGONAL_RADIUS: f64 = 1e-3;

/// e^x − 1 without cancellation for small |x|.
pub fn expm1(x: C64) -> C64 {
    let (s, c) = x.im.sin_cos();
    let half = (x.im / 2.0).sin();
    C64::new(x.re.exp_m1() * c - 2.0 * half * half, x.re.exp() * s)
}

/// ln(1 + y), principal branch, accurate for small |y|.
pub fn ln1p(y: C64) -> C64 {
    let re = 0.5 * (2.0 * y.re + y.norm_sqr()).ln_1p();
    C64::new(re, y.im.atan2(1.0 + y.re))
}

/// Φ(x) = (e^x − 1)/x.
pub fn phi(x: C64) -> C64 {
    if x.norm() < PHI_SERIES_RADIUS {
        // remainder below |x|⁵/720
        C64::new(1.0, 0.0) + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)))
    } else {
        expm1(x) / x
    }
}

/// k-th derivative of Φ, i.e. ∫₀¹ s^k e^{sx} ds.
pub fn phi_deriv(x: C64, k: u32) -> C64 {
    if x.norm() < 2.0 {
        // Σ_j x^j / (j! (j+k+1))
        let mut term = C64::new(1.0, 0.0);
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..40 {
            sum += term / (j + k + 1) as f64;
            term = term * x / (j + 1) as f64;
        }
        sum
    } else {
        let e = x.exp();
        let mut d = phi(x);
        for j in 1..=k {
            d = (e - d * j as f64) / x;
        }
        d
    }
}

/// Ψ(x) = x ln x / (x − 1), defined off the cut (−∞, 0].
pub fn psi(x: C64) -> Result<C64> {
    if x.im == 0.0 && x.re <= 0.0 {
        return Err(Error::Domain(format!("Ψ is undefined on the branch cut (x = {x})")));
    }
    let y = x - 1.0;
    if y.norm() < PSI_SERIES_RADIUS {
        let s = C64::new(1.0, 0.0) - y * (0.5 - y * (1.0 / 3.0 - y * (0.25 - y / 5.0)));
        Ok(x * s)
    } else {
        Ok(x * ln1p(y) / y)
    }
}

/// f(u,v) = [u e^u (e^v−1) − v e^v (e^u−1)] / [u v (e^u − e^v)].
///
/// Rewritten as Φ(v) − Φ[u,v]/Φ(u−v), with Φ[u,v] the divided difference,
/// which is regular at u = 0 and v = 0.
pub fn f_uv(u: C64, v: C64) -> C64 {
    let d = u - v;
    if d.norm() < F_DIAGONAL_RADIUS {
        let m = (u + v) * 0.5;
        let delta2 = (d * 0.5) * (d * 0.5);
        let (p0, p1, p2, p3) = (phi(m), phi_deriv(m, 1), phi_deriv(m, 2), phi_deriv(m, 3));
        return p0 - p1 + delta2 * (p2 * 0.5 - p1 / 3.0 - p3 / 6.0);
    }
    let divided = (phi(u) - phi(v)) / d;
    phi(v) - divided / phi(d)
}

/// The literal closed form, used only as an independent reference away from
/// its removable singularities.
pub fn f_uv_closed(u: C64, v: C64) -> C64 {
    let (eu, ev) = (u.exp(), v.exp());
    (u * eu * (ev - 1.0) - v * ev * (eu - 1.0)) / (u * v * (eu - ev))
}

/// Coefficients of S(z) = e^{αK₊} e^{γK₀} e^{−ᾱK₋}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisentangledSqueeze {
    pub alpha: C64,
    pub gamma: f64,
}

pub fn disentangle_squeeze(z: C64) -> DisentangledSqueeze {
    let r = z.norm();
    let alpha = if r == 0.0 { C64::new(0.0, 0.0) } else { z * (r.tanh() / r) };
    // ln(1 − tanh²r) = −2 ln cosh r, written to stay accurate for small r
    let gamma = -2.0 * (r.cosh() - 1.0).ln_1p();
    DisentangledSqueeze { alpha, gamma }
}

/// K₀, K₊, K₋ in the two-dimensional (non-unitary) representation.
pub fn su11_2x2() -> [Array2<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let h = C64::new(0.5, 0.0);
    let one = C64::new(1.0, 0.0);
    [array![[h, o], [o, -h]], array![[o, one], [o, o]], array![[o, o], [-one, o]]]
}

/// exp(zK₊ − z̄K₋) in the 2×2 representation, by Padé scaling and squaring.
pub fn squeeze_2x2_exp(z: C64) -> Array2<C64> {
    let [_, kp, km] = su11_2x2();
    linalg::expm(&(kp * z - km * z.conj()))
}

/// e^{αK₊} e^{γK₀} e^{−ᾱK₋} in the 2×2 representation.
pub fn squeeze_2x2_factored(z: C64) -> Array2<C64> {
    let DisentangledSqueeze { alpha, gamma } = disentangle_squeeze(z);
    let one = C64::new(1.0, 0.0);
    let o = C64::new(0.0, 0.0);
    let up = array![[one, alpha], [o, one]];
    let mid = array![[C64::new((gamma / 2.0).exp(), 0.0), o], [o, C64::new((-gamma / 2.0).exp(), 0.0)]];
    let low = array![[one, o], [alpha.conj(), one]];
    up.dot(&mid).dot(&low)
}

/// Reversed order e^{−ᾱK₋} e^{−γK₀} e^{αK₊} in the 2×2 representation.
pub fn squeeze_2x2_dual(z: C64) -> Array2<C64> {
    let DisentangledSqueeze { alpha, gamma } = disentangle_squeeze(z);
    let one = C64::new(1.0, 0.0);
    let o = C64::new(0.0, 0.0);
    let low = array![[one, o], [alpha.conj(), one]];
    let mid = array![[C64::new((-gamma / 2.0).exp(), 0.0), o], [o, C64::new((gamma / 2.0).exp(), 0.0)]];
    let up = array![[one, alpha], [o, one]];
    low.dot(&mid).dot(&up)
}

/// A pair of 2×2 matrices in the span of X = diag(1,0), Y = E₁₂ and I, for
/// which [A,B] = uA + vB + cI.
#[derive(Clone, Copy, Debug)]
pub struct Vis1Pair {
    pub a: [C64; 3],
    pub b: [C64; 3],
}

impl Vis1Pair {
    fn mat(c: [C64; 3]) -> Array2<C64> {
        let o = C64::new(0.0, 0.0);
        array![[c[0] + c[2], c[1]], [o, c[2]]]
    }

    pub fn a_mat(&self) -> Array2<C64> {
        Self::mat(self.a)
    }

    pub fn b_mat(&self) -> Array2<C64> {
        Self::mat(self.b)
    }

    /// (u, v, c) with [A,B] = uA + vB + cI.
    pub fn structure(&self) -> (C64, C64, C64) {
        let [a1, _, a0] = self.a;
        let [b1, _, b0] = self.b;
        (-b1, a1, b1 * a0 - a1 * b0)
    }

    /// ‖log(e^A e^B) − (A + B + f(u,v)[A,B])‖_max.
    pub fn residual(&self) -> f64 {
        let (a, b) = (self.a_mat(), self.b_mat());
        let lhs = linalg::logm_2x2(&linalg::expm(&a).dot(&linalg::expm(&b)));
        let comm = a.dot(&b) - b.dot(&a);
        let (u, v, _) = self.structure();
        let rhs = &a + &b + comm * f_uv(u, v);
        linalg::max_abs(&(lhs - rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(c(0.0, 0.0)), c(1.0, 0.0));
        assert!((phi(c(1.0, 0.0)) - (E - 1.0)).norm() < 1e-15);
        // 30-digit reference 1.000000005000000016666666708
        let got = phi(c(1e-8, 0.0));
        assert!((got.re - 1.000_000_005_000_000_016_666_666_7).abs() < 1e-18);
    }

    #[test]
    fn psi_values() {
        assert!((psi(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-16);
        assert!((psi(c(E, 0.0)).unwrap() - E / (E - 1.0)).norm() < 1e-15);
        let p = psi(c(0.5, 0.0)).unwrap();
        assert!((p.re - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((phi(-c(0.5f64.ln(), 0.0)) * p - 1.0).norm() < 1e-15);
        assert!(psi(c(-1.0, 0.0)).is_err());
        assert!(psi(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn f_special_values() {
        assert_eq!(f_uv(c(0.0, 0.0), c(0.0, 0.0)), c(0.5, 0.0));
        // references from tests/oracles/frozen_values.py
        assert!((f_uv(c(1.0, 0.0), c(1.0, 0.0)) - c(0.718_281_828_459_045_24, 0.0)).norm() < 1e-15);
        assert!((f_uv(c(1.0, 0.0), c(-1.0, 0.0)) - c(0.462_117_157_260_009_76, 0.0)).norm() < 1e-15);
        let got = f_uv(c(0.3, 0.2), c(1e-7, 0.0));
        assert!((got - c(0.525_012_312_560_304_22, 0.016_602_819_558_294_133)).norm() < 1e-15);
    }

    #[test]
    fn f_matches_closed_form_away_from_singular_set() {
        for &(u, v) in &[(c(0.7, 0.1), c(-1.2, 0.4)), (c(2.0, -1.0), c(0.5, 0.5)), (c(-1.5, 0.0), c(1.9, -0.3))] {
            assert!((f_uv(u, v) - f_uv_closed(u, v)).norm() < 1e-13);
        }
    }

    #[test]
    fn f_continuous_across_diagonal() {
        let m = c(0.4, -0.7);
        for &eps in &[1.1e-3, 0.9e-3, 1e-5, 1e-9] {
            let d = c(eps, eps * 0.3);
            let a = f_uv(m + d, m - d);
            let b = f_uv(m, m);
            assert!((a - b).norm() < 2.0 * eps * eps + 1e-14, "eps {eps}");
        }
    }

    #[test]
    fn disentangle_values() {
        let d = disentangle_squeeze(c(0.0, 0.0));
        assert_eq!((d.alpha, d.gamma), (c(0.0, 0.0), 0.0));
        let d = disentangle_squeeze(c(0.8, 0.0));
        assert!((d.alpha - 0.8f64.tanh()).norm() < 1e-16);
        assert!((d.gamma + 2.0 * 0.8f64.cosh().ln()).abs() < 1e-15);
        assert!((d.gamma - (1.0 - d.alpha.norm_sqr()).ln()).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_factorizations() {
        for &z in &[c(0.0, 0.0), C64::from_polar(1.0, PI / 4.0), C64::from_polar(0.7, -2.0), c(1.0, 0.0)] {
            let e = squeeze_2x2_exp(z);
            assert!(linalg::max_abs(&(&e - &squeeze_2x2_factored(z))) < 1e-14);
            assert!(linalg::max_abs(&(&e - &squeeze_2x2_dual(z))) < 1e-14);
        }
    }

    #[test]
    fn su11_commutators() {
        let [k0, kp, km] = su11_2x2();
        let comm = |a: &Array2<C64>, b: &Array2<C64>| a.dot(b) - b.dot(a);
        assert!(linalg::max_abs(&(comm(&k0, &kp) - &kp)) == 0.0);
        assert!(linalg::max_abs(&(comm(&k0, &km) + &km)) == 0.0);
        assert!(linalg::max_abs(&(comm(&kp, &km) + &k0 * 2.0)) == 0.0);
    }

    #[test]
    fn vis1_small_pair() {
        let p = Vis1Pair { a: [c(0.3, 0.1), c(0.2, -0.1), c(0.05, 0.0)], b: [c(-0.2, 0.05), c(0.4, 0.2), c(0.1, -0.1)] };
        let (a, b) = (p.a_mat(), p.b_mat());
        let (u, v, cc) = p.structure();
        let lhs = a.dot(&b) - b.dot(&a);
        let id = Array2::<C64>::eye(2);
        let rhs = &a * u + &b * v + id * cc;
        assert!(linalg::max_abs(&(lhs - rhs)) < 1e-16);
        assert!(p.residual() < 1e-14);
    }
}
