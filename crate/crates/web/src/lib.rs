//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes and returns plain numbers so the same functions run
//! natively in tests. Invalid constants give an empty result.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use sr_squeeze::kernels::squeezed_overlap;
use sr_squeeze::params::{derived_angles, labels_to_moments};
use sr_squeeze::wavefn::{self, WavefnParams};
use sr_squeeze::{Constants, Labels, C64};
use wasm_bindgen::prelude::*;

/// Samples of ⟨q|Ω_z(u₀)⟩ for z = r e^{iθ}, flattened as (q, Re ψ, Im ψ, |ψ|²) per point.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn wavefunction(r: f64, theta: f64, u0_re: f64, u0_im: f64, hbar: f64, ell0: f64, q_min: f64, q_max: f64, samples: usize) -> Vec<f64> {
    let Ok(k) = Constants::new(hbar, ell0) else {
        return Vec::new();
    };
    if samples < 2 || !(q_min < q_max) || !(r >= 0.0) {
        return Vec::new();
    }
    let p = WavefnParams::new(Labels::from_polar(C64::new(u0_re, u0_im), r, theta), k);
    let step = (q_max - q_min) / (samples - 1) as f64;
    let mut out = Vec::with_capacity(4 * samples);
    for i in 0..samples {
        let q = q_min + step * i as f64;
        let v = wavefn::psi(q, &p);
        out.extend([q, v.re, v.im, v.norm_sqr()]);
    }
    out
}

/// [q₀, p₀, dq, dp, corr, φ, θ̄₊, θ̄₋] followed by `points` (q, p) pairs on the
/// one-sigma covariance ellipse.
#[wasm_bindgen]
pub fn moments(r: f64, theta: f64, u0_re: f64, u0_im: f64, hbar: f64, ell0: f64, points: usize) -> Vec<f64> {
    let Ok(k) = Constants::new(hbar, ell0) else {
        return Vec::new();
    };
    if !(r >= 0.0) {
        return Vec::new();
    }
    let l = Labels::from_polar(C64::new(u0_re, u0_im), r, theta);
    let m = labels_to_moments(&l, &k);
    let a = derived_angles(&l, &m, &k);
    let mut out = vec![m.q0, m.p0, m.dq, m.dp, m.corr, a.phi, a.thetabar_plus, a.thetabar_minus];
    // covariance [[dq², c], [c, dp²]] with c = corr/2, factored as L Lᵀ
    let c = m.corr / 2.0;
    let l11 = m.dq;
    let l21 = c / l11;
    let l22 = (m.dp * m.dp - l21 * l21).max(0.0).sqrt();
    for j in 0..points {
        let t = std::f64::consts::TAU * j as f64 / points as f64;
        let (x, y) = (t.cos(), t.sin());
        out.extend([m.q0 + l11 * x, m.p0 + l21 * x + l22 * y]);
    }
    out
}

/// [Re, Im, modulus, phase] of ⟨Ω_{z₂}(u₂)|Ω_{z₁}(u₁)⟩ with z = r e^{iθ}.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn overlap(r2: f64, theta2: f64, u2_re: f64, u2_im: f64, r1: f64, theta1: f64, u1_re: f64, u1_im: f64) -> Vec<f64> {
    if !(r2 >= 0.0 && r1 >= 0.0) {
        return Vec::new();
    }
    let res = squeezed_overlap(
        C64::from_polar(r2, theta2),
        C64::new(u2_re, u2_im),
        C64::from_polar(r1, theta1),
        C64::new(u1_re, u1_im),
    );
    vec![res.value.re, res.value.im, res.modulus, res.phase]
}
