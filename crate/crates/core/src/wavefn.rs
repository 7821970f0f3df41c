//! Configuration-space wavefunctions ⟨q|Ω_z(u₀)⟩ with the phase fixed by ⟨Ω₀|Ω_z⟩ > 0.

use crate::hermite::hermite_functions;
use crate::mutation::{self, Mutation};
use crate::params::{derived_angles, labels_to_moments, Constants, DerivedAngles, Labels, Moments};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavefnParams {
    pub labels: Labels,
    pub moments: Moments,
    pub angles: DerivedAngles,
    pub constants: Constants,
}

impl WavefnParams {
    pub fn new(labels: Labels, constants: Constants) -> Self {
        let moments = labels_to_moments(&labels, &constants);
        let angles = derived_angles(&labels, &moments, &constants);
        Self { labels, moments, angles, constants }
    }
}

/// The algebraically equivalent closed forms of the wavefunction. They share
/// the prefactor and differ in how the Gaussian exponent is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WfForm {
    /// Exponent (1 − i sinθ sinh 2r)/(cosh 2r + cosθ sinh 2r).
    Correlation,
    /// Exponent (cosh r − e^{iθ} sinh r)/(cosh r + e^{iθ} sinh r).
    Quotient,
    /// Exponent √((cosh 2r − cosθ sinh 2r)/(cosh 2r + cosθ sinh 2r)) e^{i(θ̄₋−θ̄₊)}.
    Polar,
    /// Quotient exponent, prefactor written as (cosh r + e^{iθ} sinh r)^{−1/2}.
    Compact,
}

impl WfForm {
    pub const ALL: [WfForm; 4] = [WfForm::Correlation, WfForm::Quotient, WfForm::Polar, WfForm::Compact];
}

fn d_pm(r: f64, theta: f64) -> (f64, f64) {
    let (ch2, sh2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    (ch2 + theta.cos() * sh2, ch2 - theta.cos() * sh2)
}

/// Coefficient κ of −κ(q−q₀)²/(2ℓ₀²) in log ψ.
fn exponent_coefficient(p: &WavefnParams, form: WfForm) -> C64 {
    let (r, th) = (p.labels.r(), p.labels.theta());
    let (dp, dm) = d_pm(r, th);
    match form {
        WfForm::Correlation => C64::new(1.0, -th.sin() * (2.0 * r).sinh()) / dp,
        WfForm::Quotient | WfForm::Compact => {
            let w = C64::from_polar(r.sinh(), th);
            (r.cosh() - w) / (r.cosh() + w)
        }
        WfForm::Polar => C64::from_polar((dm / dp).sqrt(), p.angles.thetabar_minus - p.angles.thetabar_plus),
    }
}

/// log of the z-dependent prefactor, built from modulus and θ̄₊ separately so
/// the square-root branch is the one fixed by the vacuum overlap.
fn log_prefactor(p: &WavefnParams, form: WfForm, mutation: Option<Mutation>) -> C64 {
    let (r, th) = (p.labels.r(), p.labels.theta());
    let mut tb = p.angles.thetabar_plus;
    if mutation::is(mutation, Mutation::ThetaBarBranch) {
        tb += 2.0 * PI;
    }
    match form {
        WfForm::Compact => {
            let w = C64::new(r.cosh(), 0.0) + C64::from_polar(r.sinh(), th);
            C64::new(-0.5 * w.norm().ln(), -0.5 * tb)
        }
        _ => C64::new(-0.25 * d_pm(r, th).0.ln(), -0.5 * tb),
    }
}

pub(crate) fn log_psi_with(q: f64, p: &WavefnParams, form: WfForm, mutation: Option<Mutation>) -> C64 {
    let c = &p.constants;
    let m = &p.moments;
    let x = (q - m.q0) / c.ell0;
    let mut shift = q * m.p0 / c.hbar;
    if !mutation::is(mutation, Mutation::MissingShiftPhase) {
        shift -= m.q0 * m.p0 / (2.0 * c.hbar);
    }
    let norm = -0.25 * (PI * c.ell0 * c.ell0).ln();
    log_prefactor(p, form, mutation) + C64::new(norm, shift) - exponent_coefficient(p, form) * (0.5 * x * x)
}

/// ln ψ(q); finite even where ψ itself underflows.
pub fn log_psi(q: f64, p: &WavefnParams) -> C64 {
    log_psi_with(q, p, WfForm::Compact, None)
}

pub fn psi(q: f64, p: &WavefnParams) -> C64 {
    log_psi(q, p).exp()
}

pub fn psi_form(q: f64, p: &WavefnParams, form: WfForm) -> C64 {
    log_psi_with(q, p, form, None).exp()
}

pub(crate) fn psi_mut(q: f64, p: &WavefnParams, mutation: Option<Mutation>) -> C64 {
    log_psi_with(q, p, WfForm::Compact, mutation).exp()
}

/// e^{iφ(z,0)} = e^{−iθ̄₊(z)/2}.
pub fn phase_factor(z: C64) -> C64 {
    let l = Labels::new(C64::new(0.0, 0.0), z);
    let (tb, _) = crate::params::thetabar(l.r(), l.theta());
    C64::from_polar(1.0, -0.5 * tb)
}

/// e^{iφ(z,u₀)} = e^{−iq₀p₀/(2ħ)} e^{iφ(z,0)}.
pub fn phase_factor_full(labels: &Labels, c: &Constants) -> C64 {
    let m = labels_to_moments(labels, c);
    C64::from_polar(1.0, -m.q0 * m.p0 / (2.0 * c.hbar)) * phase_factor(labels.z())
}

/// Σₙ aₙ ⟨q|n⟩ with ⟨q|n⟩ = φₙ(q/ℓ₀)/√ℓ₀.
pub fn synthesize(amps: &[C64], q: f64, c: &Constants) -> C64 {
    let h = hermite_functions(q / c.ell0, amps.len());
    let s: C64 = amps.iter().zip(&h).map(|(a, h)| a * h).sum();
    s / c.ell0.sqrt()
}
