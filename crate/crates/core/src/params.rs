//! Two-way map between physical moments and the complex labels (u₀, z).

use crate::error::{Error, Result};
use crate::mutation::{self, Mutation};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Below this value of sinh r the squeezing angle is meaningless and set to 0.
pub const R_EPS: f64 = 1e-14;

/// Default relative tolerance on dq²dp² = (ħ² + corr²)/4.
pub const SATURATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub hbar: f64,
    pub ell0: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { hbar: 1.0, ell0: 1.0 }
    }
}

impl Constants {
    pub fn new(hbar: f64, ell0: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::BadConstants(format!("hbar must be positive and finite, got {hbar}")));
        }
        if !(ell0 > 0.0 && ell0.is_finite()) {
            return Err(Error::BadConstants(format!("ell0 must be positive and finite, got {ell0}")));
        }
        Ok(Self { hbar, ell0 })
    }

    /// Momentum scale ħ/ℓ₀.
    pub fn p_scale(&self) -> f64 {
        self.hbar / self.ell0
    }
}

/// Reduce an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Distance between two angles measured on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// State labels: displacement u₀ and squeezing z = r e^{iθ}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    pub u0: C64,
    r: f64,
    theta: f64,
}

impl Labels {
    pub fn new(u0: C64, z: C64) -> Self {
        Self::from_polar(u0, z.norm(), z.im.atan2(z.re))
    }

    pub fn from_polar(u0: C64, r: f64, theta: f64) -> Self {
        assert!(r >= 0.0 && r.is_finite(), "squeezing modulus must be finite and non-negative");
        let theta = if r == 0.0 { 0.0 } else { wrap_angle(theta) };
        Self { u0, r, theta }
    }

    pub fn vacuum() -> Self {
        Self::from_polar(C64::new(0.0, 0.0), 0.0, 0.0)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn z(&self) -> C64 {
        C64::from_polar(self.r, self.theta)
    }

    /// ζ = e^{iθ} tanh r.
    pub fn zeta(&self) -> C64 {
        C64::from_polar(self.r.tanh(), self.theta)
    }

    /// u₀(z) = cosh r (u₀ − ζ ū₀), the eigenvalue of a(z).
    pub fn u0_z(&self) -> C64 {
        self.r.cosh() * (self.u0 - self.zeta() * self.u0.conj())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub q0: f64,
    pub p0: f64,
    pub dq: f64,
    pub dp: f64,
    pub corr: f64,
}

impl Moments {
    /// Relative violation of dq²dp² = (ħ² + corr²)/4.
    pub fn saturation_violation(&self, c: &Constants) -> f64 {
        let rhs = (c.hbar * c.hbar + self.corr * self.corr) / 4.0;
        ((self.dq * self.dp).powi(2) - rhs).abs() / rhs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedAngles {
    pub phi: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub zeta: C64,
    pub thetabar_plus: f64,
    pub thetabar_minus: f64,
}

pub fn labels_to_moments(l: &Labels, c: &Constants) -> Moments {
    let (r, th) = (l.r, l.theta);
    let (ch2, sh2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let q0 = c.ell0 * std::f64::consts::SQRT_2 * l.u0.re;
    let p0 = c.p_scale() * std::f64::consts::SQRT_2 * l.u0.im;
    let dq = c.ell0 * ((ch2 + th.cos() * sh2) / 2.0).sqrt();
    let dp = c.p_scale() * ((ch2 - th.cos() * sh2) / 2.0).sqrt();
    let corr = c.hbar * th.sin() * sh2;
    Moments { q0, p0, dq, dp, corr }
}

pub fn moments_to_labels(m: &Moments, c: &Constants) -> Result<Labels> {
    moments_to_labels_tol(m, c, SATURATION_TOL)
}

pub fn moments_to_labels_tol(m: &Moments, c: &Constants, tol: f64) -> Result<Labels> {
    if !(m.dq > 0.0 && m.dp > 0.0) {
        return Err(Error::Domain(format!("dq and dp must be positive (got {}, {})", m.dq, m.dp)));
    }
    let violation = m.saturation_violation(c);
    if !(violation <= tol) {
        return Err(Error::NotSaturated { violation, tol });
    }
    let u0 = C64::new(m.q0 / c.ell0, c.ell0 * m.p0 / c.hbar) * FRAC_1_SQRT_2;
    let dqs = m.dq / c.ell0;
    let dps = m.dp / c.p_scale();
    // cosθ sinh2r and sinθ sinh2r, free of the cancellation in ρ₋ near r = 0
    let x = (dqs - dps) * (dqs + dps);
    let y = m.corr / c.hbar;
    let sinh_2r = x.hypot(y);
    let r = sinh_2r.asinh() / 2.0;
    if r.sinh() < R_EPS {
        return Ok(Labels::from_polar(u0, 0.0, 0.0));
    }
    Ok(Labels::from_polar(u0, r, y.atan2(x)))
}

pub fn derived_angles(l: &Labels, m: &Moments, c: &Constants) -> DerivedAngles {
    derived_angles_mut(l, m, c, None)
}

pub(crate) fn derived_angles_mut(
    l: &Labels,
    m: &Moments,
    c: &Constants,
    mutation: Option<Mutation>,
) -> DerivedAngles {
    let phi = (m.corr / c.hbar).atan();
    let dqs = m.dq / c.ell0;
    let dps = m.dp / c.p_scale();
    let e_phi = C64::from_polar(1.0, phi);
    let plus = (dps + dqs * e_phi) * FRAC_1_SQRT_2;
    let minus = (dps - dqs * e_phi) * FRAC_1_SQRT_2;
    let (mut rho_plus, mut rho_minus) = (plus.norm(), minus.norm());
    if mutation::is(mutation, Mutation::SwappedRho) {
        std::mem::swap(&mut rho_plus, &mut rho_minus);
    }
    let theta_minus = if rho_minus > R_EPS { minus.arg() } else { 0.0 };
    let (tb_plus, tb_minus) = thetabar(l.r, l.theta);
    DerivedAngles {
        phi,
        rho_plus,
        rho_minus,
        theta_plus: plus.arg(),
        theta_minus,
        zeta: l.zeta(),
        thetabar_plus: tb_plus,
        thetabar_minus: tb_minus,
    }
}

/// (θ̄₊, θ̄₋) from cos θ̄± ∝ cosh r ± cosθ sinh r and sin θ̄± ∝ ±sinθ sinh r.
pub fn thetabar(r: f64, theta: f64) -> (f64, f64) {
    let (ch, sh) = (r.cosh(), r.sinh());
    let (s, c) = theta.sin_cos();
    let plus = (s * sh).atan2(ch + c * sh);
    let minus = (-s * sh).atan2(ch - c * sh);
    (plus, minus)
}

/// λ₀ = (corr/2 − iħ/2)/dp².
pub fn lambda0(m: &Moments, c: &Constants) -> C64 {
    C64::new(m.corr / 2.0, -c.hbar / 2.0) / (m.dp * m.dp)
}

/// The same λ₀ through −λ₀ = i(dq/dp)e^{iφ}.
pub fn lambda0_polar(m: &Moments, c: &Constants) -> C64 {
    let phi = (m.corr / c.hbar).atan();
    -C64::i() * (m.dq / m.dp) * C64::from_polar(1.0, phi)
}

/// θ recovered from the normalised angles through e^{iθ} = −e^{i(θ₋−θ₊)}.
pub fn theta_from_angles(a: &DerivedAngles) -> f64 {
    wrap_angle(a.theta_minus - a.theta_plus + PI)
}
