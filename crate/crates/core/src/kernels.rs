//! Closed-form overlap kernels and diagonal-kernel symbols.

use crate::error::{Error, Result};
use crate::fock;
use crate::linalg::CMat;
use crate::mutation::{self, Mutation};
use crate::params::{labels_to_moments, Constants, Labels};
use crate::quadrature::{integrate_plane_matrix, QuadKind, QuadratureReport, QuadratureSpec};
use crate::symbol::PolySymbol;
use crate::C64;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Default bound on the total degree accepted by [`diagonal_kernel`].
pub const MAX_KERNEL_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapParts {
    pub prefactor: C64,
    pub symplectic_phase: C64,
    pub gaussian: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub value: C64,
    pub modulus: f64,
    pub phase: f64,
    pub parts: OverlapParts,
}

impl OverlapResult {
    fn from_logs(prefactor: C64, symplectic: C64, gaussian: C64) -> Self {
        let value = (prefactor + symplectic + gaussian).exp();
        Self {
            value,
            modulus: value.norm(),
            phase: value.arg(),
            parts: OverlapParts { prefactor: prefactor.exp(), symplectic_phase: symplectic.exp(), gaussian: gaussian.exp() },
        }
    }
}

/// −(u₂ū₁ − ū₂u₁)/2, purely imaginary.
fn log_symplectic(u2: C64, u1: C64) -> C64 {
    -(u2 * u1.conj() - u2.conj() * u1) * 0.5
}

/// ⟨Ω₀(u₂)|Ω₀(u₁)⟩.
pub fn coherent_overlap(u2: C64, u1: C64) -> OverlapResult {
    OverlapResult::from_logs(C64::new(0.0, 0.0), log_symplectic(u2, u1), C64::new(-0.5 * (u2 - u1).norm_sqr(), 0.0))
}

/// ⟨Ω_{z₂}(u₂)|Ω_{z₁}(u₁)⟩.
pub fn squeezed_overlap(z2: C64, u2: C64, z1: C64, u1: C64) -> OverlapResult {
    squeezed_overlap_mut(z2, u2, z1, u1, None)
}

fn log_prefactor(l2: &Labels, l1: &Labels, mutation: Option<Mutation>) -> C64 {
    let mut lp = C64::new(-0.5 * (l2.r().cosh().ln() + l1.r().cosh().ln()), 0.0);
    if !mutation::is(mutation, Mutation::DroppedOverlapPrefactor) {
        // Re(1 − ζ̄₂ζ₁) > 0, so the principal logarithm never crosses its cut
        lp -= 0.5 * (C64::new(1.0, 0.0) - l2.zeta().conj() * l1.zeta()).ln();
    }
    lp
}

pub(crate) fn squeezed_overlap_mut(z2: C64, u2: C64, z1: C64, u1: C64, mutation: Option<Mutation>) -> OverlapResult {
    let (l2, l1) = (Labels::new(u2, z2), Labels::new(u1, z1));
    let (zeta2, zeta1) = (l2.zeta(), l1.zeta());
    let d = u2 - u1;
    // G/2 = ((Δ − ζ₂Δ̄))* (Δ − ζ₁Δ̄)/(1 − ζ̄₂ζ₁)
    let half_g = (d - zeta2 * d.conj()).conj() * (d - zeta1 * d.conj()) / (1.0 - zeta2.conj() * zeta1);
    let mut gauss = -half_g * 0.5;
    if mutation::is(mutation, Mutation::OverlapGaussianSign) {
        gauss = -gauss;
    }
    OverlapResult::from_logs(log_prefactor(&l2, &l1, mutation), log_symplectic(u2, u1), gauss)
}

/// The same overlap assembled from (q, p) differences and e^{i(q₂p₁−q₁p₂)/(2ħ)}.
pub fn squeezed_overlap_qp(z2: C64, u2: C64, z1: C64, u1: C64, c: &Constants) -> OverlapResult {
    let (l2, l1) = (Labels::new(u2, z2), Labels::new(u1, z1));
    let (m2, m1) = (labels_to_moments(&l2, c), labels_to_moments(&l1, c));
    let (zb2, zeta1) = (l2.zeta().conj(), l1.zeta());
    let x = (m2.q0 - m1.q0) / c.ell0;
    let y = c.ell0 * (m2.p0 - m1.p0) / c.hbar;
    let one = C64::new(1.0, 0.0);
    let g = ((one - zb2) * (one - zeta1) * (x * x) - C64::i() * 2.0 * (zb2 - zeta1) * (x * y)
        + (one + zb2) * (one + zeta1) * (y * y))
        / (one - zb2 * zeta1);
    let sympl = C64::new(0.0, (m2.q0 * m1.p0 - m1.q0 * m2.p0) / (2.0 * c.hbar));
    OverlapResult::from_logs(log_prefactor(&l2, &l1, None), sympl, -g * 0.25)
}

/// ⟨Ω₀| e^{ζ̄₂a²/2} D(u) e^{ζ₁a†²/2} |Ω₀⟩.
pub fn general_matrix_element(zeta2: C64, u: C64, zeta1: C64) -> Result<C64> {
    for z in [zeta2, zeta1] {
        if !(z.norm() < 1.0) {
            return Err(Error::Domain(format!("|ζ| must be below 1, got {}", z.norm())));
        }
    }
    let den = 1.0 - zeta2.conj() * zeta1;
    let quad = (u - zeta2 * u.conj()).conj() * (u - zeta1 * u.conj()) / den;
    Ok((-0.5 * den.ln() - 0.5 * quad).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementComposition {
    pub phase: C64,
    pub shifted: C64,
}

/// D†(u₂)D(u₁) = phase · D(shifted).
pub fn displacement_composition(u2: C64, u1: C64) -> DisplacementComposition {
    DisplacementComposition { phase: log_symplectic(u2, u1).exp(), shifted: u1 - u2 }
}

/// Quadrature rule for [`reproducing_compose`]: nodes sit on axes rotated by
/// e^{iθ₃/2}, centred between u₁ and u₂, with widths 1/√(1 ∓ tanh r₃).
pub fn compose_spec(z3: C64, u2: C64, u1: C64, order: usize) -> QuadratureSpec {
    let l3 = Labels::new(C64::new(0.0, 0.0), z3);
    let t = l3.r().tanh();
    let c = (u1 + u2) * 0.5 * C64::from_polar(1.0, -l3.theta() / 2.0);
    QuadratureSpec::tensor(order).centered((c.re, c.im), ((1.0 - t).sqrt().recip(), (1.0 + t).sqrt().recip()))
}

/// ∫ (du₃dū₃/π) K(2;3) K(3;1) at fixed z₃. The spec's centre and scales are
/// read in the frame rotated by e^{iθ₃/2} (see [`compose_spec`]).
pub fn reproducing_compose(
    z2: C64,
    u2: C64,
    z1: C64,
    u1: C64,
    z3: C64,
    quad: &QuadratureSpec,
) -> Result<QuadratureReport> {
    let rot = C64::from_polar(1.0, Labels::new(C64::new(0.0, 0.0), z3).theta() / 2.0);
    let f = |v: C64| {
        let u3 = rot * v;
        let k = squeezed_overlap(z2, u2, z3, u3).value * squeezed_overlap(z3, u3, z1, u1).value;
        Array2::from_elem((1, 1), k)
    };
    let (_, rep) = integrate_plane_matrix(f, (1, 1), quad)?;
    if quad.kind == QuadKind::MonteCarlo {
        return Ok(rep);
    }
    rep.require(quad.rel_tol)
}

/// e^{−∂_w∂_w̄} applied to the diagonal symbol of a normal-ordered polynomial in
/// (a(z), a†(z)); w stands for u₀(z). The kernel is the same polynomial for every z
/// once written in w, so z only enters through how `op` was built.
pub fn diagonal_kernel(op: &PolySymbol, max_degree: usize) -> Result<PolySymbol> {
    op.check_degree(max_degree)?;
    Ok(op.heat())
}

/// Observables used to exercise the diagonal-kernel representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Identity,
    Number,
    Q,
    P,
    Q2,
    P2,
    QpAnti,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::Identity,
        Observable::Number,
        Observable::Q,
        Observable::P,
        Observable::Q2,
        Observable::P2,
        Observable::QpAnti,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Identity => "I",
            Observable::Number => "N",
            Observable::Q => "Q",
            Observable::P => "P",
            Observable::Q2 => "Q2",
            Observable::P2 => "P2",
            Observable::QpAnti => "QP+PQ",
        }
    }

    /// Normal-ordered symbol in w = u₀(z), i.e. ⟨Ω_z(u₀)|A|Ω_z(u₀)⟩ written in w.
    pub fn symbol(self, z: C64, c: &Constants) -> PolySymbol {
        let l = Labels::new(C64::new(0.0, 0.0), z);
        let (ch, sh) = (l.r().cosh(), l.r().sinh());
        let e = C64::from_polar(1.0, l.theta());
        let zero = C64::new(0.0, 0.0);
        // a = ch·a(z) + e^{iθ}sh·a†(z), a† = ch·a†(z) + e^{−iθ}sh·a(z)
        let a = PolySymbol::linear(C64::new(ch, 0.0), e * sh, zero);
        let ad = PolySymbol::linear(e.conj() * sh, C64::new(ch, 0.0), zero);
        let q = a.add(&ad).scale(C64::new(c.ell0 * FRAC_1_SQRT_2, 0.0));
        let p = a.add(&ad.scale(C64::new(-1.0, 0.0))).scale(C64::new(0.0, -c.p_scale() * FRAC_1_SQRT_2));
        match self {
            Observable::Identity => PolySymbol::constant(C64::new(1.0, 0.0)),
            Observable::Number => ad.star(&a),
            Observable::Q => q,
            Observable::P => p,
            Observable::Q2 => q.star(&q),
            Observable::P2 => p.star(&p),
            Observable::QpAnti => q.star(&p).add(&p.star(&q)),
        }
    }

    /// The same operator as a truncated Fock matrix.
    pub fn fock_matrix(self, dim: usize, c: &Constants) -> Result<CMat> {
        let (q, p) = fock::position_momentum(dim, c)?;
        let (q, p) = (q.mat, p.mat);
        Ok(match self {
            Observable::Identity => crate::linalg::eye(dim),
            Observable::Number => fock::number(dim)?.mat,
            Observable::Q => q,
            Observable::P => p,
            Observable::Q2 => q.dot(&q),
            Observable::P2 => p.dot(&p),
            Observable::QpAnti => q.dot(&p) + p.dot(&q),
        })
    }
}

/// Largest coefficient mismatch between ∂_w∂_w̄ g written in (u₀, ū₀) and in
/// (q₀, p₀), and the corresponding second-order operators applied after the
/// change of variables.
pub fn variable_change_defect(z: C64, g: &PolySymbol, c: &Constants) -> f64 {
    let l = Labels::new(C64::new(0.0, 0.0), z);
    let (r, th) = (l.r(), l.theta());
    let (ch, sh) = (r.cosh(), r.sinh());
    let e = C64::from_polar(1.0, th);
    let one = C64::new(1.0, 0.0);
    // w = ch·u − e^{iθ}sh·ū, w̄ = −e^{−iθ}sh·u + ch·ū
    let to_u = ((one * ch, -e * sh), (-e.conj() * sh, one * ch));
    let lhs_u = g.derivative(1, 1).substitute(to_u.0, to_u.1);
    let (sh2, ch2) = ((2.0 * r).sinh(), (2.0 * r).cosh());
    let rhs_u = g.substitute(to_u.0, to_u.1).second_order(e * (0.5 * sh2), e.conj() * (0.5 * sh2), one * ch2);
    // u = q/(ℓ₀√2) + iℓ₀p/(ħ√2)
    let a = C64::new(FRAC_1_SQRT_2 / c.ell0, 0.0);
    let b = C64::new(0.0, FRAC_1_SQRT_2 / c.p_scale());
    let lhs_qp = lhs_u.substitute((a, b), (a, -b));
    let rhs_qp = g.substitute(to_u.0, to_u.1).substitute((a, b), (a, -b)).second_order(
        one * ((ch2 + th.cos() * sh2) * 0.5 * c.ell0 * c.ell0),
        one * ((ch2 - th.cos() * sh2) * 0.5 * c.p_scale() * c.p_scale()),
        one * (c.hbar * th.sin() * sh2),
    );
    lhs_u.max_abs_diff(&rhs_u).max(lhs_qp.max_abs_diff(&rhs_qp))
}

/// Determinant of the real Jacobian ∂(Re w, Im w)/∂(Re u₀, Im u₀) for w = u₀(z).
pub fn jacobian_det(z: C64) -> f64 {
    let l = Labels::new(C64::new(0.0, 0.0), z);
    let (ch, sh) = (l.r().cosh(), l.r().sinh());
    let e = C64::from_polar(sh, l.theta());
    let dx = ch - e;
    let dy = C64::new(0.0, ch) + C64::i() * e;
    dx.re * dy.im - dy.re * dx.im
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    const K: Constants = Constants { hbar: 1.0, ell0: 1.0 };

    #[test]
    fn coherent_special_values() {
        let u = c(0.7, -1.2);
        assert!((coherent_overlap(u, u).value - 1.0).norm() < 1e-15);
        assert!((coherent_overlap(c(0.0, 0.0), u).modulus - (-u.norm_sqr() / 2.0).exp()).abs() < 1e-15);
        let v = coherent_overlap(c(1.0, 1.0), c(2.0, -1.0)).value;
        assert!((v - c(-0.081263532721117698015, -0.011583835667398787809)).norm() < 1e-15);
    }

    #[test]
    fn squeezed_overlap_frozen_value() {
        let (z2, z1) = (C64::from_polar(0.5, PI / 4.0), C64::from_polar(0.3, -PI / 3.0));
        let want = c(0.31690746577702707846, -0.24597241639085414592);
        let v = squeezed_overlap(z2, c(1.0, 0.0), z1, c(0.0, -1.0));
        assert!((v.value - want).norm() < 1e-14, "{:?}", v.value);
        let w = squeezed_overlap_qp(z2, c(1.0, 0.0), z1, c(0.0, -1.0), &K);
        assert!((w.value - want).norm() < 1e-14);
        let parts = v.parts.prefactor * v.parts.symplectic_phase * v.parts.gaussian;
        assert!((parts - v.value).norm() < 1e-15);
    }

    #[test]
    fn squeezed_reduces_to_vacuum_overlap() {
        let z = C64::from_polar(0.7, 1.1);
        let v = squeezed_overlap(c(0.0, 0.0), c(0.0, 0.0), z, c(0.0, 0.0));
        assert!((v.value - 0.7f64.cosh().powf(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn general_element_frozen_value() {
        let v = general_matrix_element(c(0.0, 0.4), c(1.0, 0.5), c(-0.2, 0.0)).unwrap();
        assert!((v - c(0.6093307775582686459, -0.060641412903578474767)).norm() < 1e-15);
        assert!(general_matrix_element(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn mutations_change_the_value() {
        let (z2, z1) = (C64::from_polar(0.5, 0.3), C64::from_polar(0.4, 2.0));
        let base = squeezed_overlap(z2, c(0.2, 0.1), z1, c(-0.3, 0.5)).value;
        for m in [Mutation::OverlapGaussianSign, Mutation::DroppedOverlapPrefactor] {
            let bad = squeezed_overlap_mut(z2, c(0.2, 0.1), z1, c(-0.3, 0.5), Some(m)).value;
            assert!((bad - base).norm() > 1e-3, "{m:?}");
        }
    }

    #[test]
    fn coherent_composition_by_quadrature() {
        let (u2, u1) = (c(0.3, -0.2), c(-0.4, 0.6));
        let zero = c(0.0, 0.0);
        let rep = reproducing_compose(zero, u2, zero, u1, zero, &compose_spec(zero, u2, u1, 24)).unwrap();
        assert!((rep.value - coherent_overlap(u2, u1).value).norm() < 1e-8);
    }

    #[test]
    fn squeezed_composition_by_quadrature() {
        let (z2, z1, z3) = (c(0.4, 0.0), c(0.0, 0.2), c(0.3, 0.0));
        let (u2, u1) = (c(0.5, 0.1), c(-0.2, 0.3));
        let rep = reproducing_compose(z2, u2, z1, u1, z3, &compose_spec(z3, u2, u1, 40).with_tol(1e-9)).unwrap();
        assert!((rep.value - squeezed_overlap(z2, u2, z1, u1).value).norm() < 1e-6);
    }

    #[test]
    fn kernel_of_number_operator() {
        let n = Observable::Number.symbol(c(0.0, 0.0), &K);
        let k = diagonal_kernel(&n, MAX_KERNEL_DEGREE).unwrap();
        assert!((k.coeff(1, 1) - 1.0).norm() < 1e-15 && (k.coeff(0, 0) + 1.0).norm() < 1e-15);
        let id = diagonal_kernel(&Observable::Identity.symbol(c(0.4, 0.0), &K), 8).unwrap();
        assert!(id.max_abs_diff(&PolySymbol::constant(c(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn change_of_variables() {
        let g = PolySymbol::monomial(3, 2, c(1.0, 0.5)).add(&PolySymbol::monomial(1, 4, c(-0.3, 0.0)));
        for z in [c(0.0, 0.0), c(0.4, 0.0), C64::from_polar(0.9, 2.2)] {
            assert!(variable_change_defect(z, &g, &Constants::new(1.4, 0.6).unwrap()) < 1e-11);
            assert!((jacobian_det(z) - 1.0).abs() < 1e-14);
        }
    }
}
