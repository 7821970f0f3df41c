//! Special cases with elementary closed forms.

use sr_squeeze::bch::{disentangle_squeeze, f_uv};
use sr_squeeze::fock::{number, position_momentum, squeezed_vacuum, sr_ur_check, FockVector};
use sr_squeeze::kernels::{coherent_overlap, squeezed_overlap};
use sr_squeeze::params::{labels_to_moments, lambda0};
use sr_squeeze::wavefn::{self, WavefnParams};
use sr_squeeze::{Constants, Labels, C64};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn vacuum_moments() {
    let k = Constants::new(1.3, 0.7).unwrap();
    let m = labels_to_moments(&Labels::vacuum(), &k);
    assert_eq!((m.q0, m.p0, m.corr), (0.0, 0.0, 0.0));
    assert!(close(m.dq, k.ell0 * FRAC_1_SQRT_2, 1e-15));
    assert!(close(m.dp, k.hbar / k.ell0 * FRAC_1_SQRT_2, 1e-15));
}

#[test]
fn real_squeezing_is_uncorrelated() {
    let k = Constants::new(0.8, 1.7).unwrap();
    let r = 0.9;
    let m0 = labels_to_moments(&Labels::from_polar(c(0.0, 0.0), r, 0.0), &k);
    let mpi = labels_to_moments(&Labels::from_polar(c(0.0, 0.0), r, PI), &k);
    assert!(m0.corr.abs() < 1e-15 && mpi.corr.abs() < 1e-15);
    assert!(close(m0.dq, k.ell0 * r.exp() * FRAC_1_SQRT_2, 1e-14));
    assert!(close(m0.dp, k.hbar / k.ell0 * (-r).exp() * FRAC_1_SQRT_2, 1e-14));
    assert!(close(mpi.dq, k.ell0 * (-r).exp() * FRAC_1_SQRT_2, 1e-14));
    assert!(close(mpi.dp, k.hbar / k.ell0 * r.exp() * FRAC_1_SQRT_2, 1e-14));
    for m in [m0, mpi] {
        let want = c(0.0, -m.dq / m.dp);
        assert!((lambda0(&m, &k) - want).norm() < 1e-14 * want.norm());
    }
}

#[test]
fn displacement_sets_the_centre() {
    let k = Constants::new(2.0, 0.5).unwrap();
    let u0 = c(0.4, -1.1);
    let m = labels_to_moments(&Labels::from_polar(u0, 0.6, 2.0), &k);
    assert!(close(m.q0, 2f64.sqrt() * k.ell0 * u0.re, 1e-15));
    assert!(close(m.p0, 2f64.sqrt() * k.hbar / k.ell0 * u0.im, 1e-15));
}

#[test]
fn disentangling_coefficients() {
    assert_eq!(f_uv(c(0.0, 0.0), c(0.0, 0.0)), c(0.5, 0.0));
    let (r, th) = (0.8, -2.1);
    let d = disentangle_squeeze(C64::from_polar(r, th));
    assert!((d.alpha - C64::from_polar(r.tanh(), th)).norm() < 1e-15);
    assert!(close(d.gamma, -2.0 * r.cosh().ln(), 1e-15));
}

#[test]
fn squeezed_vacuum_amplitude() {
    for (r, th) in [(0.2, 0.0), (0.9, 1.0), (1.3, -2.5)] {
        let v = squeezed_vacuum(C64::from_polar(r, th), 128).unwrap();
        assert!((v.amps[0] - r.cosh().powf(-0.5)).norm() < 1e-14);
        assert!((v.amps[2] - C64::from_polar(r.tanh() * FRAC_1_SQRT_2, th) * r.cosh().powf(-0.5)).norm() < 1e-14);
    }
}

#[test]
fn vacuum_wavefunction_at_origin() {
    for ell0 in [0.5, 1.0, 3.0] {
        let p = WavefnParams::new(Labels::vacuum(), Constants::new(1.0, ell0).unwrap());
        let v = wavefn::psi(0.0, &p);
        assert!((v - (PI * ell0 * ell0).powf(-0.25)).norm() < 1e-15);
    }
}

#[test]
fn overlap_at_common_centre() {
    let u = c(0.7, -0.3);
    let (z2, z1) = (C64::from_polar(0.4, 0.5), C64::from_polar(1.1, -1.9));
    let (l2, l1) = (Labels::new(u, z2), Labels::new(u, z1));
    let want = (l2.r().cosh() * l1.r().cosh()).powf(-0.5) * (1.0 - l2.zeta().conj() * l1.zeta()).powf(-0.5);
    assert!((squeezed_overlap(z2, u, z1, u).value - want).norm() < 1e-14);
}

#[test]
fn coherent_overlap_modulus() {
    let (u2, u1) = (c(-0.2, 1.4), c(1.0, 0.3));
    let got = coherent_overlap(u2, u1);
    assert!(close(got.modulus, (-0.5 * (u2 - u1).norm_sqr()).exp(), 1e-15));
}

#[test]
fn first_excited_state_slack() {
    let k = Constants::new(1.7, 0.6).unwrap();
    let (q, p) = position_momentum(24, &k).unwrap();
    let rep = sr_ur_check(&q, &p, &FockVector::basis(1, 24)).unwrap();
    assert!(close(rep.slack, 2.0 * k.hbar * k.hbar, 1e-12));
    let n = number(24).unwrap();
    assert!(sr_ur_check(&n, &n, &FockVector::basis(3, 24)).unwrap().slack.abs() < 1e-12);
}
