use sr_squeeze_web::{moments, overlap, wavefunction};
use std::f64::consts::{FRAC_PI_2, PI};

#[test]
fn vacuum_curve_is_normalised_gaussian() {
    let v = wavefunction(0.0, 0.0, 0.0, 0.0, 1.0, 1.0, -8.0, 8.0, 1601);
    assert_eq!(v.len(), 4 * 1601);
    let h = 16.0 / 1600.0;
    let norm: f64 = v.chunks(4).map(|c| c[3]).sum::<f64>() * h;
    assert!((norm - 1.0).abs() < 1e-12);
    let mid = &v[4 * 800..4 * 801];
    assert_eq!(mid[0], 0.0);
    assert!((mid[1] - PI.powf(-0.25)).abs() < 1e-15 && mid[2] == 0.0);
}

#[test]
fn ellipse_has_the_right_second_moments() {
    let (r, th) = (0.8, FRAC_PI_2 / 2.0);
    let n = 360;
    let v = moments(r, th, 0.5, -0.2, 1.0, 1.0, n);
    assert_eq!(v.len(), 8 + 2 * n);
    let (q0, p0, dq, dp, corr) = (v[0], v[1], v[2], v[3], v[4]);
    assert!(((dq * dp).powi(2) - (1.0 + corr * corr) / 4.0).abs() < 1e-12);
    // uniform samples of L(cos t, sin t) have covariance LLᵀ/2
    let pts: Vec<(f64, f64)> = v[8..].chunks(2).map(|c| (c[0] - q0, c[1] - p0)).collect();
    let mean = |f: &dyn Fn(&(f64, f64)) -> f64| pts.iter().map(f).sum::<f64>() / n as f64;
    assert!((2.0 * mean(&|p| p.0 * p.0) - dq * dq).abs() < 1e-12);
    assert!((2.0 * mean(&|p| p.1 * p.1) - dp * dp).abs() < 1e-12);
    assert!((2.0 * mean(&|p| p.0 * p.1) - corr / 2.0).abs() < 1e-12);
}

#[test]
fn overlap_with_vacuum() {
    let r = 0.9;
    let v = overlap(0.0, 0.0, 0.0, 0.0, r, 1.3, 0.0, 0.0);
    assert!((v[0] - r.cosh().powf(-0.5)).abs() < 1e-15);
    assert_eq!(v[1], 0.0);
    let same = overlap(r, 1.3, 1.0, 2.0, r, 1.3, 1.0, 2.0);
    assert!((same[2] - 1.0).abs() < 1e-15);
}

#[test]
fn invalid_input_gives_empty_output() {
    assert!(wavefunction(0.5, 0.0, 0.0, 0.0, -1.0, 1.0, -1.0, 1.0, 10).is_empty());
    assert!(wavefunction(0.5, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, -1.0, 10).is_empty());
    assert!(moments(-0.1, 0.0, 0.0, 0.0, 1.0, 1.0, 4).is_empty());
    assert!(overlap(f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_empty());
}
