//! Dense complex matrix helpers: Padé matrix exponential, LU solve, norms.

use crate::bch::ln1p;
use crate::C64;
use ndarray::{s, Array1, Array2, ArrayView2};

pub type CMat = Array2<C64>;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

pub fn eye(n: usize) -> CMat {
    Array2::eye(n)
}

pub fn max_abs(a: &CMat) -> f64 {
    max_abs_view(a.view())
}

pub fn max_abs_view(a: ArrayView2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn norm1(a: &CMat) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Upper-left k×k block.
pub fn top(a: &CMat, k: usize) -> ArrayView2<'_, C64> {
    a.slice(s![..k, ..k])
}

pub fn adjoint(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) + b.dot(a)
}

/// Largest singular value, by power iteration on AᴴA.
pub fn spectral_norm(a: ArrayView2<C64>) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let ah = a.t().mapv(|z| z.conj());
    // deterministic, generic start vector
    let mut x: Array1<C64> = (0..n).map(|k| C64::new(1.0 + 0.37 * k as f64, 0.11 * (k % 7) as f64)).collect();
    let mut sigma = 0.0;
    for _ in 0..500 {
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nx == 0.0 {
            return 0.0;
        }
        x.mapv_inplace(|z| z / nx);
        let y = a.dot(&x);
        let next = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x = ah.dot(&y);
        if (next - sigma).abs() <= 1e-13 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// LU factorisation with partial pivoting, then solve A X = B.
pub fn solve(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| lu[[i, k]].norm().total_cmp(&lu[[j, k]].norm())).unwrap();
        if p != k {
            for j in 0..n {
                lu.swap([k, j], [p, j]);
            }
            for j in 0..x.ncols() {
                x.swap([k, j], [p, j]);
            }
        }
        let pivot = lu[[k, k]];
        for i in k + 1..n {
            let m = lu[[i, k]] / pivot;
            if m == C64::new(0.0, 0.0) {
                continue;
            }
            lu[[i, k]] = m;
            for j in k + 1..n {
                let t = lu[[k, j]];
                lu[[i, j]] -= m * t;
            }
            for j in 0..x.ncols() {
                let t = x[[k, j]];
                x[[i, j]] -= m * t;
            }
        }
    }
    for j in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut acc = x[[i, j]];
            for k in i + 1..n {
                acc -= lu[[i, k]] * x[[k, j]];
            }
            x[[i, j]] = acc / lu[[i, i]];
        }
    }
    x
}

/// Matrix exponential by [13/13] Padé approximation with scaling and squaring.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let nrm = norm1(a);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * C64::new(0.5f64.powi(s), 0.0);
    let b = PADE13;
    let id = eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let u_in = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a.dot(&(a6.dot(&u_in) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]));
    let v_in = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = a6.dot(&v_in) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let mut r = solve(&(&v - &u), &(&v + &u));
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

/// Principal logarithm of a 2×2 matrix with eigenvalues off the negative real axis.
pub fn logm_2x2(m: &CMat) -> CMat {
    let tr = m[[0, 0]] + m[[1, 1]];
    let det = m[[0, 0]] * m[[1, 1]] - m[[0, 1]] * m[[1, 0]];
    let disc = (tr * tr - det * 4.0).sqrt();
    let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    // log M = c0 I + c1 M with c1 the divided difference of log at (λ₁, λ₂)
    let w = (l1 - l2) / l2;
    let c1 = if w.norm() == 0.0 {
        l2.inv()
    } else if w.norm() < 1e-3 {
        ln1p(w) / (l2 * w)
    } else {
        (l1.ln() - l2.ln()) / (l1 - l2)
    };
    let c0 = l2.ln() - c1 * l2;
    eye(2) * c0 + m * c1
}
