//! Truncated Fock-space realisation of the mode algebra, the displacement
//! and squeeze operators, and the saturating state vectors.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::mp::{Cx, Fixed};
use num_bigint::BigInt;
use crate::params::{self, Constants, Labels, Moments};
use crate::C64;
use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_DIM: usize = 128;
/// Number of top levels whose weight is reported as the truncation diagnostic.
pub const TAIL_WINDOW: usize = 8;
pub const DEFAULT_TAIL_BOUND: f64 = 1e-10;
/// Guard bits kept below the unit in the big-integer squeeze products.
const GUARD_BITS: u32 = 96;
/// Hard cap on the inner dimension of the anti-normal ordered product.
pub const MAX_INNER_DIM: usize = 6000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpTag {
    A,
    Adag,
    Q,
    P,
    K0,
    Kplus,
    Kminus,
    Displacement,
    Squeeze,
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub tag: OpTag,
    pub mat: CMat,
}

impl FockOperator {
    pub fn new(tag: OpTag, mat: CMat) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "Fock operators are square");
        Self { tag, mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector::new(self.mat.dot(&v.amps))
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator::new(OpTag::Generic, linalg::adjoint(&self.mat))
    }

    /// Largest entry of A − Aᴴ.
    pub fn hermiticity_defect(&self) -> f64 {
        linalg::max_abs(&(&self.mat - &linalg::adjoint(&self.mat)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    pub amps: Array1<C64>,
    pub tail_mass: f64,
}

impl FockVector {
    pub fn new(amps: Array1<C64>) -> Self {
        let n = amps.len();
        let tail_mass = amps.iter().skip(n.saturating_sub(TAIL_WINDOW)).map(|z| z.norm_sqr()).sum();
        Self { amps, tail_mass }
    }

    pub fn basis(n: usize, dim: usize) -> Self {
        let mut amps = Array1::zeros(dim);
        amps[n] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn check_tail(&self, bound: f64) -> Result<()> {
        if self.tail_mass > bound {
            Err(Error::Truncation { tail_mass: self.tail_mass, bound })
        } else {
            Ok(())
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::BadDim(dim))
    } else {
        Ok(())
    }
}

/// Annihilation and creation matrices, a[n−1][n] = √n.
pub fn ladder(dim: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim(dim)?;
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    let adag = linalg::adjoint(&a);
    Ok((FockOperator::new(OpTag::A, a), FockOperator::new(OpTag::Adag, adag)))
}

pub fn number(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    Ok(FockOperator::new(OpTag::Generic, Array2::from_diag(&Array1::from_shape_fn(dim, |n| C64::new(n as f64, 0.0)))))
}

/// Q = ℓ₀(a + a†)/√2 and P = −iħ(a − a†)/(ℓ₀√2).
pub fn position_momentum(dim: usize, c: &Constants) -> Result<(FockOperator, FockOperator)> {
    let (a, ad) = ladder(dim)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a.mat + &ad.mat) * C64::new(c.ell0 * s, 0.0);
    let p = (&a.mat - &ad.mat) * C64::new(0.0, -c.p_scale() * s);
    Ok((FockOperator::new(OpTag::Q, q), FockOperator::new(OpTag::P, p)))
}

/// K₀ = (a†a + ½)/2, K₊ = a†²/2, K₋ = a²/2.
pub fn su11(dim: usize) -> Result<[FockOperator; 3]> {
    let (a, ad) = ladder(dim)?;
    let k0 = (ad.mat.dot(&a.mat) + linalg::eye(dim) * 0.5) * 0.5;
    let kp = ad.mat.dot(&ad.mat) * 0.5;
    let km = a.mat.dot(&a.mat) * 0.5;
    Ok([FockOperator::new(OpTag::K0, k0), FockOperator::new(OpTag::Kplus, kp), FockOperator::new(OpTag::Kminus, km)])
}

/// a(z) = cosh r · a − e^{iθ} sinh r · a†.
pub fn bogoliubov(z: C64, dim: usize) -> Result<FockOperator> {
    let (a, ad) = ladder(dim)?;
    let r = z.norm();
    let phase = if r == 0.0 { C64::new(1.0, 0.0) } else { z / r };
    Ok(FockOperator::new(OpTag::Generic, &a.mat * r.cosh() - &ad.mat * (phase * r.sinh())))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// Entries ⟨m|D(u)|n⟩ for m < rows, n < cols, from the closed form of the
/// normal-ordered product e^{−|u|²/2} e^{ua†} e^{−ūa}: with α = |m − n| and
/// j = min(m, n) the modulus is √(j!/(j+α)!) x^{α/2} e^{−x/2} L_j^{(α)}(x),
/// x = |u|², evaluated by the normalised three-term Laguerre recurrence.
pub fn displacement_block(u: C64, rows: usize, cols: usize) -> CMat {
    let mut out = Array2::zeros((rows, cols));
    let x = u.norm_sqr();
    let lf = ln_factorials(rows.max(cols));
    let unit = if x == 0.0 { C64::new(1.0, 0.0) } else { u / u.norm() };
    let amax = rows.max(cols);
    for alpha in 0..amax {
        // j runs while both (j, j+α) stay inside one of the two triangles
        let jmax_lower = if alpha < rows { (rows - alpha).min(cols) } else { 0 };
        let jmax_upper = if alpha < cols { (cols - alpha).min(rows) } else { 0 };
        let jmax = jmax_lower.max(jmax_upper);
        if jmax == 0 {
            continue;
        }
        let af = alpha as f64;
        let f0 = if x == 0.0 {
            if alpha == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (0.5 * af * x.ln() - 0.5 * x - 0.5 * lf[alpha]).exp()
        };
        let lower_phase = unit.powu(alpha as u32);
        let upper_phase = (-unit.conj()).powu(alpha as u32);
        let (mut fm, mut f) = (0.0, f0);
        for j in 0..jmax {
            if j < jmax_lower {
                out[[j + alpha, j]] = lower_phase * f;
            }
            if alpha > 0 && j < jmax_upper {
                out[[j, j + alpha]] = upper_phase * f;
            }
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + af - x) * f - (jf * (jf + af)).sqrt() * fm) / ((jf + 1.0) * (jf + 1.0 + af)).sqrt();
            fm = f;
            f = next;
        }
    }
    out
}

/// D(u₀) = e^{u₀a† − ū₀a}, entries exact for the infinite matrix.
pub fn displacement(u0: C64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    Ok(FockOperator::new(OpTag::Displacement, displacement_block(u0, dim, dim)))
}

/// Padé exponential of the truncated generator u₀a† − ū₀a (oracle path).
pub fn displacement_exp(u0: C64, dim: usize) -> Result<FockOperator> {
    let (a, ad) = ladder(dim)?;
    Ok(FockOperator::new(OpTag::Displacement, linalg::expm(&(&ad.mat * u0 - &a.mat * u0.conj()))))
}

/// Padé exponential of the truncated generator (z a†² − z̄ a²)/2.
pub fn squeeze_exp(z: C64, dim: usize) -> Result<FockOperator> {
    let [_, kp, km] = su11(dim)?;
    Ok(FockOperator::new(OpTag::Squeeze, linalg::expm(&(&kp.mat * z - &km.mat * z.conj()))))
}

/// Upper-left dim×dim block of the exponential built at a larger dimension.
pub fn squeeze_exp_padded(z: C64, dim: usize, inner: usize) -> Result<FockOperator> {
    let full = squeeze_exp(z, inner.max(dim))?;
    Ok(FockOperator::new(OpTag::Squeeze, linalg::top(&full.mat, dim).to_owned()))
}

/// S(z)|0⟩ = (cosh r)^{−1/2} Σ_j ζ^j √((2j)!)/(2^j j!) |2j⟩, the first column
/// of the disentangled product.
pub fn squeezed_vacuum(z: C64, dim: usize) -> Result<FockVector> {
    check_dim(dim)?;
    let d = crate::bch::disentangle_squeeze(z);
    let mut amps = Array1::zeros(dim);
    let mut c = C64::new((d.gamma / 4.0).exp(), 0.0);
    let mut n = 0;
    while n < dim {
        amps[n] = c;
        let nf = n as f64;
        c = c * d.alpha * 0.5 * ((nf + 1.0) * (nf + 2.0)).sqrt() / (nf / 2.0 + 1.0);
        n += 2;
    }
    Ok(FockVector::new(amps))
}

/// Column-wise entries of e^{ζK₊}: col[k][j] = ⟨k+2j| e^{ζa†²/2} |k⟩ =
/// (ζ/2)^j √((k+2j)!/k!)/j!, for k < cols and k + 2j < rows.
fn raising_columns(fx: &Fixed, zeta: &Cx, rows: usize, cols: usize) -> Vec<Vec<Cx>> {
    raising_columns_from(fx, zeta, rows, cols, |_| fx.one())
}

/// Same recursion started from `first(k)` instead of 1 at the top of column k.
fn raising_columns_from<F>(fx: &Fixed, zeta: &Cx, rows: usize, cols: usize, first: F) -> Vec<Vec<Cx>>
where
    F: Fn(usize) -> BigInt + Sync,
{
    let half = fx.scale_div_int(zeta, 2);
    (0..cols.min(rows))
        .into_par_iter()
        .map(|k| {
            let mut col = Vec::with_capacity((rows - k).div_ceil(2));
            let mut cur = Cx { re: first(k), im: 0.into() };
            let mut m = k;
            let mut j = 0u64;
            while m < rows {
                col.push(cur.clone());
                let s = fx.sqrt_int(((m + 1) * (m + 2)) as u64);
                cur = fx.scale_div_int(&fx.scale(&fx.cmul(&cur, &half), &s), j + 1);
                m += 2;
                j += 1;
            }
            col
        })
        .collect()
}

/// ln|⟨k+2j| e^{ζa†²/2} |k⟩|, same layout as [`raising_columns`].
fn raising_log_moduli(abs_zeta: f64, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let lh = (abs_zeta / 2.0).ln();
    (0..cols.min(rows))
        .map(|k| {
            let mut col = Vec::new();
            let mut cur = 0.0;
            let mut m = k;
            let mut j = 0usize;
            while m < rows {
                col.push(cur);
                cur += lh + 0.5 * (((m + 1) * (m + 2)) as f64).ln() - ((j + 1) as f64).ln();
                m += 2;
                j += 1;
            }
            col
        })
        .collect()
}

fn to_matrix(fx: &Fixed, dim: usize, entries: Vec<Vec<Cx>>) -> CMat {
    let mut out = Array2::zeros((dim, dim));
    for (m, row) in entries.into_iter().enumerate() {
        for (n, e) in row.into_iter().enumerate() {
            out[[m, n]] = fx.cx_to_c64(&e);
        }
    }
    out
}

/// S(z) = e^{ζa†²/2} e^{ln(1−|ζ|²)(a†a+½)/2} e^{−ζ̄a²/2}: two triangular
/// factors and a diagonal one, multiplied exactly and rounded once.
pub fn squeeze_factored(z: C64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    if z.norm() == 0.0 {
        return Ok(FockOperator::new(OpTag::Squeeze, linalg::eye(dim)));
    }
    let zeta = crate::bch::disentangle_squeeze(z).alpha;
    let t_f = 1.0 - zeta.norm_sqr();
    // largest summand |L[m,k]| d_k |U[k,n]| decides the working precision
    let logs = raising_log_moduli(zeta.norm(), dim, dim);
    let mut max_log = 0.0f64;
    for (k, col) in logs.iter().enumerate() {
        let top = col.iter().cloned().fold(f64::MIN, f64::max);
        max_log = max_log.max(2.0 * top + (2 * k + 1) as f64 / 4.0 * t_f.ln());
    }
    let fx = Fixed::for_range(max_log / std::f64::consts::LN_2 + (dim as f64).log2(), GUARD_BITS);
    let zf = fx.cx(zeta);
    let lower = raising_columns(&fx, &zf, dim, dim);
    let upper = raising_columns(&fx, &fx.cx(-zeta.conj()), dim, dim);
    let t = fx.one() - fx.mul(&zf.re, &zf.re) - fx.mul(&zf.im, &zf.im);
    let sqrt_t = fx.sqrt(&t);
    let mut diag = Vec::with_capacity(dim);
    let mut d = fx.sqrt(&sqrt_t);
    for _ in 0..dim {
        diag.push(d.clone());
        d = fx.mul(&d, &sqrt_t);
    }
    let entries: Vec<Vec<Cx>> = (0..dim)
        .into_par_iter()
        .map(|m| {
            (0..dim)
                .map(|n| {
                    let mut acc = Cx::zero();
                    if (m + n) % 2 == 1 {
                        return acc;
                    }
                    let mut k = m % 2;
                    while k <= m.min(n) {
                        let l = &lower[k][(m - k) / 2];
                        let u = fx.scale(&upper[k][(n - k) / 2], &diag[k]);
                        acc += &fx.cmul(l, &u);
                        k += 2;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(FockOperator::new(OpTag::Squeeze, to_matrix(&fx, dim, entries)))
}

/// Report on the reversed-order product e^{−ζ̄K₋} e^{−γK₀} e^{ζK₊}.
#[derive(Clone, Debug)]
pub struct DualProduct {
    pub op: FockOperator,
    /// Number of intermediate Fock levels summed over.
    pub inner_dim: usize,
    /// Working precision used for the sums, in bits.
    pub bits: u32,
}

/// Reversed-order product e^{−ζ̄K₋} e^{−γK₀} e^{ζK₊} on the upper-left dim×dim
/// block. Its matrix elements are series over intermediate levels k whose
/// terms behave like (sinh r)^k, so they only converge for sinh r < 1; the
/// sum is cut once every remaining term is below 2^−`GUARD_BITS`.
pub fn squeeze_dual(z: C64, dim: usize) -> Result<DualProduct> {
    check_dim(dim)?;
    let r = z.norm();
    if r == 0.0 {
        return Ok(DualProduct { op: FockOperator::new(OpTag::Squeeze, linalg::eye(dim)), inner_dim: dim, bits: 0 });
    }
    if r.sinh() >= 1.0 {
        return Err(Error::Domain(format!(
            "the reversed-order squeeze series diverges for sinh r ≥ 1 (r = {r})"
        )));
    }
    let zeta = crate::bch::disentangle_squeeze(z).alpha;
    let t_f = 1.0 - zeta.norm_sqr();
    let cut = -(GUARD_BITS as f64) * std::f64::consts::LN_2;
    // grow the inner dimension until the largest term at level k is negligible
    let mut inner = dim + 2;
    let (inner, max_log) = loop {
        let logs = raising_log_moduli(zeta.norm(), inner, dim);
        let level_max = |k: usize| {
            let best = logs
                .iter()
                .enumerate()
                .filter(|(n, col)| k >= *n && (k - n).is_multiple_of(2) && (k - n) / 2 < col.len())
                .map(|(n, col)| col[(k - n) / 2])
                .fold(f64::MIN, f64::max);
            2.0 * best - (2 * k + 1) as f64 / 4.0 * t_f.ln()
        };
        let tail = level_max(inner - 1).max(level_max(inner - 2));
        if tail < cut && level_max(inner - 1) < level_max(inner - 3) {
            let max_log = (0..inner).map(level_max).fold(0.0, f64::max);
            break (inner, max_log);
        }
        if inner >= MAX_INNER_DIM {
            return Err(Error::Domain(format!("reversed-order squeeze series needs more than {MAX_INNER_DIM} levels")));
        }
        inner = (inner * 3 / 2).min(MAX_INNER_DIM);
    };
    let fx = Fixed::for_range(max_log / std::f64::consts::LN_2 + (inner as f64).log2(), GUARD_BITS);
    let zf = fx.cx(zeta);
    let t = fx.one() - fx.mul(&zf.re, &zf.re) - fx.mul(&zf.im, &zf.im);
    // (1−|ζ|²)^{−(k+½)/2} is split evenly between the two triangular factors,
    // so both column recursions decay like (sinh r)^j instead of one side
    // growing like cosh^k while the other falls below the working unit
    let quarter = fx.sqrt(&fx.sqrt(&t));
    let step = fx.div(&fx.one(), &quarter);
    let mut half_diag = Vec::with_capacity(dim);
    let mut e = fx.div(&fx.one(), &fx.sqrt(&quarter));
    for _ in 0..dim {
        half_diag.push(e.clone());
        e = fx.mul(&e, &step);
    }
    let cosh = fx.div(&fx.one(), &fx.sqrt(&t));
    let up = fx.scale(&zf, &cosh);
    let down = fx.scale(&fx.cx(-zeta.conj()), &cosh);
    let raise = raising_columns_from(&fx, &up, inner, dim, |k| half_diag[k].clone());
    let lower = raising_columns_from(&fx, &down, inner, dim, |k| half_diag[k].clone());
    let entries: Vec<Vec<Cx>> = (0..dim)
        .into_par_iter()
        .map(|m| {
            (0..dim)
                .map(|n| {
                    let mut acc = Cx::zero();
                    if (m + n) % 2 == 1 {
                        return acc;
                    }
                    let mut k = m.max(n);
                    while k < inner {
                        let l = &lower[m][(k - m) / 2];
                        acc += &fx.cmul(l, &raise[n][(k - n) / 2]);
                        k += 2;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(DualProduct { op: FockOperator::new(OpTag::Squeeze, to_matrix(&fx, dim, entries)), inner_dim: inner, bits: fx.bits })
}

/// The reversed-order product with every factor cut to `inner` levels and the
/// sum carried out in plain floating point. Past sinh r = 1 this is what a
/// truncated evaluation actually produces; it does not converge as `inner` grows.
pub fn squeeze_dual_truncated(z: C64, dim: usize, inner: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let inner = inner.max(dim);
    let d = crate::bch::disentangle_squeeze(z);
    if z.norm() == 0.0 {
        return Ok(FockOperator::new(OpTag::Squeeze, linalg::eye(dim)));
    }
    let logs = raising_log_moduli(d.alpha.norm(), inner, dim);
    let (up, down) = (d.alpha / d.alpha.norm(), -d.alpha.conj() / d.alpha.norm());
    let mut out = Array2::zeros((dim, dim));
    for m in 0..dim {
        for n in (0..dim).filter(|n| (m + n) % 2 == 0) {
            let mut acc = C64::new(0.0, 0.0);
            let mut k = m.max(n);
            while k < inner {
                let (jm, jn) = ((k - m) / 2, (k - n) / 2);
                let log = logs[m][jm] + logs[n][jn] - d.gamma * (2 * k + 1) as f64 / 4.0;
                acc += down.powu(jm as u32) * up.powu(jn as u32) * log.exp();
                k += 2;
            }
            out[[m, n]] = acc;
        }
    }
    Ok(FockOperator::new(OpTag::Squeeze, out))
}

/// |Ω_z(u₀)⟩ = D(u₀) S(z) |0⟩, truncated to `dim` levels, without the tail check.
pub fn saturating_state_unchecked(labels: &Labels, dim: usize) -> Result<FockVector> {
    let vac = squeezed_vacuum(labels.z(), dim)?;
    let d = displacement(labels.u0, dim)?;
    Ok(d.apply(&vac))
}

/// |Ω_z(u₀)⟩, failing when the weight of the top levels exceeds `tail_bound`.
pub fn saturating_state(labels: &Labels, dim: usize, tail_bound: f64) -> Result<FockVector> {
    let v = saturating_state_unchecked(labels, dim)?;
    v.check_tail(tail_bound)?;
    Ok(v)
}

/// Moments of a state from one pass of Q|ψ⟩ and P|ψ⟩.
pub fn expectations_unchecked(state: &FockVector, c: &Constants) -> Moments {
    let (q, p) = position_momentum(state.dim(), c).expect("FockVector has dim ≥ 2");
    let n2 = state.norm().powi(2);
    let qv = q.mat.dot(&state.amps);
    let pv = p.mat.dot(&state.amps);
    let dotc = |a: &Array1<C64>, b: &Array1<C64>| a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<C64>();
    let q0 = dotc(&state.amps, &qv).re / n2;
    let p0 = dotc(&state.amps, &pv).re / n2;
    let q2 = dotc(&qv, &qv).re / n2;
    let p2 = dotc(&pv, &pv).re / n2;
    let qp = dotc(&qv, &pv).re / n2;
    Moments { q0, p0, dq: (q2 - q0 * q0).sqrt(), dp: (p2 - p0 * p0).sqrt(), corr: 2.0 * qp - 2.0 * q0 * p0 }
}

pub fn expectations(state: &FockVector, c: &Constants, tail_bound: f64) -> Result<Moments> {
    state.check_tail(tail_bound)?;
    Ok(expectations_unchecked(state, c))
}

/// ‖[(Q − q₀) − λ₀(P − p₀)]|ψ⟩‖ with λ₀ taken from the moments.
pub fn defining_residual(state: &FockVector, m: &Moments, c: &Constants) -> f64 {
    let (q, p) = position_momentum(state.dim(), c).expect("FockVector has dim ≥ 2");
    let lam = params::lambda0(m, c);
    let qv = q.mat.dot(&state.amps) - &state.amps * C64::new(m.q0, 0.0);
    let pv = p.mat.dot(&state.amps) - &state.amps * C64::new(m.p0, 0.0);
    (qv - pv * lam).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SrUrReport {
    pub lhs: f64,
    pub rhs_comm: f64,
    pub rhs_anticomm: f64,
    pub slack: f64,
    pub lambda0: C64,
}

/// Schrödinger–Robertson terms for two Hermitian operators in a state.
pub fn sr_ur_check(a: &FockOperator, b: &FockOperator, state: &FockVector) -> Result<SrUrReport> {
    for op in [a, b] {
        let defect = op.hermiticity_defect();
        let scale = linalg::max_abs(&op.mat).max(1.0);
        if defect > 1e-12 * scale {
            return Err(Error::NotHermitian(defect));
        }
    }
    let psi = &state.amps / C64::new(state.norm(), 0.0);
    let dotc = |x: &Array1<C64>, y: &Array1<C64>| x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum::<C64>();
    let av = a.mat.dot(&psi);
    let bv = b.mat.dot(&psi);
    let mean_a = dotc(&psi, &av).re;
    let mean_b = dotc(&psi, &bv).re;
    let abar = &av - &(&psi * mean_a);
    let bbar = &bv - &(&psi * mean_b);
    let var_a = dotc(&abar, &abar).re;
    let var_b = dotc(&bbar, &bbar).re;
    // ⟨B̄Ā⟩ = ⟨B̄ψ|Āψ⟩; its imaginary part is −⟨(−i)[A,B]⟩/2
    let ba = dotc(&bbar, &abar);
    let comm = -2.0 * ba.im;
    let anti = 2.0 * ba.re;
    let lhs = var_a * var_b;
    let rhs_comm = comm * comm / 4.0;
    let rhs_anticomm = anti * anti / 4.0;
    Ok(SrUrReport { lhs, rhs_comm, rhs_anticomm, slack: lhs - rhs_comm - rhs_anticomm, lambda0: ba / var_b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ladder_small() {
        let (a, ad) = ladder(2).unwrap();
        assert_eq!(a.mat[[0, 1]], c(1.0, 0.0));
        assert_eq!(ad.mat[[1, 0]], c(1.0, 0.0));
        assert!(matches!(ladder(1), Err(Error::BadDim(1))));
        let (a, ad) = ladder(3).unwrap();
        let n = ad.mat.dot(&a.mat);
        for k in 0..3 {
            assert!((n[[k, k]] - k as f64).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_commutator_on_block() {
        let cst = Constants::new(0.7, 1.9).unwrap();
        let (q, p) = position_momentum(64, &cst).unwrap();
        let comm = linalg::commutator(&q.mat, &p.mat) - linalg::eye(64) * c(0.0, cst.hbar);
        assert!(linalg::max_abs_view(linalg::top(&comm, 63)) < 1e-12);
    }

    #[test]
    fn displacement_matches_series_and_exponential() {
        let u = c(1.0, 1.0);
        let d = displacement(u, 128).unwrap();
        let mut fact = 1.0f64;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-u.norm_sqr() / 2.0).exp() * u.powu(n as u32) / fact.sqrt();
            assert!((d.mat[[n, 0]] - want).norm() < 1e-15);
        }
        let e = displacement_exp(u, 128).unwrap();
        assert!(linalg::max_abs_view(linalg::top(&(&d.mat - &e.mat), 64)) < 1e-10);
        assert_eq!(displacement(c(0.0, 0.0), 5).unwrap().mat, linalg::eye(5));
    }

    #[test]
    fn displacement_block_is_consistent() {
        let u = c(-0.8, 2.1);
        let full = displacement_block(u, 40, 40);
        let rows = displacement_block(u, 7, 40);
        let cols = displacement_block(u, 40, 9);
        assert!(linalg::max_abs(&(&full.slice(ndarray::s![..7, ..]).to_owned() - &rows)) == 0.0);
        assert!(linalg::max_abs(&(&full.slice(ndarray::s![.., ..9]).to_owned() - &cols)) == 0.0);
    }

    #[test]
    fn squeeze_vacuum_column_and_parity() {
        let z = C64::from_polar(0.9, 0.4);
        let s = squeeze_exp(z, 96).unwrap();
        assert!((s.mat[[0, 0]] - c(0.9f64.cosh().powf(-0.5), 0.0)).norm() < 1e-12);
        for n in (1..96).step_by(2) {
            assert_eq!(s.mat[[n, 0]], c(0.0, 0.0));
        }
        let v = squeezed_vacuum(z, 96).unwrap();
        for n in 0..40 {
            assert!((v.amps[n] - s.mat[[n, 0]]).norm() < 1e-12);
        }
        assert_eq!(squeeze_exp(c(0.0, 0.0), 8).unwrap().mat, linalg::eye(8));
    }

    #[test]
    fn factored_matches_exponential() {
        let z = C64::from_polar(0.8, PI / 3.0);
        let f = squeeze_factored(z, 128).unwrap();
        let e = squeeze_exp_padded(z, 128, 256).unwrap();
        let diff = &f.mat - &e.mat;
        assert!(linalg::spectral_norm(linalg::top(&diff, 64)) < 1e-9);
    }

    #[test]
    fn dual_matches_on_small_block() {
        let z = C64::from_polar(0.7, -1.0);
        let d = squeeze_dual(z, 8).unwrap();
        let f = squeeze_factored(z, 8).unwrap();
        assert!(linalg::max_abs(&(&d.op.mat - &f.mat)) < 1e-13);
        assert!(squeeze_dual(c(1.0, 0.0), 8).is_err());
    }

    #[test]
    fn truncated_dual_converges_only_below_the_limit() {
        let z = C64::from_polar(0.5, 0.4);
        let f = squeeze_factored(z, 8).unwrap();
        let d = squeeze_dual_truncated(z, 8, 400).unwrap();
        assert!(linalg::max_abs(&(&d.mat - &f.mat)) < 1e-12);
        let z = c(1.0, 0.0);
        let f = squeeze_factored(z, 8).unwrap();
        let e1 = linalg::max_abs(&(&squeeze_dual_truncated(z, 8, 100).unwrap().mat - &f.mat));
        let e2 = linalg::max_abs(&(&squeeze_dual_truncated(z, 8, 200).unwrap().mat - &f.mat));
        assert!(e2 > e1 && e1 > 1.0);
    }

    #[test]
    fn vacuum_residual_and_probe() {
        let cst = Constants::default();
        let vac = FockVector::basis(0, 16);
        let m = params::labels_to_moments(&Labels::vacuum(), &cst);
        assert!(defining_residual(&vac, &m, &cst) < 1e-15);
        let one = FockVector::basis(1, 16);
        assert!(defining_residual(&one, &m, &cst) > 0.1);
    }

    #[test]
    fn number_state_slack() {
        let cst = Constants::new(1.3, 0.6).unwrap();
        let (q, p) = position_momentum(16, &cst).unwrap();
        let rep = sr_ur_check(&q, &p, &FockVector::basis(1, 16)).unwrap();
        let h2 = cst.hbar * cst.hbar;
        assert!((rep.lhs - 9.0 * h2 / 4.0).abs() < 1e-12);
        assert!((rep.rhs_comm - h2 / 4.0).abs() < 1e-12);
        assert!((rep.slack - 2.0 * h2).abs() < 1e-12);
        let rep = sr_ur_check(&q, &p, &FockVector::basis(0, 16)).unwrap();
        assert!(rep.slack.abs() < 1e-12);
        let (a, _) = ladder(16).unwrap();
        assert!(matches!(sr_ur_check(&a, &p, &FockVector::basis(0, 16)), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn squeezed_expectations() {
        let cst = Constants::default();
        let l = Labels::from_polar(c(0.0, 0.0), 0.5, PI / 2.0);
        let st = saturating_state(&l, 128, DEFAULT_TAIL_BOUND).unwrap();
        let m = expectations(&st, &cst, DEFAULT_TAIL_BOUND).unwrap();
        assert!((m.corr - 1f64.sinh()).abs() < 1e-12);
        let l = Labels::from_polar(c(1.0, -0.5), 0.0, 0.0);
        let m = expectations(&saturating_state(&l, 128, DEFAULT_TAIL_BOUND).unwrap(), &cst, DEFAULT_TAIL_BOUND).unwrap();
        assert!((m.dq - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((m.q0 - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((m.p0 + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn truncation_is_reported() {
        let l = Labels::from_polar(c(3.0, 0.0), 1.2, 0.0);
        assert!(matches!(saturating_state(&l, 16, DEFAULT_TAIL_BOUND), Err(Error::Truncation { .. })));
    }
}
