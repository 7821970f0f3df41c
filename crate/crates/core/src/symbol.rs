//! Polynomial symbols in a complex variable w and its conjugate w̄.
//!
//! A normal-ordered operator Σ c b†^j b^k is represented by its diagonal
//! coherent-state symbol Σ c w̄^j w^k, where w is the eigenvalue of b. The
//! coefficient of w^p w̄^q lives at `coef[p][q]`.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySymbol {
    coef: Vec<Vec<C64>>,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// n!/(n−k)!
fn falling(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

impl PolySymbol {
    /// Zero polynomial with room for powers up to `max_power` in each variable.
    pub fn zero(max_power: usize) -> Self {
        Self { coef: vec![vec![C64::new(0.0, 0.0); max_power + 1]; max_power + 1] }
    }

    pub fn constant(c: C64) -> Self {
        let mut s = Self::zero(0);
        s.coef[0][0] = c;
        s
    }

    pub fn monomial(p: usize, q: usize, c: C64) -> Self {
        let mut s = Self::zero(p.max(q));
        s.coef[p][q] = c;
        s
    }

    /// α w + β w̄ + γ.
    pub fn linear(alpha: C64, beta: C64, gamma: C64) -> Self {
        let mut s = Self::zero(1);
        s.coef[1][0] = alpha;
        s.coef[0][1] = beta;
        s.coef[0][0] = gamma;
        s
    }

    fn size(&self) -> usize {
        self.coef.len()
    }

    pub fn coeff(&self, p: usize, q: usize) -> C64 {
        self.coef.get(p).and_then(|row| row.get(q)).copied().unwrap_or_default()
    }

    /// Total degree of the highest non-zero monomial (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        let mut d = 0;
        for (p, row) in self.coef.iter().enumerate() {
            for (q, c) in row.iter().enumerate() {
                if *c != C64::new(0.0, 0.0) {
                    d = d.max(p + q);
                }
            }
        }
        d
    }

    fn resized(&self, n: usize) -> Self {
        let mut s = Self::zero(n.saturating_sub(1));
        for (p, row) in self.coef.iter().enumerate().take(n) {
            for (q, c) in row.iter().enumerate().take(n) {
                s.coef[p][q] = *c;
            }
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.size().max(other.size());
        let mut s = self.resized(n);
        for (p, row) in other.coef.iter().enumerate() {
            for (q, c) in row.iter().enumerate() {
                s.coef[p][q] += c;
            }
        }
        s
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { coef: self.coef.iter().map(|row| row.iter().map(|c| c * k).collect()).collect() }
    }

    /// Ordinary pointwise product of polynomials.
    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self::zero(self.size() + other.size() - 2);
        for (p1, r1) in self.coef.iter().enumerate() {
            for (q1, c1) in r1.iter().enumerate() {
                if *c1 == C64::new(0.0, 0.0) {
                    continue;
                }
                for (p2, r2) in other.coef.iter().enumerate() {
                    for (q2, c2) in r2.iter().enumerate() {
                        s.coef[p1 + p2][q1 + q2] += c1 * c2;
                    }
                }
            }
        }
        s
    }

    /// ∂_w^a ∂_w̄^b.
    pub fn derivative(&self, a: usize, b: usize) -> Self {
        let n = self.size();
        let mut s = Self::zero(n.saturating_sub(1));
        for p in a..n {
            for q in b..n {
                s.coef[p - a][q - b] = self.coef[p][q] * (falling(p, a) * falling(q, b));
            }
        }
        s
    }

    /// Symbol of the operator product: Σₘ (∂_w^m f)(∂_w̄^m g)/m!.
    pub fn star(&self, other: &Self) -> Self {
        let top = self.size().min(other.size());
        let mut acc = Self::zero(0);
        let mut fact = 1.0;
        for m in 0..top {
            if m > 0 {
                fact *= m as f64;
            }
            let term = self.derivative(m, 0).mul(&other.derivative(0, m)).scale(C64::new(1.0 / fact, 0.0));
            acc = acc.add(&term);
        }
        acc
    }

    /// e^{−∂_w∂_w̄} f, a finite sum on polynomials.
    pub fn heat(&self) -> Self {
        let n = self.size();
        let mut s = Self::zero(n.saturating_sub(1));
        for p in 0..n {
            for q in 0..n {
                let c = self.coef[p][q];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut sign_fact = 1.0;
                for m in 0..=p.min(q) {
                    if m > 0 {
                        sign_fact *= -(m as f64);
                    }
                    s.coef[p - m][q - m] += c * (falling(p, m) * falling(q, m) / sign_fact);
                }
            }
        }
        s
    }

    /// c₁₁ ∂₁² + c₂₂ ∂₂² + c₁₂ ∂₁∂₂ applied to f, reading (w, w̄) as two independent variables.
    pub fn second_order(&self, c11: C64, c22: C64, c12: C64) -> Self {
        self.derivative(2, 0).scale(c11).add(&self.derivative(0, 2).scale(c22)).add(&self.derivative(1, 1).scale(c12))
    }

    /// Rewrite f(w, w̄) in new variables through w = a₁X + b₁Y, w̄ = a₂X + b₂Y.
    pub fn substitute(&self, first: (C64, C64), second: (C64, C64)) -> Self {
        let x = Self::linear(first.0, first.1, C64::new(0.0, 0.0));
        let y = Self::linear(second.0, second.1, C64::new(0.0, 0.0));
        let n = self.size();
        let mut xp = vec![Self::constant(C64::new(1.0, 0.0))];
        let mut yp = vec![Self::constant(C64::new(1.0, 0.0))];
        for k in 1..n {
            xp.push(xp[k - 1].mul(&x));
            yp.push(yp[k - 1].mul(&y));
        }
        let mut acc = Self::zero(0);
        for p in 0..n {
            for q in 0..n {
                let c = self.coef[p][q];
                if c != C64::new(0.0, 0.0) {
                    acc = acc.add(&xp[p].mul(&yp[q]).scale(c));
                }
            }
        }
        acc
    }

    /// Value at w, with w̄ taken as the conjugate.
    pub fn eval(&self, w: C64) -> C64 {
        self.eval2(w, w.conj())
    }

    /// Value with both variables given independently.
    pub fn eval2(&self, x: C64, y: C64) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for row in self.coef.iter().rev() {
            let mut inner = C64::new(0.0, 0.0);
            for c in row.iter().rev() {
                inner = inner * y + c;
            }
            total = total * x + inner;
        }
        total
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.size().max(other.size());
        let (a, b) = (self.resized(n), other.resized(n));
        let mut m = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                m = m.max((a.coef[p][q] - b.coef[p][q]).norm());
            }
        }
        m
    }

    /// Reject symbols whose total degree exceeds `max`.
    pub fn check_degree(&self, max: usize) -> Result<()> {
        let degree = self.degree();
        if degree > max {
            Err(Error::DegreeTooHigh { degree, max })
        } else {
            Ok(())
        }
    }

    /// Σ_{j,k} c_{jk} b†^j b^k from a table of normal-ordered coefficients `normal[j][k]`.
    pub fn from_normal_ordered(normal: &[Vec<C64>]) -> Self {
        let n = normal.len().max(normal.iter().map(|r| r.len()).max().unwrap_or(0));
        let mut s = Self::zero(n.saturating_sub(1));
        for (j, row) in normal.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                s.coef[k][j] += c;
            }
        }
        s
    }

    /// Binomial power (α w + β w̄)^n, used for tests of the substitution rules.
    pub fn linear_power(alpha: C64, beta: C64, n: usize) -> Self {
        let mut s = Self::zero(n);
        for k in 0..=n {
            s.coef[k][n - k] = alpha.powu(k as u32) * beta.powu((n - k) as u32) * binom(n, k);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn canonical_commutator() {
        let b = PolySymbol::linear(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let bd = PolySymbol::linear(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let comm = b.star(&bd).add(&bd.star(&b).scale(c(-1.0, 0.0)));
        assert!(comm.max_abs_diff(&PolySymbol::constant(c(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn heat_of_number_operator() {
        let n = PolySymbol::monomial(1, 1, c(1.0, 0.0));
        let k = n.heat();
        assert_eq!(k.coeff(1, 1), c(1.0, 0.0));
        assert_eq!(k.coeff(0, 0), c(-1.0, 0.0));
    }

    #[test]
    fn heat_is_inverted_by_the_opposite_flow() {
        let f = PolySymbol::monomial(2, 3, c(0.5, 1.0)).add(&PolySymbol::monomial(1, 0, c(-2.0, 0.0)));
        let k = f.heat();
        let (mut back, mut term) = (k.clone(), k);
        for m in 1..4 {
            term = term.derivative(1, 1).scale(c(1.0 / m as f64, 0.0));
            back = back.add(&term);
        }
        assert!(back.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn substitution_and_eval() {
        let f = PolySymbol::monomial(2, 1, c(1.0, 0.0)).add(&PolySymbol::constant(c(0.0, 3.0)));
        let (a1, b1, a2, b2) = (c(1.0, 0.5), c(-0.2, 0.0), c(0.3, 0.0), c(0.7, -1.0));
        let g = f.substitute((a1, b1), (a2, b2));
        let (x, y) = (c(0.4, -0.1), c(1.3, 0.2));
        let want = f.eval2(a1 * x + b1 * y, a2 * x + b2 * y);
        assert!((g.eval2(x, y) - want).norm() < 1e-14);
    }

    #[test]
    fn degree_guard() {
        let f = PolySymbol::linear_power(c(1.0, 0.0), c(1.0, 0.0), 9);
        assert_eq!(f.degree(), 9);
        assert!(matches!(f.check_degree(8), Err(Error::DegreeTooHigh { degree: 9, max: 8 })));
    }
}
