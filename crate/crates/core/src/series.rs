//! Univariate polynomials in the monomial and Chebyshev bases.

use serde::{Deserialize, Serialize};

/// Horner evaluation of `sum a_j x^j`.
pub fn eval_monomial(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub fn derivative_monomial(coeffs: &[f64]) -> Vec<f64> {
    coeffs.iter().enumerate().skip(1).map(|(j, &a)| j as f64 * a).collect()
}

/// Coefficient-space cosine between two coefficient vectors, padding the
/// shorter one with zeros. Sign-insensitive.
pub fn coefficient_cosine(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let dot: f64 = (0..len).map(|i| get(a, i) * get(b, i)).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).abs()
}

/// `sum c_j T_j(x)` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        ChebSeries { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        match self.coeffs.first() {
            Some(&c0) => x * b1 - b2 + c0,
            None => 0.0,
        }
    }

    pub fn derivative(&self) -> ChebSeries {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebSeries::new(vec![0.0]);
        }
        // c'_{j-1} = c'_{j+1} + 2 j c_j, with c'_0 halved at the end
        let mut d = vec![0.0; n + 1];
        for j in (1..n).rev() {
            d[j - 1] = d[j + 1] + 2.0 * j as f64 * self.coeffs[j];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        ChebSeries::new(d)
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    pub fn truncate(&mut self, degree: usize) {
        self.coeffs.truncate(degree + 1);
    }

    /// Monomial coefficients. Ill-conditioned for high degree; intended for
    /// reporting and for degrees up to a dozen or so.
    pub fn to_monomial(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n.max(1)];
        let mut t_prev = vec![1.0];
        let mut t_cur = vec![0.0, 1.0];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let t = match j {
                0 => &t_prev,
                1 => &t_cur,
                _ => {
                    let mut next = vec![0.0; j + 1];
                    for (i, &a) in t_cur.iter().enumerate() {
                        next[i + 1] += 2.0 * a;
                    }
                    for (i, &a) in t_prev.iter().enumerate() {
                        next[i] -= a;
                    }
                    t_prev = std::mem::replace(&mut t_cur, next);
                    &t_cur
                }
            };
            for (i, &a) in t.iter().enumerate() {
                out[i] += c * a;
            }
        }
        out
    }
}

/// Values and first two derivatives of `T_0..=T_n` at `x`.
pub fn chebyshev_with_derivatives(n: usize, x: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0; n + 1];
    let mut d1 = vec![0.0; n + 1];
    let mut d2 = vec![0.0; n + 1];
    t[0] = 1.0;
    if n >= 1 {
        t[1] = x;
        d1[1] = 1.0;
    }
    for j in 1..n {
        t[j + 1] = 2.0 * x * t[j] - t[j - 1];
        d1[j + 1] = 2.0 * t[j] + 2.0 * x * d1[j] - d1[j - 1];
        d2[j + 1] = 4.0 * d1[j] + 2.0 * x * d2[j] - d2[j - 1];
    }
    (t, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_matches_cosine_definition() {
        let s = ChebSeries::new(vec![0.5, -1.0, 0.25, 2.0]);
        for &x in &[-1.0, -0.3, 0.0, 0.8, 1.0f64] {
            let th = x.acos();
            let direct: f64 = s
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * (j as f64 * th).cos())
                .sum();
            assert!((s.eval(x) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_and_monomial_agree() {
        let s = ChebSeries::new(vec![0.3, 0.1, -0.7, 0.2, 0.5]);
        let m = s.to_monomial();
        let dm = derivative_monomial(&m);
        let ds = s.derivative();
        for &x in &[-0.9, -0.1, 0.4, 1.0] {
            assert!((eval_monomial(&m, x) - s.eval(x)).abs() < 1e-14);
            assert!((eval_monomial(&dm, x) - ds.eval(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn recurrence_derivatives_at_endpoints() {
        let (_, d1, d2) = chebyshev_with_derivatives(6, 1.0);
        for j in 0..=6 {
            let jf = j as f64;
            assert!((d1[j] - jf * jf).abs() < 1e-12);
            assert!((d2[j] - jf * jf * (jf * jf - 1.0) / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cosine_is_scale_invariant() {
        assert!((coefficient_cosine(&[1.0, 2.0], &[-2.0, -4.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!(coefficient_cosine(&[1.0, 0.0], &[0.0, 1.0]) < 1e-15);
    }
}
