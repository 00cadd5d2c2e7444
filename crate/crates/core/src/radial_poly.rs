//! Three independent constructions of the radial eigenpolynomials in
//! `x = cos(g t)`: the power-series recurrence (c = 0), orthogonalization
//! against the radial weight, and the explicit expansion of the Rodrigues
//! formula.

use crate::error::{Error, Result};
use crate::foliation::FoliationSpec;
use crate::quadrature::jacobi_moments;
use crate::spectrum::jacobi_form;

/// Degree-`k` solution by the two-step recurrence
/// `a_{j+2} = (j (j + a) - mu) / ((j + 2)(j + 1)) a_j`, seeded with
/// `a_0 = 1` (k even) or `a_1 = 1` (k odd). Requires `c = 0`.
pub fn recurrence_polynomial(spec: &FoliationSpec, k: usize) -> Result<Vec<f64>> {
    if spec.c != 0.0 {
        return Err(Error::Unsupported(format!(
            "the power-series recurrence needs c = 0 (got c = {}); use gram_polynomial",
            spec.c
        )));
    }
    let (a, _) = jacobi_form(spec);
    let mu = k as f64 * (k as f64 + a);
    let mut coeffs = vec![0.0; k + 1];
    coeffs[k % 2] = 1.0;
    let mut j = k % 2;
    while j + 2 <= k {
        let jf = j as f64;
        coeffs[j + 2] = (jf * (jf + a) - mu) / ((jf + 2.0) * (jf + 1.0)) * coeffs[j];
        j += 2;
    }
    Ok(coeffs)
}

/// Degree-`k` orthogonal polynomial for `(1-x)^alpha (1+x)^beta`, by
/// Gram-Schmidt on `1, x, ..., x^k` with exact moments. Normalized to unit
/// weighted norm and positive leading coefficient.
pub fn gram_polynomial(spec: &FoliationSpec, k: usize) -> Vec<f64> {
    let (alpha, beta) = spec.jacobi_exponents();
    let m = jacobi_moments(alpha, beta, 2 * k);
    let inner = |p: &[f64], q: &[f64]| -> f64 {
        let mut s = 0.0;
        for (i, pi) in p.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                s += pi * qj * m[i + j];
            }
        }
        s
    };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    for d in 0..=k {
        let mut v = vec![0.0; d + 1];
        v[d] = 1.0;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let proj = inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let nrm = inner(&v, &v).sqrt();
        v.iter_mut().for_each(|c| *c /= nrm);
        if v[d] < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        basis.push(v);
    }
    basis.pop().expect("k + 1 >= 1 polynomials")
}

/// Monomial coefficients of the classical Jacobi polynomial
/// `sum_s C(k+alpha, k-s) C(k+beta, s) ((x-1)/2)^s ((x+1)/2)^{k-s}`,
/// which is the Rodrigues expression up to the factor `(-2)^k k!`.
pub fn rodrigues_polynomial(spec: &FoliationSpec, k: usize) -> Vec<f64> {
    let (alpha, beta) = spec.jacobi_exponents();
    let mut out = vec![0.0; k + 1];
    for s in 0..=k {
        let w = binom(k as f64 + alpha, k - s) * binom(k as f64 + beta, s) / 2f64.powi(k as i32);
        // (x - 1)^s (x + 1)^{k-s}
        let mut p = vec![1.0];
        for _ in 0..s {
            p = mul_linear(&p, -1.0);
        }
        for _ in s..k {
            p = mul_linear(&p, 1.0);
        }
        for (o, c) in out.iter_mut().zip(&p) {
            *o += w * c;
        }
    }
    out
}

// p(x) * (x + r)
fn mul_linear(p: &[f64], r: f64) -> Vec<f64> {
    let mut q = vec![0.0; p.len() + 1];
    for (i, &c) in p.iter().enumerate() {
        q[i + 1] += c;
        q[i] += r * c;
    }
    q
}

// generalized binomial coefficient C(z, m)
fn binom(z: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (z - i as f64) / (i as f64 + 1.0))
}
