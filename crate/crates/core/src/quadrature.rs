//! One-dimensional quadrature: adaptive Gauss-Kronrod on intervals and
//! Gauss-Jacobi rules for the radial weight.

use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const DEFAULT_MAX_DEPTH: usize = 40;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate is below `max(abs_tol, rel_tol * |total|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    integrate_with_depth(f, a, b, abs_tol, rel_tol, DEFAULT_MAX_DEPTH)
}

struct Panel {
    err: f64,
    lo: f64,
    hi: f64,
    val: f64,
    depth: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

pub fn integrate_with_depth<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (val, err) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        err,
        lo: a,
        hi: b,
        val,
        depth: 0,
    });
    let mut total = val;
    let mut total_err = err;
    loop {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= max_depth {
            return Err(Error::QuadratureFailure {
                a: worst.lo,
                b: worst.hi,
                depth: worst.depth,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk15(f, worst.lo, mid);
        let (v2, e2) = gk15(f, mid, worst.hi);
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            err: e1,
            lo: worst.lo,
            hi: mid,
            val: v1,
            depth: worst.depth + 1,
        });
        heap.push(Panel {
            err: e2,
            lo: mid,
            hi: worst.hi,
            val: v2,
            depth: worst.depth + 1,
        });
        if heap.len() % 64 == 0 {
            // refresh the running sums to keep cancellation error small
            total = heap.iter().map(|p| p.val).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(heap.iter().map(|p| p.val).sum())
}

/// Gauss-Jacobi nodes and weights for `(1-x)^alpha (1+x)^beta` on
/// `[-1, 1]`, by Golub-Welsch. Exact for polynomials of degree `2 n - 1`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let k = i as f64;
        let denom = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        jm[(i, i)] = if denom.abs() < 1e-300 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / denom
        };
        if i + 1 < n {
            let k = k + 1.0;
            let num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
            let den = (2.0 * k + ab).powi(2) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
            let off = (num / den).sqrt();
            jm[(i, i + 1)] = off;
            jm[(i + 1, i)] = off;
        }
    }
    let mu0 = jacobi_mass(alpha, beta);
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `int_{-1}^{1} (1-x)^alpha (1+x)^beta dx = 2^{alpha+beta+1} B(alpha+1, beta+1)`.
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp()
}

/// Exact moments `int w(x) x^j dx`, `j = 0..=jmax`, of the Jacobi weight.
///
/// Integrating `d/dx[(1-x)^{alpha+1} (1+x)^{beta+1} x^j]` over `[-1, 1]`
/// gives `m_{j+1} = ((beta - alpha) m_j + j m_{j-1}) / (alpha + beta + 2 + j)`.
pub fn jacobi_moments(alpha: f64, beta: f64, jmax: usize) -> Vec<f64> {
    let mut m = Vec::with_capacity(jmax + 1);
    m.push(jacobi_mass(alpha, beta));
    for j in 0..jmax {
        let prev = if j == 0 { 0.0 } else { m[j - 1] };
        let next = ((beta - alpha) * m[j] + j as f64 * prev) / (alpha + beta + 2.0 + j as f64);
        m.push(next);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn integrates_smooth_functions() {
        let v = integrate(&|x: f64| x.sin(), 0.0, PI, 1e-14, 1e-13).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-13);
        let v = integrate(&|x: f64| (-x * x).exp(), -6.0, 6.0, 1e-14, 1e-13).unwrap();
        assert_relative_eq!(v, PI.sqrt(), epsilon = 1e-12);
        let v = integrate(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 1e-12).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0, epsilon = 1e-11);
    }

    #[test]
    fn reports_depth_failure() {
        let r = integrate_with_depth(&|x: f64| (1.0 / x).sin(), 1e-9, 1.0, 1e-15, 0.0, 3);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn gauss_jacobi_is_exact_on_moments() {
        for &(a, b) in &[(0.0, 0.0), (0.5, 1.5), (0.0, 1.0), (2.5, 0.5)] {
            let (x, w) = gauss_jacobi(8, a, b);
            let m = jacobi_moments(a, b, 15);
            for (j, mj) in m.iter().enumerate() {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(j as i32)).sum();
                assert!((q - mj).abs() < 1e-13 * (1.0 + mj.abs()), "alpha={a} beta={b} j={j}");
            }
        }
    }

    #[test]
    fn legendre_moments() {
        // alpha = beta = 0: m_j = 2/(j+1) for even j, 0 for odd j
        let m = jacobi_moments(0.0, 0.0, 6);
        for (j, mj) in m.iter().enumerate() {
            let expect = if j % 2 == 0 { 2.0 / (j as f64 + 1.0) } else { 0.0 };
            assert_relative_eq!(*mj, expect, epsilon = 1e-14);
        }
    }
}
