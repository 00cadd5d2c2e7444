//! Radial spectrum by Chebyshev collocation in `x = cos(g t)`.
//!
//! In this variable the radial eigenvalue problem becomes
//! `(1 - x^2) y'' + (b - (a + 1) x) y' + mu y = 0` on `[-1, 1]` with
//! `a = (n-1)/g`, `b = c/g^2`, `mu = lambda/g^2`, and bounded solutions are
//! polynomials. The operator maps polynomials of degree `N` into
//! themselves, so collocation at the `N + 1` Chebyshev-Gauss-Lobatto points
//! yields the square generalized problem `A u = -mu B u` with no boundary
//! rows: boundedness is built into the ansatz.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::FoliationSpec;
use crate::quadrature::gauss_jacobi;
use crate::series::{chebyshev_with_derivatives, ChebSeries};

/// `g k (g k + n - 1)` for `k = 0..=kmax`.
pub fn closed_form_spectrum(spec: &FoliationSpec, kmax: usize) -> Vec<f64> {
    let g = spec.g as f64;
    let n = spec.n as f64;
    (0..=kmax)
        .map(|k| {
            let gk = g * k as f64;
            gk * (gk + n - 1.0)
        })
        .collect()
}

/// Coefficients `(a, b)` of the Jacobi form: `a = (n-1)/g`, `b = c/g^2`.
pub fn jacobi_form(spec: &FoliationSpec) -> (f64, f64) {
    let g = spec.g as f64;
    ((spec.n as f64 - 1.0) / g, spec.c / (g * g))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Basis degree is `kmax + extra_basis`.
    pub extra_basis: usize,
    /// Relative residual tolerance on the 64-point check grid.
    pub residual_tol: f64,
    /// Minimum relative gap between consecutive eigenvalues.
    pub gap_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            extra_basis: 32,
            residual_tol: 1e-8,
            gap_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialEigenpair {
    pub k: usize,
    pub lambda: f64,
    pub g: u32,
    /// Monomial coefficients `a_0..a_k` of `y(x)`; `psi(t) = y(cos(g t))`.
    pub coeffs: Vec<f64>,
    /// The same polynomial in the Chebyshev basis, used for evaluation.
    pub cheb: ChebSeries,
    /// Relative residual on the check grid.
    pub residual: f64,
}

impl RadialEigenpair {
    pub fn eval_x(&self, x: f64) -> f64 {
        self.cheb.eval(x)
    }

    pub fn psi(&self, t: f64) -> f64 {
        self.cheb.eval((self.g as f64 * t).cos())
    }

    /// `d psi / dt`.
    pub fn dpsi(&self, t: f64) -> f64 {
        let gt = self.g as f64 * t;
        -(self.g as f64) * gt.sin() * self.cheb.derivative().eval(gt.cos())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMetadata {
    pub basis_degree: usize,
    pub retried_with_doubled_basis: bool,
    pub max_residual: f64,
    pub residual_tol: f64,
    pub gap_tol: f64,
    pub min_relative_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSolution {
    pub eigenpairs: Vec<RadialEigenpair>,
    pub metadata: SolverMetadata,
}

/// The `kmax + 1` lowest radial eigenpairs with default options.
pub fn solve_radial_spectrum(spec: &FoliationSpec, kmax: usize) -> Result<Vec<RadialEigenpair>> {
    Ok(solve_radial_spectrum_with(spec, kmax, &SolverOptions::default())?.eigenpairs)
}

pub fn solve_radial_spectrum_with(spec: &FoliationSpec, kmax: usize, opts: &SolverOptions) -> Result<SpectrumSolution> {
    let n_basis = kmax + opts.extra_basis.max(1);
    let first = solve_at(spec, kmax, n_basis, opts)?;
    if first.metadata.max_residual <= opts.residual_tol {
        return Ok(first);
    }
    let second = solve_at(spec, kmax, 2 * n_basis, opts)?;
    if second.metadata.max_residual <= opts.residual_tol {
        let mut s = second;
        s.metadata.retried_with_doubled_basis = true;
        return Ok(s);
    }
    Err(Error::Convergence {
        basis: n_basis,
        residual: first.metadata.max_residual,
        basis_doubled: 2 * n_basis,
        residual_doubled: second.metadata.max_residual,
        tol: opts.residual_tol,
    })
}

fn solve_at(spec: &FoliationSpec, kmax: usize, nb: usize, opts: &SolverOptions) -> Result<SpectrumSolution> {
    let (a, b) = jacobi_form(spec);
    let g2 = (spec.g * spec.g) as f64;
    let size = nb + 1;
    let mut amat = DMatrix::<f64>::zeros(size, size);
    let mut bmat = DMatrix::<f64>::zeros(size, size);
    for i in 0..size {
        let x = (std::f64::consts::PI * i as f64 / nb as f64).cos();
        let (t, d1, d2) = chebyshev_with_derivatives(nb, x);
        for j in 0..size {
            amat[(i, j)] = (1.0 - x * x) * d2[j] + (b - (a + 1.0) * x) * d1[j];
            bmat[(i, j)] = t[j];
        }
    }
    let lu = bmat.lu();
    let op = -lu
        .solve(&amat)
        .ok_or_else(|| Error::InvalidArgument("singular collocation matrix".into()))?;

    let mut mus: Vec<f64> = op.complex_eigenvalues().iter().map(|z| z.re).collect();
    mus.sort_by(|p, q| p.total_cmp(q));
    mus.truncate(kmax + 1);

    let mut min_gap = f64::INFINITY;
    for w in mus.windows(2) {
        let gap = (w[1] - w[0]) / w[1].abs().max(f64::MIN_POSITIVE);
        min_gap = min_gap.min(gap);
        if gap <= opts.gap_tol {
            return Err(Error::NotSimple {
                lower: g2 * w[0],
                upper: g2 * w[1],
                tol: opts.gap_tol,
            });
        }
    }

    let (gx, gw) = gauss_jacobi(kmax + 2, spec.jacobi_exponents().0, spec.jacobi_exponents().1);
    let check: Vec<f64> = (0..64)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / 64.0).cos())
        .collect();

    let mut pairs = Vec::with_capacity(kmax + 1);
    let mut max_res: f64 = 0.0;
    for (k, &mu0) in mus.iter().enumerate() {
        let (mu, v) = inverse_iteration(&op, mu0);
        let mut cheb = ChebSeries::new(v.iter().copied().collect());
        cheb.truncate(k);
        let norm2: f64 = gx.iter().zip(&gw).map(|(&x, &w)| w * cheb.eval(x).powi(2)).sum();
        let mut s = 1.0 / norm2.sqrt();
        if cheb.eval(1.0) < 0.0 {
            s = -s;
        }
        cheb.scale(s);
        let residual = relative_residual(&cheb, a, b, mu, &check);
        max_res = max_res.max(residual);
        pairs.push(RadialEigenpair {
            k,
            lambda: g2 * mu,
            g: spec.g,
            coeffs: cheb.to_monomial(),
            cheb,
            residual,
        });
    }
    Ok(SpectrumSolution {
        eigenpairs: pairs,
        metadata: SolverMetadata {
            basis_degree: nb,
            retried_with_doubled_basis: false,
            max_residual: max_res,
            residual_tol: opts.residual_tol,
            gap_tol: opts.gap_tol,
            min_relative_gap: if mus.len() > 1 { min_gap } else { f64::INFINITY },
        },
    })
}

/// Eigenvector for the eigenvalue nearest `shift`, and its Rayleigh
/// quotient.
fn inverse_iteration(op: &DMatrix<f64>, shift: f64) -> (f64, DVector<f64>) {
    let size = op.nrows();
    // a shift exactly on the eigenvalue makes the factorization singular
    let sigma = shift + 1e-10 * (1.0 + shift.abs());
    let shifted = op - DMatrix::<f64>::identity(size, size) * sigma;
    let lu = shifted.lu();
    let mut v = DVector::<f64>::from_fn(size, |i, _| 1.0 / (1.0 + i as f64));
    for _ in 0..4 {
        match lu.solve(&v) {
            Some(w) => {
                let nrm = w.norm();
                if !nrm.is_finite() || nrm == 0.0 {
                    break;
                }
                v = w / nrm;
            }
            None => break,
        }
    }
    let mv = op * &v;
    (v.dot(&mv) / v.dot(&v), v)
}

/// `max |L y + mu y| / max |y|` over the check points.
pub fn relative_residual(y: &ChebSeries, a: f64, b: f64, mu: f64, points: &[f64]) -> f64 {
    let d1 = y.derivative();
    let d2 = d1.derivative();
    let mut res: f64 = 0.0;
    let mut ymax: f64 = 0.0;
    for &x in points {
        let v = y.eval(x);
        let r = (1.0 - x * x) * d2.eval(x) + (b - (a + 1.0) * x) * d1.eval(x) + mu * v;
        res = res.max(r.abs());
        ymax = ymax.max(v.abs());
    }
    res / ymax
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::make_foliation;
    use crate::series::coefficient_cosine;

    #[test]
    fn closed_form_examples() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        assert_eq!(closed_form_spectrum(&s, 3), vec![0.0, 8.0, 24.0, 48.0]);
        let s = make_foliation(2, 1, 1, 1).unwrap();
        assert_eq!(closed_form_spectrum(&s, 2), vec![0.0, 2.0, 6.0]);
        let s = make_foliation(4, 3, 1, 1).unwrap();
        assert_eq!(closed_form_spectrum(&s, 1), vec![0.0, 18.0]);
    }

    #[test]
    fn solver_matches_closed_form() {
        for &(n, g, m0, m1) in &[(3, 2, 1, 1), (5, 2, 1, 3), (4, 3, 1, 1), (13, 6, 2, 2)] {
            let s = make_foliation(n, g, m0, m1).unwrap();
            let eig = solve_radial_spectrum(&s, 10).unwrap();
            let exact = closed_form_spectrum(&s, 10);
            for (e, x) in eig.iter().zip(&exact) {
                assert!((e.lambda - x).abs() <= 1e-8 * (1.0 + x), "{n} {g}: {} vs {x}", e.lambda);
                assert!(e.residual <= 1e-8);
            }
        }
    }

    #[test]
    fn low_eigenfunctions() {
        let s = make_foliation(2, 1, 1, 1).unwrap();
        let eig = solve_radial_spectrum(&s, 1).unwrap();
        assert!(coefficient_cosine(&eig[1].coeffs, &[0.0, 1.0]) > 1.0 - 1e-12);
        for &t in &[0.2, 1.0, 2.5] {
            assert!((eig[1].psi(t) / eig[1].psi(0.0) - f64::cos(t)).abs() < 1e-12);
        }

        let s = make_foliation(5, 2, 1, 3).unwrap();
        let eig = solve_radial_spectrum(&s, 1).unwrap();
        assert!((eig[1].lambda - 12.0).abs() < 1e-9);
        assert!(coefficient_cosine(&eig[1].coeffs, &[1.0, -3.0]) > 1.0 - 1e-12);
    }

    #[test]
    fn eigenfunctions_are_normalized_and_oriented() {
        let s = make_foliation(7, 2, 2, 4).unwrap();
        let eig = solve_radial_spectrum(&s, 6).unwrap();
        let (al, be) = s.jacobi_exponents();
        let (x, w) = gauss_jacobi(20, al, be);
        for e in &eig {
            assert_eq!(e.coeffs.len(), e.k + 1);
            assert!(e.eval_x(1.0) > 0.0);
            let n2: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * e.eval_x(*xi).powi(2)).sum();
            assert!((n2 - 1.0).abs() < 1e-12);
            for f in &eig {
                if f.k != e.k {
                    let ip: f64 = x
                        .iter()
                        .zip(&w)
                        .map(|(xi, wi)| wi * e.eval_x(*xi) * f.eval_x(*xi))
                        .sum();
                    assert!(ip.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn high_index_eigenpairs_for_zero_scans() {
        let s = make_foliation(2, 1, 1, 1).unwrap();
        let sol = solve_radial_spectrum_with(&s, 32, &SolverOptions::default()).unwrap();
        let exact = closed_form_spectrum(&s, 32);
        for (e, x) in sol.eigenpairs.iter().zip(&exact) {
            assert!((e.lambda - x).abs() <= 1e-8 * (1.0 + x));
        }
        assert!(sol.metadata.max_residual <= 1e-8);
    }

    #[test]
    fn derivative_in_t() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let eig = solve_radial_spectrum(&s, 3).unwrap();
        let h = 1e-6;
        for e in &eig {
            for &t in &[0.3, 0.7, 1.2] {
                let fd = (e.psi(t + h) - e.psi(t - h)) / (2.0 * h);
                assert!((fd - e.dpsi(t)).abs() < 1e-6 * (1.0 + fd.abs()));
            }
        }
    }
}
