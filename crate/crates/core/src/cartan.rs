//! Cartan polynomials for `g = 1, 2, 3` and the distance function they
//! induce on the sphere.
//!
//! A Cartan polynomial `p` is homogeneous of degree `g` with
//! `|grad p|^2 = g^2 |x|^{2g-2}` and `Lap p` proportional to `|x|^{g-2}`.
//! Its restriction `F` to `S^n` satisfies `F = cos(g rho)` where `rho` is
//! the distance to the focal set `M+ = {F = 1}`.
//!
//! Orientation: the Euclidean Laplacian is fixed by requiring the radial
//! geometry of `F` to match the density `theta`, whose order of vanishing
//! at `M+` is `m+ = (n-1)/g - c/g^2`. On the sphere
//! `Lap_S F = g(g+n-1) F - Lap p`, so this forces `Lap p = +c |x|^{g-2}`;
//! for `g = 2` the positive block therefore has `m1 + 1` squares and the
//! focal set `{F = 1}` has codimension `m0 + 1`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::FoliationSpec;
use crate::polynomial::Polynomial;
use crate::sampling;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanPolynomial {
    pub degree: u32,
    pub poly: Polynomial,
    #[serde(skip)]
    gradient: Vec<Polynomial>,
}

impl CartanPolynomial {
    pub fn new(poly: Polynomial) -> Result<Self> {
        let degree = poly
            .homogeneous_degree()
            .ok_or_else(|| Error::InvalidArgument("Cartan polynomial must be homogeneous".into()))?;
        let gradient = poly.gradient();
        Ok(CartanPolynomial { degree, poly, gradient })
    }

    pub fn ambient_dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval(x)
    }

    /// Euclidean gradient at `x`.
    pub fn gradient_at(&self, x: &[f64], out: &mut [f64]) {
        if self.gradient.len() != self.poly.dim() {
            // deserialized value: gradient was skipped
            for (o, d) in out.iter_mut().zip(self.poly.gradient()) {
                *o = d.eval(x);
            }
            return;
        }
        for (o, d) in out.iter_mut().zip(&self.gradient) {
            *o = d.eval(x);
        }
    }

    /// Re-derives the cached gradient after deserialization.
    pub fn rehydrate(mut self) -> Self {
        self.gradient = self.poly.gradient();
        self
    }
}

/// The explicit Cartan polynomial of the foliation.
pub fn cartan_polynomial(spec: &FoliationSpec) -> Result<CartanPolynomial> {
    let d = spec.ambient_dim();
    let poly = match spec.g {
        1 => Polynomial::coordinate(d, 0),
        2 => {
            let positive = spec.m1 as usize + 1;
            let mut p = Polynomial::zero(d);
            for i in 0..d {
                let mut e = vec![0; d];
                e[i] = 2;
                p.add_term(e, if i < positive { 1.0 } else { -1.0 });
            }
            p
        }
        3 => {
            if spec.n != 4 {
                return Err(Error::Unsupported(format!(
                    "g = 3 Cartan cubic implemented for m0 = m1 = 1 (n = 4) only, got n = {}",
                    spec.n
                )));
            }
            cartan_cubic()
        }
        g => return Err(Error::UnsupportedG(g)),
    };
    CartanPolynomial::new(poly)
}

/// Cartan's isoparametric cubic on `R^5`:
/// `x5^3 + 3/2 x5 (x1^2 + x2^2 - 2 x3^2 - 2 x4^2) + 3 sqrt3 / 2 x4 (x1^2 - x2^2) + 3 sqrt3 x1 x2 x3`.
fn cartan_cubic() -> Polynomial {
    let s3 = 3f64.sqrt();
    let terms: [([u32; 5], f64); 8] = [
        ([0, 0, 0, 0, 3], 1.0),
        ([2, 0, 0, 0, 1], 1.5),
        ([0, 2, 0, 0, 1], 1.5),
        ([0, 0, 2, 0, 1], -3.0),
        ([0, 0, 0, 2, 1], -3.0),
        ([2, 0, 0, 1, 0], 1.5 * s3),
        ([0, 2, 0, 1, 0], -1.5 * s3),
        ([1, 1, 1, 0, 0], 3.0 * s3),
    ];
    let mut p = Polynomial::zero(5);
    for (e, c) in terms {
        p.add_term(e.to_vec(), c);
    }
    p
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub num_samples: usize,
    pub tol: f64,
    /// `max |Lap p(x) - c |x|^{g-2}|`
    pub laplacian_residual: f64,
    /// `max ||grad p(x)|^2 - g^2 |x|^{2g-2}|`
    pub gradient_residual: f64,
    pub pass: bool,
}

/// Checks the two Cartan identities at points drawn uniformly from the
/// unit ball. Derivatives are formal, so residuals are pure rounding for a
/// valid polynomial.
pub fn validate_cartan(
    p: &CartanPolynomial,
    spec: &FoliationSpec,
    num_samples: usize,
    tol: f64,
    seed: u64,
) -> ValidationReport {
    let d = p.ambient_dim();
    let g = spec.g as i32;
    let lap = p.poly.laplacian();
    let grad2 = p.poly.gradient_norm_sq();
    let mut rng = sampling::stream_rng(seed, sampling::DOMAIN_VALIDATION, 0);
    let mut x = vec![0.0; d];
    let mut lap_res: f64 = 0.0;
    let mut grad_res: f64 = 0.0;
    let dim_ok = d == spec.ambient_dim() && p.degree == spec.g;
    for _ in 0..num_samples.max(1) {
        // uniform in the ball: Gaussian direction, radius U^{1/d}
        let mut r2: f64 = 0.0;
        for xi in x.iter_mut() {
            *xi = rng.sample(StandardNormal);
            r2 += *xi * *xi;
        }
        let radius = rng.random::<f64>().powf(1.0 / d as f64) / r2.sqrt();
        x.iter_mut().for_each(|xi| *xi *= radius);
        let nrm2: f64 = x.iter().map(|v| v * v).sum();
        let nrm = nrm2.sqrt();
        let lap_expect = spec.c * nrm.powi(g - 2);
        let grad_expect = (g * g) as f64 * nrm.powi(2 * g - 2);
        lap_res = lap_res.max((lap.eval(&x) - lap_expect).abs());
        grad_res = grad_res.max((grad2.eval(&x) - grad_expect).abs());
    }
    ValidationReport {
        num_samples: num_samples.max(1),
        tol,
        laplacian_residual: lap_res,
        gradient_residual: grad_res,
        pass: dim_ok && lap_res <= tol && grad_res <= tol,
    }
}

/// Distance from a unit vector to the focal set `M+`, `arccos(F(x)) / g`.
pub fn rho_from_point(p: &CartanPolynomial, spec: &FoliationSpec, x: &[f64]) -> Result<f64> {
    let nrm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("point is not on the unit sphere (|x| = {nrm})")));
    }
    let f = p.eval(x);
    if f.abs() > 1.0 + 1e-9 {
        return Err(Error::Domain(format!(
            "|F(x)| = {} exceeds 1; not a valid Cartan polynomial",
            f.abs()
        )));
    }
    Ok(f.clamp(-1.0, 1.0).acos() / spec.g as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::make_foliation;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    #[test]
    fn explicit_polynomials() {
        let s2 = make_foliation(2, 1, 1, 1).unwrap();
        let p = cartan_polynomial(&s2).unwrap();
        assert_eq!(p.poly, Polynomial::coordinate(3, 0));

        let s3 = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s3).unwrap();
        let x = [0.1, 0.2, 0.3, 0.4];
        assert!((p.eval(&x) - (0.01 + 0.04 - 0.09 - 0.16)).abs() < 1e-15);

        assert!(matches!(
            cartan_polynomial(&make_foliation(5, 4, 1, 1).unwrap()),
            Err(Error::UnsupportedG(4))
        ));
        assert!(matches!(
            cartan_polynomial(&make_foliation(7, 6, 1, 1).unwrap()),
            Err(Error::UnsupportedG(6))
        ));
    }

    #[test]
    fn all_supported_polynomials_validate() {
        for &(n, g, m0, m1) in &[
            (2, 1, 1, 1),
            (3, 1, 2, 2),
            (3, 2, 1, 1),
            (5, 2, 1, 3),
            (5, 2, 3, 1),
            (7, 2, 2, 4),
            (4, 3, 1, 1),
        ] {
            let spec = make_foliation(n, g, m0, m1).unwrap();
            let p = cartan_polynomial(&spec).unwrap();
            let r = validate_cartan(&p, &spec, 1000, 1e-10, 7);
            assert!(r.pass, "{spec:?}: {r:?}");
        }
    }

    #[test]
    fn negative_control_fails_validation() {
        let spec = make_foliation(3, 2, 1, 1).unwrap();
        // x1^2 on R^3 claimed as a g = 2 Cartan polynomial
        let p = CartanPolynomial::new(Polynomial::monomial(vec![2, 0, 0], 1.0)).unwrap();
        let r = validate_cartan(&p, &spec, 1000, 1e-9, 1);
        assert!(!r.pass);
        assert!(r.gradient_residual > 1e-3);
    }

    #[test]
    fn rho_examples() {
        let s2 = make_foliation(2, 1, 1, 1).unwrap();
        let p = cartan_polynomial(&s2).unwrap();
        assert_eq!(rho_from_point(&p, &s2, &[1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((rho_from_point(&p, &s2, &[-1.0, 0.0, 0.0]).unwrap() - PI).abs() < 1e-15);
        assert!(rho_from_point(&p, &s2, &[2.0, 0.0, 0.0]).is_err());

        let s3 = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for &(u, v) in &[(0.0, 0.0), (0.3, 2.0), (1.7, -0.4)] {
            let x = [h * f64::cos(u), h * f64::sin(u), h * f64::cos(v), h * f64::sin(v)];
            let rho = rho_from_point(&p, &s3, &x).unwrap();
            assert!((rho - PI / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tube_indicator_matches_level_set() {
        let spec = make_foliation(4, 3, 1, 1).unwrap();
        let p = cartan_polynomial(&spec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let t: f64 = 0.4;
        let mut disagreements = 0;
        for _ in 0..10_000 {
            let x = sampling::random_unit_vector(&mut rng, 5);
            let f = p.eval(&x);
            let threshold = (3.0 * t).cos();
            if (f - threshold).abs() < 1e-10 {
                continue;
            }
            let rho = rho_from_point(&p, &spec, &x).unwrap();
            if (rho < t) != (f > threshold) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn serialized_polynomial_roundtrips() {
        let spec = make_foliation(4, 3, 1, 1).unwrap();
        let p = cartan_polynomial(&spec).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let q: CartanPolynomial = serde_json::from_str(&text).unwrap();
        let q = q.rehydrate();
        assert_eq!(p, q);
    }
}
