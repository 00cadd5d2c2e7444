//! Sparse multivariate polynomials keyed by exponent vectors.
//!
//! Terms are stored as a map from multi-index to coefficient, which makes
//! formal differentiation exact: the Laplacian and gradient of a polynomial
//! are again polynomials with coefficients computed by integer arithmetic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Multi-index of a monomial `x_0^{e_0} ... x_{d-1}^{e_{d-1}}`.
pub type Exponent = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PolynomialRecord", try_from = "PolynomialRecord")]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Exponent, f64>,
}

/// Wire form: a flat list of `(exponent, coefficient)` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialRecord {
    pub ambient_dim: usize,
    pub terms: Vec<(Exponent, f64)>,
}

impl From<Polynomial> for PolynomialRecord {
    fn from(p: Polynomial) -> Self {
        PolynomialRecord {
            ambient_dim: p.dim,
            terms: p.terms.into_iter().collect(),
        }
    }
}

impl TryFrom<PolynomialRecord> for Polynomial {
    type Error = String;

    fn try_from(rec: PolynomialRecord) -> Result<Self, Self::Error> {
        let mut p = Polynomial::zero(rec.ambient_dim);
        for (e, c) in rec.terms {
            if e.len() != rec.ambient_dim {
                return Err(format!(
                    "exponent {:?} has length {} but ambient_dim is {}",
                    e,
                    e.len(),
                    rec.ambient_dim
                ));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Polynomial::zero(dim);
        p.add_term(e, 1.0);
        p
    }

    pub fn monomial(exponent: Exponent, coeff: f64) -> Self {
        let mut p = Polynomial::zero(exponent.len());
        p.add_term(exponent, coeff);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[u32]) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff * x^e`, dropping the term if it cancels exactly.
    pub fn add_term(&mut self, e: Exponent, coeff: f64) {
        assert_eq!(e.len(), self.dim, "exponent length must match dimension");
        if coeff == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    /// Drops terms whose magnitude is at most `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.abs() > tol);
    }

    /// Total degree if every term has the same degree; `None` for the zero
    /// polynomial or a mixed-degree one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Polynomial) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Polynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Formal partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * e[i] as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.dim).map(|i| self.partial(i)).collect()
    }

    /// Formal Euclidean Laplacian.
    pub fn laplacian(&self) -> Self {
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            for i in 0..self.dim {
                if e[i] >= 2 {
                    let mut d = e.clone();
                    d[i] -= 2;
                    out.add_term(d, c * (e[i] * (e[i] - 1)) as f64);
                }
            }
        }
        out
    }

    /// Formal Laplacian restricted to a subset of variables.
    pub fn partial_laplacian(&self, vars: &[usize]) -> Self {
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            for &i in vars {
                if e[i] >= 2 {
                    let mut d = e.clone();
                    d[i] -= 2;
                    out.add_term(d, c * (e[i] * (e[i] - 1)) as f64);
                }
            }
        }
        out
    }

    /// `|grad p|^2` as a polynomial.
    pub fn gradient_norm_sq(&self) -> Self {
        self.gradient()
            .iter()
            .fold(Polynomial::zero(self.dim), |acc, d| acc.add(&d.mul(d)))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// All exponent vectors of total degree `degree` in `dim` variables, in
/// lexicographically decreasing order (`x_0^degree` first).
pub fn monomials(dim: usize, degree: u32) -> Vec<Exponent> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(dim, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, degree, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Evaluates a family of polynomials that share one monomial list.
///
/// Monomials are computed once per point and each polynomial becomes a dot
/// product, which is what the Monte Carlo loops need.
#[derive(Debug, Clone)]
pub struct PolynomialBank {
    dim: usize,
    max_power: usize,
    exponents: Vec<Exponent>,
    // row-major: coeffs[p * exponents.len() + m]
    coeffs: Vec<f64>,
    count: usize,
}

impl PolynomialBank {
    pub fn new(polys: &[Polynomial]) -> Self {
        let dim = polys.first().map_or(0, |p| p.dim());
        let mut index: BTreeMap<Exponent, usize> = BTreeMap::new();
        for p in polys {
            assert_eq!(p.dim(), dim, "bank polynomials must share a dimension");
            for (e, _) in p.terms() {
                let next = index.len();
                index.entry(e.clone()).or_insert(next);
            }
        }
        let mut exponents = vec![Vec::new(); index.len()];
        for (e, &i) in &index {
            exponents[i] = e.clone();
        }
        let mut coeffs = vec![0.0; polys.len() * exponents.len()];
        for (pi, p) in polys.iter().enumerate() {
            for (e, c) in p.terms() {
                coeffs[pi * exponents.len() + index[e]] = c;
            }
        }
        let max_power = exponents.iter().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        PolynomialBank {
            dim,
            max_power,
            exponents,
            coeffs,
            count: polys.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Writes the value of every polynomial at `x` into `out`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.count);
        let stride = self.max_power + 1;
        let mut powers = [0.0f64; 64];
        let mut heap;
        let pw: &mut [f64] = if self.dim * stride <= powers.len() {
            &mut powers[..self.dim * stride]
        } else {
            heap = vec![0.0; self.dim * stride];
            &mut heap
        };
        for (i, &xi) in x.iter().enumerate() {
            let row = &mut pw[i * stride..(i + 1) * stride];
            row[0] = 1.0;
            for k in 1..stride {
                row[k] = row[k - 1] * xi;
            }
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        let nm = self.exponents.len();
        for (m, e) in self.exponents.iter().enumerate() {
            let mut v = 1.0;
            for (i, &k) in e.iter().enumerate() {
                v *= pw[i * stride + k as usize];
            }
            for (p, o) in out.iter_mut().enumerate() {
                *o += self.coeffs[p * nm + m] * v;
            }
        }
    }
}
