//! Orthonormal bases of spherical harmonics as homogeneous harmonic
//! polynomials, radialization by leaf binning, and the addition formula.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::cartan::{rho_from_point, CartanPolynomial};
use crate::error::{Error, Result};
use crate::foliation::{make_foliation, sphere_volume, FoliationSpec};
use crate::polynomial::{monomials, Exponent, Polynomial, PolynomialBank};
use crate::quadrature::integrate;
use crate::sampling::{self, Moments};

pub const MAX_HARMONIC_DEGREE: u32 = 8;
pub const MAX_HARMONIC_N: u32 = 4;

pub type HarmonicPolynomial = Polynomial;

/// `C(n + l, l) - C(n + l - 2, l - 2)`.
pub fn expected_multiplicity(n: u32, degree: u32) -> usize {
    let c = |a: i64, b: i64| -> usize {
        if b < 0 || a < b {
            return 0;
        }
        let mut r: u128 = 1;
        for i in 0..b as u128 {
            r = r * (a as u128 - i) / (i + 1);
        }
        r as usize
    };
    let (n, l) = (n as i64, degree as i64);
    c(n + l, l) - c(n + l - 2, l - 2)
}

/// `int_{S^n} x^e = 2 prod Gamma((e_i + 1)/2) / Gamma((|e| + n + 1)/2)`,
/// zero when any exponent is odd.
pub fn sphere_monomial_integral(e: &[u32]) -> f64 {
    if e.iter().any(|&k| k % 2 == 1) {
        return 0.0;
    }
    let total: u32 = e.iter().sum();
    let log: f64 = e.iter().map(|&k| ln_gamma((k as f64 + 1.0) / 2.0)).sum::<f64>()
        - ln_gamma((total as f64 + e.len() as f64) / 2.0);
    2.0 * log.exp()
}

/// `<p, q>_{L^2(S^n)}` by exact monomial moments.
pub fn sphere_inner(p: &Polynomial, q: &Polynomial) -> f64 {
    let mut s = 0.0;
    let mut e = vec![0u32; p.dim()];
    for (a, ca) in p.terms() {
        for (b, cb) in q.terms() {
            for i in 0..e.len() {
                e[i] = a[i] + b[i];
            }
            s += ca * cb * sphere_monomial_integral(&e);
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisOrder {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    pub n: u32,
    pub degree: u32,
    pub multiplicity: usize,
    pub basis: Vec<HarmonicPolynomial>,
}

impl EigenBasis {
    pub fn eigenvalue(&self) -> f64 {
        let l = self.degree as f64;
        l * (l + self.n as f64 - 1.0)
    }

    pub fn bank(&self) -> PolynomialBank {
        PolynomialBank::new(&self.basis)
    }

    pub fn gram_matrix(&self) -> DMatrix<f64> {
        let m = self.basis.len();
        DMatrix::from_fn(m, m, |i, j| sphere_inner(&self.basis[i], &self.basis[j]))
    }

    /// `sum_j u_j(x) u_j(y)`.
    pub fn kernel(&self, x: &[f64], y: &[f64]) -> f64 {
        self.basis.iter().map(|u| u.eval(x) * u.eval(y)).sum()
    }

    /// `phi^[y](x) = sqrt(|S^n| / m) sum_j u_j(x) u_j(y)`.
    pub fn zonal(&self, x: &[f64], y: &[f64]) -> f64 {
        (sphere_volume(self.n) / self.multiplicity as f64).sqrt() * self.kernel(x, y)
    }
}

pub fn harmonic_basis(n: u32, degree: u32) -> Result<EigenBasis> {
    harmonic_basis_ordered(n, degree, BasisOrder::Forward)
}

/// Orthonormal basis of degree-`l` harmonics on `S^n`.
///
/// Writing `h = sum_j x_0^j h_j` with `h_j` in the remaining variables,
/// `Lap h = 0` is the recursion `h_{j+2} = -Lap' h_j / ((j+2)(j+1))`, so
/// each choice of one monomial for `h_0` (degree `l`) or `h_1` (degree
/// `l - 1`) determines a harmonic polynomial. These span the eigenspace
/// and are orthonormalized in `L^2(S^n)` in the requested order.
pub fn harmonic_basis_ordered(n: u32, degree: u32, order: BasisOrder) -> Result<EigenBasis> {
    if !(2..=MAX_HARMONIC_N).contains(&n) || degree > MAX_HARMONIC_DEGREE {
        return Err(Error::DimensionLimit {
            n,
            degree,
            max_degree: MAX_HARMONIC_DEGREE,
        });
    }
    let d = n as usize + 1;
    let rest: Vec<usize> = (1..d).collect();
    let mut gens = Vec::new();
    for start in 0..2u32 {
        if start > degree {
            break;
        }
        for e in monomials(d - 1, degree - start) {
            let mut full = vec![0u32; d];
            full[1..].copy_from_slice(&e);
            gens.push(harmonic_from_seed(
                Polynomial::monomial(full, 1.0),
                start,
                degree,
                &rest,
            ));
        }
    }
    if order == BasisOrder::Reverse {
        gens.reverse();
    }

    let mons = monomials(d, degree);
    let index: std::collections::HashMap<&[u32], usize> =
        mons.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    let size = mons.len();
    let mut gram = DMatrix::<f64>::zeros(size, size);
    let mut e = vec![0u32; d];
    for i in 0..size {
        for j in i..size {
            for k in 0..d {
                e[k] = mons[i][k] + mons[j][k];
            }
            let v = sphere_monomial_integral(&e);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let to_vec = |p: &Polynomial| -> Vec<f64> {
        let mut v = vec![0.0; size];
        for (e, c) in p.terms() {
            v[index[e.as_slice()]] = c;
        }
        v
    };
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..size)
            .map(|i| (0..size).map(|j| gram[(i, j)] * v[j]).sum())
            .collect()
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(gens.len());
    let mut gq: Vec<Vec<f64>> = Vec::with_capacity(gens.len());
    for p in &gens {
        let mut v = to_vec(p);
        for _ in 0..2 {
            for (qj, gqj) in q.iter().zip(&gq) {
                let proj = dot(gqj, &v);
                for (vi, qi) in v.iter_mut().zip(qj) {
                    *vi -= proj * qi;
                }
            }
        }
        let gv = apply(&v);
        let nrm = dot(&v, &gv).sqrt();
        v.iter_mut().for_each(|c| *c /= nrm);
        let gv: Vec<f64> = gv.iter().map(|c| c / nrm).collect();
        q.push(v);
        gq.push(gv);
    }

    let basis: Vec<Polynomial> = q
        .iter()
        .map(|v| {
            let mut p = Polynomial::zero(d);
            for (c, e) in v.iter().zip(&mons) {
                if *c != 0.0 {
                    p.add_term(e.clone(), *c);
                }
            }
            p
        })
        .collect();
    Ok(EigenBasis {
        n,
        degree,
        multiplicity: basis.len(),
        basis,
    })
}

fn harmonic_from_seed(seed: Polynomial, start: u32, degree: u32, rest: &[usize]) -> Polynomial {
    let d = seed.dim();
    let mut out = Polynomial::zero(d);
    let mut hj = seed;
    let mut j = start;
    loop {
        for (e, c) in hj.terms() {
            let mut shifted: Exponent = e.clone();
            shifted[0] += j;
            out.add_term(shifted, c);
        }
        if j + 2 > degree {
            break;
        }
        let next = hj
            .partial_laplacian(rest)
            .scale(-1.0 / ((j + 2) as f64 * (j + 1) as f64));
        if next.is_zero() {
            break;
        }
        hj = next;
        j += 2;
    }
    out
}

/// Random orthonormal basis of the tangent space at `x`.
pub fn tangent_frame<R: Rng + ?Sized>(rng: &mut R, x: &[f64]) -> Vec<Vec<f64>> {
    let d = x.len();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    while frame.len() < d - 1 {
        let mut v = sampling::random_unit_vector(rng, d);
        for _ in 0..2 {
            for b in std::iter::once(x).chain(frame.iter().map(|f| f.as_slice())) {
                let p: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let nrm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nrm > 1e-6 {
            v.iter_mut().for_each(|a| *a /= nrm);
            frame.push(v);
        }
    }
    frame
}

/// Laplace-Beltrami operator on the unit sphere by central second
/// differences along a tangent frame, stepping with the retraction
/// `x -> (x + h v) / |x + h v|`.
pub fn sphere_laplacian_fd<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], frame: &[Vec<f64>], h: f64) -> f64 {
    let f0 = f(x);
    let mut total = 0.0;
    let mut p = vec![0.0; x.len()];
    for v in frame {
        let mut step = |sign: f64| -> f64 {
            for i in 0..x.len() {
                p[i] = x[i] + sign * h * v[i];
            }
            let nrm: f64 = p.iter().map(|a| a * a).sum::<f64>().sqrt();
            p.iter_mut().for_each(|a| *a /= nrm);
            f(&p)
        };
        let fp = step(1.0);
        let fm = step(-1.0);
        // the retraction reaches geodesic distance atan(h)
        let s = h.atan();
        total += (fp - 2.0 * f0 + fm) / (s * s);
    }
    -total
}

/// Leaf averages of `f` binned by `rho` over `[0, D]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub bin_edges: Vec<f64>,
    pub means: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub counts: Vec<usize>,
    pub num_samples: usize,
    pub seed: u64,
}

impl RadialProfile {
    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

pub fn radialize<F>(
    f: &F,
    spec: &FoliationSpec,
    poly: &CartanPolynomial,
    num_samples: usize,
    num_bins: usize,
    seed: u64,
) -> Result<RadialProfile>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if num_samples < 10_000 || num_bins < 16 {
        return Err(Error::InvalidArgument(format!(
            "radialize needs num_samples >= 10^4 and num_bins >= 16 (got {num_samples}, {num_bins})"
        )));
    }
    let d = spec.ambient_dim();
    let width = spec.diameter / num_bins as f64;
    let parts = sampling::run_batches(num_samples, |b, len| -> Result<Vec<Moments>> {
        let mut rng = sampling::batch_rng(seed, sampling::DOMAIN_RADIALIZE, 0, b);
        let mut bins = vec![Moments::new(); num_bins];
        let mut x = vec![0.0; d];
        for _ in 0..len {
            sampling::fill_unit_vector(&mut rng, &mut x);
            let rho = rho_from_point(poly, spec, &x)?;
            let bin = ((rho / width) as usize).min(num_bins - 1);
            bins[bin].push(f(&x));
        }
        Ok(bins)
    });
    let mut bins = vec![Moments::new(); num_bins];
    for part in parts {
        for (acc, m) in bins.iter_mut().zip(part?) {
            acc.merge(&m);
        }
    }
    if let Some((bin, m)) = bins.iter().enumerate().find(|(_, m)| m.count < 10) {
        return Err(Error::EmptyBin { bin, count: m.count });
    }
    Ok(RadialProfile {
        bin_edges: (0..=num_bins).map(|i| i as f64 * width).collect(),
        means: bins.iter().map(|m| m.mean()).collect(),
        stderrs: bins.iter().map(|m| m.stderr()).collect(),
        counts: bins.iter().map(|m| m.count).collect(),
        num_samples,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditionReport {
    pub n: u32,
    pub degree: u32,
    pub multiplicity: usize,
    pub value_at_y: f64,
    pub expected_at_y: f64,
    /// `|phi^[y](y) - sqrt(m / |M|)|`
    pub residual_at_y: f64,
    /// Largest difference between points at equal distance from `y`.
    pub zonal_residual: f64,
    /// Largest difference of the kernel between the forward- and
    /// reverse-ordered bases.
    pub basis_independence_residual: f64,
    pub num_points: usize,
}

impl AdditionReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_at_y
            .max(self.zonal_residual)
            .max(self.basis_independence_residual)
    }
}

/// Evaluates the addition formula about `y` at every sample point. Zonal
/// dependence is tested by pairing each sample `x = s y + w` with
/// `x' = s y + |w| w'/|w'|`, where `w'` is the part of the next sample
/// orthogonal to `y`, so that `<x, y> = <x', y>`.
pub fn addition_formula_check(n: u32, degree: u32, y: &[f64], sample_points: &[Vec<f64>]) -> Result<AdditionReport> {
    let fwd = harmonic_basis_ordered(n, degree, BasisOrder::Forward)?;
    let rev = harmonic_basis_ordered(n, degree, BasisOrder::Reverse)?;
    let zonal_fwd = |x: &[f64]| fwd.zonal(x, y);
    let value_at_y = zonal_fwd(y);
    let expected_at_y = (fwd.multiplicity as f64 / sphere_volume(n)).sqrt();

    let split = |x: &[f64]| -> (f64, Vec<f64>) {
        let s: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        (s, x.iter().zip(y).map(|(a, b)| a - s * b).collect())
    };
    let mut zonal_res: f64 = 0.0;
    let mut indep_res: f64 = 0.0;
    let m = sample_points.len();
    for (i, x) in sample_points.iter().enumerate() {
        let other = &sample_points[(i + 1) % m];
        indep_res = indep_res.max((fwd.kernel(x, y) - rev.kernel(x, y)).abs());
        indep_res = indep_res.max((fwd.kernel(x, other) - rev.kernel(x, other)).abs());

        let (s, w) = split(x);
        let (_, w2) = split(other);
        let wn: f64 = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        let w2n: f64 = w2.iter().map(|a| a * a).sum::<f64>().sqrt();
        if w2n < 1e-8 {
            continue;
        }
        let partner: Vec<f64> = y.iter().zip(&w2).map(|(b, c)| s * b + wn * c / w2n).collect();
        zonal_res = zonal_res.max((zonal_fwd(x) - zonal_fwd(&partner)).abs());
    }
    Ok(AdditionReport {
        n,
        degree,
        multiplicity: fwd.multiplicity,
        value_at_y,
        expected_at_y,
        residual_at_y: (value_at_y - expected_at_y).abs(),
        zonal_residual: zonal_res,
        basis_independence_residual: indep_res,
        num_points: m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadializationCheck {
    pub num_bins: usize,
    pub num_samples: usize,
    /// `max |bin mean - exact bin average| / stderr`
    pub max_z: f64,
    pub pass: bool,
}

/// Radializes `phi^[y]` about `y` (the geodesic-sphere foliation with pole
/// `y`) and compares each bin mean with the exact bin average of the
/// function itself, `int_bin phi(t) sin^{n-1} t / int_bin sin^{n-1} t`.
pub fn addition_radialization_check(
    n: u32,
    degree: u32,
    y: &[f64],
    num_samples: usize,
    num_bins: usize,
    seed: u64,
) -> Result<RadializationCheck> {
    let basis = harmonic_basis(n, degree)?;
    let spec = make_foliation(n, 1, n - 1, n - 1)?;
    let d = n as usize + 1;
    let mut lin = Polynomial::zero(d);
    for (i, &yi) in y.iter().enumerate() {
        let mut e = vec![0; d];
        e[i] = 1;
        lin.add_term(e, yi);
    }
    let poly = CartanPolynomial::new(lin)?;
    let bank = basis.bank();
    let scale = (sphere_volume(n) / basis.multiplicity as f64).sqrt();
    let mut uy = vec![0.0; bank.len()];
    bank.eval_into(y, &mut uy);
    let phi = |x: &[f64]| -> f64 {
        let mut ux = vec![0.0; uy.len()];
        bank.eval_into(x, &mut ux);
        scale * ux.iter().zip(&uy).map(|(a, b)| a * b).sum::<f64>()
    };
    let profile = radialize(&phi, &spec, &poly, num_samples, num_bins, seed)?;

    // a unit vector orthogonal to y for the geodesic through y
    let mut rng = sampling::stream_rng(seed, sampling::DOMAIN_HARMONIC, 0);
    let u = tangent_frame(&mut rng, y).remove(0);
    let along = |t: f64| -> f64 {
        let x: Vec<f64> = y.iter().zip(&u).map(|(a, b)| t.cos() * a + t.sin() * b).collect();
        phi(&x)
    };
    let w = |t: f64| t.sin().powi(n as i32 - 1);
    let mut max_z: f64 = 0.0;
    for (i, (&mean, &se)) in profile.means.iter().zip(&profile.stderrs).enumerate() {
        let (a, b) = (profile.bin_edges[i], profile.bin_edges[i + 1]);
        let num = integrate(&|t| along(t) * w(t), a, b, 1e-13, 1e-11)?;
        let den = integrate(&w, a, b, 1e-13, 1e-11)?;
        max_z = max_z.max((mean - num / den).abs() / se.max(f64::MIN_POSITIVE));
    }
    Ok(RadializationCheck {
        num_bins,
        num_samples,
        max_z,
        pass: max_z <= 4.0,
    })
}
