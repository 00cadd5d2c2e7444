//! Arc integrals on `S^1`: Fourier coefficients of `c -> int_c^{c+2 alpha} f`,
//! classification of arcs by rationality of `alpha / pi`, and the multi-arc
//! tubes of `F = cos(k x)`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;

/// `a0 + sum_{j=1}^J (a_j cos jx + b_j sin jx)`; `a[j-1] = a_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierFunction {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl FourierFunction {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(
                "cosine and sine coefficient lists differ in length".into(),
            ));
        }
        Ok(FourierFunction { a0, a, b })
    }

    pub fn zero(order: usize) -> Self {
        FourierFunction {
            a0: 0.0,
            a: vec![0.0; order],
            b: vec![0.0; order],
        }
    }

    pub fn cosine(j: usize) -> Self {
        let mut f = Self::zero(j);
        if j == 0 {
            f.a0 = 1.0;
        } else {
            f.a[j - 1] = 1.0;
        }
        f
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, order: usize) -> Self {
        let mut draw = || rng.random_range(-1.0..1.0);
        FourierFunction {
            a0: draw(),
            a: (0..order).map(|_| draw()).collect(),
            b: (0..order).map(|_| draw()).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut s = self.a0;
        for (j, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let jx = (j + 1) as f64 * x;
            s += a * jx.cos() + b * jx.sin();
        }
        s
    }

    pub fn add(&self, other: &FourierFunction) -> FourierFunction {
        let order = self.order().max(other.order());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        FourierFunction {
            a0: self.a0 + other.a0,
            a: (0..order).map(|i| get(&self.a, i) + get(&other.a, i)).collect(),
            b: (0..order).map(|i| get(&self.b, i) + get(&other.b, i)).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.a.iter().chain(&self.b).fold(self.a0.abs(), |m, v| m.max(v.abs()))
    }

    fn to_vector(&self) -> Vec<f64> {
        let mut v = vec![self.a0];
        v.extend_from_slice(&self.a);
        v.extend_from_slice(&self.b);
        v
    }
}

/// Coefficients of `g(c) = int_c^{c+2 alpha} f`. The `j`-th term of `g` is
/// `(2/j) sin(j alpha) (a_j cos(j(c + alpha)) + b_j sin(j(c + alpha)))`.
pub fn arc_integral_coeffs(f: &FourierFunction, alpha: f64) -> FourierFunction {
    let mut g = FourierFunction::zero(f.order());
    g.a0 = 2.0 * f.a0 * alpha;
    for j in 1..=f.order() {
        let jf = j as f64;
        let s = 2.0 / jf * (jf * alpha).sin();
        let (sa, ca) = (jf * alpha).sin_cos();
        let (aj, bj) = (f.a[j - 1], f.b[j - 1]);
        g.a[j - 1] = s * (aj * ca + bj * sa);
        g.b[j - 1] = s * (bj * ca - aj * sa);
    }
    g
}

/// Best rational approximation `p/q` of `x` with `q <= max_den`, from the
/// continued-fraction convergents, if it matches `x` to `tol`.
pub fn rational_approximation(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as u64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

pub const DEFAULT_MAX_DENOMINATOR: u64 = 10_000;
pub const DEFAULT_TRUNCATION: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityCheck {
    /// The statement is checked for Fourier modes `j <= truncation` only.
    pub truncation: usize,
    /// Smallest singular value of `f -> g` on the truncated space.
    pub min_singular_value: f64,
    pub trials: usize,
    /// Largest `|f|` implied by `|g| < 1e-12` under this map.
    pub implied_coeff_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ArcClassification {
    Fails {
        alpha_over_pi: f64,
        m: u64,
        n: u64,
        /// The witness is `cos(n x)`.
        witness_frequency: u64,
        /// `max |g|` for the witness; zero up to rounding.
        witness_residual: f64,
    },
    HasProperty {
        alpha_over_pi: f64,
        /// No rational `m/n` with `n` up to this cap matched `alpha / pi`.
        max_denominator: u64,
        injectivity: InjectivityCheck,
    },
}

impl ArcClassification {
    pub fn fails(&self) -> bool {
        matches!(self, ArcClassification::Fails { .. })
    }
}

pub fn pompeiu_classify_arc(alpha: f64, max_den: u64) -> Result<ArcClassification> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        return Err(Error::Domain(format!("alpha = {alpha} outside (0, pi)")));
    }
    let s = alpha / std::f64::consts::PI;
    if let Some((m, n)) = rational_approximation(s, max_den, 1e-12) {
        let g = arc_integral_coeffs(&FourierFunction::cosine(n as usize), alpha);
        return Ok(ArcClassification::Fails {
            alpha_over_pi: s,
            m,
            n,
            witness_frequency: n,
            witness_residual: g.max_abs_coeff(),
        });
    }
    Ok(ArcClassification::HasProperty {
        alpha_over_pi: s,
        max_denominator: max_den,
        injectivity: injectivity_check(alpha, DEFAULT_TRUNCATION, 64, sampling::DEFAULT_SEED),
    })
}

/// The matrix of `f -> g` on `(a0, a_1..a_J, b_1..b_J)`.
pub fn arc_operator(alpha: f64, order: usize) -> DMatrix<f64> {
    let size = 2 * order + 1;
    let mut m = DMatrix::<f64>::zeros(size, size);
    for col in 0..size {
        let mut e = vec![0.0; size];
        e[col] = 1.0;
        let f = FourierFunction {
            a0: e[0],
            a: e[1..=order].to_vec(),
            b: e[order + 1..].to_vec(),
        };
        for (row, v) in arc_integral_coeffs(&f, alpha).to_vector().into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    m
}

/// Dimension of the kernel of `f -> g` for modes `j <= order`.
pub fn annihilator_dimension(alpha: f64, order: usize) -> usize {
    let svd = arc_operator(alpha, order).svd(false, false);
    svd.singular_values.iter().filter(|&&s| s < 1e-10).count()
}

/// Checks that `g = 0` to `1e-12` forces `f = 0` to `1e-9` on the
/// truncated space, and that random `f` obey `|g| >= s_min |f|`.
pub fn injectivity_check(alpha: f64, order: usize, trials: usize, seed: u64) -> InjectivityCheck {
    let op = arc_operator(alpha, order);
    let svd = op.clone().svd(false, false);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    // the map is block diagonal, one 2x2 block per mode
    let bound = 1e-12 * std::f64::consts::SQRT_2 / smin;
    let mut rng = sampling::stream_rng(seed, sampling::DOMAIN_CIRCLE, 0);
    let mut ok = bound < 1e-9;
    for _ in 0..trials {
        let ord = rng.random_range(1..=order);
        let f = FourierFunction::random(&mut rng, ord);
        let g = arc_integral_coeffs(&f, alpha);
        let nf: f64 = f.to_vector().iter().map(|v| v * v).sum::<f64>().sqrt();
        let ng: f64 = g.to_vector().iter().map(|v| v * v).sum::<f64>().sqrt();
        ok &= ng >= smin * nf * (1.0 - 1e-12);
    }
    InjectivityCheck {
        truncation: order,
        min_singular_value: smin,
        trials,
        implied_coeff_bound: bound,
        pass: ok,
    }
}

/// Centers of the arcs of `Omega_t(c)`: `c + pi/(2k) + 2 pi j / k`.
pub fn arc_centers(k: usize, c: f64) -> Vec<f64> {
    let kf = k as f64;
    let pi = std::f64::consts::PI;
    (0..k).map(|j| c + pi / (2.0 * kf) + 2.0 * pi * j as f64 / kf).collect()
}

/// `(int cos(l x), int sin(l x))` over `Omega_t(c)`, by antiderivatives.
pub fn multi_arc_integral(k: usize, l: usize, t: f64, c: f64) -> (f64, f64) {
    let lf = l as f64;
    let mut cs = 0.0;
    let mut sn = 0.0;
    for u in arc_centers(k, c) {
        if l == 0 {
            cs += 2.0 * t;
            continue;
        }
        cs += ((lf * (u + t)).sin() - (lf * (u - t)).sin()) / lf;
        sn += ((lf * (u - t)).cos() - (lf * (u + t)).cos()) / lf;
    }
    (cs, sn)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiArcRow {
    pub c: f64,
    pub cos_integral: f64,
    pub sin_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiArcReport {
    pub k: usize,
    pub l: usize,
    pub t: f64,
    pub rows: Vec<MultiArcRow>,
    pub max_abs_integral: f64,
    pub all_vanish: bool,
    /// `k` does not divide `l`.
    pub expected_vanish: bool,
    /// `l^2` lies in `{(k m)^2}`, the sphere spectrum `g m (g m + n - 1)`
    /// read with `n = 1`, `g = k`.
    pub radial_frequency: bool,
    pub consistent: bool,
}

pub const MULTI_ARC_TOL: f64 = 1e-14;

pub fn multi_arc_test(k: usize, l: usize, t: f64, offsets: &[f64]) -> Result<MultiArcReport> {
    if k < 2 {
        return Err(Error::InvalidArgument("multi-arc tubes need k >= 2".into()));
    }
    let d = std::f64::consts::PI / k as f64;
    if !(t > 0.0 && t < d) {
        return Err(Error::Domain(format!("t = {t} outside (0, pi/k)")));
    }
    let rows: Vec<MultiArcRow> = offsets
        .iter()
        .map(|&c| {
            let (ci, si) = multi_arc_integral(k, l, t, c);
            MultiArcRow {
                c,
                cos_integral: ci,
                sin_integral: si,
            }
        })
        .collect();
    let max_abs = rows
        .iter()
        .fold(0.0f64, |m, r| m.max(r.cos_integral.abs()).max(r.sin_integral.abs()));
    let all_vanish = max_abs <= MULTI_ARC_TOL;
    let expected_vanish = !l.is_multiple_of(k);
    let lsq = (l * l) as u64;
    let radial_frequency = (0..=l as u64).any(|m| (k as u64 * m).pow(2) == lsq);
    Ok(MultiArcReport {
        k,
        l,
        t,
        rows,
        max_abs_integral: max_abs,
        all_vanish,
        expected_vanish,
        radial_frequency,
        consistent: all_vanish == expected_vanish && radial_frequency != all_vanish,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use rand::SeedableRng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn arc_coefficient_examples() {
        let g = arc_integral_coeffs(&FourierFunction::cosine(2), PI / 2.0);
        assert!(g.max_abs_coeff() < 1e-15);
        let g = arc_integral_coeffs(&FourierFunction::cosine(0), 0.7);
        assert_eq!(g.a0, 1.4);
        let g = arc_integral_coeffs(&FourierFunction::cosine(1), PI / 3.0);
        assert!((g.a[0].hypot(g.b[0]) - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn coefficients_match_quadrature() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let order = rng.random_range(1..=16);
            let f = FourierFunction::random(&mut rng, order);
            let alpha = rng.random_range(0.1..3.0);
            let g = arc_integral_coeffs(&f, alpha);
            for _ in 0..50 {
                let c = rng.random_range(-PI..PI);
                let q = integrate(&|x| f.eval(x), c, c + 2.0 * alpha, 1e-13, 1e-13).unwrap();
                assert!((g.eval(c) - q).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(rational_approximation(1.0 / 3.0, 100, 1e-12), Some((1, 3)));
        assert_eq!(rational_approximation(5.0 / 12.0, 100, 1e-12), Some((5, 12)));
        assert_eq!(rational_approximation(FRAC_1_SQRT_2, 10_000, 1e-12), None);
        assert_eq!(rational_approximation(0.5, 1, 1e-12), None);
    }

    #[test]
    fn classification_examples() {
        match pompeiu_classify_arc(PI / 3.0, DEFAULT_MAX_DENOMINATOR).unwrap() {
            ArcClassification::Fails {
                witness_frequency,
                witness_residual,
                ..
            } => {
                assert_eq!(witness_frequency, 3);
                assert!(witness_residual < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            pompeiu_classify_arc(PI / 2.0, DEFAULT_MAX_DENOMINATOR).unwrap(),
            ArcClassification::Fails {
                witness_frequency: 2,
                ..
            }
        ));
        match pompeiu_classify_arc(PI * FRAC_1_SQRT_2, DEFAULT_MAX_DENOMINATOR).unwrap() {
            ArcClassification::HasProperty {
                injectivity,
                max_denominator,
                ..
            } => {
                assert_eq!(max_denominator, 10_000);
                assert!(injectivity.pass);
            }
            other => panic!("{other:?}"),
        }
        assert!(pompeiu_classify_arc(0.0, 10).is_err());
    }

    #[test]
    fn kernel_dimension() {
        for n in 1..=8u64 {
            for m in 1..n {
                if gcd(m, n) != 1 {
                    continue;
                }
                let alpha = PI * m as f64 / n as f64;
                assert_eq!(annihilator_dimension(alpha, 32), 2 * (32 / n as usize), "m={m} n={n}");
            }
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn multi_arc_examples() {
        let offsets: Vec<f64> = (0..10).map(|i| 0.37 * i as f64 - 1.1).collect();
        let r = multi_arc_test(2, 1, 0.4, &offsets).unwrap();
        assert!(r.all_vanish && r.consistent);
        let r = multi_arc_test(2, 2, 0.4, &offsets).unwrap();
        assert!(!r.all_vanish && r.consistent && r.radial_frequency);
        let r = multi_arc_test(3, 6, 0.3, &offsets).unwrap();
        assert!(!r.all_vanish && r.consistent);
        assert!(multi_arc_test(1, 1, 0.3, &offsets).is_err());
        assert!(multi_arc_test(3, 1, 1.2, &offsets).is_err());
    }

    #[test]
    fn multi_arc_measure() {
        let (len, _) = multi_arc_integral(3, 0, 0.2, 0.9);
        assert!((len - 6.0 * 0.2).abs() < 1e-15);
    }

    #[test]
    fn cosine_addition_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (x, y): (f64, f64) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            let n = rng.random_range(1..10) as f64;
            let lhs = (n * (x - y)).cos();
            let rhs = (n * x).cos() * (n * y).cos() + (n * x).sin() * (n * y).sin();
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }
}
