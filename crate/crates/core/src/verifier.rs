//! Numerical certificates: vanishing integrals over rotated tubes for
//! non-radial eigenvalues and at freak radii, the antipodal barycenter
//! test, the Clifford-torus `lambda_2` bound and the tangential gradient
//! identity behind it.
//!
//! A failure verdict is a witness over a finite sample of rotations (the
//! identity plus Haar draws), never a proof over all isometries.

use serde::{Deserialize, Serialize};

use crate::cartan::{rho_from_point, CartanPolynomial};
use crate::content::content_function;
use crate::error::{Error, Result};
use crate::foliation::{FoliationParams, FoliationSpec};
use crate::harmonics::harmonic_basis;
use crate::sampling::{self, indexed_rotation, Moments, Rotation};
use crate::spectrum::{closed_form_spectrum, solve_radial_spectrum, RadialEigenpair};
use crate::tube::{integrate_many_over_tubes, IntegralEstimate, TubeRegion};

/// Integrals within this many standard errors of zero count as vanishing.
pub const SIGMA_BAND: f64 = 4.0;
/// Highest non-radial degree accepted as a witness.
pub const MAX_WITNESS_DEGREE: u32 = 5;
/// `|Psi_k(t)|` above this rejects `t` as a freak radius.
pub const FREAK_TOL: f64 = 1e-9;

// stream ids; rotation cells use their rotation index
const CONTROL_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    FailsPompeiuWitnessed,
    Inconclusive,
    PositiveControlNonzero,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::FailsPompeiuWitnessed => "FAILS_POMPEIU_WITNESSED",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::PositiveControlNonzero => "POSITIVE_CONTROL_NONZERO",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrandKind {
    /// A full orthonormal basis of degree-`l` spherical harmonics.
    NonRadial,
    /// The radial eigenfunction `psi_k(rho)`.
    Radial,
    /// Control run expected to be nonzero.
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEstimate {
    pub rotation_index: usize,
    pub rotation_fingerprint: String,
    pub basis_index: usize,
    pub estimate: IntegralEstimate,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PompeiuReport {
    pub foliation: FoliationParams,
    pub t: f64,
    pub kind: IntegrandKind,
    /// Harmonic degree `l` (non-radial) or radial index `k`.
    pub degree: u32,
    pub lambda: f64,
    pub cells: Vec<CellEstimate>,
    pub verdict: Verdict,
    pub sigma_band: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl PompeiuReport {
    pub fn max_abs_z(&self) -> f64 {
        self.cells.iter().fold(0.0, |m, c| m.max(c.z.abs()))
    }
}

fn witness_verdict(cells: &[CellEstimate]) -> Verdict {
    if cells.iter().all(|c| c.z.abs() <= SIGMA_BAND) {
        Verdict::FailsPompeiuWitnessed
    } else {
        Verdict::Inconclusive
    }
}

fn control_verdict(cells: &[CellEstimate]) -> Verdict {
    if cells.iter().any(|c| c.z.abs() > SIGMA_BAND) {
        Verdict::PositiveControlNonzero
    } else {
        Verdict::Inconclusive
    }
}

/// Index `k` with `g k (g k + n - 1) = lambda`, if any.
pub fn radial_index_of(spec: &FoliationSpec, lambda: f64) -> Option<usize> {
    let mut kmax = 1;
    loop {
        let spec_vals = closed_form_spectrum(spec, kmax);
        if let Some(k) = spec_vals
            .iter()
            .position(|&v| (v - lambda).abs() <= 1e-9 * (1.0 + lambda))
        {
            return Some(k);
        }
        if *spec_vals.last().expect("nonempty") > lambda {
            return None;
        }
        kmax *= 2;
    }
}

/// Integrals of every degree-`l` basis harmonic over `h(Omega_t)` for each
/// radius and for the identity plus `rotations` Haar rotations. One report
/// per radius.
#[allow(clippy::too_many_arguments)]
pub fn verify_nonradial_failure(
    spec: &FoliationSpec,
    polynomial: &CartanPolynomial,
    degree: u32,
    radii: &[f64],
    rotations: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<PompeiuReport>> {
    let lambda = degree as f64 * (degree as f64 + spec.n as f64 - 1.0);
    if let Some(k) = radial_index_of(spec, lambda) {
        return Err(Error::SpectrumClash { degree, lambda, k });
    }
    if degree > MAX_WITNESS_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "witness degree {degree} exceeds the cap {MAX_WITNESS_DEGREE}"
        )));
    }
    let basis = harmonic_basis(spec.n, degree)?;
    let bank = basis.bank();
    let eval = |x: &[f64], out: &mut [f64]| bank.eval_into(x, out);
    let mut per_radius: Vec<Vec<CellEstimate>> = vec![Vec::new(); radii.len()];
    for r in 0..=rotations {
        let rot = indexed_rotation(spec.n, seed, r);
        let fp = rot.fingerprint();
        let est = integrate_many_over_tubes(
            &eval,
            bank.len(),
            spec,
            polynomial,
            radii,
            &rot,
            n_samples,
            seed,
            r as u64,
        )?;
        for (cells, row) in per_radius.iter_mut().zip(est) {
            for (j, e) in row.into_iter().enumerate() {
                cells.push(CellEstimate {
                    rotation_index: r,
                    rotation_fingerprint: fp.clone(),
                    basis_index: j,
                    z: e.z(),
                    estimate: e,
                });
            }
        }
    }
    Ok(radii
        .iter()
        .zip(per_radius)
        .map(|(&t, cells)| PompeiuReport {
            foliation: spec.params(),
            t,
            kind: IntegrandKind::NonRadial,
            degree,
            lambda,
            verdict: witness_verdict(&cells),
            cells,
            sigma_band: SIGMA_BAND,
            n_samples,
            seed,
        })
        .collect())
}

/// `psi_k(rho(x)) = y_k(p(x))`, evaluated through the Cartan polynomial.
fn radial_integrand<'a>(
    eig: &'a RadialEigenpair,
    polynomial: &'a CartanPolynomial,
) -> impl Fn(&[f64], &mut [f64]) + Sync + 'a {
    move |x: &[f64], out: &mut [f64]| out[0] = eig.eval_x(polynomial.eval(x).clamp(-1.0, 1.0))
}

#[allow(clippy::too_many_arguments)]
fn radial_report(
    spec: &FoliationSpec,
    polynomial: &CartanPolynomial,
    eig: &RadialEigenpair,
    t: f64,
    rotations: &[(usize, Rotation, u64)],
    n_samples: usize,
    seed: u64,
    kind: IntegrandKind,
) -> Result<PompeiuReport> {
    let f = radial_integrand(eig, polynomial);
    let mut cells = Vec::with_capacity(rotations.len());
    for (idx, rot, stream) in rotations {
        let est = integrate_many_over_tubes(&f, 1, spec, polynomial, &[t], rot, n_samples, seed, *stream)?[0][0];
        cells.push(CellEstimate {
            rotation_index: *idx,
            rotation_fingerprint: rot.fingerprint(),
            basis_index: 0,
            z: est.z(),
            estimate: est,
        });
    }
    let verdict = match kind {
        IntegrandKind::Control => control_verdict(&cells),
        _ => witness_verdict(&cells),
    };
    Ok(PompeiuReport {
        foliation: spec.params(),
        t,
        kind,
        degree: eig.k as u32,
        lambda: eig.lambda,
        cells,
        verdict,
        sigma_band: SIGMA_BAND,
        n_samples,
        seed,
    })
}

/// Identity-rotation integral of the radial eigenfunction `psi_k` over
/// `Omega_t`, expected to be nonzero whenever `t` is not in `S_k`.
pub fn radial_positive_control(
    spec: &FoliationSpec,
    polynomial: &CartanPolynomial,
    k: usize,
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<PompeiuReport> {
    let eig = solve_radial_spectrum(spec, k)?.pop().expect("k + 1 eigenpairs");
    let id = Rotation::identity(spec.ambient_dim());
    radial_report(
        spec,
        polynomial,
        &eig,
        t,
        &[(0, id, CONTROL_STREAM + k as u64)],
        n_samples,
        seed,
        IntegrandKind::Control,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreakRadiusReport {
    pub content_value: f64,
    pub witness: PompeiuReport,
    pub control: PompeiuReport,
}

/// Rotated integrals of `psi_k(rho)` over `h(Omega_t)` at a zero `t` of
/// `Psi_k`, plus an identity-rotation control at `control_t`. Without an
/// explicit control radius the midpoint between `t` and the preceding
/// element of `S_k u {0}` is used.
#[allow(clippy::too_many_arguments)]
pub fn verify_freak_radius(
    spec: &FoliationSpec,
    polynomial: &CartanPolynomial,
    k: usize,
    t: f64,
    rotations: usize,
    n_samples: usize,
    seed: u64,
    control_t: Option<f64>,
) -> Result<FreakRadiusReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("freak radii need k >= 1".into()));
    }
    let eig = solve_radial_spectrum(spec, k)?.pop().expect("k + 1 eigenpairs");
    let cf = content_function(spec, &eig)?;
    let value = cf.value(t)?;
    if value.abs() > FREAK_TOL {
        return Err(Error::NotAZero {
            t,
            k,
            value: value.abs(),
        });
    }
    let control_t = control_t.unwrap_or_else(|| {
        let below = cf.zeros.iter().copied().filter(|&z| z < t - 1e-9).fold(0.0, f64::max);
        0.5 * (below + t)
    });
    let rots: Vec<(usize, Rotation, u64)> = (0..=rotations)
        .map(|r| (r, indexed_rotation(spec.n, seed, r), r as u64))
        .collect();
    let witness = radial_report(spec, polynomial, &eig, t, &rots, n_samples, seed, IntegrandKind::Radial)?;
    let id = Rotation::identity(spec.ambient_dim());
    let control = radial_report(
        spec,
        polynomial,
        &eig,
        control_t,
        &[(0, id, CONTROL_STREAM + k as u64)],
        n_samples,
        seed,
        IntegrandKind::Control,
    )?;
    Ok(FreakRadiusReport {
        content_value: value,
        witness,
        control,
    })
}

/// A region of `S^n` for the barycenter test.
#[derive(Debug, Clone)]
pub enum Region {
    Tube(TubeRegion),
    /// `{|x_1| < sin t}`
    EquatorialBand {
        n: u32,
        t: f64,
    },
    /// `{x_1 > cos t}`
    Cap {
        n: u32,
        t: f64,
    },
    Union(Vec<Region>),
}

impl Region {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Region::Tube(t) => t.spec.ambient_dim(),
            Region::EquatorialBand { n, .. } | Region::Cap { n, .. } => *n as usize + 1,
            Region::Union(parts) => parts.first().map(|p| p.ambient_dim()).unwrap_or(0),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Tube(t) => t.contains(x),
            Region::EquatorialBand { t, .. } => x[0].abs() < t.sin(),
            Region::Cap { t, .. } => x[0] > t.cos(),
            Region::Union(parts) => parts.iter().any(|p| p.contains(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarycenterReport {
    pub coordinates: Vec<IntegralEstimate>,
    pub z: Vec<f64>,
    pub all_vanish: bool,
    pub n_samples: usize,
    pub seed: u64,
}

/// `int_region x_i` for every coordinate.
pub fn barycenter_test(region: &Region, n_samples: usize, seed: u64) -> Result<BarycenterReport> {
    let d = region.ambient_dim();
    if d == 0 || n_samples < 2 {
        return Err(Error::InvalidArgument("empty region or too few samples".into()));
    }
    let n = d as u32 - 1;
    let parts = sampling::run_batches(n_samples, |b, len| {
        let mut rng = sampling::batch_rng(seed, sampling::DOMAIN_BARYCENTER, 0, b);
        let mut acc = vec![Moments::new(); d];
        let mut x = vec![0.0; d];
        for _ in 0..len {
            sampling::fill_unit_vector(&mut rng, &mut x);
            let inside = region.contains(&x);
            for (m, &xi) in acc.iter_mut().zip(&x) {
                m.push(if inside { xi } else { 0.0 });
            }
        }
        acc
    });
    let mut acc = vec![Moments::new(); d];
    for p in &parts {
        for (a, m) in acc.iter_mut().zip(p) {
            a.merge(m);
        }
    }
    let vol = crate::foliation::sphere_volume(n);
    let coordinates: Vec<IntegralEstimate> = acc
        .iter()
        .map(|m| IntegralEstimate {
            value: vol * m.mean(),
            stderr: vol * m.stderr(),
            n_samples,
            seed,
        })
        .collect();
    let z: Vec<f64> = coordinates.iter().map(|e| e.z()).collect();
    Ok(BarycenterReport {
        all_vanish: z.iter().all(|v| v.abs() <= SIGMA_BAND),
        coordinates,
        z,
        n_samples,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda2 {
    pub r: f64,
    pub s: f64,
    pub lambda2: f64,
    pub bound_ok: bool,
    pub equality: bool,
}

/// First positive eigenvalue of the flat torus `S^1(r) x S^1(s)`,
/// `min(1/r^2, 1/s^2)`. Symmetric in `(r, s)` bit for bit.
pub fn clifford_lambda2_pair(r: f64, s: f64) -> Lambda2 {
    let lambda2 = (1.0 / (r * r)).min(1.0 / (s * s));
    Lambda2 {
        r,
        s,
        lambda2,
        bound_ok: lambda2 <= 2.0 + 1e-12,
        equality: (lambda2 - 2.0).abs() <= 1e-12,
    }
}

/// `lambda_2` of the Clifford torus `S^1(r) x S^1(sqrt(1 - r^2)) in S^3`.
pub fn clifford_lambda2(r: f64) -> Result<Lambda2> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} outside (0, 1)")));
    }
    Ok(clifford_lambda2_pair(r, (1.0 - r * r).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientIdentityReport {
    pub t: f64,
    pub eps: f64,
    pub shell_count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub expected: f64,
    pub max_abs_deviation: f64,
    /// Mean `|rho - t|` over the shell; the leaf-sampling bias scale.
    pub shell_offset: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub n_samples: usize,
    pub seed: u64,
}

/// Default shell half-width `D / 200`.
pub fn default_shell_width(spec: &FoliationSpec) -> f64 {
    spec.diameter / 200.0
}

/// `sum_i |grad_Sigma x_i|^2` at sphere samples with `|rho - t| < eps`.
///
/// The ambient gradient `e_i` is projected onto the leaf by removing its
/// components along `x` and along the unit normal
/// `grad rho = -(grad p - g p x) / (g sqrt(1 - p^2))`.
pub fn tangential_gradient_identity_check(
    polynomial: &CartanPolynomial,
    spec: &FoliationSpec,
    t: f64,
    n_samples: usize,
    seed: u64,
    eps: Option<f64>,
) -> Result<GradientIdentityReport> {
    let eps = eps.unwrap_or_else(|| default_shell_width(spec));
    if !(t - eps > 0.0 && t + eps < spec.diameter) {
        return Err(Error::Domain(format!(
            "shell around t = {t} leaves (0, {})",
            spec.diameter
        )));
    }
    if !(1..=3).contains(&spec.g) {
        return Err(Error::UnsupportedG(spec.g));
    }
    let d = spec.ambient_dim();
    let g = spec.g as f64;
    let parts = sampling::run_batches(n_samples, |b, len| -> Result<(Moments, Moments, f64)> {
        let mut rng = sampling::batch_rng(seed, sampling::DOMAIN_SHELL, 0, b);
        let mut vals = Moments::new();
        let mut offs = Moments::new();
        let mut worst: f64 = 0.0;
        let mut x = vec![0.0; d];
        let mut grad = vec![0.0; d];
        let mut nu = vec![0.0; d];
        for _ in 0..len {
            sampling::fill_unit_vector(&mut rng, &mut x);
            let rho = rho_from_point(polynomial, spec, &x)?;
            if (rho - t).abs() >= eps {
                continue;
            }
            let p = polynomial.eval(&x);
            polynomial.gradient_at(&x, &mut grad);
            let denom = g * (1.0 - p * p).sqrt();
            for i in 0..d {
                nu[i] = -(grad[i] - g * p * x[i]) / denom;
            }
            let mut total = 0.0;
            for i in 0..d {
                // P e_i = e_i - x_i x - nu_i nu
                let mut sq = 0.0;
                for j in 0..d {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    let c = delta - x[i] * x[j] - nu[i] * nu[j];
                    sq += c * c;
                }
                total += sq;
            }
            worst = worst.max((total - (d as f64 - 2.0)).abs());
            vals.push(total);
            offs.push((rho - t).abs());
        }
        Ok((vals, offs, worst))
    });
    let mut vals = Moments::new();
    let mut offs = Moments::new();
    let mut worst: f64 = 0.0;
    for part in parts {
        let (v, o, w) = part?;
        vals.merge(&v);
        offs.merge(&o);
        worst = worst.max(w);
    }
    if vals.count < 1000 {
        return Err(Error::ShellStarvation { t, count: vals.count });
    }
    let expected = spec.n as f64 - 1.0;
    let tolerance = eps + SIGMA_BAND * vals.stderr();
    let mean = vals.mean();
    Ok(GradientIdentityReport {
        t,
        eps,
        shell_count: vals.count,
        mean,
        stderr: vals.stderr(),
        expected,
        max_abs_deviation: worst,
        shell_offset: offs.mean(),
        tolerance,
        pass: (mean - expected).abs() <= tolerance && worst <= tolerance,
        n_samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::cartan_polynomial;
    use crate::foliation::make_foliation;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn radial_eigenvalues_are_refused() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        assert!(matches!(
            verify_nonradial_failure(&s, &p, 2, &[0.3], 1, 10_000, 1),
            Err(Error::SpectrumClash { degree: 2, k: 1, .. })
        ));
        assert_eq!(radial_index_of(&s, 3.0), None);
        assert_eq!(radial_index_of(&s, 15.0), None);
        assert_eq!(radial_index_of(&s, 48.0), Some(3));
        let s2 = make_foliation(2, 1, 1, 1).unwrap();
        let p2 = cartan_polynomial(&s2).unwrap();
        assert!(verify_nonradial_failure(&s2, &p2, 1, &[0.3], 1, 10_000, 1).is_err());
    }

    #[test]
    fn small_nonradial_run() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let reps = verify_nonradial_failure(&s, &p, 1, &[0.3, FRAC_PI_4], 3, 100_000, 7).unwrap();
        assert_eq!(reps.len(), 2);
        for r in &reps {
            assert_eq!(r.cells.len(), 4 * 4);
            assert_eq!(r.verdict, Verdict::FailsPompeiuWitnessed, "max z {}", r.max_abs_z());
        }
        let c = radial_positive_control(&s, &p, 1, std::f64::consts::FRAC_PI_6, 100_000, 7).unwrap();
        assert_eq!(c.verdict, Verdict::PositiveControlNonzero);
    }

    #[test]
    fn freak_radius_requires_a_zero() {
        let s = make_foliation(2, 1, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        assert!(matches!(
            verify_freak_radius(&s, &p, 2, 1.0, 1, 10_000, 1, None),
            Err(Error::NotAZero { .. })
        ));
        let r = verify_freak_radius(&s, &p, 2, FRAC_PI_2, 3, 100_000, 1, Some(FRAC_PI_3)).unwrap();
        assert_eq!(r.witness.verdict, Verdict::FailsPompeiuWitnessed);
        assert_eq!(r.control.verdict, Verdict::PositiveControlNonzero);
        let r = verify_freak_radius(&s, &p, 2, FRAC_PI_2, 1, 100_000, 1, None).unwrap();
        assert!((r.control.t - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn barycenters() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let tube = TubeRegion::new(&s, &p, 0.5, sampling::haar_rotation(3, 2)).unwrap();
        assert!(barycenter_test(&Region::Tube(tube), 200_000, 3).unwrap().all_vanish);
        assert!(
            barycenter_test(&Region::EquatorialBand { n: 2, t: 0.4 }, 200_000, 4)
                .unwrap()
                .all_vanish
        );
        let cap = barycenter_test(&Region::Cap { n: 2, t: FRAC_PI_3 }, 200_000, 5).unwrap();
        assert!(!cap.all_vanish);
        // int_cap x_1 = 2 pi int_0^t cos r sin r dr = pi sin^2 t
        let exact = std::f64::consts::PI * FRAC_PI_3.sin().powi(2);
        assert!((cap.coordinates[0].value - exact).abs() < 4.0 * cap.coordinates[0].stderr);
    }

    #[test]
    fn lambda2_examples() {
        let r = clifford_lambda2(FRAC_1_SQRT_2).unwrap();
        assert!(r.equality && r.bound_ok);
        let r = clifford_lambda2(0.5).unwrap();
        assert!((r.lambda2 - 4.0 / 3.0).abs() < 1e-14 && !r.equality);
        let r = clifford_lambda2(0.9).unwrap();
        assert!((r.lambda2 - 1.0 / 0.81).abs() < 1e-12);
        assert!(clifford_lambda2(0.0).is_err() && clifford_lambda2(1.0).is_err());
    }

    #[test]
    fn lambda2_from_flat_torus_enumeration() {
        // smallest positive (p/r)^2 + (q/s)^2 over |p|, |q| <= 3
        for &r in &[0.3, 0.5, FRAC_1_SQRT_2, 0.8, 0.9] {
            let s = (1.0 - r * r).sqrt();
            let mut best = f64::INFINITY;
            for p in -3i32..=3 {
                for q in -3i32..=3 {
                    let v = (p as f64 / r).powi(2) + (q as f64 / s).powi(2);
                    if v > 0.0 {
                        best = best.min(v);
                    }
                }
            }
            assert!((clifford_lambda2(r).unwrap().lambda2 - best).abs() < 1e-12 * best);
        }
    }

    #[test]
    fn gradient_identity() {
        let s3 = make_foliation(3, 2, 1, 1).unwrap();
        let p3 = cartan_polynomial(&s3).unwrap();
        let r = tangential_gradient_identity_check(&p3, &s3, FRAC_PI_4, 300_000, 1, None).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.mean - 2.0).abs() < 1e-9);
        let s2 = make_foliation(2, 1, 1, 1).unwrap();
        let p2 = cartan_polynomial(&s2).unwrap();
        let r = tangential_gradient_identity_check(&p2, &s2, 1.0, 300_000, 1, None).unwrap();
        assert!(r.pass && (r.mean - 1.0).abs() < 1e-9);
        let s4 = make_foliation(4, 3, 1, 1).unwrap();
        let p4 = cartan_polynomial(&s4).unwrap();
        let r = tangential_gradient_identity_check(&p4, &s4, 0.5, 300_000, 1, None).unwrap();
        assert!(r.pass && (r.mean - 3.0).abs() < 1e-9);
        assert!(matches!(
            tangential_gradient_identity_check(&p2, &s2, 1.0, 10_000, 1, Some(1e-4)),
            Err(Error::ShellStarvation { .. })
        ));
    }

    #[test]
    fn shell_offset_is_linear_in_eps() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let eps = default_shell_width(&s);
        let a = tangential_gradient_identity_check(&p, &s, FRAC_PI_4, 1_000_000, 2, Some(eps)).unwrap();
        let b = tangential_gradient_identity_check(&p, &s, FRAC_PI_4, 1_000_000, 2, Some(eps / 2.0)).unwrap();
        let ratio = a.shell_offset / b.shell_offset;
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }
}
