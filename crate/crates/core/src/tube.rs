//! Monte Carlo integration over rotated isoparametric tubes
//! `h(Omega_t) = {x : p(h^{-1} x) > cos(g t)}`.

use serde::{Deserialize, Serialize};

use crate::cartan::{rho_from_point, CartanPolynomial};
use crate::error::{Error, Result};
use crate::foliation::{density, FoliationSpec};
use crate::sampling::{self, Rotation};

#[derive(Debug, Clone)]
pub struct TubeRegion {
    pub spec: FoliationSpec,
    pub polynomial: CartanPolynomial,
    pub t: f64,
    pub rotation: Rotation,
}

impl TubeRegion {
    pub fn new(spec: &FoliationSpec, polynomial: &CartanPolynomial, t: f64, rotation: Rotation) -> Result<Self> {
        if !(t > 0.0 && t < spec.diameter) {
            return Err(Error::Domain(format!("tube radius {t} outside (0, {})", spec.diameter)));
        }
        if rotation.dim() != spec.ambient_dim() || polynomial.ambient_dim() != spec.ambient_dim() {
            return Err(Error::InvalidArgument(
                "rotation, polynomial and sphere dimensions differ".into(),
            ));
        }
        Ok(TubeRegion {
            spec: *spec,
            polynomial: polynomial.clone(),
            t,
            rotation,
        })
    }

    pub fn threshold(&self) -> f64 {
        (self.spec.g as f64 * self.t).cos()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let mut y = vec![0.0; x.len()];
        self.rotation.apply_inverse(x, &mut y);
        self.polynomial.eval(&y) > self.threshold()
    }

    /// Membership through the distance function, `rho(h^{-1} x) < t`.
    pub fn contains_by_rho(&self, x: &[f64]) -> Result<bool> {
        let mut y = vec![0.0; x.len()];
        self.rotation.apply_inverse(x, &mut y);
        Ok(rho_from_point(&self.polynomial, &self.spec, &y)? < self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl IntegralEstimate {
    /// `value / stderr`; zero for an exactly vanishing estimate.
    pub fn z(&self) -> f64 {
        if self.stderr > 0.0 {
            self.value / self.stderr
        } else if self.value == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(self.value)
        }
    }
}

// running sums of v * 1_tube and its square
#[derive(Clone)]
struct Sums {
    s: Vec<f64>,
    s2: Vec<f64>,
}

fn finish(sums: &Sums, n_samples: usize, vol: f64, seed: u64, idx: usize) -> IntegralEstimate {
    let n = n_samples as f64;
    let mean = sums.s[idx] / n;
    let var = ((sums.s2[idx] / n - mean * mean) * n / (n - 1.0)).max(0.0);
    IntegralEstimate {
        value: vol * mean,
        stderr: vol * (var / n).sqrt(),
        n_samples,
        seed,
    }
}

/// Integrals of `nfun` functions over `h(Omega_t)` for every radius, from
/// one shared sample stream. `eval(x, out)` writes the function values at
/// the sample `x`. Returns `[radius][function]`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_many_over_tubes<F>(
    eval: &F,
    nfun: usize,
    spec: &FoliationSpec,
    polynomial: &CartanPolynomial,
    radii: &[f64],
    rotation: &Rotation,
    n_samples: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<Vec<IntegralEstimate>>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    for &t in radii {
        if !(t > 0.0 && t < spec.diameter) {
            return Err(Error::Domain(format!("tube radius {t} outside (0, {})", spec.diameter)));
        }
    }
    let d = spec.ambient_dim();
    let g = spec.g as f64;
    let thresholds: Vec<f64> = radii.iter().map(|t| (g * t).cos()).collect();
    let cells = radii.len() * nfun;
    let identity = rotation.is_identity();
    let parts = sampling::run_batches(n_samples, |b, len| {
        let mut rng = sampling::batch_rng(seed, sampling::DOMAIN_TUBE, stream, b);
        let mut sums = Sums {
            s: vec![0.0; cells],
            s2: vec![0.0; cells],
        };
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        let mut vals = vec![0.0; nfun];
        for _ in 0..len {
            sampling::fill_unit_vector(&mut rng, &mut x);
            let f = if identity {
                polynomial.eval(&x)
            } else {
                rotation.apply_inverse(&x, &mut y);
                polynomial.eval(&y)
            };
            if thresholds.iter().all(|&c| f <= c) {
                continue;
            }
            eval(&x, &mut vals);
            for (r, &c) in thresholds.iter().enumerate() {
                if f > c {
                    let base = r * nfun;
                    for (j, &v) in vals.iter().enumerate() {
                        sums.s[base + j] += v;
                        sums.s2[base + j] += v * v;
                    }
                }
            }
        }
        sums
    });
    let mut total = Sums {
        s: vec![0.0; cells],
        s2: vec![0.0; cells],
    };
    for p in &parts {
        for i in 0..cells {
            total.s[i] += p.s[i];
            total.s2[i] += p.s2[i];
        }
    }
    let vol = spec.sphere_volume();
    Ok((0..radii.len())
        .map(|r| {
            (0..nfun)
                .map(|j| finish(&total, n_samples, vol, seed, r * nfun + j))
                .collect()
        })
        .collect())
}

/// `vol(S^n) * mean(f 1_tube)` over `n_samples` uniform points.
pub fn integrate_over_tube<F>(f: &F, tube: &TubeRegion, n_samples: usize, seed: u64) -> Result<IntegralEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let eval = |x: &[f64], out: &mut [f64]| out[0] = f(x);
    let est = integrate_many_over_tubes(
        &eval,
        1,
        &tube.spec,
        &tube.polynomial,
        &[tube.t],
        &tube.rotation,
        n_samples,
        seed,
        0,
    )?;
    Ok(est[0][0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeCrosscheck {
    pub t: f64,
    pub mc_fraction: f64,
    pub stderr: f64,
    pub exact_fraction: f64,
    pub z: f64,
    pub pass: bool,
    pub n_samples: usize,
    pub seed: u64,
}

/// Monte Carlo `vol(Omega_t) / vol(S^n)` against `int_0^t theta`.
pub fn tube_volume_crosscheck(
    spec: &FoliationSpec,
    polynomial: &CartanPolynomial,
    t: f64,
    n_samples: usize,
    seed: u64,
) -> Result<VolumeCrosscheck> {
    let rot = Rotation::identity(spec.ambient_dim());
    tube_volume_crosscheck_rotated(spec, polynomial, t, &rot, n_samples, seed)
}

pub fn tube_volume_crosscheck_rotated(
    spec: &FoliationSpec,
    polynomial: &CartanPolynomial,
    t: f64,
    rotation: &Rotation,
    n_samples: usize,
    seed: u64,
) -> Result<VolumeCrosscheck> {
    let one = |_: &[f64], out: &mut [f64]| out[0] = 1.0;
    let est = integrate_many_over_tubes(&one, 1, spec, polynomial, &[t], rotation, n_samples, seed, 0)?[0][0];
    let vol = spec.sphere_volume();
    let mc = est.value / vol;
    let se = est.stderr / vol;
    let exact = density(spec).cumulative(t);
    let z = (mc - exact) / se;
    Ok(VolumeCrosscheck {
        t,
        mc_fraction: mc,
        stderr: se,
        exact_fraction: exact,
        z,
        pass: z.abs() <= 4.0,
        n_samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::cartan_polynomial;
    use crate::foliation::make_foliation;
    use crate::sampling::{haar_rotation, rotation_batch};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn clifford_volume_is_sin_squared() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let tube = TubeRegion::new(&s, &p, 0.5, Rotation::identity(4)).unwrap();
        let est = integrate_over_tube(&|_: &[f64]| 1.0, &tube, 200_000, 1).unwrap();
        let exact = 0.5f64.sin().powi(2) * 2.0 * PI * PI;
        assert!((est.value - exact).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn crosscheck_examples() {
        let s3 = make_foliation(3, 2, 1, 1).unwrap();
        let p3 = cartan_polynomial(&s3).unwrap();
        let r = tube_volume_crosscheck(&s3, &p3, FRAC_PI_4, 200_000, 2).unwrap();
        assert!((r.exact_fraction - 0.5).abs() < 1e-14);
        assert!(r.pass);
        let s2 = make_foliation(2, 1, 1, 1).unwrap();
        let p2 = cartan_polynomial(&s2).unwrap();
        let r = tube_volume_crosscheck(&s2, &p2, FRAC_PI_2, 200_000, 3).unwrap();
        assert!((r.exact_fraction - 0.5).abs() < 1e-14 && r.pass);
        let r = tube_volume_crosscheck(&s2, &p2, 0.1, 200_000, 4).unwrap();
        assert!((r.exact_fraction - (1.0 - 0.1f64.cos()) / 2.0).abs() < 1e-15 && r.pass);
    }

    #[test]
    fn unequal_multiplicity_volumes() {
        // at D/2 the two orientations give 3/4 and 1/4
        for (m0, m1, exact) in [(1, 3, 0.75), (3, 1, 0.25)] {
            let s = make_foliation(5, 2, m0, m1).unwrap();
            let p = cartan_polynomial(&s).unwrap();
            let r = tube_volume_crosscheck(&s, &p, FRAC_PI_4, 200_000, 8).unwrap();
            assert!((r.exact_fraction - exact).abs() < 1e-14, "{}", r.exact_fraction);
            assert!(r.pass, "m0={m0} m1={m1}: {} vs {}", r.mc_fraction, exact);
        }
    }

    #[test]
    fn volume_is_rotation_invariant() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let ests: Vec<VolumeCrosscheck> = rotation_batch(3, 10, 9)
            .iter()
            .map(|r| tube_volume_crosscheck_rotated(&s, &p, 0.6, r, 100_000, 5).unwrap())
            .collect();
        for a in &ests {
            for b in &ests {
                let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
                assert!((a.mc_fraction - b.mc_fraction).abs() <= 4.0 * se);
            }
        }
    }

    #[test]
    fn odd_coordinate_vanishes_on_clifford_tube() {
        let s = make_foliation(3, 2, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let tube = TubeRegion::new(&s, &p, 0.4, haar_rotation(3, 3)).unwrap();
        let est = integrate_over_tube(&|x: &[f64]| x[0], &tube, 200_000, 6).unwrap();
        assert!(est.value.abs() <= 4.0 * est.stderr);
    }

    #[test]
    fn membership_predicates_agree() {
        let s = make_foliation(4, 3, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let tube = TubeRegion::new(&s, &p, 0.5, haar_rotation(4, 1)).unwrap();
        let pts = sampling::sample_sphere(4, 100_000, 2);
        let c = tube.threshold();
        let mut bad = 0;
        for x in &pts {
            let mut y = vec![0.0; 5];
            tube.rotation.apply_inverse(x, &mut y);
            if (p.eval(&y) - c).abs() < 1e-10 {
                continue;
            }
            if tube.contains(x) != tube.contains_by_rho(x).unwrap() {
                bad += 1;
            }
        }
        assert_eq!(bad, 0);
    }

    #[test]
    fn doubling_samples_shrinks_stderr_by_sqrt2() {
        let s = make_foliation(2, 1, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        let tube = TubeRegion::new(&s, &p, 1.0, Rotation::identity(3)).unwrap();
        let a = integrate_over_tube(&|x: &[f64]| x[1], &tube, 100_000, 1).unwrap();
        let b = integrate_over_tube(&|x: &[f64]| x[1], &tube, 200_000, 1).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio - 2f64.sqrt()).abs() < 0.1 * 2f64.sqrt());
    }

    #[test]
    fn rejects_bad_radii() {
        let s = make_foliation(2, 1, 1, 1).unwrap();
        let p = cartan_polynomial(&s).unwrap();
        assert!(TubeRegion::new(&s, &p, 0.0, Rotation::identity(3)).is_err());
        assert!(TubeRegion::new(&s, &p, PI, Rotation::identity(3)).is_err());
    }
}
