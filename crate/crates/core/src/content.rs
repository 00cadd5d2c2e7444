//! Content functions `Psi_k(t) = int_0^t theta psi_k` and their interior
//! zero sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::{density, DensityProfile, FoliationSpec};
use crate::quadrature::integrate;
use crate::spectrum::{solve_radial_spectrum_with, RadialEigenpair, SolverMetadata, SolverOptions};

/// Number of points in the uniform sign-change scan.
pub const SCAN_POINTS: usize = 2048;
/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-12;
/// Zeros from different `k` closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-9;

const QUAD_ABS: f64 = 1e-15;
const QUAD_REL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct ContentFunction {
    pub spec: FoliationSpec,
    pub k: usize,
    pub lambda: f64,
    pub eig: RadialEigenpair,
    pub zeros: Vec<f64>,
    density: DensityProfile,
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl ContentFunction {
    fn integrand(&self, r: f64) -> f64 {
        self.density.theta(r) * self.eig.psi(r)
    }

    /// Scan grid `t_i = i D / (SCAN_POINTS - 1)`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn grid_values(&self) -> &[f64] {
        &self.values
    }

    /// `Psi_k(t)` for `t` in `[0, D]`, integrated from the nearest grid node.
    pub fn value(&self, t: f64) -> Result<f64> {
        let d = self.spec.diameter;
        if !(0.0..=d).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {d}]")));
        }
        let h = d / (SCAN_POINTS - 1) as f64;
        let i = ((t / h).round() as usize).min(SCAN_POINTS - 1);
        let f = |r: f64| self.integrand(r);
        Ok(self.values[i] + integrate(&f, self.grid[i], t, QUAD_ABS, QUAD_REL)?)
    }

    /// `Psi_k'(t) = theta(t) psi_k(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        self.integrand(t)
    }

    /// `Psi'' - (theta'/theta) Psi' + lambda Psi` reduces to
    /// `theta psi' + lambda Psi`.
    pub fn bvp_residual(&self, t: f64) -> Result<f64> {
        Ok(self.density.theta(t) * self.eig.dpsi(t) + self.lambda * self.value(t)?)
    }

    /// `int_0^D theta psi_k`: one for `k = 0`, zero otherwise.
    pub fn total(&self) -> f64 {
        self.values[SCAN_POINTS - 1]
    }

    /// Maximum BVP residual over the interior grid nodes at distance at
    /// least `margin` from the endpoints, relative to `max |lambda Psi|`.
    pub fn max_relative_bvp_residual(&self, margin: f64) -> Result<f64> {
        let d = self.spec.diameter;
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())) * self.lambda.max(1.0);
        let mut worst: f64 = 0.0;
        for (&t, &v) in self.grid.iter().zip(&self.values) {
            if t < margin || t > d - margin {
                continue;
            }
            let r = self.density.theta(t) * self.eig.dpsi(t) + self.lambda * v;
            worst = worst.max(r.abs());
        }
        Ok(worst / scale)
    }
}

/// `Psi_k` with its interior zeros. For `k >= 1` the integral is
/// accumulated forward from `0` on the first half of the grid and backward
/// from `D` on the second, since `int_0^D theta psi_k = 0`; this keeps the
/// values near both endpoints free of cancellation.
pub fn content_function(spec: &FoliationSpec, eig: &RadialEigenpair) -> Result<ContentFunction> {
    let d = spec.diameter;
    let dens = density(spec);
    let h = d / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| if i == SCAN_POINTS - 1 { d } else { i as f64 * h })
        .collect();
    let f = |r: f64| dens.theta(r) * eig.psi(r);
    let mut cells = Vec::with_capacity(SCAN_POINTS - 1);
    for w in grid.windows(2) {
        cells.push(integrate(&f, w[0], w[1], QUAD_ABS, QUAD_REL)?);
    }
    let mut values = vec![0.0; SCAN_POINTS];
    let half = SCAN_POINTS / 2;
    for i in 1..=half {
        values[i] = values[i - 1] + cells[i - 1];
    }
    if eig.k == 0 {
        for i in half + 1..SCAN_POINTS {
            values[i] = values[i - 1] + cells[i - 1];
        }
    } else {
        let mut acc = 0.0;
        for i in (half + 1..SCAN_POINTS).rev() {
            values[i] = acc;
            acc -= cells[i - 1];
        }
        // the true value at the end is zero; keep the forward total as the
        // observable closure error
        let forward: f64 = cells.iter().sum();
        values[SCAN_POINTS - 1] = forward;
    }

    let mut cf = ContentFunction {
        spec: *spec,
        k: eig.k,
        lambda: eig.lambda,
        eig: eig.clone(),
        zeros: Vec::new(),
        density: dens,
        grid,
        values,
    };
    if eig.k == 0 {
        return Ok(cf);
    }

    // interior nodes only: Psi vanishes at both ends
    let mut brackets = Vec::new();
    for i in 1..SCAN_POINTS - 2 {
        let (a, b) = (cf.values[i], cf.values[i + 1]);
        if a == 0.0 {
            brackets.push((i, i));
        } else if a * b < 0.0 {
            brackets.push((i, i + 1));
        }
    }
    let mut zeros = Vec::with_capacity(brackets.len());
    for (i, j) in brackets {
        if i == j {
            zeros.push(cf.grid[i]);
            continue;
        }
        zeros.push(bisect(&cf, i, j)?);
    }
    let first = cf.values[1].signum();
    let last = cf.values[SCAN_POINTS - 2].signum();
    let parity = if zeros.len() % 2 == 0 { 1.0 } else { -1.0 };
    if first * last != parity {
        return Err(Error::MissedZero {
            k: eig.k,
            found: zeros.len(),
        });
    }
    cf.zeros = zeros;
    Ok(cf)
}

fn bisect(cf: &ContentFunction, i: usize, j: usize) -> Result<f64> {
    let base_t = cf.grid[i];
    let base_v = cf.values[i];
    let f = |r: f64| cf.integrand(r);
    let eval = |t: f64| -> Result<f64> { Ok(base_v + integrate(&f, base_t, t, QUAD_ABS, QUAD_REL)?) };
    let (mut lo, mut hi) = (cf.grid[i], cf.grid[j]);
    let mut flo = base_v;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A freak radius with every `k` whose content function vanishes there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreakZero {
    pub t: f64,
    /// Contributing indices, ascending; the first is the primary one.
    pub ks: Vec<usize>,
}

impl FreakZero {
    pub fn k(&self) -> usize {
        self.ks[0]
    }
}

#[derive(Debug, Clone)]
pub struct FreakSet {
    pub spec: FoliationSpec,
    pub kmax: usize,
    pub zeros: Vec<FreakZero>,
    pub content: Vec<ContentFunction>,
    pub metadata: SolverMetadata,
}

/// `S_1 u ... u S_kmax` with provenance.
pub fn freak_set(spec: &FoliationSpec, kmax: usize) -> Result<Vec<FreakZero>> {
    Ok(freak_set_detailed(spec, kmax)?.zeros)
}

pub fn freak_set_detailed(spec: &FoliationSpec, kmax: usize) -> Result<FreakSet> {
    if kmax < 1 {
        return Err(Error::InvalidArgument("freak_set needs kmax >= 1".into()));
    }
    let sol = solve_radial_spectrum_with(spec, kmax, &SolverOptions::default())?;
    let content: Vec<ContentFunction> = sol.eigenpairs[1..]
        .par_iter()
        .map(|e| content_function(spec, e))
        .collect::<Result<_>>()?;
    let mut all: Vec<(f64, usize)> = content
        .iter()
        .flat_map(|c| c.zeros.iter().map(move |&t| (t, c.k)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut zeros: Vec<FreakZero> = Vec::new();
    for (t, k) in all {
        match zeros.last_mut() {
            Some(z) if (t - z.t).abs() <= DEDUP_TOL => {
                if !z.ks.contains(&k) {
                    z.ks.push(k);
                    z.ks.sort_unstable();
                }
            }
            _ => zeros.push(FreakZero { t, ks: vec![k] }),
        }
    }
    debug_assert!(zeros.len() <= kmax * (kmax + 1) / 2);
    Ok(FreakSet {
        spec: *spec,
        kmax,
        zeros,
        content,
        metadata: sol.metadata,
    })
}

/// Largest gap between consecutive elements of `zeros u {0, D}`.
pub fn max_gap(zeros: &[FreakZero], diameter: f64) -> f64 {
    let mut pts: Vec<f64> = zeros.iter().map(|z| z.t).collect();
    pts.push(0.0);
    pts.push(diameter);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}
