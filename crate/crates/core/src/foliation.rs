//! Parameter sets of isoparametric foliations of the round sphere and the
//! radial geometry they induce.
//!
//! A foliation of `S^n` is determined up to congruence (for our purposes)
//! by `(n, g, m0, m1)`: the number `g` of distinct principal curvatures of
//! a regular leaf and the two curvature multiplicities. From these we derive
//! the Cartan constant `c = (m1 - m0) g^2 / 2` and the diameter `D = pi / g`,
//! the distance between the two focal sets.
//!
//! The focal set `M+` is `{F = 1}` where `F` is the restricted Cartan
//! polynomial; the distance `rho` to `M+` satisfies `F = cos(g rho)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const ALLOWED_G: [u32; 5] = [1, 2, 3, 4, 6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "FoliationParams", try_from = "FoliationParams")]
pub struct FoliationSpec {
    pub n: u32,
    pub g: u32,
    pub m0: u32,
    pub m1: u32,
    /// Cartan constant `(m1 - m0) g^2 / 2`.
    pub c: f64,
    /// Distance between the focal sets, `pi / g`.
    pub diameter: f64,
}

/// Flat record form; `c` and `D` are recomputed on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoliationParams {
    pub n: u32,
    pub g: u32,
    pub m0: u32,
    pub m1: u32,
}

impl From<FoliationSpec> for FoliationParams {
    fn from(s: FoliationSpec) -> Self {
        FoliationParams {
            n: s.n,
            g: s.g,
            m0: s.m0,
            m1: s.m1,
        }
    }
}

impl TryFrom<FoliationParams> for FoliationSpec {
    type Error = Error;

    fn try_from(p: FoliationParams) -> Result<Self> {
        make_foliation(p.n, p.g, p.m0, p.m1)
    }
}

/// Validates `(n, g, m0, m1)` and fills in `c` and `D`.
pub fn make_foliation(n: u32, g: u32, m0: u32, m1: u32) -> Result<FoliationSpec> {
    if !ALLOWED_G.contains(&g) {
        return Err(Error::InvalidG(g));
    }
    if m0 == 0 || m1 == 0 {
        return Err(Error::ZeroMultiplicity { m0, m1 });
    }
    // n - 1 = g (m0 + m1) / 2, compared in integers
    if 2 * (n as u64).saturating_sub(1) != g as u64 * (m0 + m1) as u64 || n < 2 {
        return Err(Error::DimensionMismatch {
            n,
            g,
            m0,
            m1,
            lhs: n as f64 - 1.0,
            rhs: g as f64 * (m0 + m1) as f64 / 2.0,
        });
    }
    if g % 2 == 1 && m0 != m1 {
        return Err(Error::UnequalOddMultiplicities { g, m0, m1 });
    }
    let gf = g as f64;
    let spec = FoliationSpec {
        n,
        g,
        m0,
        m1,
        c: (m1 as f64 - m0 as f64) * gf * gf / 2.0,
        diameter: PI / gf,
    };
    let (plus, minus) = spec.endpoint_exponents();
    if plus < 1.0 || minus < 1.0 {
        return Err(Error::EndpointExponent { plus, minus });
    }
    Ok(spec)
}

impl FoliationSpec {
    pub fn params(&self) -> FoliationParams {
        (*self).into()
    }

    /// `n + 1`, the dimension of the Euclidean space containing `S^n`.
    pub fn ambient_dim(&self) -> usize {
        self.n as usize + 1
    }

    /// Orders of vanishing `(m+, m-) = ((n-1)/g - c/g^2, (n-1)/g + c/g^2)`
    /// of the density at `t = 0` and `t = D`.
    pub fn endpoint_exponents(&self) -> (f64, f64) {
        let g = self.g as f64;
        let a = (self.n as f64 - 1.0) / g;
        let b = self.c / (g * g);
        (a - b, a + b)
    }

    /// Jacobi weight exponents `(alpha, beta)` of the radial problem in the
    /// variable `x = cos(g t)`: `w(x) = (1-x)^alpha (1+x)^beta`.
    pub fn jacobi_exponents(&self) -> (f64, f64) {
        let (mp, mm) = self.endpoint_exponents();
        ((mp - 1.0) / 2.0, (mm - 1.0) / 2.0)
    }

    /// Riemannian volume of `S^n`.
    pub fn sphere_volume(&self) -> f64 {
        sphere_volume(self.n)
    }

    /// Short human-readable tag, e.g. `S^3 g=2 (m0=1, m1=1)`.
    pub fn label(&self) -> String {
        format!("S^{} g={} (m0={}, m1={})", self.n, self.g, self.m0, self.m1)
    }
}

/// `|S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)`.
pub fn sphere_volume(n: u32) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

/// `Delta rho` at distance `t` from `M+`, i.e. the mean curvature of the
/// leaf `{rho = t}`: `-(n-1) cot(g t) + c / (g sin(g t))`.
pub fn mean_curvature(spec: &FoliationSpec, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < spec.diameter) {
        return Err(Error::Domain(format!(
            "mean curvature is singular outside (0, {}), got t = {t}",
            spec.diameter
        )));
    }
    let g = spec.g as f64;
    let s = (g * t).sin();
    Ok(-(spec.n as f64 - 1.0) * (g * t).cos() / s + spec.c / (g * s))
}

/// Volume density of the normal exponential map around `M+`, stored as a
/// probability density on `(0, D)`.
///
/// Closed form: `theta(t) = sin^{m+}(g t / 2) cos^{m-}(g t / 2) / Z` with
/// `Z = B((m+ + 1)/2, (m- + 1)/2) / g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityProfile {
    pub spec: FoliationSpec,
    pub endpoint_exponents: (f64, f64),
    log_norm: f64,
}

pub fn density(spec: &FoliationSpec) -> DensityProfile {
    let (mp, mm) = spec.endpoint_exponents();
    let a = (mp + 1.0) / 2.0;
    let b = (mm + 1.0) / 2.0;
    let log_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    DensityProfile {
        spec: *spec,
        endpoint_exponents: (mp, mm),
        log_norm: log_beta - (spec.g as f64).ln(),
    }
}

impl DensityProfile {
    pub fn theta(&self, t: f64) -> f64 {
        let (mp, mm) = self.endpoint_exponents;
        let h = self.spec.g as f64 * t / 2.0;
        let (s, c) = h.sin_cos();
        if s <= 0.0 || c <= 0.0 {
            return 0.0;
        }
        (mp * s.ln() + mm * c.ln() - self.log_norm).exp()
    }

    /// `theta'(t) / theta(t) = (n-1) cot(g t) - c / (g sin(g t))`.
    pub fn logderiv(&self, t: f64) -> f64 {
        let g = self.spec.g as f64;
        let s = (g * t).sin();
        (self.spec.n as f64 - 1.0) * (g * t).cos() / s - self.spec.c / (g * s)
    }

    /// Tube volume fraction `int_0^t theta`, via the regularized incomplete
    /// beta function in `u = sin^2(g t / 2)`.
    pub fn cumulative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.spec.diameter {
            return 1.0;
        }
        let (mp, mm) = self.endpoint_exponents;
        let u = (self.spec.g as f64 * t / 2.0).sin().powi(2);
        beta_reg((mp + 1.0) / 2.0, (mm + 1.0) / 2.0, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn make_foliation_examples() {
        let s = make_foliation(2, 1, 1, 1).unwrap();
        assert_eq!(s.c, 0.0);
        assert_relative_eq!(s.diameter, PI);

        let s = make_foliation(3, 2, 1, 1).unwrap();
        assert_eq!(s.c, 0.0);
        assert_relative_eq!(s.diameter, PI / 2.0);

        let s = make_foliation(5, 2, 1, 3).unwrap();
        assert_eq!(s.c, 4.0);
        assert_relative_eq!(s.diameter, PI / 2.0);
        assert_eq!(s.endpoint_exponents(), (1.0, 3.0));
    }

    #[test]
    fn make_foliation_errors() {
        assert_eq!(make_foliation(3, 5, 1, 1), Err(Error::InvalidG(5)));
        assert!(matches!(
            make_foliation(3, 1, 1, 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            make_foliation(4, 2, 1, 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            make_foliation(3, 2, 0, 2),
            Err(Error::ZeroMultiplicity { .. })
        ));
        assert!(matches!(
            make_foliation(4, 1, 2, 4),
            Err(Error::UnequalOddMultiplicities { .. })
        ));
        assert!(make_foliation(3, 1, 2, 2).is_ok());
    }

    #[test]
    fn endpoint_exponents_equal_multiplicities() {
        for &(n, g, m0, m1) in &[
            (2, 1, 1, 1),
            (5, 2, 1, 3),
            (5, 2, 3, 1),
            (7, 3, 2, 2),
            (9, 4, 2, 2),
            (13, 6, 2, 2),
        ] {
            let s = make_foliation(n, g, m0, m1).unwrap();
            assert_eq!(s.endpoint_exponents(), (m0 as f64, m1 as f64));
        }
    }

    #[test]
    fn serde_recomputes_derived_fields() {
        let s: FoliationSpec = serde_json::from_str(r#"{"n":5,"g":2,"m0":1,"m1":3}"#).unwrap();
        assert_eq!(s.c, 4.0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"n":5,"g":2,"m0":1,"m1":3}"#);
        assert!(serde_json::from_str::<FoliationSpec>(r#"{"n":3,"g":5,"m0":1,"m1":1}"#).is_err());
    }

    #[test]
    fn mean_curvature_examples() {
        let s2 = make_foliation(2, 1, 1, 1).unwrap();
        for &t in &[0.2, 1.0, 2.5] {
            assert_relative_eq!(mean_curvature(&s2, t).unwrap(), -1.0 / t.tan(), epsilon = 1e-14);
        }
        let s3 = make_foliation(3, 2, 1, 1).unwrap();
        assert!(mean_curvature(&s3, PI / 4.0).unwrap().abs() < 1e-15);
        assert!(mean_curvature(&s3, 0.0).is_err());
        assert!(mean_curvature(&s3, PI / 2.0).is_err());
    }

    #[test]
    fn density_closed_forms() {
        let s2 = density(&make_foliation(2, 1, 1, 1).unwrap());
        let s3 = density(&make_foliation(3, 2, 1, 1).unwrap());
        for &t in &[0.1, 0.4, 0.77, 1.3] {
            assert_relative_eq!(s2.theta(t), t.sin() / 2.0, epsilon = 1e-14);
            assert_relative_eq!(s3.theta(t), (2.0 * t).sin(), epsilon = 1e-14);
            assert_relative_eq!(s3.cumulative(t), t.sin().powi(2), epsilon = 1e-12);
        }
        assert_eq!(s2.endpoint_exponents, (1.0, 1.0));
    }

    #[test]
    fn logderiv_is_minus_mean_curvature() {
        for &(n, g, m0, m1) in &[(2, 1, 1, 1), (5, 2, 1, 3), (4, 3, 1, 1), (13, 6, 2, 2)] {
            let spec = make_foliation(n, g, m0, m1).unwrap();
            let d = density(&spec);
            for i in 1..50 {
                let t = spec.diameter * i as f64 / 50.0;
                let h = mean_curvature(&spec, t).unwrap();
                assert!((d.logderiv(t) + h).abs() <= 1e-12 * (1.0 + h.abs()));
            }
        }
    }
}
