//! Radial spectra, content functions and Pompeiu-failure certificates for
//! isoparametric foliations of round spheres.

pub mod cartan;
pub mod circle;
pub mod content;
pub mod error;
pub mod foliation;
pub mod harmonics;
pub mod polynomial;
pub mod quadrature;
pub mod radial_poly;
pub mod report;
pub mod sampling;
pub mod series;
pub mod spectrum;
pub mod tube;
pub mod verifier;

pub use cartan::{cartan_polynomial, rho_from_point, validate_cartan, CartanPolynomial, ValidationReport};
pub use circle::{arc_integral_coeffs, multi_arc_test, pompeiu_classify_arc, ArcClassification, FourierFunction};
pub use content::{content_function, freak_set, freak_set_detailed, ContentFunction, FreakZero};
pub use error::{Error, Result};
pub use foliation::{density, make_foliation, mean_curvature, DensityProfile, FoliationParams, FoliationSpec};
pub use harmonics::{addition_formula_check, harmonic_basis, radialize, EigenBasis};
pub use polynomial::{Polynomial, PolynomialBank};
pub use radial_poly::{gram_polynomial, recurrence_polynomial, rodrigues_polynomial};
pub use report::{RunConfig, Table};
pub use sampling::{Rotation, DEFAULT_SEED};
pub use spectrum::{closed_form_spectrum, solve_radial_spectrum, RadialEigenpair};
pub use tube::{integrate_over_tube, IntegralEstimate, TubeRegion};
pub use verifier::{
    clifford_lambda2, radial_positive_control, verify_freak_radius, verify_nonradial_failure, PompeiuReport, Verdict,
};
