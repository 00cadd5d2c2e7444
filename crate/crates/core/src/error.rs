use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid g = {0}: the number of distinct principal curvatures must be one of {{1,2,3,4,6}}")]
    InvalidG(u32),

    #[error("dimension mismatch: n - 1 = {lhs} but g*(m0+m1)/2 = {rhs} for (n={n}, g={g}, m0={m0}, m1={m1})")]
    DimensionMismatch {
        n: u32,
        g: u32,
        m0: u32,
        m1: u32,
        lhs: f64,
        rhs: f64,
    },

    #[error("multiplicities must be positive (m0={m0}, m1={m1})")]
    ZeroMultiplicity { m0: u32, m1: u32 },

    #[error("odd g = {g} requires equal multiplicities, got m0={m0}, m1={m1}")]
    UnequalOddMultiplicities { g: u32, m0: u32, m1: u32 },

    #[error("endpoint exponent condition violated: (n-1)/g -+ c/g^2 = ({plus}, {minus}) must both be >= 1")]
    EndpointExponent { plus: f64, minus: f64 },

    #[error("explicit Cartan polynomial for g = {0} is not available (supported: 1, 2, 3)")]
    UnsupportedG(u32),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "collocation did not converge: residual {residual:.3e} at N={basis} and {residual_doubled:.3e} at N={basis_doubled} (tolerance {tol:.1e})"
    )]
    Convergence {
        basis: usize,
        residual: f64,
        basis_doubled: usize,
        residual_doubled: f64,
        tol: f64,
    },

    #[error("eigenvalues {lower} and {upper} are not separated (gap tolerance {tol:.1e})")]
    NotSimple { lower: f64, upper: f64, tol: f64 },

    #[error("adaptive quadrature exceeded depth {depth} on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64, depth: usize },

    #[error("zero scan for k = {k} is inconsistent: {found} zeros found but endpoint signs imply the opposite parity")]
    MissedZero { k: usize, found: usize },

    #[error("harmonic basis limited to 2 <= n <= 4 and degree <= {max_degree}, got n = {n}, degree = {degree}")]
    DimensionLimit { n: u32, degree: u32, max_degree: u32 },

    #[error("bin {bin} received {count} samples (< 10); increase num_samples or reduce num_bins")]
    EmptyBin { bin: usize, count: usize },

    #[error("eigenvalue {lambda} of degree {degree} is radial (k = {k}); it cannot witness Pompeiu failure")]
    SpectrumClash { degree: u32, lambda: f64, k: usize },

    #[error("radius {t} is not a zero of the content function for k = {k} (|Psi| = {value:.3e})")]
    NotAZero { t: f64, k: usize, value: f64 },

    #[error("thin shell around t = {t} received only {count} samples (< 1000)")]
    ShellStarvation { t: f64, count: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Bad input as opposed to a numerical failure.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            Error::Convergence { .. }
                | Error::NotSimple { .. }
                | Error::QuadratureFailure { .. }
                | Error::MissedZero { .. }
                | Error::EmptyBin { .. }
                | Error::ShellStarvation { .. }
        )
    }
}
