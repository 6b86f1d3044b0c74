//! Bivariate inverted max-stable distributions in unit exponential margins:
//! exponent-measure catalog, exact joint and conditional laws, the norming
//! functions and limit distributions of their conditioned extremes, an exact
//! sampler, and pseudo-likelihood fitting of conditional tail models.
//!
//! The crate is organised as a small numerical kernel ([`numerics`]) plus one
//! module per concern:
//!
//! - [`exponent`] — parametric families of bivariate exponent measures
//!   V(x, y) with partial derivatives, spectral densities and endpoint atoms;
//! - [`ims`] — the inverted max-stable distribution built on an exponent
//!   measure: joint survivor, conditional law, marginal re-expression;
//! - [`norming`] — location/scale norming functions a(x), b(x), limit laws G,
//!   and numerical checks for regular and Γ-variation;
//! - [`simulate`] — exact sampling by conditional inversion with seeded,
//!   replicable streams;
//! - [`fit`] — threshold-exceedance fitting of conditional tail models under
//!   a working normal likelihood, residuals and quantile curves.

pub mod exponent;
pub mod fit;
pub mod ims;
pub mod norming;
pub mod numerics;
pub mod simulate;
pub mod verify;

/// Crate-wide error type. The coarse variants map onto the CLI exit-code
/// contract (domain, data, numeric).
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("no sign change on [{lo}, {hi}]: cannot bracket a root")]
    Bracket { lo: f64, hi: f64 },
    #[error("quadrature did not converge: best estimate {estimate} (error bound {error})")]
    QuadNonConvergence { estimate: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub use exponent::ExponentFamily;
pub use ims::{ImsDistribution, MarginSpec};
pub use norming::{LimitLaw, NormingPair};
pub use numerics::{QuadratureSpec, RandomStream};
pub use simulate::SampleSet;
