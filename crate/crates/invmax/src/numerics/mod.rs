//! Shared numerical kernel: special functions, adaptive quadrature,
//! root-finding, derivative-free optimisation and seeded random streams.
//!
//! Everything here is self-contained (no external numerical dependency) and
//! pure: identical inputs give identical outputs.

mod optim;
mod quad;
mod rng;
mod root;
mod special;

pub use optim::{minimize, MinimizeResult};
pub use quad::{integrate, QuadResult};
pub use rng::RandomStream;
pub use root::find_root;
pub use special::{
    erf, erfc, ln_gamma, reg_inc_beta, std_normal_cdf, std_normal_pdf, std_normal_quantile,
    student_t_cdf, student_t_pdf,
};

/// Tolerances and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> crate::Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(crate::Error::Domain(format!("abs_tol must be > 0, got {abs_tol}")));
        }
        if !(rel_tol >= 0.0) {
            return Err(crate::Error::Domain(format!("rel_tol must be >= 0, got {rel_tol}")));
        }
        if max_subdivisions < 1 {
            return Err(crate::Error::Domain("max_subdivisions must be >= 1".into()));
        }
        Ok(Self { abs_tol, rel_tol, max_subdivisions })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_subdivisions: 4000 }
    }
}
