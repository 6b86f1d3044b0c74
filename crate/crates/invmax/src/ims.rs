//! The bivariate inverted max-stable distribution in unit exponential
//! margins: joint survivor exp{-V(1/x, 1/y)}, exact conditional law of
//! Y | X = x, theoretical conditional quantiles, marginal re-expression and
//! tail-dependence diagnostics.

use crate::exponent::ExponentFamily;
use crate::numerics::find_root;
use crate::{Error, Result};

/// Inverted max-stable law built on an exponent measure; margins are unit
/// exponential by construction.
#[derive(Debug, Clone)]
pub struct ImsDistribution {
    family: ExponentFamily,
}

impl ImsDistribution {
    pub fn new(family: ExponentFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &ExponentFamily {
        &self.family
    }

    /// Pr(X > x, Y > y) = exp{-V(1/x, 1/y)}.
    pub fn joint_survivor(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("joint survivor needs positive arguments, got ({x}, {y})")));
        }
        Ok((-self.family.v(1.0 / x, 1.0 / y)?).exp())
    }

    /// Pr(Y > y | X = x) = -V₁(1, x/y) · exp{x - x V(1, x/y)}, evaluated in
    /// log space. Errors if (x, y) lies on a spectral-atom ray, where the
    /// conditional law has a point mass and the density formula breaks down.
    pub fn conditional_survivor(&self, y: f64, given_x: f64) -> Result<f64> {
        let x = given_x;
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("conditional survivor needs positive arguments, got ({x}, {y})")));
        }
        let v1 = self.family.v1(1.0, x / y)?;
        Ok(self.log_survivor_from_v1(v1, y, x).exp())
    }

    // Right-continuous flavour used for quantile inversion and sampling:
    // never errors on atom rays, takes the upper branch there.
    pub(crate) fn conditional_survivor_rc(&self, y: f64, given_x: f64) -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        if y.is_infinite() {
            return 0.0;
        }
        let v1 = self.family.v1_right(1.0, given_x / y);
        self.log_survivor_from_v1(v1, y, given_x).exp()
    }

    fn log_survivor_from_v1(&self, v1: f64, y: f64, x: f64) -> f64 {
        let v = self
            .family
            .v(1.0, x / y)
            .expect("positive arguments already checked");
        (-v1).max(0.0).ln() + x - x * v
    }

    /// Exact conditional quantile: the y with Pr(Y <= y | X = x) = p
    /// (generalized inverse when the conditional law has atoms).
    pub fn conditional_quantile_exact(&self, p: f64, given_x: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile probability must be in (0,1), got {p}")));
        }
        if !(given_x > 0.0) {
            return Err(Error::Domain(format!("conditioning value must be positive, got {given_x}")));
        }
        let cdf = |y: f64| 1.0 - self.conditional_survivor_rc(y, given_x);
        let mut lo = 1e-12;
        let mut hi = given_x.max(1.0);
        let mut grow = 0;
        while cdf(hi) < p {
            hi *= 4.0;
            grow += 1;
            if grow > 300 {
                return Err(Error::Numeric(format!("conditional quantile bracket failed at p={p}, x={given_x}")));
            }
        }
        while cdf(lo) > p {
            lo *= 1e-3;
            if lo < 1e-300 {
                break;
            }
        }
        find_root(|y| cdf(y) - p, lo, hi, 1e-9)
    }

    /// Map a unit-exponential-margin sample onto (m1, m2) margins through
    /// the probability-integral transforms; ranks are preserved exactly.
    pub fn transform_margins(
        &self,
        m1: &MarginSpec,
        m2: &MarginSpec,
        sample: &[(f64, f64)],
    ) -> Result<Vec<(f64, f64)>> {
        sample
            .iter()
            .map(|&(x, y)| Ok((m1.k_inv(x)?, m2.k_inv(y)?)))
            .collect()
    }

    /// Sub-asymptotic dependence diagnostics on a probability grid:
    /// chi(p) = Pr(Y > q_p | X > q_p) and the diagonal decay-rate estimate
    /// log Pr(X > q, Y > q) / log Pr(X > q) -> 1/eta.
    pub fn chi_bar_diagnostics(&self, prob_grid: &[f64]) -> Result<Vec<ChiRow>> {
        prob_grid
            .iter()
            .map(|&p| {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::Domain(format!("chi grid probabilities must be in (0,1), got {p}")));
                }
                let q = -(1.0 - p).ln();
                let joint = self.joint_survivor(q, q)?;
                Ok(ChiRow { p, q, chi: joint / (1.0 - p), inv_eta_estimate: joint.ln() / (-q) })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChiRow {
    pub p: f64,
    pub q: f64,
    pub chi: f64,
    /// estimate of 1/eta = V(1,1) from the diagonal at this level
    pub inv_eta_estimate: f64,
}

/// A marginal distribution together with the exponential-scale transform
/// K(y) = -log{1 - H(y)} and its inverse.
#[derive(Debug, Clone)]
pub enum MarginSpec {
    UnitExponential,
    UnitFrechet,
    Pareto { alpha: f64 },
    Empirical { sorted: Vec<f64> },
}

impl MarginSpec {
    pub fn pareto(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("pareto margin needs alpha > 0, got {alpha}")));
        }
        Ok(Self::Pareto { alpha })
    }

    /// Build an empirical margin from observations; the sorted table must be
    /// strictly increasing for K to be invertible.
    pub fn empirical(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Data("empirical margin needs at least two observations".into()));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Data("empirical margin table must be strictly increasing (ties found)".into()));
        }
        Ok(Self::Empirical { sorted: values })
    }

    /// K(y) = -log{1 - H(y)}: maps the margin onto unit exponential scale.
    pub fn k(&self, y: f64) -> Result<f64> {
        match self {
            Self::UnitExponential => Ok(y),
            Self::UnitFrechet => {
                if y <= 0.0 {
                    return Err(Error::Domain("frechet margin support is y > 0".into()));
                }
                Ok(-(-(-1.0 / y).exp()).ln_1p())
            }
            Self::Pareto { alpha } => {
                if y <= 1.0 {
                    return Err(Error::Domain("pareto margin support is y > 1".into()));
                }
                Ok(alpha * y.ln())
            }
            Self::Empirical { sorted } => {
                let p = empirical_cdf(sorted, y);
                Ok(-(1.0 - p).ln())
            }
        }
    }

    /// K⁻¹(v) = H⁻¹{1 - exp(-v)}.
    pub fn k_inv(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("exponential-scale value must be positive, got {v}")));
        }
        match self {
            Self::UnitExponential => Ok(v),
            Self::UnitFrechet => Ok(-1.0 / (-(-v).exp()).ln_1p()),
            Self::Pareto { alpha } => Ok((v / alpha).exp()),
            Self::Empirical { sorted } => {
                let p = 1.0 - (-v).exp();
                Ok(empirical_quantile(sorted, p))
            }
        }
    }
}

// Weibull plotting positions i/(n+1) with linear interpolation; linearly
// extended on the outer segments so K stays strictly increasing.
fn empirical_cdf(sorted: &[f64], y: f64) -> f64 {
    let n = sorted.len();
    let pos = |i: usize| (i + 1) as f64 / (n + 1) as f64;
    if y <= sorted[0] {
        let slope = (pos(1) - pos(0)) / (sorted[1] - sorted[0]);
        return (pos(0) + (y - sorted[0]) * slope).max(1e-12);
    }
    if y >= sorted[n - 1] {
        let slope = (pos(n - 1) - pos(n - 2)) / (sorted[n - 1] - sorted[n - 2]);
        return (pos(n - 1) + (y - sorted[n - 1]) * slope).min(1.0 - 1e-12);
    }
    let idx = sorted.partition_point(|&v| v <= y) - 1;
    let t = (y - sorted[idx]) / (sorted[idx + 1] - sorted[idx]);
    pos(idx) + t * (pos(idx + 1) - pos(idx))
}

fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = |i: usize| (i + 1) as f64 / (n + 1) as f64;
    if p <= pos(0) {
        let slope = (sorted[1] - sorted[0]) / (pos(1) - pos(0));
        return sorted[0] + (p - pos(0)) * slope;
    }
    if p >= pos(n - 1) {
        let slope = (sorted[n - 1] - sorted[n - 2]) / (pos(n - 1) - pos(n - 2));
        return sorted[n - 1] + (p - pos(n - 1)) * slope;
    }
    let k = ((p * (n + 1) as f64) - 1.0).floor() as usize;
    let k = k.min(n - 2);
    let t = (p - pos(k)) / (pos(k + 1) - pos(k));
    sorted[k] + t * (sorted[k + 1] - sorted[k])
}
