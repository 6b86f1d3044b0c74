//! Parametric catalog of bivariate exponent measures.
//!
//! Each family provides the exponent measure V(x, y) (homogeneous of order
//! -1, with V(x, ∞) = 1/x), its partial derivative V₁ = ∂V/∂x, the spectral
//! density h on (0, 1), endpoint atom masses H({0}), H({1}), and any interior
//! atoms. Validity diagnostics check the spectral moment constraint
//! ∫ w dH(w) = 1 and total mass 2 numerically.

mod spectral_table;

use crate::numerics::{self, integrate, QuadratureSpec};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use spectral_table::SpectralTable;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Density-defined family with a Γ-varying spectral tail
/// h(w) ~ c·w^δ·exp(-κ·w^{-γ}) as w → 0⁺, completed symmetrically by
/// mirroring the tail about w = 1/2 and normalising to total mass 2.
#[derive(Debug, Clone)]
pub struct GammaVaryingFamily {
    pub gamma: f64,
    pub kappa: f64,
    pub delta: f64,
    table: Arc<SpectralTable>,
}

impl GammaVaryingFamily {
    fn ln_raw(&self, w: f64) -> f64 {
        let m = w.min(1.0 - w);
        self.delta * m.ln() - self.kappa * m.powf(-self.gamma)
    }

    /// Normalising constant c: the completed density is c·m(w)^δ·e^{-κ m(w)^{-γ}}.
    /// Because the mirror completion leaves the (0, 1/2] branch untouched,
    /// c is also the multiplicative constant of the w → 0⁺ tail.
    pub fn tail_scale(&self) -> f64 {
        self.table.norm
    }

    fn cumulative(&self, w: f64) -> (f64, f64) {
        self.table.cumulative(&|t| self.ln_raw(t), w)
    }
}

/// A bivariate exponent measure from the catalog.
#[derive(Debug, Clone)]
pub enum ExponentFamily {
    Smith { lambda: f64 },
    Schlather { rho: f64 },
    ExtremalT { nu: f64, rho: f64 },
    MixedLogistic { theta: f64 },
    AsymmetricLogistic { theta: f64, phi: f64, alpha: f64 },
    AsymmetricMixed { theta: f64, phi: f64 },
    MarshallOlkin { alpha: f64 },
    Logistic { r: f64 },
    GammaVarying(GammaVaryingFamily),
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl ExponentFamily {
    pub fn smith(lambda: f64) -> Result<Self> {
        check(lambda.is_finite() && lambda > 0.0, || {
            format!("smith requires lambda in (0, inf), got {lambda}")
        })?;
        Ok(Self::Smith { lambda })
    }

    pub fn schlather(rho: f64) -> Result<Self> {
        check(rho > -1.0 && rho < 1.0, || format!("schlather requires rho in (-1, 1), got {rho}"))?;
        Ok(Self::Schlather { rho })
    }

    pub fn extremal_t(nu: f64, rho: f64) -> Result<Self> {
        check(nu.is_finite() && nu > 0.0, || format!("extremal-t requires nu > 0, got {nu}"))?;
        check(rho > -1.0 && rho < 1.0, || format!("extremal-t requires rho in (-1, 1), got {rho}"))?;
        Ok(Self::ExtremalT { nu, rho })
    }

    pub fn mixed_logistic(theta: f64) -> Result<Self> {
        check(theta > 0.0 && theta < 1.0, || {
            format!("mixed logistic requires theta in (0, 1), got {theta}")
        })?;
        Ok(Self::MixedLogistic { theta })
    }

    pub fn asymmetric_logistic(theta: f64, phi: f64, alpha: f64) -> Result<Self> {
        check(
            (0.0..=1.0).contains(&theta) && (0.0..=1.0).contains(&phi) && (0.0..=1.0).contains(&alpha),
            || format!("asymmetric logistic requires 0 <= theta, phi, alpha <= 1, got ({theta}, {phi}, {alpha})"),
        )?;
        Ok(Self::AsymmetricLogistic { theta, phi, alpha })
    }

    pub fn asymmetric_mixed(theta: f64, phi: f64) -> Result<Self> {
        check(theta > 0.0 && theta + 3.0 * phi > 0.0, || {
            format!("asymmetric mixed requires theta, theta + 3 phi > 0, got ({theta}, {phi})")
        })?;
        check(theta + phi <= 1.0 && theta + 2.0 * phi <= 1.0, || {
            format!("asymmetric mixed requires theta + phi, theta + 2 phi <= 1, got ({theta}, {phi})")
        })?;
        Ok(Self::AsymmetricMixed { theta, phi })
    }

    pub fn marshall_olkin(alpha: f64) -> Result<Self> {
        check((0.0..=1.0).contains(&alpha), || {
            format!("marshall-olkin requires alpha in [0, 1], got {alpha}")
        })?;
        Ok(Self::MarshallOlkin { alpha })
    }

    pub fn logistic(r: f64) -> Result<Self> {
        check(r > 0.0 && r <= 1.0, || format!("logistic requires parameter in (0, 1], got {r}"))?;
        Ok(Self::Logistic { r })
    }

    pub fn gamma_varying(gamma: f64, kappa: f64, delta: f64) -> Result<Self> {
        check(gamma.is_finite() && gamma > 0.0, || format!("gamma-varying requires gamma > 0, got {gamma}"))?;
        check(kappa.is_finite() && kappa > 0.0, || format!("gamma-varying requires kappa > 0, got {kappa}"))?;
        check(delta.is_finite(), || format!("gamma-varying requires finite delta, got {delta}"))?;
        let table = SpectralTable::build(move |w: f64| {
            let m = w.min(1.0 - w);
            delta * m.ln() - kappa * m.powf(-gamma)
        });
        Ok(Self::GammaVarying(GammaVaryingFamily { gamma, kappa, delta, table: Arc::new(table) }))
    }

    /// Exponent measure V(x, y). Accepts +∞ in either coordinate, where the
    /// marginal identity V(x, ∞) = 1/x is exact.
    pub fn v(&self, x: f64, y: f64) -> Result<f64> {
        check(x > 0.0 && y > 0.0, || format!("V requires positive arguments, got ({x}, {y})"))?;
        if x.is_infinite() {
            return Ok(1.0 / y);
        }
        if y.is_infinite() {
            return Ok(1.0 / x);
        }
        Ok(self.v_inner(x, y))
    }

    fn v_inner(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::Smith { lambda } => {
                let q = lambda / 2.0 + (y / x).ln() / lambda;
                numerics::std_normal_cdf(q) / x + numerics::std_normal_cdf(lambda - q) / y
            }
            Self::Schlather { rho } => {
                let a = (1.0 - 2.0 * (1.0 + rho) * x * y / ((x + y) * (x + y))).max(0.0).sqrt();
                0.5 * (1.0 / x + 1.0 / y) * (1.0 + a)
            }
            Self::ExtremalT { nu, rho } => {
                let s = ((1.0 - rho * rho) / (nu + 1.0)).sqrt();
                let a = ((y / x).powf(1.0 / nu) - rho) / s;
                let b = ((x / y).powf(1.0 / nu) - rho) / s;
                let ta = numerics::student_t_cdf(a, nu + 1.0).unwrap_or(f64::NAN);
                let tb = numerics::student_t_cdf(b, nu + 1.0).unwrap_or(f64::NAN);
                ta / x + tb / y
            }
            Self::MixedLogistic { theta } => 1.0 / x + 1.0 / y - theta / (x + y),
            Self::AsymmetricLogistic { theta, phi, alpha } => {
                let head = (1.0 - theta) / x + (1.0 - phi) / y;
                if *alpha == 0.0 {
                    head + (theta / x).max(phi / y)
                } else if *theta == 0.0 || *phi == 0.0 {
                    head + theta / x + phi / y
                } else {
                    let s = (theta / x).powf(1.0 / alpha) + (phi / y).powf(1.0 / alpha);
                    head + s.powf(*alpha)
                }
            }
            Self::AsymmetricMixed { theta, phi } => {
                let sum = x + y;
                1.0 / x + 1.0 / y - ((theta + phi) * y + (2.0 * phi + theta) * x) / (sum * sum)
            }
            Self::MarshallOlkin { alpha } => {
                alpha * (1.0 / x + 1.0 / y) + (1.0 - alpha) * (1.0 / x).max(1.0 / y)
            }
            Self::Logistic { r } => {
                if *r == 1.0 {
                    1.0 / x + 1.0 / y
                } else {
                    (x.powf(-1.0 / r) + y.powf(-1.0 / r)).powf(*r)
                }
            }
            Self::GammaVarying(f) => {
                let ws = x / (x + y);
                let (m0, m1) = f.cumulative(ws);
                (1.0 - m1) / x + (m0 - m1) / y
            }
        }
    }

    /// Partial derivative V₁(x, y) = ∂V/∂x. Errors on a spectral-atom ray.
    pub fn v1(&self, x: f64, y: f64) -> Result<f64> {
        check(x > 0.0 && y > 0.0, || format!("V1 requires positive arguments, got ({x}, {y})"))?;
        if y.is_infinite() {
            return Ok(-1.0 / (x * x));
        }
        for (w0, _) in self.interior_atoms() {
            let ray_y = x * w0 / (1.0 - w0);
            if (y - ray_y).abs() <= 1e-14 * (y + ray_y) {
                return Err(Error::Domain(format!(
                    "V1 undefined on the spectral-atom ray y = {ray_y} (atom at w = {w0})"
                )));
            }
        }
        Ok(self.v1_right(x, y))
    }

    // Right-continuous-in-y version: on an interior-atom ray returns the
    // upper-branch value, which is what generalized-inverse sampling needs.
    pub(crate) fn v1_right(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::Smith { lambda } => {
                let q = lambda / 2.0 + (y / x).ln() / lambda;
                -numerics::std_normal_cdf(q) / (x * x)
            }
            Self::Schlather { rho } => {
                let r = (x * x - 2.0 * rho * x * y + y * y).sqrt();
                (rho * x - y - r) / (2.0 * x * x * r)
            }
            Self::ExtremalT { .. } => {
                // central differences with Richardson extrapolation
                let h = 1e-6 * x.max(1.0);
                let d = |h: f64| (self.v_inner(x + h, y) - self.v_inner(x - h, y)) / (2.0 * h);
                let d1 = d(h);
                let d2 = d(0.5 * h);
                (4.0 * d2 - d1) / 3.0
            }
            Self::MixedLogistic { theta } => -1.0 / (x * x) + theta / ((x + y) * (x + y)),
            Self::AsymmetricLogistic { theta, phi, alpha } => {
                if *alpha == 0.0 {
                    if theta / x >= phi / y {
                        -1.0 / (x * x)
                    } else {
                        -(1.0 - theta) / (x * x)
                    }
                } else if *theta == 0.0 || *phi == 0.0 || *alpha == 1.0 {
                    -1.0 / (x * x)
                } else {
                    let s = (theta / x).powf(1.0 / alpha) + (phi / y).powf(1.0 / alpha);
                    -(1.0 - theta) / (x * x) - s.powf(alpha - 1.0) * (theta / x).powf(1.0 / alpha) / x
                }
            }
            Self::AsymmetricMixed { theta, phi } => {
                let sum = x + y;
                let t = (2.0 * phi + theta) * sum - 2.0 * ((theta + phi) * y + (2.0 * phi + theta) * x);
                -1.0 / (x * x) - t / (sum * sum * sum)
            }
            Self::MarshallOlkin { alpha } => {
                if y >= x {
                    -1.0 / (x * x)
                } else {
                    -alpha / (x * x)
                }
            }
            Self::Logistic { r } => {
                if *r == 1.0 {
                    -1.0 / (x * x)
                } else {
                    let s = x.powf(-1.0 / r) + y.powf(-1.0 / r);
                    -s.powf(r - 1.0) * x.powf(-1.0 / r - 1.0)
                }
            }
            Self::GammaVarying(f) => {
                let ws = x / (x + y);
                let (_, m1) = f.cumulative(ws);
                -(1.0 - m1) / (x * x)
            }
        }
    }

    /// Spectral density h(w) = -∂²V/∂x∂y (w, 1-w) on (0, 1); 0 outside the
    /// interior support (atom-only families have h ≡ 0).
    pub fn spectral_density(&self, w: f64) -> f64 {
        if !(w > 0.0 && w < 1.0) {
            return 0.0;
        }
        match self {
            Self::Smith { lambda } => {
                let q = lambda / 2.0 + ((1.0 - w) / w).ln() / lambda;
                numerics::std_normal_pdf(q) / (lambda * w * w * (1.0 - w))
            }
            Self::Schlather { rho } => {
                let b = 1.0 - 2.0 * (1.0 + rho) * w * (1.0 - w);
                (1.0 - rho * rho) / (2.0 * b.powf(1.5))
            }
            Self::ExtremalT { nu, rho } => {
                let s = ((1.0 - rho * rho) / (nu + 1.0)).sqrt();
                let r = (1.0 - w) / w;
                let a = (r.powf(1.0 / nu) - rho) / s;
                numerics::student_t_pdf(a, nu + 1.0) * r.powf(1.0 / nu - 1.0) / (nu * s * w.powi(3))
            }
            Self::MixedLogistic { theta } => 2.0 * theta,
            Self::AsymmetricLogistic { theta, phi, alpha } => {
                if *alpha == 0.0 || *alpha == 1.0 || *theta == 0.0 || *phi == 0.0 {
                    return 0.0;
                }
                // log space: the power singularities at both endpoints
                // overflow f64 long before the density stops mattering
                let ln_s = log_sum_exp((theta / w).ln() / alpha, (phi / (1.0 - w)).ln() / alpha);
                (((1.0 - alpha) / alpha).ln()
                    + (theta * phi).ln() / alpha
                    + (-1.0 - 1.0 / alpha) * (w * (1.0 - w)).ln()
                    + (alpha - 2.0) * ln_s)
                    .exp()
            }
            Self::AsymmetricMixed { theta, phi } => 2.0 * theta + 6.0 * phi * w,
            Self::MarshallOlkin { .. } => 0.0,
            Self::Logistic { r } => {
                if *r == 1.0 {
                    return 0.0;
                }
                let ln_s = log_sum_exp(-w.ln() / r, -(1.0 - w).ln() / r);
                (((1.0 - r) / r).ln() + (-1.0 - 1.0 / r) * (w * (1.0 - w)).ln() + (r - 2.0) * ln_s)
                    .exp()
            }
            Self::GammaVarying(f) => {
                let l = f.ln_raw(w);
                if l.is_finite() {
                    f.tail_scale() * l.exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// h(1 - u) evaluated stably for small u. Near the upper endpoint the
    /// complement 1 - w saturates at f64 resolution (ulp(1) ~ 2e-16), which
    /// starves singular upper tails of ~1e-4 of their mass; working in the
    /// mirrored coordinate keeps full precision there.
    pub fn spectral_density_mirrored(&self, u: f64) -> f64 {
        if !(u > 0.0 && u < 1.0) {
            return 0.0;
        }
        match self {
            Self::AsymmetricLogistic { theta, phi, alpha } => {
                if *alpha == 0.0 || *alpha == 1.0 || *theta == 0.0 || *phi == 0.0 {
                    return 0.0;
                }
                let ln_s = log_sum_exp((theta / (1.0 - u)).ln() / alpha, (phi / u).ln() / alpha);
                (((1.0 - alpha) / alpha).ln()
                    + (theta * phi).ln() / alpha
                    + (-1.0 - 1.0 / alpha) * (u * (1.0 - u)).ln()
                    + (alpha - 2.0) * ln_s)
                    .exp()
            }
            Self::AsymmetricMixed { theta, phi } => 2.0 * theta + 6.0 * phi * (1.0 - u),
            // the remaining exponent measures are symmetric, so h(1-u) = h(u)
            _ => self.spectral_density(u),
        }
    }

    /// Endpoint atom masses (H({0}), H({1})).
    pub fn atom_masses(&self) -> (f64, f64) {
        match self {
            Self::Smith { .. } | Self::GammaVarying(_) => (0.0, 0.0),
            Self::Schlather { rho } => ((1.0 - rho) / 2.0, (1.0 - rho) / 2.0),
            Self::ExtremalT { nu, rho } => {
                let m = numerics::student_t_cdf(-rho * ((nu + 1.0) / (1.0 - rho * rho)).sqrt(), nu + 1.0)
                    .expect("nu + 1 > 0");
                (m, m)
            }
            Self::MixedLogistic { theta } => (1.0 - theta, 1.0 - theta),
            Self::AsymmetricLogistic { theta, phi, alpha } => {
                // Table-1 masses hold in the interior of the parameter space;
                // at alpha = 1, theta = 0 or phi = 0 the logistic part
                // collapses into the margins and the measure is independence
                if *alpha == 1.0 || *theta == 0.0 || *phi == 0.0 {
                    (1.0, 1.0)
                } else {
                    (1.0 - phi, 1.0 - theta)
                }
            }
            Self::AsymmetricMixed { theta, phi } => (1.0 - theta - phi, 1.0 - theta - 2.0 * phi),
            Self::MarshallOlkin { alpha } => (*alpha, *alpha),
            Self::Logistic { r } => {
                if *r == 1.0 {
                    (1.0, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }

    /// Interior spectral atoms as (location, mass) pairs.
    pub fn interior_atoms(&self) -> Vec<(f64, f64)> {
        match self {
            Self::MarshallOlkin { alpha } if *alpha < 1.0 => vec![(0.5, 2.0 * (1.0 - alpha))],
            Self::AsymmetricLogistic { theta, phi, alpha }
                if *alpha == 0.0 && theta + phi > 0.0 && *theta > 0.0 && *phi > 0.0 =>
            {
                vec![(theta / (theta + phi), theta + phi)]
            }
            _ => Vec::new(),
        }
    }

    /// Support endpoints (w_lower, w_upper) of the spectral measure.
    pub fn endpoints(&self) -> (f64, f64) {
        match self {
            Self::MarshallOlkin { alpha } if *alpha == 0.0 => (0.5, 0.5),
            _ => (0.0, 1.0),
        }
    }

    /// Coefficient of tail dependence η = 1/V(1, 1) ∈ [1/2, 1].
    pub fn eta(&self) -> f64 {
        1.0 / self.v_inner(1.0, 1.0)
    }

    /// Numerical validity diagnostics: total spectral mass 2 and moment 1.
    /// The upper half of the density is integrated in the mirrored
    /// coordinate u = 1 - w so singular upper tails keep full resolution.
    pub fn validate(&self, spec: &QuadratureSpec) -> Result<ValidationReport> {
        let (wl, wu) = self.endpoints();
        if wl == wu {
            return Ok(ValidationReport {
                total_mass: 2.0,
                moment: 1.0,
                mass_violation: 0.0,
                moment_violation: 0.0,
                degenerate: Some(format!(
                    "degenerate: w_lower = w_upper = {wl} (perfect dependence, excluded by the conditional limit theory)"
                )),
                pass: false,
            });
        }
        let (a0, a1) = self.atom_masses();
        let mut mass = a0 + a1;
        let mut moment = a1;
        for (w0, m) in self.interior_atoms() {
            mass += m;
            moment += w0 * m;
        }
        mass += integrate(|w| self.spectral_density(w), 0.0, 0.5, spec)?.value;
        mass += integrate(|u| self.spectral_density_mirrored(u), 0.0, 0.5, spec)?.value;
        moment += integrate(|w| w * self.spectral_density(w), 0.0, 0.5, spec)?.value;
        moment += integrate(|u| (1.0 - u) * self.spectral_density_mirrored(u), 0.0, 0.5, spec)?
            .value;
        let mass_violation = (mass - 2.0).abs();
        let moment_violation = (moment - 1.0).abs();
        Ok(ValidationReport {
            total_mass: mass,
            moment,
            mass_violation,
            moment_violation,
            degenerate: None,
            pass: mass_violation <= 1e-6 && moment_violation <= 1e-6,
        })
    }

    pub fn family_id(&self) -> &'static str {
        match self {
            Self::Smith { .. } => "smith",
            Self::Schlather { .. } => "schlather",
            Self::ExtremalT { .. } => "extremalt",
            Self::MixedLogistic { .. } => "mixedlogistic",
            Self::AsymmetricLogistic { .. } => "asymmetriclogistic",
            Self::AsymmetricMixed { .. } => "asymmetricmixed",
            Self::MarshallOlkin { .. } => "marshallolkin",
            Self::Logistic { .. } => "logistic",
            Self::GammaVarying(_) => "gammavarying",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        match self {
            Self::Smith { lambda } => {
                m.insert("lambda".into(), *lambda);
            }
            Self::Schlather { rho } => {
                m.insert("rho".into(), *rho);
            }
            Self::ExtremalT { nu, rho } => {
                m.insert("nu".into(), *nu);
                m.insert("rho".into(), *rho);
            }
            Self::MixedLogistic { theta } => {
                m.insert("theta".into(), *theta);
            }
            Self::AsymmetricLogistic { theta, phi, alpha } => {
                m.insert("theta".into(), *theta);
                m.insert("phi".into(), *phi);
                m.insert("alpha".into(), *alpha);
            }
            Self::AsymmetricMixed { theta, phi } => {
                m.insert("theta".into(), *theta);
                m.insert("phi".into(), *phi);
            }
            Self::MarshallOlkin { alpha } => {
                m.insert("alpha".into(), *alpha);
            }
            Self::Logistic { r } => {
                m.insert("r".into(), *r);
            }
            Self::GammaVarying(f) => {
                m.insert("gamma".into(), f.gamma);
                m.insert("kappa".into(), f.kappa);
                m.insert("delta".into(), f.delta);
            }
        }
        m
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec { family_id: self.family_id().to_string(), params: self.params() }
    }
}

/// Serializable family specification: `{family_id, params}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FamilySpec {
    pub family_id: String,
    pub params: BTreeMap<String, f64>,
}

impl FamilySpec {
    /// Parse the key=value format, e.g. `family=smith lambda=1.3`.
    pub fn parse_kv(input: &str) -> Result<Self> {
        let mut family_id = None;
        let mut params = BTreeMap::new();
        for tok in input.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Data(format!("expected key=value, got '{tok}'")))?;
            if k == "family" {
                family_id = Some(v.to_string());
            } else {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::Data(format!("parameter '{k}' is not a number: '{v}'")))?;
                params.insert(k.to_string(), x);
            }
        }
        let family_id = family_id.ok_or_else(|| Error::Data("missing family=<id>".into()))?;
        Ok(Self { family_id, params })
    }

    pub fn build(&self) -> Result<ExponentFamily> {
        let get = |k: &str| -> Result<f64> {
            self.params
                .get(k)
                .copied()
                .ok_or_else(|| Error::Domain(format!("family '{}' needs parameter '{k}'", self.family_id)))
        };
        match self.family_id.as_str() {
            "smith" => ExponentFamily::smith(get("lambda")?),
            "schlather" => ExponentFamily::schlather(get("rho")?),
            "extremalt" => ExponentFamily::extremal_t(get("nu")?, get("rho")?),
            "mixedlogistic" => ExponentFamily::mixed_logistic(get("theta")?),
            "asymmetriclogistic" => {
                ExponentFamily::asymmetric_logistic(get("theta")?, get("phi")?, get("alpha")?)
            }
            "asymmetricmixed" => ExponentFamily::asymmetric_mixed(get("theta")?, get("phi")?),
            "marshallolkin" => ExponentFamily::marshall_olkin(get("alpha")?),
            "logistic" => ExponentFamily::logistic(get("r")?),
            "gammavarying" => {
                ExponentFamily::gamma_varying(get("gamma")?, get("kappa")?, get("delta")?)
            }
            other => Err(Error::Domain(format!("unknown family '{other}'"))),
        }
    }
}

/// Validity report for a spectral measure.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub total_mass: f64,
    pub moment: f64,
    pub mass_violation: f64,
    pub moment_violation: f64,
    pub degenerate: Option<String>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn max_violation(&self) -> f64 {
        self.mass_violation.max(self.moment_violation)
    }
}

/// Check mass/moment constraints for an arbitrary spectral description.
/// Exposed so diagnostics can be run on hand-built densities.
pub fn validate_spectral(
    h: &dyn Fn(f64) -> f64,
    endpoint_atoms: (f64, f64),
    interior_atoms: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<ValidationReport> {
    // split at interior atoms and at 1/2 (mirror completions may kink there)
    let mut cuts = vec![0.0, 0.5, 1.0];
    for (w0, _) in interior_atoms {
        cuts.push(*w0);
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let mut mass = endpoint_atoms.0 + endpoint_atoms.1;
    let mut moment = endpoint_atoms.1; // atoms contribute 0·H({0}) + 1·H({1})
    for (w0, m) in interior_atoms {
        mass += m;
        moment += w0 * m;
    }
    for pair in cuts.windows(2) {
        let r0 = integrate(h, pair[0], pair[1], spec)?;
        let r1 = integrate(|w| w * h(w), pair[0], pair[1], spec)?;
        mass += r0.value;
        moment += r1.value;
    }
    let mass_violation = (mass - 2.0).abs();
    let moment_violation = (moment - 1.0).abs();
    Ok(ValidationReport {
        total_mass: mass,
        moment,
        mass_violation,
        moment_violation,
        degenerate: None,
        pass: mass_violation <= 1e-6 && moment_violation <= 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::new(1e-10, 1e-10, 20_000).unwrap()
    }

    #[test]
    fn smith_v_at_unit_point() {
        // V(1,1) = 2 Phi(lambda/2); lambda = 1.3 gives 2 Phi(0.65) ~ 1.484308
        let f = ExponentFamily::smith(1.3).unwrap();
        assert_abs_diff_eq!(f.v(1.0, 1.0).unwrap(), 2.0 * numerics::std_normal_cdf(0.65), epsilon = 1e-14);
        assert_abs_diff_eq!(f.v(1.0, 1.0).unwrap(), 1.484308, epsilon = 1e-6);
        assert_abs_diff_eq!(f.eta(), 0.673714, epsilon = 1e-6);
    }

    #[test]
    fn schlather_v_at_unit_point() {
        for rho in [-0.5, 0.0, 0.9] {
            let f = ExponentFamily::schlather(rho).unwrap();
            assert_abs_diff_eq!(
                f.v(1.0, 1.0).unwrap(),
                1.0 + ((1.0 - rho) / 2.0).sqrt(),
                epsilon = 1e-14
            );
        }
        assert_abs_diff_eq!(
            ExponentFamily::schlather(0.0).unwrap().eta(),
            0.585786,
            epsilon = 1e-6
        );
    }

    #[test]
    fn marshall_olkin_independence() {
        let f = ExponentFamily::marshall_olkin(1.0).unwrap();
        for (x, y) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.1)] {
            assert_abs_diff_eq!(f.v(x, y).unwrap(), 1.0 / x + 1.0 / y, epsilon = 1e-14);
            assert_abs_diff_eq!(f.v1(x, y).unwrap(), -1.0 / (x * x), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(f.eta(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn marginal_consistency_v_at_infinity() {
        let fams = catalog_one_setting();
        for f in &fams {
            assert_abs_diff_eq!(f.v(0.7, f64::INFINITY).unwrap(), 1.0 / 0.7, epsilon = 1e-12);
            let nearly = f.v(0.7, 1e12).unwrap();
            assert_abs_diff_eq!(nearly, 1.0 / 0.7, epsilon = 1e-9);
        }
    }

    #[test]
    fn homogeneity_of_order_minus_one() {
        let fams = catalog_one_setting();
        for f in &fams {
            for t in [0.1f64, 0.5, 2.0, 10.0] {
                for (x, y) in [(1.0, 1.0), (0.4, 1.7), (3.0, 0.2)] {
                    let lhs = t * f.v(t * x, t * y).unwrap();
                    let rhs = f.v(x, y).unwrap();
                    assert!(
                        (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0),
                        "{}: t={t} ({x},{y}): {lhs} vs {rhs}",
                        f.family_id()
                    );
                }
            }
        }
    }

    #[test]
    fn v1_matches_central_differences() {
        let fams = catalog_one_setting();
        for f in &fams {
            for (x, y) in [(1.0, 1.3), (0.8, 0.41), (2.5, 6.0)] {
                // keep away from atom rays for MO-type families
                if f.interior_atoms().iter().any(|(w0, _)| {
                    let ray = x * w0 / (1.0 - w0);
                    (y - ray).abs() < 1e-3 * ray
                }) {
                    continue;
                }
                let h = 1e-6 * x.max(1.0);
                let fd = (f.v(x + h, y).unwrap() - f.v(x - h, y).unwrap()) / (2.0 * h);
                let an = f.v1(x, y).unwrap();
                assert!(
                    (fd - an).abs() <= 1e-5 * an.abs().max(1e-3),
                    "{} at ({x},{y}): fd={fd} analytic={an}",
                    f.family_id()
                );
            }
        }
    }

    #[test]
    fn extremal_t_v1_matches_known_identity() {
        // V1(x,y) = -T_{nu+1}(A(y/x))/x^2 with A(r) = (r^{1/nu} - rho)/s
        for (nu, rho) in [(1.0f64, 0.5f64), (2.0, 0.0), (0.5, -0.3)] {
            let f = ExponentFamily::extremal_t(nu, rho).unwrap();
            for (x, y) in [(1.0f64, 1.0f64), (1.0, 3.0), (2.5, 0.4)] {
                let s = ((1.0 - rho * rho) / (nu + 1.0)).sqrt();
                let a = ((y / x).powf(1.0 / nu) - rho) / s;
                let t = numerics::student_t_cdf(a, nu + 1.0).unwrap();
                assert_abs_diff_eq!(f.v1(x, y).unwrap(), -t / (x * x), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn endpoint_derivative_limit_along_sqrt_path() {
        // V1(1, x/y) -> w_l H({w_l}) - 1 = -1 for w_l = 0 families; the
        // error must shrink monotonically over x = 1e2, 1e4, 1e6.
        let fams: Vec<ExponentFamily> = vec![
            ExponentFamily::smith(1.3).unwrap(),
            ExponentFamily::schlather(0.0).unwrap(),
            ExponentFamily::mixed_logistic(0.5).unwrap(),
        ];
        for f in &fams {
            let mut errs = Vec::new();
            for x in [1e2f64, 1e4, 1e6] {
                let y = 0.5 * (1.0 + (1.0 + 4.0 * x).sqrt()); // y = sqrt(x + y)
                let v1 = f.v1(1.0, x / y).unwrap();
                errs.push((v1 + 1.0).abs());
            }
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "{}: {:?}", f.family_id(), errs);
        }
    }

    #[test]
    fn smith_spectral_density_tail_asymptote() {
        let lambda = 1.3;
        let f = ExponentFamily::smith(lambda).unwrap();
        for w in [1e-4f64, 1e-6, 1e-8] {
            let asym = ((-lambda * lambda / 8.0).exp() / (lambda * (2.0 * std::f64::consts::PI).sqrt()))
                * w.powf(-1.5)
                * (-(w.ln()).powi(2) / (2.0 * lambda * lambda)).exp();
            let rel = (f.spectral_density(w) - asym).abs() / asym;
            assert!(rel < 4.0 * w.sqrt(), "w={w}: rel={rel}");
        }
    }

    #[test]
    fn gamma_varying_tail_matches_prescription() {
        let f = ExponentFamily::gamma_varying(1.0, 1.0, 0.0).unwrap();
        let scale = match &f {
            ExponentFamily::GammaVarying(g) => g.tail_scale(),
            _ => unreachable!(),
        };
        for w in [1e-2f64, 5e-2, 0.2] {
            let expect = scale * (-1.0 / w).exp();
            assert_abs_diff_eq!(f.spectral_density(w), expect, epsilon = 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn atom_masses_per_table() {
        assert_eq!(ExponentFamily::schlather(0.0).unwrap().atom_masses().0, 0.5);
        assert_eq!(ExponentFamily::mixed_logistic(0.5).unwrap().atom_masses().0, 0.5);
        let et = ExponentFamily::extremal_t(3.0, 0.0).unwrap();
        assert_abs_diff_eq!(et.atom_masses().0, 0.5, epsilon = 1e-12); // T_{nu+1}(0) = 1/2
        let am = ExponentFamily::asymmetric_mixed(0.5, 0.1).unwrap();
        assert_abs_diff_eq!(am.atom_masses().0, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(am.atom_masses().1, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn table_atoms_match_numeric_limit() {
        // H({0}) = -y^2 lim_{x->0} dV/dy(x, y); x = 1e-5 balances the limit
        // truncation against cancellation in the finite difference (V ~ 1/x)
        let fams = catalog_one_setting();
        for f in &fams {
            let (h0, _) = f.atom_masses();
            let y = 1.0;
            let x = 1e-5;
            let e = 1e-6;
            let dvdy = (f.v(x, y + e).unwrap() - f.v(x, y - e).unwrap()) / (2.0 * e);
            let est = -y * y * dvdy;
            assert!(
                (est - h0).abs() < 1e-4,
                "{}: numeric {est} vs table {h0}",
                f.family_id()
            );
        }
    }

    #[test]
    fn catalog_validates_mass_and_moment() {
        for f in catalog_one_setting() {
            let rep = f.validate(&quad()).unwrap();
            assert!(
                rep.pass,
                "{} failed: mass={} moment={}",
                f.family_id(),
                rep.total_mass,
                rep.moment
            );
        }
    }

    #[test]
    fn scaled_density_fails_validation() {
        let f = ExponentFamily::logistic(0.5).unwrap();
        let scaled = |w: f64| 1.01 * f.spectral_density(w);
        let rep = validate_spectral(&scaled, (0.0, 0.0), &[], &quad()).unwrap();
        assert!(!rep.pass);
        assert_abs_diff_eq!(rep.moment_violation, 0.01, epsilon = 1e-4);
    }

    #[test]
    fn marshall_olkin_alpha_zero_degenerate() {
        let f = ExponentFamily::marshall_olkin(0.0).unwrap();
        let rep = f.validate(&quad()).unwrap();
        assert!(!rep.pass);
        assert!(rep.degenerate.is_some());
    }

    #[test]
    fn v1_errors_on_atom_ray() {
        let f = ExponentFamily::marshall_olkin(0.6).unwrap();
        assert!(f.v1(1.0, 1.0).is_err());
        assert!(f.v1(1.0, 1.5).is_ok());
    }

    #[test]
    fn parse_and_json_roundtrip() {
        let spec = FamilySpec::parse_kv("family=smith lambda=1.3").unwrap();
        let fam = spec.build().unwrap();
        assert_eq!(fam.family_id(), "smith");
        let js = serde_json::to_string(&fam.to_spec()).unwrap();
        let back: FamilySpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, fam.to_spec());

        let g = FamilySpec::parse_kv("family=gammavarying gamma=1.0 kappa=1.0 delta=0.0")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(g.family_id(), "gammavarying");

        assert!(FamilySpec::parse_kv("family=smith lambda=-1").unwrap().build().is_err());
        assert!(FamilySpec::parse_kv("lambda=1").is_err());
        assert!(FamilySpec::parse_kv("family=unknown").unwrap().build().is_err());
    }

    #[test]
    fn gamma_varying_catalog_constants() {
        // normalising constants computed independently with adaptive
        // quadrature in a prototype run (scipy quad, rel tol ~1e-10)
        let cases = [((1.0, 1.0, 0.0), 53.28464989), ((0.5, 1.0, 0.0), 15.77416079), ((1.0, 2.0, 1.0), 1448.56108226)];
        for ((g, k, d), c_expect) in cases {
            let fam = ExponentFamily::gamma_varying(g, k, d).unwrap();
            let c = match &fam {
                ExponentFamily::GammaVarying(gv) => gv.tail_scale(),
                _ => unreachable!(),
            };
            assert!(
                ((c - c_expect) / c_expect).abs() < 1e-7,
                "c({g},{k},{d}) = {c}, expected {c_expect}"
            );
        }
        let fam = ExponentFamily::gamma_varying(1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(fam.v(1.0, 1.0).unwrap(), 1.1971767037, epsilon = 1e-8);
        assert_abs_diff_eq!(fam.eta(), 0.8352985795, epsilon = 1e-8);
    }

    pub(super) fn catalog_one_setting() -> Vec<ExponentFamily> {
        vec![
            ExponentFamily::smith(1.3).unwrap(),
            ExponentFamily::schlather(0.0).unwrap(),
            ExponentFamily::extremal_t(1.0, 0.5).unwrap(),
            ExponentFamily::mixed_logistic(0.5).unwrap(),
            ExponentFamily::asymmetric_logistic(0.7, 0.9, 0.5).unwrap(),
            ExponentFamily::asymmetric_mixed(0.5, 0.1).unwrap(),
            ExponentFamily::marshall_olkin(0.6).unwrap(),
            ExponentFamily::logistic(0.5).unwrap(),
            ExponentFamily::gamma_varying(1.0, 1.0, 0.0).unwrap(),
        ]
    }
}
