//! Pseudo-likelihood fitting of conditional tail models to threshold
//! exceedances. The residual law is treated as Normal(mu, sigma^2) during
//! maximisation (the working assumption), while final conditional quantile
//! curves use empirical residual quantiles, so they are insulated from that
//! misspecification.

use crate::ims::ImsDistribution;
use crate::norming::NormingPair;
use crate::numerics::{minimize, std_normal_quantile};
use crate::simulate::SampleSet;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Which parametric family of norming functions is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionalModelKind {
    /// a(x) = alpha x, b(x) = x^beta with alpha in \[0,1\], beta < 1
    Canonical,
    /// the inverted-Smith norming family indexed by lambda > 0
    SmithNorming,
    /// the Γ-varying norming family indexed by (gamma, kappa, delta)
    GammaNorming,
}

impl ConditionalModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Canonical => "canonical",
            Self::SmithNorming => "smith",
            Self::GammaNorming => "gamma",
        }
    }
}

/// A fitted conditional tail model.
#[derive(Debug, Clone)]
pub struct ConditionalFit {
    pub kind: ConditionalModelKind,
    pub estimates: BTreeMap<String, f64>,
    pub norming: NormingPair,
    pub mu: f64,
    pub sigma: f64,
    pub threshold_u: f64,
    pub residuals: Vec<f64>,
    pub nll: f64,
    pub converged: bool,
    pub n_exceed: usize,
}

/// A fitted conditional quantile curve q_p(x) = a(x) + b(x) z_p.
#[derive(Debug, Clone)]
pub struct QuantileCurve {
    pub prob: f64,
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Per-curve discrepancy against the exact theoretical quantiles.
#[derive(Debug, Clone)]
pub struct DiscrepancyTable {
    /// (p, x, fitted, exact)
    pub rows: Vec<(f64, f64, f64, f64)>,
    /// (p, mean |fitted - exact| over the grid)
    pub mean_abs: Vec<(f64, f64)>,
}

pub fn fit_model(
    data: &SampleSet,
    kind: ConditionalModelKind,
    threshold_quantile: f64,
) -> Result<ConditionalFit> {
    fit_pairs(&data.pairs, kind, threshold_quantile, false)
}

/// Fit on raw pairs. The threshold is u = -log(1 - q) on the exponential
/// scale by default; with `empirical_threshold` it is the empirical
/// q-quantile of the conditioning variable.
pub fn fit_pairs(
    pairs: &[(f64, f64)],
    kind: ConditionalModelKind,
    threshold_quantile: f64,
    empirical_threshold: bool,
) -> Result<ConditionalFit> {
    if !(threshold_quantile > 0.0 && threshold_quantile < 1.0) {
        return Err(Error::Domain(format!(
            "threshold quantile must be in (0,1), got {threshold_quantile}"
        )));
    }
    let u = if empirical_threshold {
        let mut xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        type7_quantile(&xs, threshold_quantile)
    } else {
        -(1.0 - threshold_quantile).ln()
    };
    let exceed: Vec<(f64, f64)> = pairs.iter().copied().filter(|p| p.0 > u).collect();
    if exceed.len() < 30 {
        return Err(Error::Data(format!(
            "need at least 30 exceedances above u = {u:.4}, found {}",
            exceed.len()
        )));
    }
    if !matches!(kind, ConditionalModelKind::Canonical) && u <= 1.0 {
        return Err(Error::Data(format!(
            "the {} norming functions need conditioning values above 1 (log x > 0); threshold u = {u:.4}",
            kind.name()
        )));
    }

    let init = initialize_parameters(pairs, u, kind)?;
    let raw0 = to_unconstrained(kind, &init);
    let scale = vec![0.5; raw0.len()];
    let xs: Vec<f64> = exceed.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = exceed.iter().map(|p| p.1).collect();
    let objective = |raw: &[f64]| {
        let nat = to_natural(kind, raw);
        working_nll(kind, &nat, &xs, &ys)
    };
    let res = minimize(objective, &raw0, &scale, 4000)?;
    let nat = to_natural(kind, &res.point);
    let (norming, mu, sigma) = unpack(kind, &nat);
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (y - norming.a(x)) / norming.b(x))
        .collect();
    let mut estimates = BTreeMap::new();
    for (name, value) in param_names(kind).iter().zip(&nat) {
        estimates.insert((*name).to_string(), *value);
    }
    Ok(ConditionalFit {
        kind,
        estimates,
        norming,
        mu,
        sigma,
        threshold_u: u,
        residuals,
        nll: res.value,
        converged: res.converged,
        n_exceed: exceed.len(),
    })
}

fn param_names(kind: ConditionalModelKind) -> &'static [&'static str] {
    match kind {
        ConditionalModelKind::Canonical => &["alpha", "beta", "mu", "sigma"],
        ConditionalModelKind::SmithNorming => &["lambda", "mu", "sigma"],
        ConditionalModelKind::GammaNorming => &["gamma", "kappa", "delta", "mu", "sigma"],
    }
}

fn unpack(kind: ConditionalModelKind, nat: &[f64]) -> (NormingPair, f64, f64) {
    match kind {
        ConditionalModelKind::Canonical => (
            NormingPair::Canonical { alpha: nat[0], beta: nat[1] },
            nat[2],
            nat[3],
        ),
        ConditionalModelKind::SmithNorming => {
            (NormingPair::Smith { lambda: nat[0] }, nat[1], nat[2])
        }
        ConditionalModelKind::GammaNorming => (
            NormingPair::GammaVary { gamma: nat[0], kappa: nat[1], delta: nat[2] },
            nat[3],
            nat[4],
        ),
    }
}

// box constraints by smooth reparameterisation: logit for alpha in (0,1),
// beta = 0.999 - exp(p) for beta <= 0.999, log for positive parameters
fn to_unconstrained(kind: ConditionalModelKind, nat: &[f64]) -> Vec<f64> {
    match kind {
        ConditionalModelKind::Canonical => vec![
            (nat[0] / (1.0 - nat[0])).ln(),
            (0.999 - nat[1]).ln(),
            nat[2],
            nat[3].ln(),
        ],
        ConditionalModelKind::SmithNorming => vec![nat[0].ln(), nat[1], nat[2].ln()],
        ConditionalModelKind::GammaNorming => {
            vec![nat[0].ln(), nat[1].ln(), nat[2], nat[3], nat[4].ln()]
        }
    }
}

fn to_natural(kind: ConditionalModelKind, raw: &[f64]) -> Vec<f64> {
    match kind {
        ConditionalModelKind::Canonical => vec![
            1.0 / (1.0 + (-raw[0]).exp()),
            0.999 - raw[1].exp(),
            raw[2],
            raw[3].exp(),
        ],
        ConditionalModelKind::SmithNorming => vec![raw[0].exp(), raw[1], raw[2].exp()],
        ConditionalModelKind::GammaNorming => {
            vec![raw[0].exp(), raw[1].exp(), raw[2], raw[3], raw[4].exp()]
        }
    }
}

// negative log pseudo-likelihood under the working normal residual model:
// sum log b + n log sigma + sum (y - a - b mu)^2 / (2 b^2 sigma^2)
fn working_nll(kind: ConditionalModelKind, nat: &[f64], xs: &[f64], ys: &[f64]) -> f64 {
    let (norming, mu, sigma) = unpack(kind, nat);
    if !(sigma > 0.0) || !sigma.is_finite() {
        return f64::MAX;
    }
    let mut nll = xs.len() as f64 * sigma.ln();
    for (&x, &y) in xs.iter().zip(ys) {
        let a = norming.a(x);
        let b = norming.b(x);
        if !(b > 0.0) || !a.is_finite() {
            return f64::MAX;
        }
        let z = y - a - b * mu;
        nll += b.ln() + z * z / (2.0 * b * b * sigma * sigma);
    }
    if nll.is_finite() {
        nll
    } else {
        f64::MAX
    }
}

/// Starting values on the natural scale.
pub fn initialize_parameters(
    pairs: &[(f64, f64)],
    u: f64,
    kind: ConditionalModelKind,
) -> Result<Vec<f64>> {
    let exceed: Vec<(f64, f64)> = pairs.iter().copied().filter(|p| p.0 > u).collect();
    if exceed.is_empty() {
        return Err(Error::Data("no exceedances to initialize from".into()));
    }
    let ys: Vec<f64> = exceed.iter().map(|p| p.1).collect();
    let spread = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread == 0.0 {
        return Err(Error::Data("degenerate data: all conditioned values equal".into()));
    }
    match kind {
        ConditionalModelKind::Canonical => {
            let alpha0 = rank_correlation(&exceed).clamp(0.05, 0.95);
            let beta0 = 0.2;
            let scaled: Vec<f64> =
                exceed.iter().map(|&(x, y)| y / x.powf(beta0)).collect();
            let m = scaled.iter().sum::<f64>() / scaled.len() as f64;
            let var =
                scaled.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / scaled.len() as f64;
            Ok(vec![alpha0, beta0, 0.0, var.sqrt().max(1e-3)])
        }
        ConditionalModelKind::SmithNorming => {
            let n = pairs.len() as f64;
            let p_x = exceed.len() as f64 / n;
            let joint = pairs.iter().filter(|&&(x, y)| x > u && y > u).count() as f64 / n;
            let lambda0 = if joint > 0.0 && p_x > 0.0 && joint < p_x {
                let eta_hat = (p_x.ln() / joint.ln()).clamp(0.501, 0.999);
                2.0 * std_normal_quantile(1.0 / (2.0 * eta_hat))?
            } else {
                1.0
            };
            Ok(vec![lambda0.max(0.05), 0.0, 1.0])
        }
        ConditionalModelKind::GammaNorming => Ok(vec![1.0, 1.0, 0.0, 0.0, 1.0]),
    }
}

fn rank_correlation(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len();
    let rank_of = |get: &dyn Fn(&(f64, f64)) -> f64| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| get(&pairs[a]).total_cmp(&get(&pairs[b])));
        let mut r = vec![0.0; n];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    };
    let rx = rank_of(&|p| p.0);
    let ry = rank_of(&|p| p.1);
    let m = (n as f64 - 1.0) / 2.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        num += (rx[i] - m) * (ry[i] - m);
        den += (rx[i] - m) * (rx[i] - m);
    }
    num / den
}

/// Empirical quantile with linear interpolation (type 7).
pub fn type7_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = (h.floor() as usize).min(n - 2);
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Fitted conditional quantile curves q_p(x) = a(x) + b(x) ẑ_p with ẑ_p the
/// type-7 empirical quantile of the fit residuals.
pub fn quantile_curves(
    fit: &ConditionalFit,
    probs: &[f64],
    x_grid: &[f64],
) -> Result<Vec<QuantileCurve>> {
    if fit.residuals.is_empty() {
        return Err(Error::Data("fit carries no residuals".into()));
    }
    let mut sorted = fit.residuals.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    probs
        .iter()
        .map(|&p| {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Domain(format!("curve probability must be in (0,1), got {p}")));
            }
            let zp = type7_quantile(&sorted, p);
            let values = x_grid
                .iter()
                .map(|&x| fit.norming.a(x) + fit.norming.b(x) * zp)
                .collect();
            Ok(QuantileCurve { prob: p, x_grid: x_grid.to_vec(), values })
        })
        .collect()
}

/// Fitted-minus-exact table against the theoretical conditional quantiles.
pub fn compare_to_theory(curves: &[QuantileCurve], d: &ImsDistribution) -> Result<DiscrepancyTable> {
    let mut rows = Vec::new();
    let mut mean_abs = Vec::new();
    for c in curves {
        let mut acc = 0.0;
        for (&x, &q) in c.x_grid.iter().zip(&c.values) {
            let exact = d.conditional_quantile_exact(c.prob, x)?;
            acc += (q - exact).abs();
            rows.push((c.prob, x, q, exact));
        }
        mean_abs.push((c.prob, acc / c.x_grid.len() as f64));
    }
    Ok(DiscrepancyTable { rows, mean_abs })
}
