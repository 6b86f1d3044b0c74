//! Globally adaptive quadrature with a nested Gauss–Legendre 7/15 pair.
//!
//! The worst panel (largest error estimate) is bisected until the summed
//! error estimate meets the requested tolerance or the subdivision budget is
//! exhausted. Panels never evaluate their endpoints, so integrable endpoint
//! singularities are handled by refinement shrinking toward the endpoint.

use super::QuadratureSpec;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error; ties broken by interval position for determinism
        self.err
            .total_cmp(&other.err)
            .then_with(|| self.lo.total_cmp(&other.lo))
    }
}

/// Adaptive estimate of ∫ f over (lo, hi).
///
/// Non-finite values of `f` at interior nodes are treated as 0 so that
/// integrable endpoint singularities (e.g. w^{-1/2}) do not poison panels;
/// the refinement toward the endpoint recovers the mass.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> crate::Result<QuadResult> {
    if !(lo < hi) {
        return Err(crate::Error::Domain(format!("integration bounds must satisfy lo < hi: [{lo}, {hi}]")));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(crate::Error::Domain("integration bounds must be finite".into()));
    }
    let mut heap = BinaryHeap::new();
    heap.push(panel_estimate(&mut f, lo, hi));
    let mut subdivisions = 1usize;

    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= tol {
            return Ok(QuadResult { value: total, error_estimate: err, subdivisions });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(crate::Error::QuadNonConvergence { estimate: total, error: err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval at floating-point resolution; keep its estimate as-is
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        heap.push(panel_estimate(&mut f, worst.lo, mid));
        heap.push(panel_estimate(&mut f, mid, worst.hi));
        subdivisions += 1;
    }
}

fn panel_estimate<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Panel {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let eval = |f: &mut F, t: f64| -> f64 {
        let v = f(c + h * t);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut g7 = 0.0;
    for &(x, w) in gl_rule(7) {
        g7 += w * eval(f, x);
    }
    let mut g15 = 0.0;
    for &(x, w) in gl_rule(15) {
        g15 += w * eval(f, x);
    }
    Panel { lo, hi, value: g15 * h, err: ((g15 - g7) * h).abs().max(1e-300) }
}

/// Gauss–Legendre nodes/weights on [-1, 1], computed once by Newton iteration
/// on the Legendre recurrence (machine accurate for these small orders).
fn gl_rule(n: usize) -> &'static [(f64, f64)] {
    use std::sync::OnceLock;
    static GL7: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static GL15: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let cell = match n {
        7 => &GL7,
        15 => &GL15,
        _ => unreachable!("only the 7/15 pair is used"),
    };
    cell.get_or_init(|| compute_gl(n))
}

fn compute_gl(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-style initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn default_spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn constant_and_polynomial() {
        let r = integrate(|_| 1.0, 0.0, 1.0, &default_spec()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        let r = integrate(|w| w * w * w - 2.0 * w + 0.5, -1.0, 2.0, &default_spec()).unwrap();
        // antiderivative w^4/4 - w^2 + w/2 evaluated on [-1, 2]
        let exact = (4.0 - 4.0 + 1.0) - (0.25 - 1.0 - 0.5);
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-13);
    }

    #[test]
    fn endpoint_singularity_w_to_minus_half() {
        let spec = QuadratureSpec::new(1e-11, 1e-11, 10_000).unwrap();
        let r = integrate(|w| w.powf(-0.5), 0.0, 1.0, &spec).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn reports_non_convergence_with_best_estimate() {
        let spec = QuadratureSpec::new(1e-14, 0.0, 3).unwrap();
        let err = integrate(|w| (50.0 * w).sin().abs(), 0.0, 3.0, &spec).unwrap_err();
        match err {
            crate::Error::QuadNonConvergence { estimate, error } => {
                assert!(estimate.is_finite());
                assert!(error > 1e-14);
            }
            other => panic!("expected QuadNonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn linearity_on_random_polynomials() {
        // |I(a f + b g) - a I(f) - b I(g)| stays within combined tolerance
        let spec = default_spec();
        let f = |w: f64| 3.0 * w * w - w + 1.0;
        let g = |w: f64| w * w * w * w - 2.0;
        let (a, b) = (1.7, -0.4);
        let i_f = integrate(f, 0.0, 2.0, &spec).unwrap().value;
        let i_g = integrate(g, 0.0, 2.0, &spec).unwrap().value;
        let i_c = integrate(|w| a * f(w) + b * g(w), 0.0, 2.0, &spec).unwrap().value;
        assert_abs_diff_eq!(i_c, a * i_f + b * i_g, epsilon = 1e-11);
    }

    #[test]
    fn bad_bounds_are_domain_errors() {
        assert!(integrate(|_| 1.0, 1.0, 0.0, &default_spec()).is_err());
        assert!(integrate(|_| 1.0, 0.0, f64::INFINITY, &default_spec()).is_err());
    }
}
