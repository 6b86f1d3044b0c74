//! Cross-module consistency checks: joint law vs conditional law, limit-law
//! convergence for every tail class, asymptote agreement, and the agreement
//! of the X = u and X > u conditioning routes.

use invmax::norming::{self, LimitLaw, NormingPair};
use invmax::numerics::{integrate, QuadratureSpec};
use invmax::{ExponentFamily, ImsDistribution};

fn u_sweep() -> [f64; 3] {
    [-(0.05f64.ln()), -(1e-7f64.ln()), -(1e-13f64.ln())]
}

#[test]
fn joint_survivor_consistent_with_conditional_by_integration() {
    // Pr(X > x, Y > y) = int_x^inf Pr(Y > y | X = s) e^{-s} ds
    let spec = QuadratureSpec::new(1e-11, 1e-11, 20_000).unwrap();
    let fams = [
        ExponentFamily::smith(1.3).unwrap(),
        ExponentFamily::schlather(0.0).unwrap(),
        ExponentFamily::logistic(0.5).unwrap(),
    ];
    for fam in fams {
        let d = ImsDistribution::new(fam.clone());
        for (x, y) in [(0.7, 0.7), (2.0, 1.0), (1.0, 3.0)] {
            let joint = d.joint_survivor(x, y).unwrap();
            let integral = integrate(
                |s| d.conditional_survivor(y, s).unwrap_or(0.0) * (-s).exp(),
                x,
                x + 45.0,
                &spec,
            )
            .unwrap()
            .value;
            assert!(
                (joint - integral).abs() < 1e-5,
                "{}: ({x},{y}) joint {joint} vs integral {integral}",
                fam.family_id()
            );
        }
    }
}

#[test]
fn smith_dependence_ordering_on_diagonal() {
    // smaller lambda = stronger dependence = larger joint survivor
    let x = 3.0;
    let mut last = f64::INFINITY;
    for lambda in [0.3, 0.8, 1.3, 2.0, 5.0] {
        let d = ImsDistribution::new(ExponentFamily::smith(lambda).unwrap());
        let s = d.joint_survivor(x, x).unwrap();
        assert!(s < last, "lambda={lambda}: {s} not below {last}");
        last = s;
    }
}

#[test]
fn conditional_survivor_between_independence_and_comonotone_envelopes() {
    let fams = [
        ExponentFamily::smith(0.8).unwrap(),
        ExponentFamily::schlather(0.5).unwrap(),
        ExponentFamily::logistic(0.4).unwrap(),
        ExponentFamily::mixed_logistic(0.7).unwrap(),
    ];
    let x = 6.0;
    for fam in fams {
        let d = ImsDistribution::new(fam.clone());
        for y in [0.5, 1.5, 3.0, 5.0] {
            let s = d.conditional_survivor(y, x).unwrap();
            let indep = (-y).exp();
            assert!(
                s >= indep - 1e-10 && s <= 1.0,
                "{} at y={y}: {s} vs independence {indep}",
                fam.family_id()
            );
        }
    }
}

#[test]
fn limit_convergence_all_tail_classes() {
    // D(u) over the p1-p3 sweep for the whole catalog except the Smith
    // family, whose rate is non-monotone over this sweep (covered below)
    let cases: Vec<ExponentFamily> = vec![
        ExponentFamily::logistic(0.5).unwrap(),          // Weibull-type limit
        ExponentFamily::schlather(0.0).unwrap(),         // exponential limit, atom at 0
        ExponentFamily::extremal_t(1.0, 0.5).unwrap(),   // exponential limit, atom at 0
        ExponentFamily::mixed_logistic(0.5).unwrap(),
        ExponentFamily::asymmetric_logistic(0.7, 0.9, 0.5).unwrap(),
        ExponentFamily::asymmetric_mixed(0.5, 0.1).unwrap(),
        ExponentFamily::marshall_olkin(0.6).unwrap(),
        ExponentFamily::gamma_varying(1.5, 1.0, 0.0).unwrap(), // reverted Gumbel
    ];
    for fam in cases {
        let d = ImsDistribution::new(fam.clone());
        let np = norming::norming_for(&fam).unwrap();
        let law = norming::limit_law_for(&fam).unwrap();
        let ds: Vec<f64> = u_sweep()
            .iter()
            .map(|&u| norming::sup_distance_to_limit(&d, &np, &law, u, 512).unwrap())
            .collect();
        // Marshall-Olkin reaches its limit exactly (the conditional survivor
        // below the singular ray is exp(-alpha y) for every x), so D sits at
        // float noise from u2 on; exact convergence counts as decreasing.
        let step_ok = |a: f64, b: f64| b < a || b <= 1e-12;
        assert!(
            step_ok(ds[0], ds[1]) && step_ok(ds[1], ds[2]),
            "{}: D(u) not decreasing: {ds:?}",
            fam.family_id()
        );
    }
}

#[test]
fn smith_limit_convergence_beyond_desk_scale() {
    // Smith converges at rate loglog u / sqrt(log u), which is not monotone
    // over the p1-p3 sweep (it peaks near u ~ 1.6e3); D(u) tracks that shape
    // and decreases from u3 onward.
    let fam = ExponentFamily::smith(1.3).unwrap();
    let d = ImsDistribution::new(fam.clone());
    let np = norming::norming_for(&fam).unwrap();
    let law = norming::limit_law_for(&fam).unwrap();
    let us = [29.933606, 100.0, 1e3, 1e4, 1e6];
    let ds: Vec<f64> = us
        .iter()
        .map(|&u| norming::sup_distance_to_limit(&d, &np, &law, u, 512).unwrap())
        .collect();
    for pair in ds.windows(2) {
        assert!(pair[1] < pair[0], "D not decreasing past desk scale: {ds:?}");
    }
    // net improvement across the pinned level sweep
    let d1 = norming::sup_distance_to_limit(&d, &np, &law, u_sweep()[0], 512).unwrap();
    assert!(ds[0] < d1, "D(u3) = {} should be below D(u1) = {d1}", ds[0]);
}

#[test]
fn smith_rate_product_stabilises_at_large_u() {
    let fam = ExponentFamily::smith(1.3).unwrap();
    let d = ImsDistribution::new(fam.clone());
    let np = norming::norming_for(&fam).unwrap();
    let law = norming::limit_law_for(&fam).unwrap();
    let us = [1e3, 1e4, 1e6, 1e9];
    let prods: Vec<f64> = us
        .iter()
        .map(|&u: &f64| {
            let dd = norming::sup_distance_to_limit(&d, &np, &law, u, 512).unwrap();
            dd * u.ln().sqrt() / u.ln().ln()
        })
        .collect();
    let (mn, mx) = prods
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(mx / mn < 1.6, "rate products far from constant: {prods:?}");
}

#[test]
fn gamma_rate_product_within_window_on_sweep() {
    let fam = ExponentFamily::gamma_varying(1.5, 1.0, 0.0).unwrap();
    let d = ImsDistribution::new(fam.clone());
    let np = norming::norming_for(&fam).unwrap();
    let law = norming::limit_law_for(&fam).unwrap();
    let prods: Vec<f64> = u_sweep()
        .iter()
        .map(|&u| {
            let dd = norming::sup_distance_to_limit(&d, &np, &law, u, 512).unwrap();
            dd * u.ln() / u.ln().ln()
        })
        .collect();
    let (mn, mx) = prods
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(mx / mn < 5.0, "{prods:?}");
}

#[test]
fn conditioning_on_level_vs_exceedance_agree() {
    // Pr{(Y - a(u))/b(u) <= z | X = u} and | X > u converge to the same G;
    // their gap shrinks from u1 to u2
    let spec = QuadratureSpec::new(1e-10, 1e-10, 20_000).unwrap();
    let fam = ExponentFamily::smith(1.3).unwrap();
    let d = ImsDistribution::new(fam.clone());
    let np = norming::norming_for(&fam).unwrap();
    let us = u_sweep();
    let mut gaps = Vec::new();
    for &u in &us[..2] {
        let a = np.a(u);
        let b = np.b(u);
        let mut worst = 0.0f64;
        for z in [-1.0, 0.0, 1.0, 2.0] {
            let y = a + b * z;
            if y <= 0.0 {
                continue;
            }
            let at_level = 1.0 - d.conditional_survivor(y, u).unwrap();
            let above = integrate(
                |s| (1.0 - d.conditional_survivor(y, s).unwrap_or(0.0)) * (-(s - u)).exp(),
                u,
                u + 45.0,
                &spec,
            )
            .unwrap()
            .value;
            worst = worst.max((at_level - above).abs());
        }
        gaps.push(worst);
    }
    assert!(gaps[0] < 0.10, "gap at u1: {gaps:?}");
    assert!(gaps[1] < 0.05, "gap at u2: {gaps:?}");
    assert!(gaps[1] < gaps[0], "{gaps:?}");
}

#[test]
fn constant_slowly_varying_factor_reduces_to_canonical_normings() {
    // regular-variation normings with constant L reduce pointwise to the
    // canonical pair once the constant is absorbed into the limit law;
    // with s = 1 the reduction is exact.
    let t = 0.5;
    let np_lcon = NormingPair::RegularVarying {
        w_lower: 0.0,
        t,
        slowly_varying: std::sync::Arc::new(|_| 1.0),
    };
    let np_can = NormingPair::Canonical { alpha: 0.0, beta: (t + 1.0) / (t + 2.0) };
    for x in [2.0, 10.0, 1e3, 1e6] {
        assert!((np_lcon.a(x) - np_can.a(x)).abs() < 1e-12);
        assert!((np_lcon.b(x) - np_can.b(x)).abs() < 1e-12 * np_can.b(x));
    }
    // and the matching Weibull limit law carries s explicitly
    let law = LimitLaw::WeibullType { s: 2.0, t: 0.0 };
    let z = 1.3f64;
    assert!((law.cdf(z) - (1.0 - (-2.0 * z * z / 2.0).exp())).abs() < 1e-14);
}

#[test]
fn smith_asymptote_matches_exact_survivor() {
    // log survivor ~ -c sqrt(xy) phi(log(y/x)/lambda) / (log(y/x)/lambda)^2
    // along y = a(x); ratios improve toward 1 as x grows
    let lambda = 1.3;
    let fam = ExponentFamily::smith(lambda).unwrap();
    let d = ImsDistribution::new(fam.clone());
    let np = norming::norming_for(&fam).unwrap();
    let mut ratios = Vec::new();
    for x in [1e2f64, 1e4, 1e6, 1e8] {
        let y = np.a(x);
        let exact = d.conditional_survivor(y, x).unwrap().ln();
        let asym = norming::asymptotic_log_survivor(&fam, x, y).unwrap();
        ratios.push(exact / asym);
    }
    for pair in ratios.windows(2) {
        assert!(
            (pair[1] - 1.0).abs() < (pair[0] - 1.0).abs(),
            "ratios not improving: {ratios:?}"
        );
    }
    assert!((ratios[3] - 1.0).abs() < 0.1, "{ratios:?}");
}

#[test]
fn gamma_asymptote_agrees_in_trend() {
    let fam = ExponentFamily::gamma_varying(1.0, 1.0, 0.0).unwrap();
    let d = ImsDistribution::new(fam.clone());
    let mut errs = Vec::new();
    for x in [1e2f64, 1e4, 1e6] {
        let y = x * x.ln().powf(-1.0); // leading-order a(x)
        let exact = d.conditional_survivor(y, x).unwrap().ln();
        let asym = norming::asymptotic_log_survivor(&fam, x, y).unwrap();
        errs.push((exact / asym - 1.0).abs());
    }
    assert!(errs[2] < errs[0], "{errs:?}");
}
