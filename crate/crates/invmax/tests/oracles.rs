//! Independent-oracle cross-checks: fixed-grid Romberg integration against
//! the adaptive quadrature, and dense-grid CDF scans against the bracketed
//! quantile inversion.

use invmax::numerics::{integrate, QuadratureSpec};
use invmax::{ExponentFamily, ImsDistribution};

// Fixed-grid Romberg table; completely independent of the adaptive code path.
fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, levels: usize) -> f64 {
    let mut r = vec![vec![0.0; levels]; levels];
    let mut h = b - a;
    r[0][0] = 0.5 * h * (f(a) + f(b));
    for i in 1..levels {
        h *= 0.5;
        let n = 1usize << (i - 1);
        let sum: f64 = (0..n).map(|k| f(a + (2 * k + 1) as f64 * h)).sum();
        r[i][0] = 0.5 * r[i - 1][0] + h * sum;
        for j in 1..=i {
            let p = 4f64.powi(j as i32);
            r[i][j] = (p * r[i][j - 1] - r[i - 1][j - 1]) / (p - 1.0);
        }
    }
    r[levels - 1][levels - 1]
}

#[test]
fn schlather_moment_constraint_against_romberg() {
    // int w h(w) dw + atom terms = 1 for rho = 0, with the integral done by
    // an independent fixed-grid Romberg rule (h is smooth and bounded here)
    let fam = ExponentFamily::schlather(0.0).unwrap();
    let (a0, a1) = fam.atom_masses();
    let integrand = |w: f64| w * fam.spectral_density(w);
    let romberg_val = romberg(integrand, 1e-12, 1.0 - 1e-12, 22);
    let moment = romberg_val + 0.0 * a0 + 1.0 * a1;
    assert!((moment - 1.0).abs() < 1e-9, "moment via Romberg: {moment}");
    // and the adaptive estimate agrees with Romberg
    let adaptive = integrate(integrand, 0.0, 1.0, &QuadratureSpec::default())
        .unwrap()
        .value;
    assert!((adaptive - romberg_val).abs() < 1e-9, "{adaptive} vs {romberg_val}");
    // same for the total-mass constraint
    let mass = romberg(|w| fam.spectral_density(w), 1e-12, 1.0 - 1e-12, 22) + a0 + a1;
    assert!((mass - 2.0).abs() < 1e-9, "mass via Romberg: {mass}");
}

#[test]
fn conditional_median_matches_dense_grid_scan() {
    // the grey-median point at the 0.935 exponential level: bracketed
    // inversion must agree with a dense-grid scan of the conditional CDF
    let d = ImsDistribution::new(ExponentFamily::smith(1.3).unwrap());
    let x = -(1.0f64 - 0.935).ln();
    for p in [0.025, 0.5, 0.975] {
        let q = d.conditional_quantile_exact(p, x).unwrap();
        // dense scan: step down from above until the CDF crosses p
        let mut grid_q = f64::NAN;
        let n = 400_000;
        for i in 0..n {
            let y = 20.0 * (i as f64 + 0.5) / n as f64;
            if 1.0 - d.conditional_survivor(y, x).unwrap() >= p {
                grid_q = y;
                break;
            }
        }
        assert!(
            (q - grid_q).abs() < 1e-4,
            "p={p}: inversion {q} vs grid {grid_q}"
        );
    }
}
