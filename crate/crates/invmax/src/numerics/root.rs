//! Bracketed root finding by bisection: slow but unconditionally convergent,
//! which matters because the samplers invert CDFs with flat stretches and
//! jump discontinuities (generalized inverses).

/// Find x in [lo, hi] with f changing sign across x, to bracket width <= tol.
///
/// Requires f(lo) * f(hi) <= 0. For a nondecreasing f with a jump through
/// zero this converges to the jump location, i.e. the generalized inverse.
pub fn find_root<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> crate::Result<f64> {
    if !(lo < hi) {
        return Err(crate::Error::Domain(format!("root bracket must satisfy lo < hi: [{lo}, {hi}]")));
    }
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(crate::Error::Bracket { lo, hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = flo;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // floating-point resolution reached
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
