//! Bisection root finding and golden-section minimization.

use crate::error::{Error, Result};

/// Root of a monotone increasing f on [lo, hi], located by bisection to a
/// bracket width of `tol`. Requires f(lo) <= 0 <= f(hi).
pub fn find_root_increasing<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::domain(
            "find_root_increasing",
            format!("need lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}"),
        ));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::domain(
            "find_root_increasing",
            "f evaluated to NaN at a bracket end",
        ));
    }
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }

    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // machine resolution
        }
        let fm = f(mid);
        if fm.is_nan() {
            return Err(Error::domain("find_root_increasing", "f evaluated to NaN"));
        }
        if fm < 0.0 {
            a = mid;
        } else if fm > 0.0 {
            b = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for the minimum of a unimodal f on [lo, hi].
/// Returns (argmin, min).
pub fn minimize_unimodal<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::domain(
            "minimize_unimodal",
            format!("need lo <= hi and tol > 0, got [{lo}, {hi}], tol {tol}"),
        ));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5)-1)/2

    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    if !f1.is_finite() || !f2.is_finite() {
        return Err(Error::domain(
            "minimize_unimodal",
            "objective evaluated non-finite",
        ));
    }

    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::domain(
                "minimize_unimodal",
                "objective evaluated non-finite",
            ));
        }
        if x1 >= x2 {
            break; // interval collapsed to machine resolution
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}
