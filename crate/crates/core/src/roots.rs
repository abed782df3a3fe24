//! Bracketing searches shared by the root finders in this crate.

use crate::error::{Error, Result};

/// Bisection for the root of an increasing function on `(lo, hi)`.
///
/// The caller guarantees `f(lo) < 0 < f(hi)`; endpoint values are never
/// evaluated, which lets callers bracket roots on open intervals where the
/// function is undefined at the ends.
pub(crate) fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, max_iter: usize) -> Result<(f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    for it in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok((mid, it));
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok((mid, it + 1));
        } else if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), max_iter))
}

/// Locates the switch point of a predicate that holds on the left of the
/// bracket and fails on the right. Returns the final `(lo, hi)` bracket with
/// `pred(lo)` true and `pred(hi)` false.
pub(crate) fn bisect_predicate<P>(mut pred: P, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    P: FnMut(f64) -> Result<bool>,
{
    if !(lo < hi) {
        return Err(Error::Internal(format!("empty bracket [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}
