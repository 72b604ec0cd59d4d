//! Shared numeric helpers: compensated summation, bisection, and adaptive
//! Simpson quadrature.
//!
//! Everything here is deterministic: summation order is fixed by the caller
//! and no iteration depends on timing or thread count.

use crate::error::{Error, Result};

/// Compensated (Neumaier) summation over a fixed-order iterator.
///
/// Keeps the rounding error of long reductions near one ulp, which matters
/// for budget residuals on fine grids (millions of terms).
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Neumaier summation over terms that may individually fail; the first
/// error aborts the reduction.
pub fn neumaier_try_sum<I: IntoIterator<Item = Result<f64>>>(values: I) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let v = v?;
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// Bisection for a decreasing function `f` on `[lo, hi]` with
/// `f(lo) >= target >= f(hi)`. Returns the midpoint of the final bracket.
///
/// `rel_width` bounds the final bracket width relative to its midpoint.
pub fn bisect_decreasing<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    rel_width: f64,
    max_iter: usize,
) -> Result<f64> {
    debug_assert!(lo < hi);
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo < target || f_hi > target {
        return Err(Error::NoConvergence {
            iterations: 0,
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_width * mid.abs().max(f64::MIN_POSITIVE) {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid >= target {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    // The bracket shrinks by half each step, so hitting the iteration cap
    // without meeting `rel_width` means the request was unreasonably tight.
    Err(Error::NoConvergence {
        iterations: max_iter,
        lo,
        hi,
        f_lo,
        f_hi,
    })
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance
/// `tol`. The recursion depth is capped; leftover panels contribute their
/// current estimate, which keeps the routine total and deterministic.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Piecewise-linear interpolation on a strictly increasing abscissa grid.
/// Values outside the grid are clamped to the end samples.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    debug_assert!(!xs.is_empty());
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    // partition_point returns the first index with xs[i] > x.
    let hi = xs.partition_point(|&v| v <= x);
    let lo = hi - 1;
    if xs[hi] == xs[lo] {
        return ys[lo];
    }
    let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + w * (ys[hi] - ys[lo])
}
