//! Bracketing root solver for monotone functions.

/// Hard cap on bisection steps.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Finds `x` in `[lo, hi]` with `f(x)` close to `target`, for `f` non-decreasing.
///
/// The caller guarantees `f(lo) <= target <= f(hi)`. Iteration stops once
/// `|f(x) - target| <= tol`, when the bracket can no longer be split in
/// floating point, or after [`MAX_BISECTION_STEPS`]; the best midpoint seen
/// is returned in every case.
pub fn bisect_increasing<F>(f: F, mut lo: f64, mut hi: f64, target: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut best = hi;
    let mut best_err = (f(hi) - target).abs();
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = f(mid);
        let err = (value - target).abs();
        if err < best_err {
            best = mid;
            best_err = err;
        }
        if err <= tol {
            break;
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}
