//! Scalar bisection used by the finite-well solvers.

pub(crate) const MAX_ITER: usize = 200;
pub(crate) const TOL_MEV: f64 = 1e-12;

/// Bisect an increasing-sign bracket: `f(lo) < 0 < f(hi)` is assumed, and
/// only the sign of `f` at interior points is consulted.
pub(crate) fn bisect_sign<F>(mut lo: f64, mut hi: f64, mut f: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    for _ in 0..MAX_ITER {
        if hi - lo <= TOL_MEV {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
