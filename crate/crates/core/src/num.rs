//! Numerical conventions: tolerances and monotone bisection.
//!
//! Every supremum or infimum over one real parameter in this crate is
//! resolved the same way: 60 rounds of bisection on a monotone predicate.
//! Sixty halvings shrink any unit-order bracket below 1e-18 of its length,
//! past `f64` resolution for the parameter ranges we use, so the stopping
//! rule is a fixed count rather than a tolerance test.

/// Default absolute and relative comparison tolerance.
pub const TOL: f64 = 1e-12;

/// Fixed bisection iteration count.
pub const BISECT_ITERS: u32 = 60;

/// `a ≈ b` with absolute plus relative tolerance `tol`.
pub fn close_to(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// `a ≈ b` at the default tolerance.
pub fn close(a: f64, b: f64) -> bool {
    close_to(a, b, TOL)
}

/// Largest point of `[lo, hi]` where a true-then-false predicate holds.
///
/// `pred` must be monotone on `[lo, hi]`: once false it stays false.
/// `pred(lo)` is assumed true (callers check it; we do not re-evaluate).
/// If `pred(hi)` holds the supremum saturates at `hi`. Otherwise 60
/// bisection rounds return the last point observed true, so the result
/// always satisfies the predicate (ties on the boundary land inside).
pub fn bisect_sup<F: FnMut(f64) -> bool>(lo: f64, hi: f64, mut pred: F) -> f64 {
    debug_assert!(lo <= hi);
    if pred(hi) {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (a + b);
        if pred(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

/// Smallest point of `[lo, hi]` where a false-then-true predicate holds.
///
/// Mirror image of [`bisect_sup`]: `pred(hi)` is assumed true, and if
/// `pred(lo)` holds the infimum saturates at `lo`. The returned point
/// satisfies the predicate.
pub fn bisect_inf<F: FnMut(f64) -> bool>(lo: f64, hi: f64, mut pred: F) -> f64 {
    debug_assert!(lo <= hi);
    if pred(lo) {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (a + b);
        if pred(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

/// Snap `x` to the nearest entry of `points` within absolute distance
/// `snap_tol`, but only if `keep(snapped)` still holds; otherwise `x`.
///
/// Used to land bisection results exactly on breakpoints of
/// piecewise-defined curves when the supremum is attained at a kink.
pub fn snap_to_points<F: FnMut(f64) -> bool>(
    x: f64,
    points: &[f64],
    snap_tol: f64,
    mut keep: F,
) -> f64 {
    let mut best: Option<f64> = None;
    for &p in points {
        let d = (p - x).abs();
        if d <= snap_tol {
            match best {
                Some(b) if (b - x).abs() <= d => {}
                _ => best = Some(p),
            }
        }
    }
    match best {
        Some(p) if keep(p) => p,
        _ => x,
    }
}
