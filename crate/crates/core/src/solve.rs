//! Bracketed bisection for monotone scalar objectives.

/// Locates the zero crossing of a nondecreasing objective on `[lo, hi]`.
///
/// The caller must have established the bracket: `f(lo) <= 0 <= f(hi)`.
/// Evaluations may return `f64::NEG_INFINITY` where the objective is not
/// computable; such points are treated as lying below the crossing, which is
/// the correct reading for information objectives that degenerate near zero
/// efficiency. Stops once the bracket width falls below `x_tol` and returns
/// the bracket midpoint.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> f64 {
    debug_assert!(lo <= hi && x_tol > 0.0);
    let mut lo = lo;
    let mut hi = hi;
    while hi - lo > x_tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_root_of_monotone_function() {
        let root = bisect(|x| x * x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((root - 2f64.powf(1.0 / 3.0)).abs() < 1e-10);
    }

    #[test]
    fn tolerates_uncomputable_lower_region() {
        let root = bisect(
            |x| if x < 0.1 { f64::NEG_INFINITY } else { x - 0.5 },
            0.0,
            1.0,
            1e-9,
        );
        assert!((root - 0.5).abs() < 1e-8);
    }
}
