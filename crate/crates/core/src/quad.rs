//! Adaptive Simpson quadrature with an absolute error target.

const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Uses recursive interval halving with the standard Richardson acceptance
/// test; the returned value includes the extrapolation correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, abs_tol, MAX_DEPTH)
}

/// Integrates over `[a, b]` after splitting it into equal panels, each
/// refined adaptively with a proportional share of the tolerance.
///
/// The pre-split protects against integrands whose support is much narrower
/// than the full range: plain adaptive refinement can sample only zeros and
/// accept a spurious zero integral.
pub fn adaptive_simpson_panels<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    panels: usize,
) -> f64 {
    debug_assert!(panels > 0);
    let width = (b - a) / panels as f64;
    let share = abs_tol / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == panels { b } else { lo + width };
            adaptive_simpson(f, lo, hi, share)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    let half = 0.5 * tol;
    refine(f, a, m, fa, flm, fm, left, half, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, half, depth - 1)
}
