//! Scalar golden-section minimization and bisection root finding.

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Runs until the bracket shrinks below `xtol` or `max_evals` function
/// evaluations have been spent. Returns `(x_min, f_min)`.
pub fn golden_min(
    f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    xtol: f64,
    max_evals: usize,
) -> (f64, f64) {
    let mut f = f;
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while evals < max_evals && (b - a).abs() > xtol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }
    if f1 < f2 { (x1, f1) } else { (x2, f2) }
}

/// Bisection for a root of `f` on `[a, b]`, assuming `f(a)` and `f(b)`
/// have opposite signs. Refines until the interval width drops below
/// `xtol`. Returns the midpoint of the final interval.
pub fn bisect_root(f: impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64) -> f64 {
    let mut f = f;
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    debug_assert!(fa * f(b) <= 0.0, "bisect_root: endpoints do not bracket");
    while (b - a).abs() > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break; // interval at floating-point resolution
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
