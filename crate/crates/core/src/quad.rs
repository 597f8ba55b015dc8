//! Adaptive Simpson quadrature for square-root integrands.
//!
//! Integrands of the form `sqrt(max(0, V-E))` or `sqrt(|V-E|)` have
//! half-power kinks at the zeros of `V - E`. Panels are split at those
//! zeros and each half-panel is mapped through `x = t +- u^2`, which turns
//! the kink into a smooth integrand before the adaptive rule sees it.

use crate::potential::{PotentialFamily, PotentialModel};

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 52)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
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
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates `g` over `[p, q]` with the sqrt-kink substitution applied at
/// both ends (harmless when an end is not actually a kink).
fn panel_sqrt(g: &dyn Fn(f64) -> f64, p: f64, q: f64, tol: f64) -> f64 {
    if q <= p {
        return 0.0;
    }
    let m = 0.5 * (p + q);
    let left = {
        let h = |u: f64| 2.0 * u * g(p + u * u);
        adaptive_simpson(&h, 0.0, (m - p).sqrt(), 0.5 * tol)
    };
    let right = {
        let h = |u: f64| 2.0 * u * g(q - u * u);
        adaptive_simpson(&h, 0.0, (q - m).sqrt(), 0.5 * tol)
    };
    left + right
}

/// Partition of `[a, b]` into maximal pieces on which `V - E` has one sign.
/// The boolean marks pieces with `V > E`.
fn sign_panels(model: &PotentialModel, energy: f64, a: f64, b: f64) -> Vec<(f64, f64, bool)> {
    let n = 2000usize;
    let mut xs: Vec<f64> = (0..=n)
        .map(|i| a + (b - a) * i as f64 / n as f64)
        .collect();
    if model.x0 > a && model.x0 < b {
        xs.push(model.x0);
    }
    if let PotentialFamily::SquareBarriers {
        minus_edges,
        plus_edges,
        ..
    } = &model.family
    {
        for e in [minus_edges.0, minus_edges.1, plus_edges.0, plus_edges.1] {
            if e > a && e < b {
                xs.push(e);
            }
        }
    }
    xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    xs.dedup();

    let mut cuts = vec![a];
    for i in 1..xs.len() {
        let f0 = model.value(xs[i - 1]) - energy;
        let f1 = model.value(xs[i]) - energy;
        if f0 == 0.0 && xs[i - 1] > a {
            cuts.push(xs[i - 1]);
        } else if f0 * f1 < 0.0 {
            cuts.push(crate::search::bisect_root(
                |t| model.value(t) - energy,
                xs[i - 1],
                xs[i],
                1e-13,
            ));
        }
    }
    cuts.push(b);
    cuts.dedup();

    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q <= p {
            continue;
        }
        let mid = 0.5 * (p + q);
        out.push((p, q, model.value(mid) > energy));
    }
    out
}

/// `int_a^b sqrt(max(0, V - E)) dx` to absolute tolerance `tol`.
pub fn sqrt_clamped_integral(model: &PotentialModel, energy: f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = sign_panels(model, energy, a, b);
    let above: Vec<_> = panels.iter().filter(|p| p.2).collect();
    if above.is_empty() {
        return 0.0;
    }
    let per = tol / above.len() as f64;
    let g = |x: f64| (model.value(x) - energy).max(0.0).sqrt();
    above.iter().map(|&&(p, q, _)| panel_sqrt(&g, p, q, per)).sum()
}

/// `int_a^b sqrt(|V - E|) dx` to absolute tolerance `tol`.
pub fn sqrt_abs_integral(model: &PotentialModel, energy: f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = sign_panels(model, energy, a, b);
    let per = tol / panels.len() as f64;
    let g = |x: f64| (model.value(x) - energy).abs().sqrt();
    panels.iter().map(|&(p, q, _)| panel_sqrt(&g, p, q, per)).sum()
}
