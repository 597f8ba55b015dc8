//! Exterior WKB machinery: action integrals, the Liouville variable, the
//! Dirichlet quantization condition and its closed-form large-box limit.
//!
//! Airy functions themselves are never evaluated; every testable claim
//! flows through the quantization condition `S(ell) = (n + 3/4) pi hbar`,
//! whose residual at true eigenvalues shrinks like `hbar^2`.

use crate::error::{Error, Result};
use crate::potential::{turning_points, Geometry, PotentialModel, Side};
use crate::quad::sqrt_abs_integral;

const TOL: f64 = 1e-10;

/// `int sqrt(|V - E|)` between `x_from` and `x_to` (order-insensitive).
pub fn action_integral(model: &PotentialModel, energy: f64, x_from: f64, x_to: f64) -> Result<f64> {
    if !(x_from.is_finite() && x_to.is_finite() && energy.is_finite()) {
        return Err(Error::Domain("action_integral: inputs must be finite".into()));
    }
    let (a, b) = if x_from <= x_to {
        (x_from, x_to)
    } else {
        (x_to, x_from)
    };
    Ok(sqrt_abs_integral(model, energy, a, b, TOL))
}

/// `S(ell) - (n + 3/4) pi hbar` on one exterior side.
///
/// With no turning point inside the exterior but the wall still inside the
/// barrier, the allowed region is empty and the residual is the bare
/// `-(n + 3/4) pi hbar`; with no barrier at all the WKB regime does not
/// apply and a regime error is returned.
pub fn quantization_residual(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    energy: f64,
    side: Side,
    n: usize,
) -> Result<f64> {
    let omega = geometry.omega(side);
    let wall = side.sign() * geometry.ell;
    let tp = turning_points(model, energy, side, omega, wall)?;
    let target = (n as f64 + 0.75) * std::f64::consts::PI * hbar;
    match tp.points.len() {
        1 => {
            let x_t = tp.points[0];
            let s = allowed_s(model, energy, side, x_t, geometry.ell);
            Ok(s - target)
        }
        0 => {
            if model.value(wall) > energy {
                // wall still inside the barrier: empty allowed region
                Ok(-target)
            } else {
                Err(Error::Regime(format!(
                    "no turning point on the {} side at E = {energy}",
                    side.label()
                )))
            }
        }
        k => Err(Error::Regime(format!(
            "{k} turning points on the {} side at E = {energy}",
            side.label()
        ))),
    }
}

fn allowed_s(model: &PotentialModel, energy: f64, side: Side, x_t: f64, ell: f64) -> f64 {
    // sqrt(E - V) integrated over the allowed region between x_t and the wall;
    // V < E there, so sqrt(|V - E|) agrees with sqrt(E - V)
    match side {
        Side::Right => sqrt_abs_integral(model, energy, x_t, ell, TOL),
        Side::Left => sqrt_abs_integral(model, energy, -ell, x_t, TOL),
    }
}

/// Solves `quantization_residual(E) = 0` for the `n`-th exterior level by
/// bisection in `E` to 1e-12.
pub fn predict_exterior_eigenvalue(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    side: Side,
    n: usize,
) -> Result<f64> {
    let v_side = match side {
        Side::Left => model.v_minus,
        Side::Right => model.v_plus,
    };
    let v_omega = model.value(geometry.omega(side));
    if v_omega <= v_side {
        return Err(Error::Regime(format!(
            "no barrier above the asymptotic level on the {} side",
            side.label()
        )));
    }
    let scale = (v_omega - v_side).abs().max(1.0);
    let e_lo = v_side + 1e-9 * scale;
    let e_hi = v_omega * (1.0 - 1e-9) + v_side * 1e-9;
    let f = |e: f64| quantization_residual(model, geometry, hbar, e, side, n);
    let f_lo = f(e_lo)?;
    let f_hi = f(e_hi)?;
    if f_lo > 0.0 {
        return Err(Error::Search(format!(
            "residual already positive at the bottom of the window (n = {n})"
        )));
    }
    if f_hi < 0.0 {
        return Err(Error::Search(format!(
            "level n = {n} lies outside the WKB window on the {} side",
            side.label()
        )));
    }
    // residual is monotone increasing in E; plain bisection suffices
    let mut lo = e_lo;
    let mut hi = e_hi;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Leading large-box exterior eigenvalue,
/// `v_side + ((m + 3/4) pi hbar / ell)^2`.
pub fn asymptotic_exterior_eigenvalue(
    model: &PotentialModel,
    hbar: f64,
    ell: f64,
    side: Side,
    m: usize,
) -> f64 {
    let v_side = match side {
        Side::Left => model.v_minus,
        Side::Right => model.v_plus,
    };
    let q = (m as f64 + 0.75) * std::f64::consts::PI * hbar / ell;
    v_side + q * q
}

/// Sampled Liouville data around one turning point.
#[derive(Debug, Clone)]
pub struct WkbContext {
    pub side: Side,
    pub energy: f64,
    pub turning_point: f64,
    pub quantum_number: usize,
    pub samples: Vec<f64>,
    /// `S(x)` between `x` and the turning point.
    pub action: Vec<f64>,
    /// `xi = sgn(x - x_t) (3/2 S)^{2/3}` (right side; mirrored on the left).
    pub xi: Vec<f64>,
}

/// Builds sampled `S` and `xi` on `n_samples` points across the turning
/// point, spanning from the split point to the wall.
pub fn wkb_context(
    model: &PotentialModel,
    geometry: &Geometry,
    energy: f64,
    side: Side,
    quantum_number: usize,
    n_samples: usize,
) -> Result<WkbContext> {
    let omega = geometry.omega(side);
    let wall = side.sign() * geometry.ell;
    let x_t = turning_points(model, energy, side, omega, wall)?.single()?;
    let (lo, hi) = match side {
        Side::Right => (omega, geometry.ell),
        Side::Left => (-geometry.ell, omega),
    };
    let n = n_samples.max(8);
    let mut samples = Vec::with_capacity(n);
    let mut action = Vec::with_capacity(n);
    let mut xi = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let s = sqrt_abs_integral(model, energy, x.min(x_t), x.max(x_t), TOL);
        let outward = match side {
            Side::Right => x - x_t,
            Side::Left => x_t - x,
        };
        samples.push(x);
        action.push(s);
        xi.push(outward.signum() * (1.5 * s).powf(2.0 / 3.0));
    }
    Ok(WkbContext {
        side,
        energy,
        turning_point: x_t,
        quantum_number,
        samples,
        action,
        xi,
    })
}
