//! Agmon distances in the pseudo-metric `max(0, V - E) dx^2`.
//!
//! Gaps and tunneling quantities scale like `exp(-d/hbar)`, so distance
//! errors enter exponentially; everything here targets 1e-10 absolute.

use crate::error::{Error, Result};
use crate::potential::{Geometry, PotentialModel};
use crate::quad::sqrt_clamped_integral;

const TOL: f64 = 1e-10;

/// Distances from the well to the two box walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgmonMetrics {
    /// `d_{v0}(x0, -ell)`
    pub d_minus: f64,
    /// `d_{v0}(x0, +ell)`
    pub d_plus: f64,
    /// `min(d_minus, d_plus)`
    pub d_star: f64,
}

/// `int_a^b sqrt(max(0, V - E)) dx` by kink-aware adaptive quadrature.
pub fn agmon_distance(model: &PotentialModel, energy: f64, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && energy.is_finite()) {
        return Err(Error::Domain("agmon_distance: inputs must be finite".into()));
    }
    if a > b {
        return Err(Error::Domain(format!("agmon_distance: need a <= b, got ({a}, {b})")));
    }
    Ok(sqrt_clamped_integral(model, energy, a, b, TOL))
}

/// Distances at the well-bottom energy from `x0` to both walls.
pub fn agmon_summary(model: &PotentialModel, geometry: &Geometry) -> Result<AgmonMetrics> {
    let d_minus = agmon_distance(model, model.v0, -geometry.ell, model.x0)?;
    let d_plus = agmon_distance(model, model.v0, model.x0, geometry.ell)?;
    Ok(AgmonMetrics {
        d_minus,
        d_plus,
        d_star: d_minus.min(d_plus),
    })
}

/// Distances from `x0` to the interior split points instead of the walls;
/// the wall and split-point conventions differ by an amount that vanishes
/// as the split points approach the forbidden-region edges.
pub fn interior_boundary_distances(
    model: &PotentialModel,
    geometry: &Geometry,
) -> Result<(f64, f64)> {
    let dm = agmon_distance(model, model.v0, geometry.omega_minus, model.x0)?;
    let dp = agmon_distance(model, model.v0, model.x0, geometry.omega_plus)?;
    Ok((dm, dp))
}
