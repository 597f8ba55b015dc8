//! hbar-scaling studies tying avoided-crossing gaps to Agmon distances,
//! the tunneling-parameter surrogate from boundary derivatives, and the
//! per-level resonance report.

use crate::agmon::agmon_summary;
use crate::decoupled::{decoupled_spectra, find_degeneracy_ell, interior_spectrum, isolation_delta};
use crate::eigensolve::{
    boundary_derivative, build_operator, eigenvector, solve_range, GridPolicy,
};
use crate::error::{Error, Result};
use crate::potential::{Geometry, PotentialModel, Side};
use crate::sweep::{
    classify_branches, detect_avoided_crossings, refine_gap, sweep_eigenvalues, CrossingReport,
    IsolationThreshold,
};
use rayon::prelude::*;

/// Upper bound display for the tunneling parameter,
/// `hbar^3 / (4 r^2) (|phi'(omega_-)|^2 + |phi'(omega_+)|^2)` with `c = 1`.
#[derive(Debug, Clone, Copy)]
pub struct TunnelingEstimate {
    pub t_bound: f64,
    /// Contour radius, `delta / 2`.
    pub r: f64,
    /// Isolation of the interior level in the merged decoupled spectrum.
    pub delta: f64,
    pub phi_prime_minus: f64,
    pub phi_prime_plus: f64,
    /// The interior level the estimate refers to.
    pub interior_energy: f64,
}

/// Computes the tunneling bound for one interior level at the geometry's
/// box size.
pub fn tunneling_surrogate(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    interior_index: usize,
    policy: &GridPolicy,
) -> Result<TunnelingEstimate> {
    let interval = (geometry.omega_minus, geometry.omega_plus);
    let (v_min, v_max) = (probe_min(model, interval), probe_max(model, interval));
    let n0 = policy
        .suggest_n(interval, hbar, v_max - v_min)
        .max(2 * interior_index + 8);
    let t0 = build_operator(model, interval, hbar, n0, policy)?;
    let level = t0.eigenvalues_range(interior_index, interior_index)?[0];
    // the one-sided boundary stencil converges like (k h)^2, a factor
    // slower than the eigenvalues; oversample accordingly
    let n = 6 * policy
        .suggest_n(interval, hbar, (1.1 * (level - v_min)).max(v_max - v_min))
        .max(2 * interior_index + 8)
        + 1;
    let t_op = build_operator(model, interval, hbar, n, policy)?;
    let lambda = t_op.eigenvalues_range(interior_index, interior_index)?[0];
    let pair = eigenvector(&t_op, lambda, policy)?;
    let phi_prime_minus = boundary_derivative(&pair, &t_op, Side::Left);
    let phi_prime_plus = boundary_derivative(&pair, &t_op, Side::Right);

    let spectra = decoupled_spectra(model, geometry, hbar, interior_index + 3, 24, policy)?;
    let target = spectra.interior[interior_index];
    let delta = isolation_delta(&spectra, target)?;
    if delta <= 1e-10 * target.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "interior level {interior_index} is degenerate in the decoupled spectrum (delta = {delta:.3e})"
        )));
    }
    let r = 0.5 * delta;
    let t_bound = hbar.powi(3) / (4.0 * r * r)
        * (phi_prime_minus * phi_prime_minus + phi_prime_plus * phi_prime_plus);
    Ok(TunnelingEstimate {
        t_bound,
        r,
        delta,
        phi_prime_minus,
        phi_prime_plus,
        interior_energy: target,
    })
}

/// Observable tracked across an hbar list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    GapLeft,
    GapRight,
    TBound,
}

impl Observable {
    pub fn label(self) -> &'static str {
        match self {
            Observable::GapLeft => "gap_left",
            Observable::GapRight => "gap_right",
            Observable::TBound => "t_bound",
        }
    }

    fn side(self) -> Side {
        match self {
            Observable::GapLeft => Side::Left,
            Observable::GapRight | Observable::TBound => Side::Right,
        }
    }
}

/// One study point.
#[derive(Debug, Clone, Copy)]
pub struct StudyRow {
    pub hbar: f64,
    pub value: f64,
    pub ell_star: f64,
    pub delta_isolation: f64,
}

/// Least-squares fit of `log(observable)` against `1/hbar`.
#[derive(Debug, Clone)]
pub struct ScalingStudy {
    pub observable: Observable,
    pub rows: Vec<StudyRow>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `d^side_{v0}` for gap observables, `2 d*` for the tunneling bound.
    pub agmon_reference: f64,
    /// `fitted_slope / (-agmon_reference)`.
    pub slope_ratio: f64,
}

/// Locates and refines the avoided crossing of `interior_index` with the
/// given exterior family inside `window`, via the decoupled degeneracy and
/// a local sweep around it.
pub fn locate_crossing(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    interior_index: usize,
    side: Side,
    window: (f64, f64),
    policy: &GridPolicy,
    iso: &IsolationThreshold,
) -> Result<CrossingReport> {
    let deg = find_degeneracy_ell(model, geometry, hbar, interior_index, side, window, policy)?;
    let span = 0.2f64.min(0.5 * (window.1 - window.0));
    let lo = (deg.ell0 - span).max(window.0.min(deg.ell0 - 0.02));
    let hi = deg.ell0 + span;

    // slot budget: everything below the level plus a few above
    let k_loc = {
        let g = geometry.with_ell(deg.ell0)?;
        let n = policy.suggest_n((-g.ell, g.ell), hbar, 1.0);
        let t = build_operator(model, (-g.ell, g.ell), hbar, n, policy)?;
        (t.sturm_count(deg.interior_energy) + 3).max(4)
    };

    let mut branches = sweep_eigenvalues(model, geometry, hbar, (lo, hi), 41, k_loc, policy)?;
    classify_branches(model, geometry, hbar, policy, &mut branches)?;
    let candidates = detect_avoided_crossings(&branches);
    let best = candidates
        .iter()
        .filter(|c| c.side == side && c.interior_index == interior_index)
        .min_by(|a, b| {
            (a.bracket.1 - deg.ell0)
                .abs()
                .partial_cmp(&(b.bracket.1 - deg.ell0).abs())
                .unwrap()
        })
        .ok_or_else(|| {
            Error::Search(format!(
                "no {} avoided crossing detected near ell0 = {:.6}",
                side.label(),
                deg.ell0
            ))
        })?;
    refine_gap(model, geometry, hbar, policy, best, iso)
}

/// Runs the scaling study over `hbar_list` and fits the exponential rate.
pub fn run_scaling_study(
    model: &PotentialModel,
    geometry: &Geometry,
    observable: Observable,
    hbar_list: &[f64],
    interior_index: usize,
    window: (f64, f64),
    policy: &GridPolicy,
    iso: &IsolationThreshold,
) -> Result<ScalingStudy> {
    if hbar_list.len() < 4 {
        return Err(Error::Study(format!(
            "need at least 4 hbar values, got {}",
            hbar_list.len()
        )));
    }
    let outcomes: Vec<(f64, Result<StudyRow>)> = hbar_list
        .par_iter()
        .map(|&hbar| {
            let row = study_point(
                model,
                geometry,
                observable,
                hbar,
                interior_index,
                window,
                policy,
                iso,
            );
            (hbar, row)
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (hbar, out) in outcomes {
        match out {
            Ok(r) => rows.push(r),
            Err(e) => failures.push(format!("hbar = {hbar}: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Study(failures.join("; ")));
    }

    let xs: Vec<f64> = rows.iter().map(|r| 1.0 / r.hbar).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value.ln()).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);

    let metrics = agmon_summary(model, geometry)?;
    let agmon_reference = match observable {
        Observable::GapLeft => metrics.d_minus,
        Observable::GapRight => metrics.d_plus,
        Observable::TBound => 2.0 * metrics.d_star,
    };
    Ok(ScalingStudy {
        observable,
        rows,
        fitted_slope: slope,
        intercept,
        r_squared,
        agmon_reference,
        slope_ratio: slope / (-agmon_reference),
    })
}

#[allow(clippy::too_many_arguments)]
fn study_point(
    model: &PotentialModel,
    geometry: &Geometry,
    observable: Observable,
    hbar: f64,
    interior_index: usize,
    window: (f64, f64),
    policy: &GridPolicy,
    iso: &IsolationThreshold,
) -> Result<StudyRow> {
    match observable {
        Observable::GapLeft | Observable::GapRight => {
            let rep = locate_crossing(
                model,
                geometry,
                hbar,
                interior_index,
                observable.side(),
                window,
                policy,
                iso,
            )?;
            Ok(StudyRow {
                hbar,
                value: rep.gap,
                ell_star: rep.ell_star,
                delta_isolation: rep.delta_isolation,
            })
        }
        Observable::TBound => {
            // evaluate at the midpoint between the two adjacent crossings,
            // where the level is maximally isolated
            let right = locate_crossing(
                model, geometry, hbar, interior_index, Side::Right, window, policy, iso,
            )?;
            let near = (right.ell_star - 0.3, right.ell_star + 0.3);
            let left = locate_crossing(
                model, geometry, hbar, interior_index, Side::Left, near, policy, iso,
            )?;
            let ell_iso = 0.5 * (right.ell_star + left.ell_star);
            let est = tunneling_surrogate(
                model,
                &geometry.with_ell(ell_iso)?,
                hbar,
                interior_index,
                policy,
            )?;
            Ok(StudyRow {
                hbar,
                value: est.t_bound,
                ell_star: ell_iso,
                delta_isolation: est.delta,
            })
        }
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean) * (y - mean)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let p = slope * x + intercept;
            (y - p) * (y - p)
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// One row of the final resonance report.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceRow {
    pub interior_index: usize,
    /// Flat-branch value of `H(ell)` at the isolation midpoint.
    pub e_res: f64,
    /// The matching interior Dirichlet level.
    pub e_interior: f64,
    pub gap_left: Option<f64>,
    pub gap_right: Option<f64>,
    pub t_bound: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    /// `(max gap)^2`: an order-of-magnitude stand-in for the width, not a
    /// computed width.
    pub width_order: Option<f64>,
}

/// Per-level resonance summary: flat-branch energy, both gaps, tunneling
/// bound and Agmon distances for every interior level below the lower
/// barrier top.
pub fn resonance_report(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    max_interior_levels: usize,
    window: (f64, f64),
    policy: &GridPolicy,
    iso: &IsolationThreshold,
) -> Result<Vec<ResonanceRow>> {
    let Some((top_l, top_r)) = model.barrier_tops() else {
        return Ok(Vec::new());
    };
    let confining = top_l.min(top_r);
    let k_probe = max_interior_levels.clamp(1, 16) + 2;
    let interior = interior_spectrum(model, geometry, hbar, k_probe, policy)?;
    let metrics = agmon_summary(model, geometry)?;

    let mut rows = Vec::new();
    for (idx, &e_d) in interior.iter().enumerate() {
        if e_d >= confining || rows.len() >= max_interior_levels {
            break;
        }
        let right = locate_crossing(model, geometry, hbar, idx, Side::Right, window, policy, iso);
        let near = right
            .as_ref()
            .map(|r| (r.ell_star - 0.3, r.ell_star + 0.3))
            .unwrap_or(window);
        let left = locate_crossing(model, geometry, hbar, idx, Side::Left, near, policy, iso);

        let ell_iso = match (&right, &left) {
            (Ok(r), Ok(l)) => 0.5 * (r.ell_star + l.ell_star),
            (Ok(r), Err(_)) => r.ell_star + 0.08,
            (Err(_), Ok(l)) => l.ell_star + 0.08,
            (Err(_), Err(_)) => geometry.ell,
        };
        let g_iso = geometry.with_ell(ell_iso)?;
        let e_res = {
            let n_probe = policy.suggest_n((-ell_iso, ell_iso), hbar, 1.0);
            let t = build_operator(model, (-ell_iso, ell_iso), hbar, n_probe, policy)?;
            let j = t.sturm_count(e_d).min(t.n - 1);
            let lo = j.saturating_sub(1);
            let w = solve_range(model, (-ell_iso, ell_iso), hbar, lo, j, policy)?;
            *w.iter()
                .min_by(|a, b| (*a - e_d).abs().partial_cmp(&(*b - e_d).abs()).unwrap())
                .unwrap()
        };
        let t_bound = tunneling_surrogate(model, &g_iso, hbar, idx, policy)?.t_bound;
        let gap_left = left.ok().map(|c| c.gap);
        let gap_right = right.ok().map(|c| c.gap);
        let width_order = match (gap_left, gap_right) {
            (Some(a), Some(b)) => Some(a.max(b) * a.max(b)),
            (Some(a), None) => Some(a * a),
            (None, Some(b)) => Some(b * b),
            (None, None) => None,
        };
        rows.push(ResonanceRow {
            interior_index: idx,
            e_res,
            e_interior: e_d,
            gap_left,
            gap_right,
            t_bound,
            d_minus: metrics.d_minus,
            d_plus: metrics.d_plus,
            width_order,
        });
    }
    Ok(rows)
}

fn probe_min(model: &PotentialModel, interval: (f64, f64)) -> f64 {
    (0..=64)
        .map(|i| model.value(interval.0 + (interval.1 - interval.0) * i as f64 / 64.0))
        .fold(f64::INFINITY, f64::min)
}

fn probe_max(model: &PotentialModel, interval: (f64, f64)) -> f64 {
    (0..=64)
        .map(|i| model.value(interval.0 + (interval.1 - interval.0) * i as f64 / 64.0))
        .fold(f64::NEG_INFINITY, f64::max)
}
