//! Box-size sweeps: eigenvalue branches of `H(ell)`, flat/falling
//! classification, avoided-crossing detection and minimal-gap refinement.
//!
//! Sorted slots never cross (the curves only avoid), so slot order plus
//! slope continuity tracks physical branches; relabeling happens exactly
//! at avoided crossings, where adjacent slots swap identities.

use crate::agmon::{agmon_distance, agmon_summary};
use crate::decoupled::{exterior_spectrum, interior_spectrum};
use crate::eigensolve::{build_operator, solve_lowest, GridPolicy, EIG_TOL};
use crate::error::{Error, Result};
use crate::potential::{Geometry, PotentialModel, Side};
use crate::search::golden_min;
use rayon::prelude::*;

/// Per-cell branch tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchClass {
    InteriorLike,
    ExteriorLeft,
    ExteriorRight,
    Mixed,
    Unclassified,
}

impl BranchClass {
    pub fn label(self) -> &'static str {
        match self {
            BranchClass::InteriorLike => "interior_like",
            BranchClass::ExteriorLeft => "exterior_left",
            BranchClass::ExteriorRight => "exterior_right",
            BranchClass::Mixed => "mixed",
            BranchClass::Unclassified => "unclassified",
        }
    }
}

/// Eigenvalue curves over an `ell` grid.
#[derive(Debug, Clone)]
pub struct BranchSet {
    pub ell_grid: Vec<f64>,
    pub k: usize,
    /// `energies[slot][i]`, ascending in `slot` at each grid point.
    pub energies: Vec<Vec<f64>>,
    /// Physical branch id occupying `slot` at grid point `i`.
    pub branch_labels: Vec<Vec<u32>>,
    /// Tag of the branch segment at each `(slot, i)` cell.
    pub classification: Vec<Vec<BranchClass>>,
    /// Interior Dirichlet levels, filled by [`classify_branches`].
    pub interior_levels: Vec<f64>,
}

impl BranchSet {
    /// Energy of the physical branch `id` at grid point `i`, if it is
    /// tracked there.
    pub fn branch_energy(&self, id: u32, i: usize) -> Option<f64> {
        (0..self.k)
            .find(|&s| self.branch_labels[s][i] == id)
            .map(|s| self.energies[s][i])
    }
}

/// Sweeps the `k` lowest eigenvalues of `H(ell)` over `n_ell` uniformly
/// spaced box sizes.
pub fn sweep_eigenvalues(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    ell_range: (f64, f64),
    n_ell: usize,
    k: usize,
    policy: &GridPolicy,
) -> Result<BranchSet> {
    let (lo, hi) = ell_range;
    if n_ell < 2 {
        return Err(Error::Domain("sweep needs at least two ell points".into()));
    }
    if !(lo < hi) || lo <= geometry.omega_minus.abs().max(geometry.omega_plus) {
        return Err(Error::Domain(format!(
            "sweep range ({lo}, {hi}) must sit beyond the split points"
        )));
    }
    let ell_grid: Vec<f64> = (0..n_ell)
        .map(|i| lo + (hi - lo) * i as f64 / (n_ell - 1) as f64)
        .collect();

    // pin the energy window once so every grid point resolves identically
    let policy = match policy.e_max {
        Some(_) => *policy,
        None => {
            let probe = solve_lowest(model, (-lo, lo), hbar, k, policy)?;
            policy.with_e_max(1.05 * probe[k - 1].abs().max(1e-3))
        }
    };

    let columns: Vec<Result<Vec<f64>>> = ell_grid
        .par_iter()
        .map(|&ell| solve_lowest(model, (-ell, ell), hbar, k, &policy))
        .collect();
    let mut energies = vec![vec![0.0; n_ell]; k];
    for (i, col) in columns.into_iter().enumerate() {
        let col = col?;
        for s in 0..k {
            energies[s][i] = col[s];
        }
    }

    let branch_labels = track_branches(&ell_grid, &energies);
    Ok(BranchSet {
        ell_grid,
        k,
        energies,
        branch_labels,
        classification: vec![vec![BranchClass::Unclassified; n_ell]; k],
        interior_levels: Vec::new(),
    })
}

/// Continuity tracking: match each slot's linear prediction against the
/// next column, allowing only disjoint adjacent swaps.
fn track_branches(ell_grid: &[f64], energies: &[Vec<f64>]) -> Vec<Vec<u32>> {
    let k = energies.len();
    let n = ell_grid.len();
    let mut labels = vec![vec![0u32; n]; k];
    for (s, row) in labels.iter_mut().enumerate() {
        row[0] = s as u32;
    }
    let mut prev_vals: Vec<f64> = (0..k).map(|s| energies[s][0]).collect();
    let mut prev_slopes = vec![0.0f64; k];

    for i in 1..n {
        let dt = ell_grid[i] - ell_grid[i - 1];
        let pred: Vec<f64> = (0..k)
            .map(|s| prev_vals[s] + prev_slopes[s] * dt)
            .collect();
        let cur: Vec<f64> = (0..k).map(|s| energies[s][i]).collect();

        // dp[s]: best assignment cost for slots 0..s
        let mut dp = vec![f64::INFINITY; k + 1];
        let mut choice = vec![0u8; k + 1];
        dp[0] = 0.0;
        for s in 1..=k {
            let keep = dp[s - 1] + (pred[s - 1] - cur[s - 1]).abs();
            dp[s] = keep;
            choice[s] = 1;
            if s >= 2 {
                let swap = dp[s - 2]
                    + (pred[s - 2] - cur[s - 1]).abs()
                    + (pred[s - 1] - cur[s - 2]).abs();
                if swap < keep {
                    dp[s] = swap;
                    choice[s] = 2;
                }
            }
        }
        let mut perm = vec![0usize; k];
        let mut s = k;
        while s > 0 {
            if choice[s] == 1 {
                perm[s - 1] = s - 1;
                s -= 1;
            } else {
                perm[s - 1] = s - 2;
                perm[s - 2] = s - 1;
                s -= 2;
            }
        }
        let mut new_slopes = vec![0.0f64; k];
        for s in 0..k {
            labels[s][i] = labels[perm[s]][i - 1];
            new_slopes[s] = (cur[s] - prev_vals[perm[s]]) / dt;
        }
        prev_vals = cur;
        prev_slopes = new_slopes;
    }
    labels
}

/// Classifies each `(slot, ell)` cell against the decoupled spectra:
/// flat and near an interior level means interior-like, proximity to an
/// exterior family assigns a side, everything ambiguous stays mixed.
pub fn classify_branches(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    policy: &GridPolicy,
    branches: &mut BranchSet,
) -> Result<()> {
    let k = branches.k;
    let n = branches.ell_grid.len();
    let interior = interior_spectrum(model, geometry, hbar, k, policy)?;
    let metrics = agmon_summary(model, &geometry.with_ell(*branches.ell_grid.last().unwrap())?)?;
    let allowance = (-metrics.d_star / hbar).exp();

    let ext: Vec<Result<(Vec<f64>, Vec<f64>)>> = branches
        .ell_grid
        .par_iter()
        .map(|&ell| {
            let g = geometry.with_ell(ell)?;
            Ok((
                exterior_spectrum(model, &g, hbar, Side::Left, k, policy)?,
                exterior_spectrum(model, &g, hbar, Side::Right, k, policy)?,
            ))
        })
        .collect();
    let mut ext_left = Vec::with_capacity(n);
    let mut ext_right = Vec::with_capacity(n);
    for e in ext {
        let (l, r) = e?;
        ext_left.push(l);
        ext_right.push(r);
    }

    for s in 0..k {
        for i in 0..n {
            let e = branches.energies[s][i];
            let slope = local_slope(&branches.ell_grid, &branches.energies[s], i);

            let (int_dist, _) = nearest(&interior, e);
            let (dist_l, m_l) = nearest(&ext_left[i], e);
            let (dist_r, m_r) = nearest(&ext_right[i], e);
            let (ext_dist, side, m_ext) = if dist_l <= dist_r {
                (dist_l, Side::Left, m_l)
            } else {
                (dist_r, Side::Right, m_r)
            };
            let ext_col = match side {
                Side::Left => &ext_left,
                Side::Right => &ext_right,
            };
            let ext_slope = {
                let ilo = i.saturating_sub(1);
                let ihi = (i + 1).min(n - 1);
                (ext_col[ihi][m_ext] - ext_col[ilo][m_ext])
                    / (branches.ell_grid[ihi] - branches.ell_grid[ilo])
            };
            let spacing = local_spacing(&ext_col[i], m_ext);

            let tol_int = 10.0 * EIG_TOL * e.abs().max(1.0) + allowance;
            let is_interior = slope.abs() < 0.1 * ext_slope.abs() && int_dist <= tol_int;
            // exterior cells must both sit near the family and fall with it;
            // proximity alone would also capture the flat branch whenever a
            // falling level sweeps past
            let slope_ratio = slope / ext_slope;
            let is_exterior =
                ext_dist <= 0.25 * spacing && (0.5..=2.0).contains(&slope_ratio);
            branches.classification[s][i] = match (is_interior, is_exterior) {
                (true, false) => BranchClass::InteriorLike,
                (false, true) => match side {
                    Side::Left => BranchClass::ExteriorLeft,
                    Side::Right => BranchClass::ExteriorRight,
                },
                _ => BranchClass::Mixed,
            };
        }
    }
    branches.interior_levels = interior;
    Ok(())
}

fn local_slope(grid: &[f64], row: &[f64], i: usize) -> f64 {
    let n = grid.len();
    let ilo = i.saturating_sub(1);
    let ihi = (i + 1).min(n - 1);
    (row[ihi] - row[ilo]) / (grid[ihi] - grid[ilo])
}

fn nearest(sorted: &[f64], e: f64) -> (f64, usize) {
    let mut best = (f64::INFINITY, 0usize);
    for (m, &v) in sorted.iter().enumerate() {
        let d = (v - e).abs();
        if d < best.0 {
            best = (d, m);
        }
    }
    best
}

fn local_spacing(sorted: &[f64], m: usize) -> f64 {
    if sorted.len() < 2 {
        return f64::INFINITY;
    }
    if m + 1 < sorted.len() {
        sorted[m + 1] - sorted[m]
    } else {
        sorted[m] - sorted[m - 1]
    }
}

/// A detected avoided-crossing candidate.
#[derive(Debug, Clone, Copy)]
pub struct CrossingCandidate {
    /// Lower slot of the participating pair `(slot, slot + 1)`.
    pub slot: usize,
    /// Bracketing triple of grid `ell` values around the gap minimum.
    pub bracket: (f64, f64, f64),
    /// Which exterior family participates.
    pub side: Side,
    /// Index of the matching interior level.
    pub interior_index: usize,
    /// On-grid gap at the bracket center.
    pub grid_gap: f64,
}

/// Local minima of adjacent-slot gaps where one participant is
/// interior-like and the other exterior.
pub fn detect_avoided_crossings(branches: &BranchSet) -> Vec<CrossingCandidate> {
    let k = branches.k;
    let n = branches.ell_grid.len();
    let mut out = Vec::new();
    if k < 2 || branches.interior_levels.is_empty() {
        return out;
    }
    for j in 0..k - 1 {
        let mut last_pushed: Option<(usize, f64)> = None;
        for i in 1..n - 1 {
            let gap = |i: usize| branches.energies[j + 1][i] - branches.energies[j][i];
            let g = gap(i);
            // ties allowed: the minimizer can fall midway between cells
            if !(g <= gap(i - 1) && g <= gap(i + 1)) {
                continue;
            }
            // a genuine dip against the wider neighborhood, not jitter on a
            // smooth curve
            let wide = gap(i.saturating_sub(2)).max(gap((i + 2).min(n - 1)));
            if g > 0.6 * wide {
                continue;
            }
            let cells_out = [
                (j, i.saturating_sub(2)),
                (j, i - 1),
                (j + 1, (i + 1).min(n - 1)),
                (j + 1, (i + 2).min(n - 1)),
            ];
            let cells_in = [
                (j + 1, i.saturating_sub(2)),
                (j + 1, i - 1),
                (j, (i + 1).min(n - 1)),
                (j, (i + 2).min(n - 1)),
            ];
            let has_interior = cells_out
                .iter()
                .any(|&(s, p)| branches.classification[s][p] == BranchClass::InteriorLike);
            let side = cells_in.iter().find_map(|&(s, p)| match branches.classification[s][p] {
                BranchClass::ExteriorLeft => Some(Side::Left),
                BranchClass::ExteriorRight => Some(Side::Right),
                _ => None,
            });
            let (true, Some(side)) = (has_interior, side) else {
                continue;
            };
            let mid = 0.5 * (branches.energies[j][i] + branches.energies[j + 1][i]);
            let (_, interior_index) = nearest(&branches.interior_levels, mid);
            let cand = CrossingCandidate {
                slot: j,
                bracket: (
                    branches.ell_grid[i - 1],
                    branches.ell_grid[i],
                    branches.ell_grid[i + 1],
                ),
                side,
                interior_index,
                grid_gap: g,
            };
            // adjacent tied cells describe the same crossing
            match last_pushed {
                Some((prev_i, prev_g)) if i <= prev_i + 2 => {
                    if g < prev_g {
                        *out.last_mut().unwrap() = cand;
                        last_pushed = Some((i, g));
                    }
                }
                _ => {
                    out.push(cand);
                    last_pushed = Some((i, g));
                }
            }
        }
    }
    out
}

/// Threshold `c hbar^N` for the spectral-isolation hypothesis.
#[derive(Debug, Clone, Copy)]
pub struct IsolationThreshold {
    pub c: f64,
    pub exponent: f64,
}

impl Default for IsolationThreshold {
    fn default() -> Self {
        IsolationThreshold { c: 1.0, exponent: 4.0 }
    }
}

impl IsolationThreshold {
    pub fn value(&self, hbar: f64) -> f64 {
        self.c * hbar.powf(self.exponent)
    }
}

/// One refined avoided crossing.
#[derive(Debug, Clone, Copy)]
pub struct CrossingReport {
    /// Gap-minimizing box size.
    pub ell_star: f64,
    /// Mean of the two branch energies at `ell_star`.
    pub center_energy: f64,
    /// Minimal gap over the refinement bracket.
    pub gap: f64,
    pub side: Side,
    pub interior_index: usize,
    /// Distance from the crossing to the non-participating exterior family.
    pub delta_isolation: f64,
    /// Set when `delta_isolation` fails the `c hbar^N` hypothesis.
    pub isolation_flagged: bool,
    /// The matching Agmon distance `d^side_{v0}`.
    pub agmon_prediction: f64,
}

/// Golden-section minimum of a two-level gap curve.
///
/// `f(ell)` returns the bracketing pair `(E_lo, E_hi)`; the minimum of
/// `E_hi - E_lo` is located to `xtol` and the pair at the minimizer is
/// returned as `(ell_star, gap, center)`.
pub fn refine_pair_minimum(
    mut f: impl FnMut(f64) -> (f64, f64),
    bracket: (f64, f64),
    xtol: f64,
    max_evals: usize,
) -> (f64, f64, f64) {
    let (ell, _) = golden_min(
        |l| {
            let (a, b) = f(l);
            b - a
        },
        bracket.0,
        bracket.1,
        xtol,
        max_evals,
    );
    let (a, b) = f(ell);
    (ell, b - a, 0.5 * (a + b))
}

/// Refines one candidate: golden-section on each grid of the Richardson
/// pair separately, then extrapolates the scalar results. Extrapolating
/// eigenvalues pointwise across a crossing would mix the two grids'
/// slightly shifted crossing positions.
pub fn refine_gap(
    model: &PotentialModel,
    geometry: &Geometry,
    hbar: f64,
    policy: &GridPolicy,
    candidate: &CrossingCandidate,
    iso: &IsolationThreshold,
) -> Result<CrossingReport> {
    let (la, lc, lb) = candidate.bracket;
    let j = candidate.slot;
    let policy = match policy.e_max {
        Some(_) => *policy,
        None => {
            let probe = solve_lowest(model, (-lc, lc), hbar, j + 2, &policy.with_richardson(false))?;
            policy.with_e_max(1.2 * probe[j + 1].abs().max(1e-3))
        }
    };
    let (v_min, _) = probe_v(model, (-lb, lb));
    let n_coarse = policy.suggest_n(
        (-lc, lc),
        hbar,
        policy.e_max.unwrap_or(1.0) - v_min,
    );

    let pair_at = |n: usize| {
        move |ell: f64| -> (f64, f64) {
            let t = build_operator(model, (-ell, ell), hbar, n, &policy)
                .expect("refinement grid rejected");
            let w = t
                .eigenvalues_range(j, j + 1)
                .expect("pair extraction failed");
            (w[0], w[1])
        }
    };

    // unimodality probe across the bracket
    let probe_f = pair_at(n_coarse);
    let mut probe_gaps = Vec::new();
    for t in 0..7 {
        let ell = la + (lb - la) * t as f64 / 6.0;
        let (a, b) = probe_f(ell);
        probe_gaps.push(b - a);
    }
    let interior_minima = (1..6)
        .filter(|&t| probe_gaps[t] < probe_gaps[t - 1] && probe_gaps[t] < probe_gaps[t + 1])
        .count();
    if interior_minima > 1 {
        return Err(Error::Numerical(
            "non-unimodal refinement bracket (branch pileup); re-sweep with a denser ell grid"
                .into(),
        ));
    }

    let xtol = 1e-10 * lc.abs().max(1.0);
    let budget = 40usize;
    let (ell_star, gap, center) = if policy.richardson {
        let (l1, g1, c1) = refine_pair_minimum(pair_at(n_coarse), (la, lb), xtol, budget);
        let (l2, g2, c2) = refine_pair_minimum(pair_at(2 * n_coarse + 1), (la, lb), xtol, budget);
        let ell = l2 + (l2 - l1) / 3.0;
        let mut gap = g2 + (g2 - g1) / 3.0;
        if gap <= 0.0 {
            gap = g2;
        }
        (ell, gap, c2 + (c2 - c1) / 3.0)
    } else {
        refine_pair_minimum(pair_at(n_coarse), (la, lb), xtol, budget)
    };
    if !(ell_star > la && ell_star < lb) {
        return Err(Error::Numerical(format!(
            "refined ell* = {ell_star} escaped the bracket ({la}, {lb})"
        )));
    }

    let g_star = geometry.with_ell(ell_star)?;
    let other = exterior_spectrum(
        model,
        &g_star,
        hbar,
        match candidate.side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        },
        (j + 4).max(8),
        &policy,
    )?;
    let (delta_isolation, _) = nearest(&other, center);
    let wall = candidate.side.sign() * ell_star;
    let agmon_prediction = match candidate.side {
        Side::Left => agmon_distance(model, model.v0, wall, model.x0)?,
        Side::Right => agmon_distance(model, model.v0, model.x0, wall)?,
    };

    Ok(CrossingReport {
        ell_star,
        center_energy: center,
        gap,
        side: candidate.side,
        interior_index: candidate.interior_index,
        delta_isolation,
        isolation_flagged: delta_isolation < iso.value(hbar),
        agmon_prediction,
    })
}

fn probe_v(model: &PotentialModel, interval: (f64, f64)) -> (f64, f64) {
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    for i in 0..=64 {
        let x = interval.0 + (interval.1 - interval.0) * i as f64 / 64.0;
        let v = model.value(x);
        v_min = v_min.min(v);
        v_max = v_max.max(v);
    }
    (v_min, v_max)
}

impl GridPolicy {
    fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }
}
