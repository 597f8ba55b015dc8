//! Potential families, well data, forbidden regions and hypothesis checks.
//!
//! All families are closed-form so the derivative is exact; tabulated
//! potentials would inject interpolation noise into the virial check and
//! the WKB actions.

use crate::error::{Error, Result};
use crate::search::golden_min;

/// Analytic potential family.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialFamily {
    /// `b_- exp(-((x-p_-)/w_-)^2) + b_+ exp(-((x-p_+)/w_+)^2)`.
    TwoGaussianBarriers {
        b_minus: f64,
        b_plus: f64,
        p_minus: f64,
        p_plus: f64,
        w_minus: f64,
        w_plus: f64,
    },
    /// Piecewise-constant barriers on `[minus_edges]` and `[plus_edges]`, zero elsewhere.
    SquareBarriers {
        height_minus: f64,
        height_plus: f64,
        minus_edges: (f64, f64),
        plus_edges: (f64, f64),
    },
    /// `V(x) = value` everywhere.
    Constant { value: f64 },
    /// `V(x) = 0` everywhere; the box walls provide the confinement.
    InfiniteWellZero,
}

/// A potential together with its derived well data.
///
/// `x0`/`v0` are recomputed at construction (local minimum of `V` between
/// the barriers), `v_minus`/`v_plus` are the asymptotic levels and
/// `tail_exponent` is the decay rate claimed for the far tail.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    pub family: PotentialFamily,
    pub x0: f64,
    pub v0: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub tail_exponent: f64,
}

/// Side of the exterior region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl PotentialModel {
    /// Builds a model, recomputing the well data from the family parameters.
    pub fn new(family: PotentialFamily, tail_exponent: f64) -> Result<Self> {
        if !tail_exponent.is_finite() || tail_exponent <= 0.0 {
            return Err(Error::Domain(format!(
                "tail_exponent must be positive and finite, got {tail_exponent}"
            )));
        }
        match &family {
            PotentialFamily::TwoGaussianBarriers {
                b_minus,
                b_plus,
                p_minus,
                p_plus,
                w_minus,
                w_plus,
            } => {
                for (name, v) in [
                    ("b_minus", *b_minus),
                    ("b_plus", *b_plus),
                    ("p_minus", *p_minus),
                    ("p_plus", *p_plus),
                    ("w_minus", *w_minus),
                    ("w_plus", *w_plus),
                ] {
                    if !v.is_finite() {
                        return Err(Error::Domain(format!("{name} must be finite")));
                    }
                }
                if *w_minus <= 0.0 || *w_plus <= 0.0 {
                    return Err(Error::Domain("gaussian widths must be positive".into()));
                }
                if *b_minus < 0.0 || *b_plus < 0.0 {
                    return Err(Error::Domain("gaussian heights must be non-negative".into()));
                }
                if p_minus >= p_plus {
                    return Err(Error::Domain("p_minus must lie left of p_plus".into()));
                }
            }
            PotentialFamily::SquareBarriers {
                minus_edges,
                plus_edges,
                height_minus,
                height_plus,
            } => {
                if !(minus_edges.0 < minus_edges.1 && plus_edges.0 < plus_edges.1) {
                    return Err(Error::Domain("square barrier edges must be ordered".into()));
                }
                if minus_edges.1 > plus_edges.0 {
                    return Err(Error::Domain("square barriers must not overlap".into()));
                }
                if !height_minus.is_finite() || !height_plus.is_finite() {
                    return Err(Error::Domain("square barrier heights must be finite".into()));
                }
            }
            PotentialFamily::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::Domain("constant potential must be finite".into()));
                }
            }
            PotentialFamily::InfiniteWellZero => {}
        }

        let (v_minus, v_plus) = match &family {
            PotentialFamily::Constant { value } => (*value, *value),
            _ => (0.0, 0.0),
        };
        let (x0, v0) = well_minimum(&family);
        Ok(PotentialModel {
            family,
            x0,
            v0,
            v_minus,
            v_plus,
            tail_exponent,
        })
    }

    /// Unchecked evaluation; callers guarantee `x` is finite.
    pub fn value(&self, x: f64) -> f64 {
        match &self.family {
            PotentialFamily::TwoGaussianBarriers {
                b_minus,
                b_plus,
                p_minus,
                p_plus,
                w_minus,
                w_plus,
            } => {
                let um = (x - p_minus) / w_minus;
                let up = (x - p_plus) / w_plus;
                b_minus * (-um * um).exp() + b_plus * (-up * up).exp()
            }
            PotentialFamily::SquareBarriers {
                height_minus,
                height_plus,
                minus_edges,
                plus_edges,
            } => {
                if x >= minus_edges.0 && x <= minus_edges.1 {
                    *height_minus
                } else if x >= plus_edges.0 && x <= plus_edges.1 {
                    *height_plus
                } else {
                    0.0
                }
            }
            PotentialFamily::Constant { value } => *value,
            PotentialFamily::InfiniteWellZero => 0.0,
        }
    }

    /// Unchecked analytic derivative. Square barriers use 0 away from the
    /// (measure-zero) jump points.
    pub fn slope(&self, x: f64) -> f64 {
        match &self.family {
            PotentialFamily::TwoGaussianBarriers {
                b_minus,
                b_plus,
                p_minus,
                p_plus,
                w_minus,
                w_plus,
            } => {
                let um = (x - p_minus) / w_minus;
                let up = (x - p_plus) / w_plus;
                b_minus * (-um * um).exp() * (-2.0 * um / w_minus)
                    + b_plus * (-up * up).exp() * (-2.0 * up / w_plus)
            }
            PotentialFamily::SquareBarriers { .. }
            | PotentialFamily::Constant { .. }
            | PotentialFamily::InfiniteWellZero => 0.0,
        }
    }

    /// `V(x)` with input validation.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("eval_potential: x = {x} is not finite")));
        }
        Ok(self.value(x))
    }

    /// `V'(x)` with input validation.
    pub fn eval_derivative(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!(
                "eval_potential_derivative: x = {x} is not finite"
            )));
        }
        Ok(self.slope(x))
    }

    /// Default WKB window half-height above the well bottom,
    /// `0.5 (v0 - max(v_-, v_+))`.
    pub fn default_delta(&self) -> f64 {
        0.5 * (self.v0 - self.v_minus.max(self.v_plus))
    }

    /// Barrier top values `(max V left of x0, max V right of x0)` for
    /// barrier families; `None` when there is no barrier structure.
    pub fn barrier_tops(&self) -> Option<(f64, f64)> {
        match &self.family {
            PotentialFamily::TwoGaussianBarriers {
                p_minus,
                p_plus,
                w_minus,
                w_plus,
                ..
            } => {
                let (_, neg_left) = golden_min(
                    |x| -self.value(x),
                    p_minus - w_minus,
                    self.x0.min(p_minus + w_minus),
                    1e-12,
                    400,
                );
                let (_, neg_right) = golden_min(
                    |x| -self.value(x),
                    self.x0.max(p_plus - w_plus),
                    p_plus + w_plus,
                    1e-12,
                    400,
                );
                Some((-neg_left, -neg_right))
            }
            PotentialFamily::SquareBarriers {
                height_minus,
                height_plus,
                ..
            } => Some((*height_minus, *height_plus)),
            PotentialFamily::Constant { .. } | PotentialFamily::InfiniteWellZero => None,
        }
    }
}

/// Locates the local minimum of `V` between the barriers.
fn well_minimum(family: &PotentialFamily) -> (f64, f64) {
    match family {
        PotentialFamily::TwoGaussianBarriers {
            b_minus,
            b_plus,
            p_minus,
            p_plus,
            w_minus,
            w_plus,
        } => {
            let value = |x: f64| {
                let um = (x - p_minus) / w_minus;
                let up = (x - p_plus) / w_plus;
                b_minus * (-um * um).exp() + b_plus * (-up * up).exp()
            };
            let (x0, v0) = golden_min(value, *p_minus, *p_plus, 1e-14, 500);
            (x0, v0)
        }
        PotentialFamily::SquareBarriers {
            minus_edges,
            plus_edges,
            ..
        } => (0.5 * (minus_edges.1 + plus_edges.0), 0.0),
        PotentialFamily::Constant { value } => (0.0, *value),
        PotentialFamily::InfiniteWellZero => (0.0, 0.0),
    }
}

/// Interior/exterior split points and the box half-width.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub ell: f64,
}

impl Geometry {
    pub fn new(omega_minus: f64, omega_plus: f64, ell: f64) -> Result<Self> {
        if !(omega_minus.is_finite() && omega_plus.is_finite() && ell.is_finite()) {
            return Err(Error::Domain("geometry entries must be finite".into()));
        }
        if !(omega_minus < 0.0 && omega_plus > 0.0) {
            return Err(Error::Domain(format!(
                "need omega_minus < 0 < omega_plus, got ({omega_minus}, {omega_plus})"
            )));
        }
        if ell <= omega_minus.abs().max(omega_plus) {
            return Err(Error::Domain(format!(
                "ell = {ell} must exceed max(|omega_-|, omega_+)"
            )));
        }
        Ok(Geometry {
            omega_minus,
            omega_plus,
            ell,
        })
    }

    /// Same split points with a different box half-width.
    pub fn with_ell(&self, ell: f64) -> Result<Self> {
        Geometry::new(self.omega_minus, self.omega_plus, ell)
    }

    /// Exterior interval `(-ell, omega_-)` or `(omega_+, ell)`.
    pub fn exterior(&self, side: Side) -> (f64, f64) {
        match side {
            Side::Left => (-self.ell, self.omega_minus),
            Side::Right => (self.omega_plus, self.ell),
        }
    }

    /// Dirichlet split point on one side.
    pub fn omega(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.omega_minus,
            Side::Right => self.omega_plus,
        }
    }

    /// Checks on a grid that `[omega_-, omega_+]` minus the well point
    /// stays inside the forbidden region at the well-bottom energy.
    pub fn validate_interior(&self, model: &PotentialModel, grid: usize) -> Result<()> {
        let n = grid.max(16);
        for i in 0..=n {
            let x = self.omega_minus + (self.omega_plus - self.omega_minus) * i as f64 / n as f64;
            if (x - model.x0).abs() < 1e-9 {
                continue;
            }
            if model.value(x) <= model.v0 {
                return Err(Error::Domain(format!(
                    "interior point x = {x} leaves the forbidden region at v0"
                )));
            }
        }
        Ok(())
    }
}

/// Maximal subintervals of `search` where `V > threshold`, edges refined
/// by bisection to `1e-10`.
pub fn forbidden_region(
    model: &PotentialModel,
    energy: f64,
    search: (f64, f64),
) -> Result<Vec<(f64, f64)>> {
    if !energy.is_finite() {
        return Err(Error::Domain("forbidden_region: energy must be finite".into()));
    }
    let (lo, hi) = search;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain("forbidden_region: bad search interval".into()));
    }

    // Scan grid, with the well point and square-barrier edges as extra
    // nodes so intervals that merely touch the threshold still split.
    let n = 4000usize;
    let mut xs: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    if model.x0 > lo && model.x0 < hi {
        xs.push(model.x0);
    }
    if let PotentialFamily::SquareBarriers {
        minus_edges,
        plus_edges,
        ..
    } = &model.family
    {
        for e in [minus_edges.0, minus_edges.1, plus_edges.0, plus_edges.1] {
            if e > lo && e < hi {
                xs.push(e);
                // nudge nodes just inside/outside the jump
                xs.push(e - 1e-12);
                xs.push(e + 1e-12);
            }
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();

    let above: Vec<bool> = xs
        .iter()
        .map(|&x| {
            let v = model.value(x) - energy;
            if v.is_nan() {
                return false;
            }
            v > 0.0
        })
        .collect();
    if xs.iter().any(|&x| model.value(x).is_nan()) {
        return Err(Error::Numerical("forbidden_region: potential evaluated to NaN".into()));
    }

    // Boundary between an above point and a not-above point. Classification
    // bisection (not sign bisection): `V - E` may be exactly zero at a node,
    // e.g. at the well bottom when E = v0.
    let refine = |mut above_x: f64, mut other_x: f64| -> f64 {
        while (above_x - other_x).abs() > 1e-10 {
            let m = 0.5 * (above_x + other_x);
            if m == above_x || m == other_x {
                break;
            }
            if model.value(m) - energy > 0.0 {
                above_x = m;
            } else {
                other_x = m;
            }
        }
        0.5 * (above_x + other_x)
    };

    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..xs.len() {
        match (start, above[i]) {
            (None, true) => {
                let s = if i == 0 { xs[0] } else { refine(xs[i], xs[i - 1]) };
                start = Some(s);
            }
            (Some(s), false) => {
                let e = refine(xs[i - 1], xs[i]);
                out.push((s, e));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, xs[xs.len() - 1]));
    }
    Ok(out)
}

/// Turning points of `V - E` on one exterior side, plus regime notes.
#[derive(Debug, Clone)]
pub struct TurningPoints {
    pub points: Vec<f64>,
    pub side: Side,
    pub energy: f64,
    /// Set when the count differs from the single-turning-point WKB regime
    /// or the energy leaves the nominal window.
    pub warnings: Vec<String>,
}

impl TurningPoints {
    /// The unique turning point, or a regime error.
    pub fn single(&self) -> Result<f64> {
        if self.points.len() == 1 {
            Ok(self.points[0])
        } else {
            Err(Error::Regime(format!(
                "expected one turning point on the {} side at E = {}, found {}",
                self.side.label(),
                self.energy,
                self.points.len()
            )))
        }
    }
}

/// Zeros of `V - E` between the split point and the outer limit on one
/// exterior side, refined by bisection to `1e-12`.
pub fn turning_points(
    model: &PotentialModel,
    energy: f64,
    side: Side,
    omega: f64,
    outer: f64,
) -> Result<TurningPoints> {
    if !energy.is_finite() {
        return Err(Error::Domain("turning_points: energy must be finite".into()));
    }
    let (lo, hi) = match side {
        Side::Left => (outer, omega),
        Side::Right => (omega, outer),
    };
    if !(lo < hi) {
        return Err(Error::Domain("turning_points: empty exterior interval".into()));
    }
    let n = 4000usize;
    let mut points = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = model.value(lo) - energy;
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let f = model.value(x) - energy;
        if prev_f == 0.0 {
            points.push(prev_x);
        } else if prev_f * f < 0.0 {
            points.push(crate::search::bisect_root(
                |t| model.value(t) - energy,
                prev_x,
                x,
                1e-12,
            ));
        }
        prev_x = x;
        prev_f = f;
    }

    let mut warnings = Vec::new();
    if points.len() != 1 {
        warnings.push(format!(
            "{} turning points on the {} side at E = {energy}; single-turning-point WKB regime needs exactly one",
            points.len(),
            side.label()
        ));
    }
    let v_side = match side {
        Side::Left => model.v_minus,
        Side::Right => model.v_plus,
    };
    let window_top = model.v0 + model.default_delta();
    if energy <= v_side || energy > window_top {
        warnings.push(format!(
            "E = {energy} outside the nominal window ({v_side}, {window_top}]"
        ));
    }
    Ok(TurningPoints {
        points,
        side,
        energy,
        warnings,
    })
}

/// Numerical certificates for the structural hypotheses.
#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub h1_pass: bool,
    pub h1_detail: String,
    pub h2_pass: bool,
    /// Empirical virial margin `S` (positive when H2 holds).
    pub h2_margin: f64,
    pub h4_pass: bool,
    /// Fitted tail decay exponent; `+inf` when the tail underflows f64.
    pub h4_exponent: f64,
    pub grid_points: usize,
    pub window: (f64, f64),
}

/// Grid-based checks of (H1), (H2) at `energy`, and the (H4) tail fit.
///
/// Failures land in the report, never in `Err`.
pub fn check_hypotheses(model: &PotentialModel, geometry: &Geometry, energy: f64) -> HypothesisReport {
    let window = (-50.0, 50.0);
    let grid_points = 10_000usize;

    // H1: strict local minimum, connected closure of J(v0), limsup below v0.
    let strict_min = {
        let mut ok = true;
        for h in [1e-4, 1e-3, 1e-2] {
            if model.value(model.x0 - h) <= model.v0 || model.value(model.x0 + h) <= model.v0 {
                ok = false;
            }
        }
        ok
    };
    let far_max = {
        let mut m = f64::NEG_INFINITY;
        for i in 0..200 {
            let t = 0.8 + 0.2 * i as f64 / 199.0;
            m = m.max(model.value(t * window.1));
            m = m.max(model.value(t * window.0));
        }
        m
    };
    let limsup_ok = far_max < model.v0;
    let connected = match forbidden_region(model, model.v0, window) {
        Ok(iv) => {
            let merged = merge_touching(&iv, 1e-6);
            merged.len() == 1
                && merged[0].0 < model.x0 - 1e-7
                && merged[0].1 > model.x0 + 1e-7
        }
        Err(_) => false,
    };
    let h1_pass = strict_min && limsup_ok && connected;
    let h1_detail = format!(
        "strict_min={strict_min} limsup_below_v0={limsup_ok} forbidden_closure_connected={connected}"
    );

    // H2: virial margin on the exterior beyond J(E).
    let mut h2_margin = f64::INFINITY;
    for side in [Side::Left, Side::Right] {
        let omega = geometry.omega(side);
        let outer_edge = forbidden_region(model, energy, window)
            .ok()
            .and_then(|iv| match side {
                Side::Right => iv
                    .iter()
                    .filter(|(_, b)| *b > omega)
                    .map(|(_, b)| *b)
                    .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.max(b)))),
                Side::Left => iv
                    .iter()
                    .filter(|(a, _)| *a < omega)
                    .map(|(a, _)| *a)
                    .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |b| b.min(a)))),
            });
        let (lo, hi) = match side {
            Side::Right => (outer_edge.unwrap_or(omega).max(omega), window.1),
            Side::Left => (window.0, outer_edge.unwrap_or(omega).min(omega)),
        };
        if lo >= hi {
            continue;
        }
        let half = grid_points / 2;
        let mut worst = f64::NEG_INFINITY;
        for i in 1..half {
            let x = lo + (hi - lo) * i as f64 / half as f64;
            if x == 0.0 {
                continue;
            }
            let val = (x - omega) / x * (2.0 * (model.value(x) - energy) + x * model.slope(x));
            worst = worst.max(val);
        }
        h2_margin = h2_margin.min(-worst);
    }
    let h2_pass = h2_margin.is_finite() && h2_margin > 0.0;

    // H4: log-log tail fit of |V - v_pm| on [20, 200].
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for i in 0..200 {
        let x = 20.0 * (200.0f64 / 20.0).powf(i as f64 / 199.0);
        for (xx, v_as) in [(x, model.v_plus), (-x, model.v_minus)] {
            let y = (model.value(xx) - v_as).abs();
            if y > 1e-280 {
                pts.push((xx.abs().ln(), y.ln()));
            }
        }
    }
    let (h4_exponent, h4_pass) = if pts.len() < 4 {
        // tail under the floating-point floor: faster than any power law
        (f64::INFINITY, true)
    } else {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let exponent = -slope;
        (exponent, exponent >= model.tail_exponent - 0.1)
    };

    HypothesisReport {
        h1_pass,
        h1_detail,
        h2_pass,
        h2_margin,
        h4_pass,
        h4_exponent,
        grid_points,
        window,
    }
}

/// Merges intervals whose gaps are at most `tol`.
pub fn merge_touching(intervals: &[(f64, f64)], tol: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in intervals {
        match out.last_mut() {
            Some(last) if a - last.1 <= tol => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(b_minus: f64, b_plus: f64, p: f64, w: f64) -> PotentialModel {
        PotentialModel::new(
            PotentialFamily::TwoGaussianBarriers {
                b_minus,
                b_plus,
                p_minus: -p,
                p_plus: p,
                w_minus: w,
                w_plus: w,
            },
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn constant_family_is_constant() {
        let m = PotentialModel::new(PotentialFamily::Constant { value: 4.0 }, 2.0).unwrap();
        assert_eq!(m.eval(17.0).unwrap(), 4.0);
        assert_eq!(m.eval_derivative(3.0).unwrap(), 0.0);
        assert!(m.eval(f64::NAN).is_err());
        assert!(m.eval(f64::INFINITY).is_err());
    }

    #[test]
    fn gaussian_tails_vanish() {
        let m = gaussian(3.0, 3.0, 2.0, 0.8);
        assert!(m.eval(50.0).unwrap().abs() < 1e-200);
        assert!(m.eval(-50.0).unwrap().abs() < 1e-200);
    }

    #[test]
    fn gaussian_midpoint_golden_value() {
        // b_- = 3, b_+ = 2.5, p = -+2, w = 0.8 at x = 0:
        // (3 + 2.5) e^{-(2/0.8)^2} = 5.5 e^{-6.25}
        let m = PotentialModel::new(
            PotentialFamily::TwoGaussianBarriers {
                b_minus: 3.0,
                b_plus: 2.5,
                p_minus: -2.0,
                p_plus: 2.0,
                w_minus: 0.8,
                w_plus: 0.8,
            },
            2.0,
        )
        .unwrap();
        let v = m.eval(0.0).unwrap();
        assert!((v - 0.0106174977492524).abs() < 1e-15);
        assert!((v - 5.5 * (-6.25f64).exp()).abs() < 1e-17);
    }

    #[test]
    fn symmetric_derivative_vanishes_at_center() {
        let m = gaussian(3.0, 3.0, 2.0, 0.8);
        assert_eq!(m.eval_derivative(0.0).unwrap(), 0.0);
        assert!((m.x0).abs() < 1e-7);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let m = PotentialModel::new(
            PotentialFamily::TwoGaussianBarriers {
                b_minus: 3.0,
                b_plus: 2.5,
                p_minus: -2.0,
                p_plus: 2.0,
                w_minus: 0.8,
                w_plus: 0.8,
            },
            2.0,
        )
        .unwrap();
        let x = 1.0;
        let h = 1e-6;
        let fd = (m.value(x + h) - m.value(x - h)) / (2.0 * h);
        let an = m.slope(x);
        assert!((an - fd).abs() <= 1e-6 * (1.0 + an.abs()));
    }

    #[test]
    fn forbidden_region_single_gaussian() {
        // V = 3 e^{-x^2}, E = 3/e: J(E) = (-1, 1)
        let m = PotentialModel::new(
            PotentialFamily::TwoGaussianBarriers {
                b_minus: 3.0,
                b_plus: 0.0,
                p_minus: 0.0,
                p_plus: 1.0,
                w_minus: 1.0,
                w_plus: 1.0,
            },
            2.0,
        )
        .unwrap();
        let iv = forbidden_region(&m, 3.0 / std::f64::consts::E, (-10.0, 10.0)).unwrap();
        assert_eq!(iv.len(), 1);
        assert!((iv[0].0 + 1.0).abs() < 1e-9);
        assert!((iv[0].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn forbidden_region_empty_when_energy_above() {
        let m = PotentialModel::new(PotentialFamily::Constant { value: 4.0 }, 2.0).unwrap();
        let iv = forbidden_region(&m, 5.0, (-1.0, 1.0)).unwrap();
        assert!(iv.is_empty());
    }

    #[test]
    fn forbidden_region_touches_at_well_bottom() {
        let m = gaussian(0.5, 0.32, 2.0, 1.1);
        let iv = forbidden_region(&m, m.v0, (-10.0, 10.0)).unwrap();
        assert_eq!(iv.len(), 2, "two intervals touching at x0, got {iv:?}");
        assert!((iv[0].1 - m.x0).abs() < 1e-6);
        assert!((iv[1].0 - m.x0).abs() < 1e-6);
        assert!(iv[1].0 - iv[0].1 < 1e-6);
    }

    #[test]
    fn turning_point_single_gaussian_at_one() {
        let m = PotentialModel::new(
            PotentialFamily::TwoGaussianBarriers {
                b_minus: 3.0,
                b_plus: 0.0,
                p_minus: 0.0,
                p_plus: 1.0,
                w_minus: 1.0,
                w_plus: 1.0,
            },
            2.0,
        )
        .unwrap();
        let tp = turning_points(&m, 3.0 / std::f64::consts::E, Side::Right, 0.5, 8.0).unwrap();
        assert_eq!(tp.points.len(), 1);
        assert!((tp.points[0] - 1.0).abs() < 1e-10);
        assert!(tp.single().is_ok());
    }

    #[test]
    fn turning_point_absent_for_free_potential() {
        let m = PotentialModel::new(PotentialFamily::InfiniteWellZero, 2.0).unwrap();
        let tp = turning_points(&m, 0.5, Side::Right, 0.5, 8.0).unwrap();
        assert!(tp.points.is_empty());
        assert!(!tp.warnings.is_empty());
        assert!(tp.single().is_err());
    }

    #[test]
    fn hypotheses_fail_for_constant() {
        let m = PotentialModel::new(PotentialFamily::Constant { value: 4.0 }, 2.0).unwrap();
        let g = Geometry::new(-1.0, 1.0, 3.0).unwrap();
        let r = check_hypotheses(&m, &g, m.v0);
        assert!(!r.h1_pass, "{}", r.h1_detail);
    }

    #[test]
    fn hypotheses_fail_for_single_barrier() {
        let m = PotentialModel::new(
            PotentialFamily::TwoGaussianBarriers {
                b_minus: 3.0,
                b_plus: 0.0,
                p_minus: -2.0,
                p_plus: 2.0,
                w_minus: 0.8,
                w_plus: 0.8,
            },
            2.0,
        )
        .unwrap();
        let g = Geometry::new(-1.0, 1.0, 3.0).unwrap();
        let r = check_hypotheses(&m, &g, m.v0);
        assert!(!r.h1_pass, "{}", r.h1_detail);
    }

    #[test]
    fn geometry_rejects_small_ell() {
        assert!(Geometry::new(-2.0, 2.0, 1.5).is_err());
        assert!(Geometry::new(2.0, -2.0, 5.0).is_err());
    }
}
