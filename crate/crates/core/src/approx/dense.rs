//! Polygonal approximation refined geometrically toward critical points.
//!
//! Around each critical point `c` the annuli `δ_m ≤ |x − c| ≤ δ_{m−1}`,
//! `δ_m = δ_0·2^{−m}`, `m = 1..=depth`, get uniform meshes whose cells each
//! carry a certified local Hölder constant of `h` at most `ε/4`; the region
//! away from all critical points is meshed by the same rule, and the core
//! `|x − c| < δ_depth` is left as a single chord on each side.

use serde::Serialize;

use crate::index::SegIndex;
use crate::{band_slope, critical_set, sup_norm, CertifiedBound, Error, PiecewiseFn, Polygon, Result, Segment};

use super::kp_interpolate;

/// Criticals closer than this are treated as non-isolated.
const MIN_GAP: f64 = 1e-9;
const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub level: usize,
    pub d_lo: f64,
    pub d_hi: f64,
    pub bound: CertifiedBound,
    /// Whether the core error alone is below `ε/4` at distance `d_lo`.
    pub resolved: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseReport {
    pub eps: f64,
    pub depth: usize,
    pub delta0: f64,
    pub criticals: Vec<f64>,
    pub nodes: usize,
    /// `sup |h − f|` over the cores.
    pub core_error: CertifiedBound,
    /// `δ_0` band and the annulus bands, outermost first.
    pub bands: Vec<Band>,
    pub pass: bool,
}

/// Appends `cells` uniform cells over `[lo, hi]`, doubling until every
/// cell has local constant `≤ target`.
fn mesh(idx: &SegIndex<'_>, lo: f64, hi: f64, target: f64, out: &mut Vec<f64>) -> Result<()> {
    if hi <= lo {
        return Ok(());
    }
    let mut cells = 1usize;
    loop {
        let h = (hi - lo) / cells as f64;
        let worst = (0..cells)
            .map(|i| {
                let b = if i + 1 == cells { hi } else { lo + (i + 1) as f64 * h };
                idx.local_constant(lo + i as f64 * h, b, 1.0)
            })
            .fold(0.0, f64::max);
        if worst <= target {
            out.extend((0..=cells).map(|i| if i == cells { hi } else { lo + i as f64 * h }));
            return Ok(());
        }
        cells *= 2;
        if cells > MAX_CELLS {
            return Err(Error::SearchFailed(format!("mesh on [{lo}, {hi}] for local constant {target}")));
        }
    }
}

pub fn dense_polygon_approx(h: &PiecewiseFn, eps: f64, depth: usize) -> Result<(Polygon, DenseReport)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if depth == 0 || depth > 40 {
        return Err(Error::InvalidParameter(format!("depth must lie in 1..=40, got {depth}")));
    }
    let alpha = h.alpha().get();
    let crit = critical_set(h);
    let gap = crit.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap < MIN_GAP {
        return Err(Error::InvalidParameter("critical points are not isolated at this resolution".into()));
    }
    let delta0 = (0.25 * gap).min(0.5);
    let delta = |m: usize| delta0 * (-(m as f64)).exp2();
    let idx = SegIndex::new(h);
    let target = 0.25 * eps;

    let mut pts: Vec<f64> = h.breakpoints();
    // far region: complement of the δ_0-neighbourhoods
    let mut cursor = 0.0;
    for &c in crit.iter().chain(std::iter::once(&f64::INFINITY)) {
        let stop = if c.is_finite() { (c - delta0).max(0.0) } else { 1.0 };
        mesh(&idx, cursor, stop, target, &mut pts)?;
        if c.is_finite() {
            cursor = (c + delta0).min(1.0);
        }
    }
    for &c in &crit {
        for m in 1..=depth {
            let (inner, outer) = (delta(m), delta(m - 1));
            mesh(&idx, (c + inner).min(1.0), (c + outer).min(1.0), target, &mut pts)?;
            mesh(&idx, (c - outer).max(0.0), (c - inner).max(0.0), target, &mut pts)?;
        }
        pts.push(c);
    }
    pts.retain(|x| (0.0..=1.0).contains(x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = kp_interpolate(h, &pts)?;
    let diff = h.sub(f.as_fn())?;

    let inner = delta(depth);
    let mut core = Vec::new();
    let mut at = 0.0;
    for &c in &crit {
        let (lo, hi) = ((c - inner).max(0.0), (c + inner).min(1.0));
        if lo > at {
            core.push(Segment::constant(at, lo, 0.0));
        }
        core.extend(diff.slice(lo, hi));
        at = hi;
    }
    if at < 1.0 {
        core.push(Segment::constant(at, 1.0, 0.0));
    }
    let core_fn = PiecewiseFn::new(h.alpha(), core)?;
    let core_error = sup_norm(&core_fn, 1e-8)?;

    // bands are only compared against ε
    let tol = 1e-3 * eps;
    let mut bands = Vec::with_capacity(depth + 1);
    let mut pass = true;
    for m in 0..=depth {
        let (d_lo, d_hi) = if m == 0 { (delta0, 1.0) } else { (delta(m), delta(m - 1)) };
        let bound = match band_slope(&diff, d_lo, d_hi, tol) {
            Ok(b) => b,
            Err(Error::BudgetExhausted { best, .. }) => best,
            Err(e) => return Err(e),
        };
        let resolved = 2.0 * core_error.upper / d_lo.powf(alpha) <= 0.25 * eps;
        let ok = !resolved || bound.upper <= eps;
        pass &= ok;
        bands.push(Band { level: m, d_lo, d_hi, bound, resolved, pass: ok });
    }
    let report = DenseReport { eps, depth, delta0, criticals: crit, nodes: pts.len(), core_error, bands, pass };
    Ok((f, report))
}
