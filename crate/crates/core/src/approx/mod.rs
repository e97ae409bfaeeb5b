//! Approximation operators and the certificates built on them.

mod dense;
mod inserted;
mod msummand;

pub use dense::{dense_polygon_approx, Band, DenseReport};
pub use inserted::{choose_delta, inserted_constants, InsertedConstantsPlan};
pub use msummand::{
    msummand_certificate, msummand_family, polygon_family, FamilyReport, MsummandOutcome, ViolationWitness,
    GRID_LEVEL,
};

use serde::Serialize;

use crate::report::{CertificateReport, ResultEntry};
use crate::{band_slope, critical_set, holder_seminorm, sup_norm, CertifiedBound, Error, PiecewiseFn, Polygon, Result};

/// Krein–Petunin interpolant: the polygon through `(x_k, h(x_k))`.
pub fn kp_interpolate(h: &PiecewiseFn, partition: &[f64]) -> Result<Polygon> {
    if partition.len() < 2 || partition[0] != 0.0 || *partition.last().unwrap() != 1.0 {
        return Err(Error::InvalidParameter("partition must start at 0 and end at 1".into()));
    }
    if partition.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("partition must be strictly increasing".into()));
    }
    Polygon::interpolate(h, partition)
}

/// Number of sampled pairs `x, y` in a common cell with
/// `L_{xy}(p) > L_{x_{k−1} x_k}(h)` (up to rounding).
pub fn kp_cell_violations(h: &PiecewiseFn, p: &Polygon, samples: usize) -> usize {
    let mut count = 0;
    for w in p.nodes().windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        let Ok(cell) = crate::func::slope(h, a, b) else { continue };
        let at = |i: usize| a + (b - a) * i as f64 / samples as f64;
        for i in 0..samples {
            for j in (i + 1)..=samples {
                let (x, y) = (at(i), at(j));
                if x >= y {
                    continue;
                }
                if let Ok(s) = crate::func::slope(p.as_fn(), x, y) {
                    if s > cell * (1.0 + 1e-12) + 1e-15 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn settle(r: Result<CertifiedBound>) -> Result<CertifiedBound> {
    match r {
        Err(Error::BudgetExhausted { best, .. }) => Ok(best),
        other => other,
    }
}

/// Checks the slope-adaptation condition: `‖h − g‖_∞ ≤ ε′δ′` and slopes of `h − g` at
/// distances with `|x − y|^α ≤ δ′` bounded by `1 + ε′`.
pub fn verify_3b(h: &PiecewiseFn, g: &PiecewiseFn, eps_p: f64, delta_p: f64) -> Result<CertificateReport> {
    if !(eps_p > 0.0 && delta_p > 0.0) {
        return Err(Error::InvalidParameter("ε′ and δ′ must be positive".into()));
    }
    let alpha = h.alpha();
    let diff = h.sub(g)?;
    // the thresholds only need resolving to a fraction of their size
    let norm = settle(sup_norm(&diff, 1e-3 * eps_p * delta_p))?;
    let reach = delta_p.powf(1.0 / alpha.get()).min(1.0);
    let band = settle(band_slope(&diff, 0.0, reach, 1e-3 * eps_p))?;
    let mut report = CertificateReport::new("lemma-3b", alpha.get())
        .param("eps_prime", eps_p)
        .param("delta_prime", delta_p)
        .param("band_reach", reach);
    report.push(ResultEntry::bound("3b1_sup_norm", &norm, norm.upper <= eps_p * delta_p));
    report.push(ResultEntry::bound("3b2_band_slope", &band, band.upper <= 1.0 + eps_p));
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThreeBallWitness {
    #[serde(skip)]
    pub g: PiecewiseFn,
    /// Certified `L(h + f_i − g)`.
    pub per_ball: [CertifiedBound; 3],
    pub epsilon: f64,
    /// Band reach `d` with `band_slope(f_i, 0, d) ≤ ε/2`; `δ′ = d^α`.
    pub reach: f64,
    /// Freezing radius used for `g`; zero when `g = h`.
    pub delta: f64,
    pub pass: bool,
}

/// Largest `d = 2^{−i}` with `band_slope(f, 0, d).upper ≤ target`.
fn largest_dyadic_reach(f: &PiecewiseFn, target: f64, cap: f64) -> Result<f64> {
    for i in 0..60 {
        let d = (-(i as f64)).exp2();
        if d > cap {
            continue;
        }
        let b = settle(band_slope(f, 0.0, d, 1e-3 * target))?;
        if b.upper <= target {
            return Ok(d);
        }
    }
    Err(Error::SearchFailed("a band on which the slopes of f stay below ε/2".into()))
}

/// Finds `g ∈ H_α^0` with `L(h + f_i − g) ≤ 1 + ε` for three little
/// functions `f_i` of norm at most 1.
///
/// The reach `d` makes every `f_i` flat to `ε/2` below distance `d`; `g`
/// freezes `h` near its criticals with `ε′ = ε/4` and `δ′ = d^α`. Below `d`
/// the slopes of `h − g` stay within `L(h)`; above it they are at most
/// `2‖h − g‖_∞/δ′ ≤ ε/2`.
pub fn three_ball_witness(h: &PiecewiseFn, fs: [&PiecewiseFn; 3], eps: f64) -> Result<ThreeBallWitness> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let tol = 1e-3 * eps;
    for f in fs {
        if !critical_set(f).is_empty() {
            return Err(Error::InvalidParameter("every f_i must be free of critical points".into()));
        }
    }
    let crit = critical_set(h);
    let (g, reach, delta) = if crit.is_empty() {
        (h.clone(), 1.0, 0.0)
    } else {
        let mut pts = crit.clone();
        pts.extend([0.0, 1.0]);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let gap = pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let mut reach = 1.0f64;
        for f in fs {
            reach = reach.min(largest_dyadic_reach(f, 0.5 * eps, 0.25 * gap)?);
        }
        let lip = settle(holder_seminorm(h, tol))?.upper;
        let delta_p = h.alpha().pow(reach);
        let delta = choose_delta(&crit, lip, 0.25 * eps, delta_p, h.alpha())?;
        (inserted_constants(h, &crit, delta)?, reach, delta)
    };
    let mut per_ball = [CertifiedBound::exact(0.0, None); 3];
    for (i, f) in fs.iter().enumerate() {
        let u = h.add(f)?.sub(&g)?;
        per_ball[i] = settle(holder_seminorm(&u, tol))?;
    }
    let pass = per_ball.iter().all(|b| b.upper <= 1.0 + eps);
    Ok(ThreeBallWitness { g, per_ball, epsilon: eps, reach, delta, pass })
}
