//! Freezing `h` near its critical points.
//!
//! With criticals `0 = x_1 < … < x_n = 1`, `δ > 0` and the conventions
//! `h(x) = 0` for `x < 0`, `h(x) = h(1)` for `x > 1`, let
//! `Δ_k = h(x_k − δ) − h(x_k + δ)` and `S_k = Δ_1 + … + Δ_k`. Then
//!
//! ```text
//! g = h(x_k − δ) + S_{k−1}   on [x_k − δ, x_k + δ]
//! g = h + S_k                 on [x_k + δ, x_{k+1} − δ]
//! ```
//!
//! is continuous, based, and carries no arc anchored inside its own
//! segments, so it has no critical points.

use serde::Serialize;

use crate::{critical_set, Error, PiecewiseFn, Result, Segment};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsertedConstantsPlan {
    /// Sorted, with 0 and 1 always present.
    pub criticals: Vec<f64>,
    pub delta: f64,
    /// `Δ_k` for each critical point.
    pub jumps: Vec<f64>,
}

impl InsertedConstantsPlan {
    pub fn new(h: &PiecewiseFn, criticals: &[f64], delta: f64) -> Result<Self> {
        if !h.is_based() {
            return Err(Error::NotBased(h.value(0.0)));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        let mut pts: Vec<f64> = criticals.to_vec();
        if let Some(&bad) = pts.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::OutOfDomain(bad));
        }
        pts.push(0.0);
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        for c in critical_set(h) {
            if pts.binary_search_by(|p| p.total_cmp(&c)).is_err() {
                return Err(Error::MissingCritical(c));
            }
        }
        for w in pts.windows(2) {
            if w[1] - w[0] <= 2.0 * delta {
                return Err(Error::OverlappingIntervals(w[0], w[1]));
            }
        }
        let ext = |x: f64| {
            if x < 0.0 {
                0.0
            } else {
                h.value(x.min(1.0))
            }
        };
        let jumps = pts.iter().map(|&x| ext(x - delta) - ext(x + delta)).collect();
        Ok(InsertedConstantsPlan { criticals: pts, delta, jumps })
    }

    /// Frozen level `h(x_k − δ) + S_{k−1}` on block `k`.
    pub fn level(&self, h: &PiecewiseFn, k: usize) -> f64 {
        let x = self.criticals[k] - self.delta;
        let base = if x < 0.0 { 0.0 } else { h.value(x) };
        base + self.jumps[..k].iter().sum::<f64>()
    }

    /// `Σ_k |Δ_k|`, the cumulative shift budget.
    pub fn jump_total(&self) -> f64 {
        self.jumps.iter().map(|d| d.abs()).sum()
    }

    pub fn apply(&self, h: &PiecewiseFn) -> Result<PiecewiseFn> {
        let (pts, d) = (&self.criticals, self.delta);
        let mut segments = Vec::new();
        let mut shift = 0.0;
        for k in 0..pts.len() {
            let lo = (pts[k] - d).max(0.0);
            let hi = (pts[k] + d).min(1.0);
            segments.push(Segment::constant(lo, hi, self.level(h, k)));
            shift += self.jumps[k];
            if k + 1 < pts.len() {
                for mut s in h.slice(hi, pts[k + 1] - d) {
                    s.c += shift;
                    segments.push(s);
                }
            }
        }
        PiecewiseFn::new(h.alpha(), segments)
    }
}

/// `g` for the given criticals and `δ`; see the module docs.
pub fn inserted_constants(h: &PiecewiseFn, criticals: &[f64], delta: f64) -> Result<PiecewiseFn> {
    InsertedConstantsPlan::new(h, criticals, delta)?.apply(h)
}

/// `δ` for which `g` satisfies the slope-adaptation condition with `(ε′, δ′)`, given an
/// upper bound `lip` for `L(h)`.
///
/// On each frozen block `|h − g| ≤ n·lip·(2δ)^α`, so
/// `δ ≤ ½(ε′δ′/(n·lip))^{1/α}` gives `‖h − g‖_∞ ≤ ε′δ′`; `δ ≤ ½δ′^{1/α}`
/// keeps the blocks shorter than the band; `δ ≤ gap/4` keeps them apart.
pub fn choose_delta(criticals: &[f64], lip: f64, eps_p: f64, delta_p: f64, alpha: crate::Alpha) -> Result<f64> {
    if !(eps_p > 0.0 && delta_p > 0.0) {
        return Err(Error::InvalidParameter("ε′ and δ′ must be positive".into()));
    }
    let mut pts: Vec<f64> = criticals.iter().copied().chain([0.0, 1.0]).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let n = pts.len() as f64;
    let inv = 1.0 / alpha.get();
    let gap = pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let by_norm = if lip > 0.0 { 0.5 * (eps_p * delta_p / (n * lip)).powf(inv) } else { f64::INFINITY };
    let delta = (0.5 * delta_p.powf(inv)).min(by_norm).min(0.25 * gap);
    if !(delta > 0.0) {
        return Err(Error::SearchFailed(format!("freezing radius underflows (got {delta})")));
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Alpha, Polygon};

    #[test]
    fn clamped_power() {
        let a = Alpha::half();
        let h = PiecewiseFn::power(a);
        let d = 1.0 / 64.0;
        let g = inserted_constants(&h, &[0.0, 1.0], d).unwrap();
        assert_eq!(g.value(0.0), 0.0);
        assert_eq!(g.value(d / 2.0), 0.0);
        let x = 0.3f64;
        assert!((g.value(x) - (x.sqrt() - d.sqrt())).abs() < 1e-15);
        let top = (1.0 - d).sqrt() - d.sqrt();
        assert!((g.value(1.0) - top).abs() < 1e-15);
        assert!(critical_set(&g).is_empty());
        assert!(g.continuity_defect() < 1e-15);
    }

    #[test]
    fn errors() {
        let a = Alpha::half();
        let h = PiecewiseFn::tent_arcs(a);
        assert!(matches!(inserted_constants(&h, &[], 0.6), Err(Error::OverlappingIntervals(..))));
        let p = Polygon::new(a, vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).unwrap();
        let bumped = p.as_fn().add(&PiecewiseFn::constant(a, 0.1)).unwrap();
        assert!(matches!(inserted_constants(&bumped, &[], 0.1), Err(Error::NotBased(_))));
        let two = PiecewiseFn::new(
            a,
            vec![Segment::arc(0.0, 0.5, 0.0, 1.0, 0.0), Segment::arc(0.5, 1.0, 0.5, -1.0, 0.5f64.sqrt())],
        )
        .unwrap();
        assert!(matches!(inserted_constants(&two, &[], 0.01), Err(Error::MissingCritical(c)) if c == 0.5));
    }
}
