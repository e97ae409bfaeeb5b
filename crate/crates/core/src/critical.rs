//! Structural classification of critical points.
//!
//! For the exact representation a point is critical exactly when some arc
//! term with nonzero coefficient is anchored there inside its own segment:
//! the slopes from that point tend to `|coeff| > 0`, while every other point
//! has a neighbourhood on which the function is a sum of smooth terms.

use serde::{Deserialize, Serialize};

use crate::PiecewiseFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Critical,
    Noncritical,
}

/// Every breakpoint of `f` with its classification, in increasing order.
pub fn critical_points(f: &PiecewiseFn) -> Vec<(f64, PointClass)> {
    let segs = f.segments();
    f.breakpoints()
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            let left = i.checked_sub(1).map(|k| segs[k].anchored_at(x)).unwrap_or(false);
            let right = segs.get(i).map(|s| s.anchored_at(x)).unwrap_or(false);
            let class = if left || right { PointClass::Critical } else { PointClass::Noncritical };
            (x, class)
        })
        .collect()
}

/// Just the critical points.
pub fn critical_set(f: &PiecewiseFn) -> Vec<f64> {
    critical_points(f)
        .into_iter()
        .filter(|(_, c)| *c == PointClass::Critical)
        .map(|(x, _)| x)
        .collect()
}
