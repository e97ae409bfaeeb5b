//! Certified enclosures of suprema over `[0, 1]` and `[0, 1]²`.
//!
//! Upper bounds come from best-first branch-and-bound over pairs of dyadic
//! boxes `(I, J)`; lower bounds are slopes actually evaluated at sampled
//! pairs, so the witness that attains `lower` is always reported.
//!
//! Box bounds:
//!
//! * separated boxes (gap `g > 0`): the smaller of
//!   `(range spread)/max(g, d_lo)^α` and the chained constant
//!   `(L_I^q + L_gap^q + L_J^q)^{1/q}`;
//! * touching or identical boxes: the local Hölder constant of `f` on
//!   `I ∪ J`, which avoids the `1/d^α` singularity.
//!
//! A fixed slack of `1e-9` is added to every upper bound in place of
//! directed rounding.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::index::SegIndex;
use crate::{Error, PiecewiseFn, Result};

pub const UPPER_SLACK: f64 = 1e-9;

/// `[lower, upper]` enclosing a supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBound {
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
    /// Pair (or single point for norms) at which `lower` is attained.
    pub witness: Option<(f64, f64)>,
}

impl CertifiedBound {
    pub fn exact(value: f64, witness: Option<(f64, f64)>) -> Self {
        CertifiedBound { lower: value, upper: value, tol: 0.0, witness }
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub max_boxes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_boxes: 5_000_000 }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// Encloses `L(f) = sup_{x≠y} |f(x) − f(y)|/|x − y|^α`.
pub fn holder_seminorm(f: &PiecewiseFn, tol: f64) -> Result<CertifiedBound> {
    band_slope_with(f, 0.0, 1.0, tol, SearchOptions::default())
}

/// Encloses the supremum of slopes over pairs with `d_lo ≤ |x − y| ≤ d_hi`.
pub fn band_slope(f: &PiecewiseFn, d_lo: f64, d_hi: f64, tol: f64) -> Result<CertifiedBound> {
    band_slope_with(f, d_lo, d_hi, tol, SearchOptions::default())
}

#[derive(Clone, Copy)]
struct PairBox {
    il: f64,
    ih: f64,
    jl: f64,
    jh: f64,
    upper: f64,
}

impl PartialEq for PairBox {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for PairBox {}
impl PartialOrd for PairBox {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PairBox {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then_with(|| other.il.total_cmp(&self.il))
            .then_with(|| other.jl.total_cmp(&self.jl))
    }
}

struct PairSearch<'a> {
    idx: SegIndex<'a>,
    alpha: f64,
    d_lo: f64,
    d_hi: f64,
    lower: f64,
    witness: Option<(f64, f64)>,
}

impl PairSearch<'_> {
    fn in_band(&self, d: f64) -> bool {
        d > 0.0 && d >= self.d_lo && d <= self.d_hi
    }

    fn try_pair(&mut self, x: f64, y: f64) {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        if !(x >= 0.0 && y <= 1.0) || !self.in_band(y - x) {
            return;
        }
        let f = self.idx.func();
        let s = (f.value(x) - f.value(y)).abs() / (y - x).powf(self.alpha);
        if s > self.lower {
            self.lower = s;
            self.witness = Some((x, y));
        }
    }

    fn sample(&mut self, b: &PairBox) {
        let (im, jm) = (0.5 * (b.il + b.ih), 0.5 * (b.jl + b.jh));
        for (x, y) in [(b.il, b.jh), (b.il, b.jl), (b.ih, b.jh), (b.ih, b.jl), (im, jm)] {
            self.try_pair(x, y);
        }
        if self.d_hi < 1.0 {
            for x in [b.il, im, b.ih] {
                let y = (x + self.d_hi).clamp(b.jl, b.jh);
                self.try_pair(x, y);
                if self.d_lo > 0.0 {
                    let y = (x + self.d_lo).clamp(b.jl, b.jh);
                    self.try_pair(x, y);
                }
            }
        }
    }

    /// Upper bound for the box, `None` when it holds no admissible pair.
    fn bound(&self, b: &PairBox) -> Option<f64> {
        let diagonal = b.il == b.jl && b.ih == b.jh;
        let (min_d, max_d) = if diagonal { (0.0, b.ih - b.il) } else { ((b.jl - b.ih).max(0.0), b.jh - b.il) };
        if min_d > self.d_hi || max_d < self.d_lo || max_d <= 0.0 {
            return None;
        }
        let spread_over = |lo: f64, hi: f64, dist: f64| -> f64 {
            if dist > 0.0 {
                (hi - lo) / dist.powf(self.alpha)
            } else {
                f64::INFINITY
            }
        };
        let reach = self.d_hi;
        let bound = if min_d == 0.0 {
            let local = self.idx.local_constant(b.il, b.jh, reach);
            let (lo, hi) = self.idx.range(b.il, b.jh);
            local.min(spread_over(lo, hi, self.d_lo))
        } else {
            let (ilo, ihi) = self.idx.range(b.il, b.ih);
            let (jlo, jhi) = self.idx.range(b.jl, b.jh);
            let spread = (jhi - ilo).max(ihi - jlo);
            let by_range = spread_over(0.0, spread, min_d.max(self.d_lo));
            let f = self.idx.func();
            let l_gap = (f.value(b.ih) - f.value(b.jl)).abs() / min_d.powf(self.alpha);
            let li = self.idx.local_constant(b.il, b.ih, reach);
            let lj = self.idx.local_constant(b.jl, b.jh, reach);
            // routes through fewer junctions: the hull, or one box joined
            // to the hull of the gap and the other
            let hull = self.idx.local_constant(b.il, b.jh, reach);
            let right = self.idx.chain(&[li, self.idx.local_constant(b.ih, b.jh, reach)]);
            let left = self.idx.chain(&[self.idx.local_constant(b.il, b.jl, reach), lj]);
            by_range.min(self.idx.chain(&[li, l_gap, lj])).min(hull).min(right).min(left)
        };
        // mean value: |f(x) − f(y)| ≤ sup|f′|·|x − y|
        let by_derivative = self.idx.max_derivative(b.il, b.jh) * max_d.min(self.d_hi).powf(1.0 - self.alpha);
        let bound = bound.min(by_derivative);
        Some(bound.max(0.0))
    }
}

fn split(b: &PairBox) -> Option<Vec<PairBox>> {
    let mk = |il, ih, jl, jh| PairBox { il, ih, jl, jh, upper: 0.0 };
    let halves = |lo: f64, hi: f64| {
        let mid = 0.5 * (lo + hi);
        (mid > lo && mid < hi).then_some(mid)
    };
    if b.il == b.jl && b.ih == b.jh {
        let m = halves(b.il, b.ih)?;
        return Some(vec![mk(b.il, m, b.il, m), mk(m, b.ih, m, b.ih), mk(b.il, m, m, b.ih)]);
    }
    if b.ih - b.il >= b.jh - b.jl {
        if let Some(m) = halves(b.il, b.ih) {
            return Some(vec![mk(b.il, m, b.jl, b.jh), mk(m, b.ih, b.jl, b.jh)]);
        }
    }
    let m = halves(b.jl, b.jh)?;
    Some(vec![mk(b.il, b.ih, b.jl, m), mk(b.il, b.ih, m, b.jh)])
}

/// Band-restricted slope supremum with explicit search options.
pub fn band_slope_with(
    f: &PiecewiseFn,
    d_lo: f64,
    d_hi: f64,
    tol: f64,
    opts: SearchOptions,
) -> Result<CertifiedBound> {
    check_tol(tol)?;
    if !(d_lo >= 0.0 && d_lo < d_hi && d_hi <= 1.0) {
        return Err(Error::EmptyBand { lo: d_lo, hi: d_hi });
    }
    let mut search = PairSearch {
        idx: SegIndex::new(f),
        alpha: f.alpha().get(),
        d_lo,
        d_hi,
        lower: 0.0,
        witness: None,
    };
    for s in f.segments() {
        search.try_pair(s.a, s.b);
    }
    let mut heap = BinaryHeap::new();
    let mut root = PairBox { il: 0.0, ih: 1.0, jl: 0.0, jh: 1.0, upper: 0.0 };
    search.sample(&root);
    if let Some(u) = search.bound(&root) {
        root.upper = u;
        heap.push(root);
    }
    let mut stuck = 0.0f64;
    let mut processed = 0usize;
    let upper = loop {
        let Some(top) = heap.pop() else {
            break search.lower.max(stuck);
        };
        if top.upper + UPPER_SLACK <= search.lower + tol {
            break top.upper.max(stuck).max(search.lower);
        }
        processed += 1;
        if processed > opts.max_boxes {
            let best = CertifiedBound {
                lower: search.lower,
                upper: top.upper.max(stuck).max(search.lower) + UPPER_SLACK,
                tol,
                witness: search.witness,
            };
            return Err(Error::BudgetExhausted { best, boxes: processed });
        }
        let Some(children) = split(&top) else {
            stuck = stuck.max(top.upper);
            continue;
        };
        for mut child in children {
            search.sample(&child);
            if let Some(u) = search.bound(&child) {
                if u > search.lower {
                    child.upper = u;
                    heap.push(child);
                }
            }
        }
    };
    let best = CertifiedBound {
        lower: search.lower,
        upper: upper + UPPER_SLACK,
        tol,
        witness: search.witness,
    };
    if best.upper - best.lower > tol {
        return Err(Error::BudgetExhausted { best, boxes: processed });
    }
    Ok(best)
}

#[derive(Clone, Copy)]
struct LineBox {
    lo: f64,
    hi: f64,
    upper: f64,
}

impl PartialEq for LineBox {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for LineBox {}
impl PartialOrd for LineBox {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LineBox {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper).then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Encloses `‖f‖_∞`. Monotone segments are exact at their endpoints;
/// the others are subdivided.
pub fn sup_norm(f: &PiecewiseFn, tol: f64) -> Result<CertifiedBound> {
    check_tol(tol)?;
    let idx = SegIndex::new(f);
    let mut lower = 0.0f64;
    let mut witness = None;
    let mut probe = |x: f64, lower: &mut f64| {
        let v = f.value(x).abs();
        if v > *lower {
            *lower = v;
            witness = Some((x, x));
        }
    };
    for s in f.segments() {
        probe(s.a, &mut lower);
    }
    probe(1.0, &mut lower);
    let width_bound = |lo: f64, hi: f64| {
        let (a, b) = idx.range(lo, hi);
        a.abs().max(b.abs())
    };
    let mut heap = BinaryHeap::new();
    for s in f.segments().iter().filter(|s| !s.is_monotone()) {
        heap.push(LineBox { lo: s.a, hi: s.b, upper: width_bound(s.a, s.b) });
    }
    let mut stuck = 0.0f64;
    let mut processed = 0usize;
    let upper = loop {
        let Some(top) = heap.pop() else {
            break lower.max(stuck);
        };
        if top.upper + UPPER_SLACK <= lower + tol {
            break top.upper.max(lower).max(stuck);
        }
        processed += 1;
        if processed > SearchOptions::default().max_boxes {
            let best = CertifiedBound { lower, upper: top.upper.max(stuck) + UPPER_SLACK, tol, witness };
            return Err(Error::BudgetExhausted { best, boxes: processed });
        }
        let mid = 0.5 * (top.lo + top.hi);
        if !(mid > top.lo && mid < top.hi) {
            stuck = stuck.max(top.upper);
            continue;
        }
        probe(mid, &mut lower);
        for (lo, hi) in [(top.lo, mid), (mid, top.hi)] {
            let u = width_bound(lo, hi);
            if u > lower {
                heap.push(LineBox { lo, hi, upper: u });
            }
        }
    };
    let best = CertifiedBound { lower, upper: upper + UPPER_SLACK, tol, witness };
    if best.upper - best.lower > tol {
        return Err(Error::BudgetExhausted { best, boxes: processed });
    }
    Ok(best)
}
