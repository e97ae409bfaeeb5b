//! Exact piecewise representation of functions on `[0, 1]`.
//!
//! A [`Segment`] on `[a, b]` evaluates to
//!
//! ```text
//! c + m·(x − a) + Σ coeff_i · |x − anchor_i|^α
//! ```
//!
//! where no anchor lies in the open interval `(a, b)`. Every term is
//! therefore monotone on the segment, which is what the certified bounds in
//! [`crate::certify`] rely on. Segments are half-open `[a, b)` except the
//! last one, which is closed.

use smallvec::SmallVec;

use crate::{Alpha, Error, Result};

/// One `coeff·|x − anchor|^α` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub anchor: f64,
    pub coeff: f64,
}

impl Arc {
    #[inline]
    pub fn value(&self, x: f64, alpha: f64) -> f64 {
        self.coeff * (x - self.anchor).abs().powf(alpha)
    }
}

pub type Arcs = SmallVec<[Arc; 2]>;

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    /// Value of the affine part at `a`.
    pub c: f64,
    /// Slope of the affine part.
    pub m: f64,
    pub arcs: Arcs,
}

impl Segment {
    pub fn affine(a: f64, b: f64, c: f64, m: f64) -> Self {
        Segment { a, b, c, m, arcs: Arcs::new() }
    }

    pub fn constant(a: f64, b: f64, c: f64) -> Self {
        Segment::affine(a, b, c, 0.0)
    }

    /// `offset + coeff·|x − anchor|^α` with the anchor at one endpoint.
    pub fn arc(a: f64, b: f64, anchor: f64, coeff: f64, offset: f64) -> Self {
        let mut arcs = Arcs::new();
        if coeff != 0.0 {
            arcs.push(Arc { anchor, coeff });
        }
        Segment { a, b, c: offset, m: 0.0, arcs }
    }

    #[inline]
    pub fn linear(&self, x: f64) -> f64 {
        self.c + self.m * (x - self.a)
    }

    #[inline]
    pub fn value(&self, x: f64, alpha: f64) -> f64 {
        let mut v = self.linear(x);
        for arc in &self.arcs {
            v += arc.value(x, alpha);
        }
        v
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    /// Whether an arc term is anchored at one of the segment's endpoints.
    pub fn anchored_at(&self, x: f64) -> bool {
        (x == self.a || x == self.b) && self.arcs.iter().any(|t| t.anchor == x && t.coeff != 0.0)
    }

    /// The same function restricted to `[u, v] ⊂ [a, b]`.
    pub fn slice(&self, u: f64, v: f64) -> Segment {
        Segment { a: u, b: v, c: self.linear(u), m: self.m, arcs: self.arcs.clone() }
    }

    /// Enclosure of the range on `[u, v] ⊂ [a, b]`: the term-wise range,
    /// intersected with the cone spanned from both endpoints by the
    /// derivative enclosure. Exact when `f` is monotone on `[u, v]`.
    pub fn range_on(&self, u: f64, v: f64, alpha: f64) -> (f64, f64) {
        let (l0, l1) = (self.linear(u), self.linear(v));
        let mut lo = l0.min(l1);
        let mut hi = l0.max(l1);
        for arc in &self.arcs {
            let (t0, t1) = (arc.value(u, alpha), arc.value(v, alpha));
            lo += t0.min(t1);
            hi += t0.max(t1);
        }
        if self.arcs.is_empty() || v <= u {
            return (lo, hi);
        }
        let (dlo, dhi) = self.derivative_on(u, v, alpha);
        if !(dlo.is_finite() && dhi.is_finite()) {
            return (lo, hi);
        }
        let (fu, fv) = (self.value(u, alpha), self.value(v, alpha));
        if dlo >= 0.0 || dhi <= 0.0 {
            return (lo.max(fu.min(fv)), hi.min(fu.max(fv)));
        }
        // f(x) ≤ min(fu + dhi·(x − u), fv − dlo·(v − x)), and symmetrically
        let len = v - u;
        let top = fu + dhi * ((fv - fu - dlo * len) / (dhi - dlo)).clamp(0.0, len);
        let bottom = fu + dlo * ((fv - fu - dhi * len) / (dlo - dhi)).clamp(0.0, len);
        (lo.max(bottom.min(fu.min(fv))), hi.min(top.max(fu.max(fv))))
    }

    /// Upper bound for the Hölder constant on `[u, v] ⊂ [a, b]`. Every
    /// term is monotone on the segment, so rising and falling terms are
    /// summed separately and the larger total is returned.
    pub fn local_constant(&self, u: f64, v: f64, alpha: f64) -> f64 {
        self.local_constant_within(u, v, v - u, alpha)
    }

    /// As [`Segment::local_constant`] but only over pairs at distance at
    /// most `reach`.
    pub fn local_constant_within(&self, u: f64, v: f64, reach: f64, alpha: f64) -> f64 {
        let len = (v - u).min(reach);
        if len <= 0.0 {
            return 0.0;
        }
        let lin = self.m * len.powf(1.0 - alpha);
        let (mut rise, mut fall) = (lin.max(0.0), (-lin).max(0.0));
        for arc in &self.arcs {
            let d = if arc.anchor <= u { u - arc.anchor } else { arc.anchor - v }.max(0.0);
            let ratio = if d == 0.0 {
                1.0
            } else {
                // ((d+ℓ)^α − d^α)/ℓ^α without cancellation
                let t = len / d;
                (alpha * t.ln_1p()).exp_m1() / t.powf(alpha)
            };
            let amount = arc.coeff.abs() * ratio.min(1.0);
            if (arc.anchor <= u) == (arc.coeff > 0.0) {
                rise += amount;
            } else {
                fall += amount;
            }
        }
        rise.max(fall)
    }

    /// Enclosure of the signed slopes `(f(y) − f(p))/(y − p)^α` over
    /// `y ∈ (u, v]` with `p = u` when `from_left`, and of
    /// `(f(p) − f(x))/(p − x)^α` over `x ∈ [u, v)` with `p = v` otherwise.
    pub fn slopes_from_end(&self, u: f64, v: f64, from_left: bool, alpha: f64) -> (f64, f64) {
        let len = v - u;
        if len <= 0.0 {
            return (0.0, 0.0);
        }
        let p = if from_left { u } else { v };
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        let lin = self.m * len.powf(1.0 - alpha);
        lo += lin.min(0.0);
        hi += lin.max(0.0);
        for arc in &self.arcs {
            if arc.anchor == p {
                let c = if from_left { arc.coeff } else { -arc.coeff };
                lo += c;
                hi += c;
                continue;
            }
            let d = if arc.anchor <= u { u - arc.anchor } else { arc.anchor - v }.max(0.0);
            let ratio = if d == 0.0 {
                1.0
            } else {
                let t = len / d;
                ((alpha * t.ln_1p()).exp_m1() / t.powf(alpha)).min(1.0)
            };
            // direction of the term moving left to right
            let rising = (arc.anchor <= u) == (arc.coeff > 0.0);
            let amount = arc.coeff.abs() * ratio;
            if rising {
                hi += amount;
            } else {
                lo -= amount;
            }
        }
        (lo, hi)
    }

    /// Enclosure of `f′` on `[u, v] ⊂ [a, b]`; infinite when an arc is
    /// anchored at `u` or `v`.
    pub fn derivative_on(&self, u: f64, v: f64, alpha: f64) -> (f64, f64) {
        let (mut lo, mut hi) = (self.m, self.m);
        for arc in &self.arcs {
            let sign = if arc.anchor <= u { 1.0 } else { -1.0 };
            let t = |x: f64| sign * alpha * arc.coeff * (x - arc.anchor).abs().powf(alpha - 1.0);
            let (tu, tv) = (t(u), t(v));
            lo += tu.min(tv);
            hi += tu.max(tv);
        }
        if lo.is_finite() && hi.is_finite() {
            (lo, hi)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    }

    /// Whether every term is non-decreasing or every term is non-increasing.
    pub fn is_monotone(&self) -> bool {
        let mut up = self.m > 0.0;
        let mut down = self.m < 0.0;
        for arc in &self.arcs {
            let increasing = (arc.anchor <= self.a) == (arc.coeff > 0.0);
            if increasing {
                up = true;
            } else {
                down = true;
            }
        }
        !(up && down)
    }
}

fn push_arc(arcs: &mut Arcs, arc: Arc) {
    if arc.coeff == 0.0 {
        return;
    }
    if let Some(existing) = arcs.iter_mut().find(|t| t.anchor == arc.anchor) {
        existing.coeff += arc.coeff;
    } else {
        arcs.push(arc);
    }
    arcs.retain(|t| t.coeff != 0.0);
}

/// Exact function on `[0, 1]` as an ordered list of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    alpha: Alpha,
    segments: Vec<Segment>,
}

impl PiecewiseFn {
    pub fn new(alpha: Alpha, segments: Vec<Segment>) -> Result<Self> {
        validate(&segments)?;
        Ok(PiecewiseFn { alpha, segments })
    }

    /// `x ↦ x^α`.
    pub fn power(alpha: Alpha) -> Self {
        PiecewiseFn { alpha, segments: vec![Segment::arc(0.0, 1.0, 0.0, 1.0, 0.0)] }
    }

    /// `x ↦ c·x`.
    pub fn linear(alpha: Alpha, slope: f64) -> Self {
        PiecewiseFn { alpha, segments: vec![Segment::affine(0.0, 1.0, 0.0, slope)] }
    }

    pub fn zero(alpha: Alpha) -> Self {
        PiecewiseFn::linear(alpha, 0.0)
    }

    pub fn constant(alpha: Alpha, c: f64) -> Self {
        PiecewiseFn { alpha, segments: vec![Segment::constant(0.0, 1.0, c)] }
    }

    /// `x ↦ min(x^α, (1−x)^α)`.
    pub fn tent_arcs(alpha: Alpha) -> Self {
        PiecewiseFn {
            alpha,
            segments: vec![
                Segment::arc(0.0, 0.5, 0.0, 1.0, 0.0),
                Segment::arc(0.5, 1.0, 1.0, 1.0, 0.0),
            ],
        }
    }

    #[inline]
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn into_segments(self) -> Vec<Segment> {
        self.segments
    }

    /// All segment endpoints, `0` and `1` included.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.segments.iter().map(|s| s.a).collect();
        pts.push(1.0);
        pts
    }

    /// Index of the segment that owns `x` under the half-open convention.
    #[inline]
    pub fn segment_index(&self, x: f64) -> usize {
        let i = self.segments.partition_point(|s| s.b <= x);
        i.min(self.segments.len() - 1)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.value(x))
    }

    /// Evaluation without the domain check; `x` must lie in `[0, 1]`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.segments[self.segment_index(x)].value(x, self.alpha.get())
    }

    pub fn is_based(&self) -> bool {
        self.value(0.0) == 0.0
    }

    /// Largest jump between the one-sided values at interior junctions.
    pub fn continuity_defect(&self) -> f64 {
        let alpha = self.alpha.get();
        self.segments
            .windows(2)
            .map(|w| (w[0].value(w[0].b, alpha) - w[1].value(w[1].a, alpha)).abs())
            .fold(0.0, f64::max)
    }

    fn check_alpha(&self, other: &PiecewiseFn) -> Result<()> {
        if self.alpha != other.alpha {
            return Err(Error::AlphaMismatch(self.alpha.get(), other.alpha.get()));
        }
        Ok(())
    }

    /// `wa·self + wb·other` on the common refinement of both partitions.
    pub fn combine(&self, other: &PiecewiseFn, wa: f64, wb: f64) -> Result<PiecewiseFn> {
        self.check_alpha(other)?;
        let mut out = Vec::with_capacity(self.segments.len() + other.segments.len());
        let (mut i, mut j) = (0, 0);
        let mut start = 0.0;
        while i < self.segments.len() && j < other.segments.len() {
            let (sa, sb) = (&self.segments[i], &other.segments[j]);
            let end = sa.b.min(sb.b);
            if end > start {
                let mut arcs = Arcs::new();
                for t in &sa.arcs {
                    push_arc(&mut arcs, Arc { anchor: t.anchor, coeff: wa * t.coeff });
                }
                for t in &sb.arcs {
                    push_arc(&mut arcs, Arc { anchor: t.anchor, coeff: wb * t.coeff });
                }
                out.push(Segment {
                    a: start,
                    b: end,
                    c: wa * sa.linear(start) + wb * sb.linear(start),
                    m: wa * sa.m + wb * sb.m,
                    arcs,
                });
                start = end;
            }
            if sa.b == end {
                i += 1;
            }
            if sb.b == end {
                j += 1;
            }
        }
        PiecewiseFn::new(self.alpha, out)
    }

    pub fn add(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        self.combine(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        self.combine(other, 1.0, -1.0)
    }

    pub fn scale(&self, factor: f64) -> PiecewiseFn {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let mut arcs = Arcs::new();
                for t in &s.arcs {
                    push_arc(&mut arcs, Arc { anchor: t.anchor, coeff: factor * t.coeff });
                }
                Segment { a: s.a, b: s.b, c: factor * s.c, m: factor * s.m, arcs }
            })
            .collect();
        PiecewiseFn { alpha: self.alpha, segments }
    }

    pub fn neg(&self) -> PiecewiseFn {
        self.scale(-1.0)
    }

    /// Segments of `self` clipped to `[u, v]`, `0 ≤ u < v ≤ 1`.
    pub fn slice(&self, u: f64, v: f64) -> Vec<Segment> {
        let mut out = Vec::new();
        for s in &self.segments {
            let lo = s.a.max(u);
            let hi = s.b.min(v);
            if hi > lo {
                out.push(s.slice(lo, hi));
            }
        }
        out
    }

    /// `2f(xc) − f(xl) − f(xr)`, exact zero on affine pieces.
    ///
    /// When `[xl, xr]` lies inside one segment the affine part cancels
    /// analytically and only the arc terms are evaluated.
    pub fn second_difference(&self, xl: f64, xc: f64, xr: f64) -> f64 {
        let alpha = self.alpha.get();
        let i = self.segment_index(xl);
        let s = &self.segments[i];
        if xr <= s.b {
            let mut acc = 0.0;
            for t in &s.arcs {
                acc += 2.0 * t.value(xc, alpha) - t.value(xl, alpha) - t.value(xr, alpha);
            }
            return acc;
        }
        2.0 * self.value(xc) - self.value(xl) - self.value(xr)
    }
}

fn validate(segments: &[Segment]) -> Result<()> {
    let first = segments.first().ok_or_else(|| Error::Malformed("no segments".into()))?;
    if first.a != 0.0 {
        return Err(Error::Malformed(format!("first segment starts at {}", first.a)));
    }
    let last = segments.last().unwrap();
    if last.b != 1.0 {
        return Err(Error::Malformed(format!("last segment ends at {}", last.b)));
    }
    for (i, s) in segments.iter().enumerate() {
        if !(s.a < s.b) {
            return Err(Error::Malformed(format!("segment {i} has a = {} ≥ b = {}", s.a, s.b)));
        }
        if !(s.c.is_finite() && s.m.is_finite()) {
            return Err(Error::Malformed(format!("segment {i} has non-finite affine part")));
        }
        for t in &s.arcs {
            if !(t.coeff.is_finite() && t.anchor.is_finite()) {
                return Err(Error::Malformed(format!("segment {i} has a non-finite arc")));
            }
            if t.anchor > s.a && t.anchor < s.b {
                return Err(Error::Malformed(format!(
                    "segment {i} on [{}, {}] has an arc anchored inside at {}",
                    s.a, s.b, t.anchor
                )));
            }
        }
        if i > 0 && segments[i - 1].b != s.a {
            return Err(Error::Malformed(format!("gap or overlap before segment {i}")));
        }
    }
    Ok(())
}

/// Continuous piecewise affine function identified by its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    nodes: Vec<(f64, f64)>,
    func: PiecewiseFn,
}

impl Polygon {
    pub fn new(alpha: Alpha, nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Malformed("a polygon needs at least two nodes".into()));
        }
        if nodes[0].0 != 0.0 || nodes[nodes.len() - 1].0 != 1.0 {
            return Err(Error::Malformed("polygon nodes must start at 0 and end at 1".into()));
        }
        if nodes.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Malformed("non-finite polygon node".into()));
        }
        let segments = nodes
            .windows(2)
            .map(|w| {
                let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                if x1 <= x0 {
                    return Err(Error::Malformed(format!("node abscissae not increasing at {x0}")));
                }
                Ok(Segment::affine(x0, x1, y0, (y1 - y0) / (x1 - x0)))
            })
            .collect::<Result<Vec<_>>>()?;
        let func = PiecewiseFn::new(alpha, segments)?;
        Ok(Polygon { nodes, func })
    }

    /// Interpolates `f` at the given abscissae.
    pub fn interpolate(f: &PiecewiseFn, xs: &[f64]) -> Result<Self> {
        let nodes = xs.iter().map(|&x| f.eval(x).map(|y| (x, y))).collect::<Result<Vec<_>>>()?;
        Polygon::new(f.alpha(), nodes)
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn as_fn(&self) -> &PiecewiseFn {
        &self.func
    }

    pub fn into_fn(self) -> PiecewiseFn {
        self.func
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.func.eval(x)
    }

    /// Largest absolute slope of the affine pieces.
    pub fn max_slope(&self) -> f64 {
        self.func.segments().iter().map(|s| s.m.abs()).fold(0.0, f64::max)
    }
}

/// `|f(x) − f(y)| / |x − y|^α`.
pub fn slope(f: &PiecewiseFn, x: f64, y: f64) -> Result<f64> {
    if x == y {
        return Err(Error::DegeneratePair(x));
    }
    let (fx, fy) = (f.eval(x)?, f.eval(y)?);
    Ok((fx - fy).abs() / f.alpha().pow((x - y).abs()))
}
