//! Range and local-constant queries over arbitrary subintervals.

use crate::PiecewiseFn;

#[derive(Clone, Copy)]
struct Node {
    lo: f64,
    hi: f64,
    // Σ L_i^q over whole segments
    lq: f64,
    // enclosure of f′
    dlo: f64,
    dhi: f64,
}

impl Node {
    const EMPTY: Node =
        Node { lo: f64::INFINITY, hi: f64::NEG_INFINITY, lq: 0.0, dlo: f64::INFINITY, dhi: f64::NEG_INFINITY };

    fn merge(self, other: Node) -> Node {
        Node {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
            lq: self.lq + other.lq,
            dlo: self.dlo.min(other.dlo),
            dhi: self.dhi.max(other.dhi),
        }
    }
}

pub(crate) struct SegIndex<'a> {
    f: &'a PiecewiseFn,
    alpha: f64,
    q: f64,
    size: usize,
    tree: Vec<Node>,
}

impl<'a> SegIndex<'a> {
    pub fn new(f: &'a PiecewiseFn) -> Self {
        let alpha = f.alpha().get();
        let q = f.alpha().conjugate();
        let n = f.segments().len();
        let size = n.next_power_of_two();
        let mut tree = vec![Node::EMPTY; 2 * size];
        for (i, s) in f.segments().iter().enumerate() {
            let (lo, hi) = s.range_on(s.a, s.b, alpha);
            let l = s.local_constant(s.a, s.b, alpha);
            let (dlo, dhi) = s.derivative_on(s.a, s.b, alpha);
            tree[size + i] = Node { lo, hi, lq: l.powf(q), dlo, dhi };
        }
        for i in (1..size).rev() {
            tree[i] = tree[2 * i].merge(tree[2 * i + 1]);
        }
        SegIndex { f, alpha, q, size, tree }
    }

    pub fn func(&self) -> &PiecewiseFn {
        self.f
    }

    fn query(&self, mut l: usize, mut r: usize) -> Node {
        // half-open [l, r)
        let mut acc = Node::EMPTY;
        l += self.size;
        r += self.size;
        while l < r {
            if l & 1 == 1 {
                acc = acc.merge(self.tree[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                acc = acc.merge(self.tree[r]);
            }
            l >>= 1;
            r >>= 1;
        }
        acc
    }

    /// Segment indices of the first and last segments meeting `(u, v)`.
    #[inline]
    fn span(&self, u: f64, v: f64) -> (usize, usize) {
        let segs = self.f.segments();
        let i = segs.partition_point(|s| s.b <= u).min(segs.len() - 1);
        let j = segs.partition_point(|s| s.a < v).saturating_sub(1).max(i);
        (i, j)
    }

    /// Enclosure `(min, max)` of `f` on `[u, v]`.
    pub fn range(&self, u: f64, v: f64) -> (f64, f64) {
        let segs = self.f.segments();
        let (i, j) = self.span(u, v);
        if i == j {
            return segs[i].range_on(u, v, self.alpha);
        }
        let (a_lo, a_hi) = segs[i].range_on(u, segs[i].b, self.alpha);
        let (b_lo, b_hi) = segs[j].range_on(segs[j].a, v, self.alpha);
        let mid = self.query(i + 1, j);
        (a_lo.min(b_lo).min(mid.lo), a_hi.max(b_hi).max(mid.hi))
    }

    /// Upper bound for the Hölder constant of `f` on `[u, v]` over pairs at
    /// distance at most `reach`.
    ///
    /// Across junctions the per-piece constants combine as
    /// `(Σ L_i^q)^{1/q}` with `q = 1/(1−α)`, the sharp constant for
    /// chaining `|f(x) − f(y)| ≤ Σ L_i t_i^α` with `Σ t_i = |x − y|`.
    pub fn local_constant(&self, u: f64, v: f64, reach: f64) -> f64 {
        let segs = self.f.segments();
        let (i, j) = self.span(u, v);
        if i == j {
            return segs[i].local_constant_within(u, v, reach, self.alpha);
        }
        let la = segs[i].local_constant_within(u, segs[i].b, reach, self.alpha);
        let lb = segs[j].local_constant_within(segs[j].a, v, reach, self.alpha);
        let mid = self.query(i + 1, j).lq;
        let chained = (la.powf(self.q) + lb.powf(self.q) + mid).powf(1.0 / self.q);
        if j == i + 1 {
            chained.min(self.across(i, u, v, reach).max(la).max(lb))
        } else {
            chained
        }
    }

    /// Bound for pairs straddling the junction `p` between segments `i` and
    /// `i + 1`. With `f(y) − f(x) = R·t^α + L·s^α`, `t = y − p`, `s = p − x`,
    /// the quotient is at most `(R^q + L^q)^{1/q}` when `R` and `L` share a
    /// sign and `max(|R|, |L|)` otherwise.
    fn across(&self, i: usize, u: f64, v: f64, reach: f64) -> f64 {
        let segs = self.f.segments();
        let p = segs[i].b;
        let (llo, lhi) = segs[i].slopes_from_end(u.max(p - reach), p, false, self.alpha);
        let (rlo, rhi) = segs[i + 1].slopes_from_end(p, v.min(p + reach), true, self.alpha);
        let up = self.chain(&[lhi.max(0.0), rhi.max(0.0)]);
        let down = self.chain(&[(-llo).max(0.0), (-rlo).max(0.0)]);
        up.max(down)
    }

    /// `sup |f′|` on `[u, v]`, infinite when an arc is anchored in it.
    pub fn max_derivative(&self, u: f64, v: f64) -> f64 {
        let segs = self.f.segments();
        let (i, j) = self.span(u, v);
        let (lo, hi) = if i == j {
            segs[i].derivative_on(u, v, self.alpha)
        } else {
            let (alo, ahi) = segs[i].derivative_on(u, segs[i].b, self.alpha);
            let (blo, bhi) = segs[j].derivative_on(segs[j].a, v, self.alpha);
            let mid = self.query(i + 1, j);
            (alo.min(blo).min(mid.dlo), ahi.max(bhi).max(mid.dhi))
        };
        lo.abs().max(hi.abs())
    }

    /// Combines individual constants with the same conjugate exponent.
    pub fn chain(&self, parts: &[f64]) -> f64 {
        let total: f64 = parts.iter().map(|l| l.powf(self.q)).sum();
        total.powf(1.0 / self.q)
    }
}
