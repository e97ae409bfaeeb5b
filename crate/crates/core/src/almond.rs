//! The recursive almond construction.
//!
//! An almond on `[lo, hi]` with orientation `dir = ±1` starting at value `v`
//! is bounded by two arcs: `h`, anchored at `lo`, `v + dir·(x − lo)^α`, and
//! `h̃`, anchored at `hi`, `v_end − dir·(hi − x)^α` with
//! `v_end = v + dir·(hi − lo)^α`. Cutting at `r = k·w` and `s = w − r`
//! (`w = hi − lo`) gives three almonds
//!
//! ```text
//! [lo, lo + r]     dir      starts at v
//! [lo + r, hi − r] −dir     starts at v + dir·r^α
//! [hi − r, hi]     dir      starts at v_end − dir·r^α
//! ```
//!
//! and the ratio equation `2k^α − 1 = (1 − 2k)^α` makes the middle one
//! end where the right one starts. `h_d` and `h̃_d` are the two bounding
//! arcs of every almond after `d` rounds of cutting. On decreasing almonds
//! `h` is the lower arc, so the two functions are not ordered pointwise;
//! the envelopes `min(h_d, h̃_d)` and `max(h_d, h̃_d)` are nested instead.

use rayon::join;
use serde::Serialize;

use crate::approx::kp_interpolate;
use crate::report::{CertificateReport, ResultEntry};
use crate::root::bisect;
use crate::{Alpha, Error, PiecewiseFn, Polygon, Result, Segment};

/// Deepest stage the builder accepts; `3^d` segments per function.
pub const MAX_DEPTH: usize = 13;

const PARALLEL_CUTOFF: usize = 6;

/// Root in `(0, 1/2)` of `2y^α − 1 = (1 − 2y)^α`.
///
/// The left side minus the right side is increasing on the bracket, from
/// `−2` at 0 to `2^{1−α} − 1 > 0` at 1/2.
pub fn solve_k(alpha: Alpha, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let a = alpha.get();
    let g = |y: f64| 2.0 * y.powf(a) - 1.0 - (1.0 - 2.0 * y).max(0.0).powf(a);
    let k = bisect(g, 0.0, 0.5, 0.0)?;
    if g(k).abs() > tol {
        return Err(Error::SearchFailed(format!("ratio root: residual {} above {tol}", g(k))));
    }
    Ok(k)
}

/// Ratio-equation residual `2y^α − 1 − (1 − 2y)^α`.
pub fn residual(alpha: Alpha, y: f64) -> f64 {
    2.0 * alpha.pow(y) - 1.0 - alpha.pow(1.0 - 2.0 * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlmondParams {
    pub alpha: Alpha,
    pub k: f64,
    /// `(1 − k^α)/(1 − k)^α`, the slope from 0 to every minimum near 0.
    pub liminf_slope: f64,
    /// `(1 − k^α)(k(1 − 2k))^{1−α}/(1 − k)`, the excess slope forced on
    /// `h − g` for polygons `g` interpolating `h`.
    pub failure_c: f64,
}

impl AlmondParams {
    pub fn new(alpha: Alpha) -> Result<Self> {
        let k = solve_k(alpha, 1e-12)?;
        let a = alpha.get();
        let ka = k.powf(a);
        Ok(AlmondParams {
            alpha,
            k,
            liminf_slope: (1.0 - ka) / (1.0 - k).powf(a),
            failure_c: (1.0 - ka) * (k * (1.0 - 2.0 * k)).powf(1.0 - a) / (1.0 - k),
        })
    }

    /// `sup |h_d − h̃_d|`: the largest almond after `d` cuts has width
    /// `max(k, 1 − 2k)^d`, and on an almond of width `w` the two arcs are
    /// furthest apart at the midpoint, by `w^α(2^{1−α} − 1)`.
    pub fn envelope_gap(&self, depth: usize) -> f64 {
        let a = self.alpha.get();
        let w = self.k.max(1.0 - 2.0 * self.k).powi(depth as i32);
        w.powf(a) * ((1.0 - a).exp2() - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Top,
    Bottom,
}

impl NodeKind {
    fn opposite(self) -> Self {
        match self {
            NodeKind::Top => NodeKind::Bottom,
            NodeKind::Bottom => NodeKind::Top,
        }
    }
}

/// A point of the graph fixed by the construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Node {
    pub x: f64,
    pub value: f64,
    pub kind: NodeKind,
    /// Cutting round at which the node appeared.
    pub depth: usize,
}

#[derive(Clone, Copy)]
struct Almond {
    lo: f64,
    hi: f64,
    v: f64,
    dir: f64,
    node: (NodeKind, usize),
}

#[derive(Clone, Copy)]
struct Leaf {
    lo: f64,
    hi: f64,
    node: Node,
}

fn cut(a: Almond, k: f64, alpha: f64, round: usize) -> [Almond; 3] {
    let w = a.hi - a.lo;
    let r = k * w;
    let (m1, m2) = (a.lo + r, a.hi - r);
    let v_end = a.v + a.dir * w.powf(alpha);
    let rise = r.powf(alpha);
    let second = if a.dir > 0.0 { NodeKind::Top } else { NodeKind::Bottom };
    [
        Almond { hi: m1, ..a },
        Almond { lo: m1, hi: m2, v: a.v + a.dir * rise, dir: -a.dir, node: (second, round) },
        Almond { lo: m2, hi: a.hi, v: v_end - a.dir * rise, dir: a.dir, node: (second.opposite(), round) },
    ]
}

fn collect(a: Almond, k: f64, alpha: f64, round: usize, depth: usize, out: &mut Vec<Leaf>) {
    if round > depth {
        let node = Node { x: a.lo, value: a.v, kind: a.node.0, depth: a.node.1 };
        out.push(Leaf { lo: a.lo, hi: a.hi, node });
        return;
    }
    let [l, m, r] = cut(a, k, alpha, round);
    if depth - round >= PARALLEL_CUTOFF {
        let (mut left, (mid, right)) = join(
            || leaves(l, k, alpha, round + 1, depth),
            || join(|| leaves(m, k, alpha, round + 1, depth), || leaves(r, k, alpha, round + 1, depth)),
        );
        left.extend(mid);
        left.extend(right);
        out.extend(left);
    } else {
        for child in [l, m, r] {
            collect(child, k, alpha, round + 1, depth, out);
        }
    }
}

fn leaves(a: Almond, k: f64, alpha: f64, round: usize, depth: usize) -> Vec<Leaf> {
    let mut out = Vec::new();
    collect(a, k, alpha, round, depth, &mut out);
    out
}

/// `h_d`, `h̃_d` and the nodes fixed after `d` cutting rounds.
#[derive(Debug, Clone)]
pub struct AlmondStage {
    pub params: AlmondParams,
    pub depth: usize,
    /// Left-anchored arcs.
    pub h: PiecewiseFn,
    /// Right-anchored arcs.
    pub h_tilde: PiecewiseFn,
    /// All nodes, sorted by abscissa.
    pub nodes: Vec<Node>,
}

impl AlmondStage {
    /// Node recorded at exactly `x`.
    pub fn node(&self, x: f64) -> Option<&Node> {
        let i = self.nodes.partition_point(|n| n.x < x);
        self.nodes.get(i).filter(|n| n.x == x)
    }

    /// Lower envelope `min(h_d, h̃_d)` at `x`.
    pub fn lower_envelope(&self, x: f64) -> f64 {
        self.h.value(x).min(self.h_tilde.value(x))
    }

    pub fn upper_envelope(&self, x: f64) -> f64 {
        self.h.value(x).max(self.h_tilde.value(x))
    }

    /// Abscissae `t_j = k^j` of the leftmost almond chain, computed with the
    /// same arithmetic as the builder so that they match recorded nodes.
    pub fn left_chain(&self, j: usize) -> f64 {
        let mut t = 1.0;
        for _ in 0..j {
            t *= self.params.k;
        }
        t
    }

    /// Sampled `(x, h_d(x), h̃_d(x))` on a uniform grid of `samples + 1`
    /// points.
    pub fn series(&self, samples: usize) -> Vec<(f64, f64, f64)> {
        (0..=samples)
            .map(|i| {
                let x = i as f64 / samples as f64;
                (x, self.h.value(x), self.h_tilde.value(x))
            })
            .collect()
    }
}

/// Builds stage `depth`.
///
/// Node values come from the recursion and do not depend on `depth`. The
/// segment offsets are accumulated along the partition (left to right for
/// `h`, right to left for `h̃`) from the exact values at the previous
/// endpoint, so both functions are exactly continuous, and each arc
/// coefficient is `±1` up to the rounding of the leaf widths.
pub fn build(alpha: Alpha, depth: usize) -> Result<AlmondStage> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthBudget { depth, max: MAX_DEPTH });
    }
    let params = AlmondParams::new(alpha)?;
    let a = alpha.get();
    let root = Almond { lo: 0.0, hi: 1.0, v: 0.0, dir: 1.0, node: (NodeKind::Bottom, 0) };
    let leaves = leaves(root, params.k, a, 1, depth);

    // each arc is rescaled to land on the recorded value at its far end, so
    // rounding in the leaf widths does not accumulate along the sweep
    let target = |i: usize| leaves.get(i).map_or(1.0, |l: &Leaf| l.node.value);
    let mut h_segs = Vec::with_capacity(leaves.len());
    let mut start = 0.0;
    for (i, leaf) in leaves.iter().enumerate() {
        let coeff = (target(i + 1) - start) / (leaf.hi - leaf.lo).powf(a);
        let seg = Segment::arc(leaf.lo, leaf.hi, leaf.lo, coeff, start);
        start = seg.value(leaf.hi, a);
        h_segs.push(seg);
    }
    let mut t_segs = Vec::with_capacity(leaves.len());
    let mut end = 1.0;
    for (i, leaf) in leaves.iter().enumerate().rev() {
        let coeff = (target(i) - end) / (leaf.hi - leaf.lo).powf(a);
        let seg = Segment::arc(leaf.lo, leaf.hi, leaf.hi, coeff, end);
        end = seg.value(leaf.lo, a);
        t_segs.push(seg);
    }
    t_segs.reverse();

    let mut nodes: Vec<Node> = leaves.iter().map(|l| l.node).collect();
    nodes.push(Node { x: 1.0, value: 1.0, kind: NodeKind::Top, depth: 0 });
    Ok(AlmondStage {
        params,
        depth,
        h: PiecewiseFn::new(alpha, h_segs)?,
        h_tilde: PiecewiseFn::new(alpha, t_segs)?,
        nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimsupReport {
    pub x: f64,
    /// Radius `k^{j−1}` of window `j`.
    pub radii: Vec<f64>,
    /// Largest node-pair slope from `x` to an opposite-kind node in window
    /// `j`; zero when the window holds none.
    pub window_max: Vec<f64>,
    pub running_max: Vec<f64>,
    /// Partner node attaining each window maximum.
    pub partners: Vec<f64>,
}

/// Slopes from node `x` to opposite-kind nodes within distance `k^{j−1}`,
/// `j = 1..=scales`, using the recorded node values.
pub fn limsup_diagnostic(stage: &AlmondStage, x: f64, scales: usize) -> Result<LimsupReport> {
    let base = *stage.node(x).ok_or(Error::NotANode(x))?;
    if scales == 0 || scales > stage.depth + 1 {
        return Err(Error::UnresolvedDepth { needed: scales.saturating_sub(1), have: stage.depth });
    }
    let a = stage.params.alpha.get();
    let mut report =
        LimsupReport { x, radii: Vec::new(), window_max: Vec::new(), running_max: Vec::new(), partners: Vec::new() };
    let mut running = 0.0f64;
    for j in 1..=scales {
        let radius = stage.left_chain(j - 1);
        let lo = stage.nodes.partition_point(|n| n.x < x - radius);
        let hi = stage.nodes.partition_point(|n| n.x <= x + radius);
        let (mut best, mut partner) = (0.0f64, f64::NAN);
        for n in &stage.nodes[lo..hi] {
            if n.kind == base.kind || n.x == x {
                continue;
            }
            let s = (n.value - base.value).abs() / (n.x - x).abs().powf(a);
            if s > best {
                best = s;
                partner = n.x;
            }
        }
        running = running.max(best);
        report.radii.push(radius);
        report.window_max.push(best);
        report.running_max.push(running);
        report.partners.push(partner);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfReport {
    pub closed_form: f64,
    pub scales: Vec<usize>,
    /// Minima `s_j = (1 − k)k^j` of the leftmost chain.
    pub minima: Vec<f64>,
    pub slopes: Vec<f64>,
    pub deviations: Vec<f64>,
}

/// Slopes `L_{0 s_j}(h_d)` for `j = 1..=max_j`; `s_j` is the bottom node
/// appearing in round `j + 1`.
pub fn liminf_diagnostic(stage: &AlmondStage, x: f64, max_j: usize) -> Result<LiminfReport> {
    if x != 0.0 {
        return Err(Error::InvalidParameter(format!("the minima sequence is defined at 0, got {x}")));
    }
    if max_j + 1 > stage.depth {
        return Err(Error::UnresolvedDepth { needed: max_j + 1, have: stage.depth });
    }
    let p = &stage.params;
    let mut report = LiminfReport {
        closed_form: p.liminf_slope,
        scales: Vec::new(),
        minima: Vec::new(),
        slopes: Vec::new(),
        deviations: Vec::new(),
    };
    for j in 1..=max_j {
        let t = stage.left_chain(j);
        let s = t - p.k * t;
        let node = stage.node(s).ok_or(Error::NotANode(s))?;
        debug_assert_eq!(node.kind, NodeKind::Bottom);
        let slope = crate::func::slope(&stage.h, 0.0, s)?;
        report.scales.push(j);
        report.minima.push(s);
        report.slopes.push(slope);
        report.deviations.push((slope - p.liminf_slope).abs());
    }
    Ok(report)
}

/// First zero of `d` in `(0, x1]` with `d > 0` just right of 0.
fn first_crossing(d: impl Fn(f64) -> f64, x1: f64) -> Result<f64> {
    const CELLS: usize = 1024;
    let mut prev = 0.0;
    for i in 1..=CELLS {
        let x = if i == CELLS { x1 } else { x1 * i as f64 / CELLS as f64 };
        let v = d(x);
        if v <= 0.0 {
            return if v == 0.0 { Ok(x) } else { bisect(&d, prev, x, 0.0) };
        }
        prev = x;
    }
    Err(Error::RootIsolation(format!("h − g keeps its sign on (0, {x1}]")))
}

/// Witness that the Krein–Petunin interpolant `g` of `h_d` on `partition`
/// leaves an excess slope `L_{r′s′}(h − g) ≥ 1 + c`.
pub fn polygon_failure_certificate(alpha: Alpha, partition: &[f64], depth: usize) -> Result<CertificateReport> {
    let stage = build(alpha, depth)?;
    polygon_failure_on(&stage, partition, 1e-6)
}

/// [`polygon_failure_certificate`] on a prebuilt stage.
pub fn polygon_failure_on(stage: &AlmondStage, partition: &[f64], tol: f64) -> Result<CertificateReport> {
    let p = stage.params;
    let a = p.alpha.get();
    let g = kp_interpolate(&stage.h, partition)?;
    let x1 = partition[1];
    let gf = g.as_fn();
    let diff = |x: f64| stage.h.value(x) - gf.value(x);
    let x_tilde = first_crossing(diff, x1)?;

    // largest j with t_j = k^j ≥ x̃, so x̃ ∈ [k^{j+1}, k^j]
    let mut j = 0;
    while stage.left_chain(j + 1) >= x_tilde {
        j += 1;
    }
    if j + 2 > stage.depth {
        return Err(Error::UnresolvedDepth { needed: j + 2, have: stage.depth });
    }
    let t = stage.left_chain(j);
    let r = stage.left_chain(j + 1);
    let r1 = stage.left_chain(j + 2);
    let s1 = r - p.k * r;
    if stage.node(r1).is_none() || stage.node(s1).is_none() {
        return Err(Error::NotANode(s1));
    }
    let witness = ((diff(s1) - diff(r1)) / (s1 - r1).powf(a)).abs();
    let h_slope = crate::func::slope(&stage.h, r1, s1)?;
    let steepness = gf.value(x1) / x1;
    let steep_bound = p.liminf_slope * (1.0 - p.k).powf(a) / (1.0 - p.k) * t.powf(a - 1.0);

    let mut report = CertificateReport::new("polygon-failure", a)
        .param("depth", stage.depth)
        .param("partition_nodes", partition.len())
        .param("first_node", x1)
        .param("tol", tol);
    report.push(ResultEntry::value("k", p.k, true));
    report.push(ResultEntry::value("failure_c", p.failure_c, p.failure_c > 0.0));
    report.push(
        ResultEntry::value("x_tilde", x_tilde, x_tilde > 0.0 && x_tilde <= x1 && x_tilde >= r)
            .with_witness(vec![r, t]),
    );
    report.push(ResultEntry::value("h_slope_r1_s1", h_slope, (h_slope - 1.0).abs() <= 1e-9).with_witness(vec![r1, s1]));
    report.push(
        ResultEntry::value("g_steepness", steepness, steepness >= steep_bound * (1.0 - 1e-12))
            .with_witness(vec![steep_bound]),
    );
    report.push(
        ResultEntry::value("witness_slope", witness, witness >= 1.0 + p.failure_c - tol)
            .with_witness(vec![r1, s1])
            .with_tol(tol),
    );
    Ok(report)
}

/// Stage-by-stage series for plotting, depths `0..=depth`.
pub fn figure_series(alpha: Alpha, depth: usize, samples: usize) -> Result<Vec<Vec<(f64, f64, f64)>>> {
    (0..=depth).map(|d| build(alpha, d).map(|s| s.series(samples))).collect()
}

/// Interpolating polygon through the nodes of a stage.
pub fn node_polygon(stage: &AlmondStage) -> Result<Polygon> {
    Polygon::new(stage.params.alpha, stage.nodes.iter().map(|n| (n.x, n.value)).collect())
}
