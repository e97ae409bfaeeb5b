//! Generators and independent oracles shared by the integration tests.

#![allow(dead_code)]

use holder::{Alpha, PiecewiseFn, Polygon, Segment};
use rand::Rng;

/// `Σ c_i·|x − z_i|^α − Σ c_i·z_i^α`, split at the anchors.
pub fn arc_sum(alpha: Alpha, terms: &[(f64, f64)]) -> PiecewiseFn {
    let a = alpha.get();
    let shift: f64 = terms.iter().map(|&(z, c)| c * z.powf(a)).sum();
    let mut cuts: Vec<f64> = terms.iter().map(|t| t.0).filter(|z| *z > 0.0 && *z < 1.0).collect();
    cuts.extend([0.0, 1.0]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let segments = cuts
        .windows(2)
        .map(|w| {
            let mut s = Segment::constant(w[0], w[1], -shift);
            for &(z, c) in terms {
                s.arcs.push(holder::Arc { anchor: z, coeff: c });
            }
            s
        })
        .collect::<Vec<_>>();
    let mut segments = segments;
    // nudge the constant by ulps until the evaluation order gives f(0) = 0 exactly
    let base = segments[0].c;
    let step = f64::EPSILON * base.abs().max(f64::MIN_POSITIVE);
    if let Some(c) = (0..4096i32)
        .flat_map(|k| [k, -k])
        .map(|k| base + k as f64 * step / 2.0)
        .find(|&c| Segment { c, ..segments[0].clone() }.value(0.0, a) == 0.0)
    {
        for s in &mut segments {
            s.c = c;
        }
    }
    PiecewiseFn::new(alpha, segments).unwrap()
}

/// Two arcs meeting at `z`: `x^α` on `[0, z]`, then a falling arc anchored at `z`.
pub fn two_arc(alpha: Alpha, z: f64, fall: f64) -> PiecewiseFn {
    let top = z.powf(alpha.get());
    PiecewiseFn::new(
        alpha,
        vec![Segment::arc(0.0, z, 0.0, 1.0, 0.0), Segment::arc(z, 1.0, z, -fall, top)],
    )
    .unwrap()
}

pub fn random_polygon(rng: &mut impl Rng, alpha: Alpha, max_nodes: usize) -> Polygon {
    let n = rng.gen_range(1..=max_nodes);
    let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.001..0.999)).collect();
    xs.extend([0.0, 1.0]);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let nodes = xs.iter().map(|&x| (x, if x == 0.0 { 0.0 } else { rng.gen_range(-1.0..1.0) })).collect();
    Polygon::new(alpha, nodes).unwrap()
}

/// Retries until the rounded sum vanishes exactly at 0.
pub fn random_arc_sum(rng: &mut impl Rng, alpha: Alpha, max_terms: usize) -> PiecewiseFn {
    loop {
        let n = rng.gen_range(1..=max_terms);
        let terms: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let z = if i == 0 { 0.0 } else { (rng.gen_range(0.05..0.95f64) * 64.0).round() / 64.0 };
                (z, rng.gen_range(-1.0..1.0))
            })
            .collect();
        let f = arc_sum(alpha, &terms);
        if f.is_based() {
            return f;
        }
    }
}

/// Mixed family: polygons, arc sums, and their sums.
pub fn random_member(rng: &mut impl Rng, alpha: Alpha) -> PiecewiseFn {
    match rng.gen_range(0..3) {
        0 => random_polygon(rng, alpha, 8).into_fn(),
        1 => random_arc_sum(rng, alpha, 3),
        _ => random_polygon(rng, alpha, 5).as_fn().add(&random_arc_sum(rng, alpha, 3)).unwrap(),
    }
}

pub fn random_partition(rng: &mut impl Rng, max_inner: usize) -> Vec<f64> {
    let n = rng.gen_range(1..=max_inner);
    let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.99)).collect();
    xs.extend([0.0, 1.0]);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Slope oracle computed directly from point values.
pub fn slope(f: &PiecewiseFn, x: f64, y: f64) -> f64 {
    (f.value(x) - f.value(y)).abs() / (x - y).abs().powf(f.alpha().get())
}

/// Largest slope over all pairs of a uniform grid with `n + 1` points plus
/// the breakpoints.
pub fn grid_seminorm(f: &PiecewiseFn, n: usize) -> f64 {
    let mut xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    xs.extend(f.breakpoints());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vals: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
    let a = f.alpha().get();
    let mut best = 0.0f64;
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            best = best.max((vals[i] - vals[j]).abs() / (xs[j] - xs[i]).powf(a));
        }
    }
    best
}

/// Largest `|f|` on the same grid.
pub fn grid_sup(f: &PiecewiseFn, n: usize) -> f64 {
    let mut best = f.breakpoints().iter().map(|&x| f.value(x).abs()).fold(0.0, f64::max);
    for i in 0..=n {
        best = best.max(f.value(i as f64 / n as f64).abs());
    }
    best
}
