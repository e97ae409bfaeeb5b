//! Executable form of the argument that `H_α^0` is not an M-summand.
//!
//! With `h = x^α`, `f_1 = x`, `f_2 = −x`, a candidate `g ∈ H_α^0` would need
//! `L(h + f_i − g) ≤ 1` for both `i`. At the pair `(0, 1)` that forces
//! `g(1) = 1`. Then `φ = h − f_1 − g` is positive somewhere near 0 and
//! equals `−1` at 1, so it has a zero `x̃`, and
//! `L_{x̃ 1}(h + f_2 − g) = (1 − x̃)^{−α} > 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::index::SegIndex;
use crate::root::bisect;
use crate::{Alpha, Error, PiecewiseFn, Polygon, Result};

/// Grid on which a positive value of `φ` is sought.
pub const GRID_LEVEL: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolationWitness {
    pub x_tilde: f64,
    pub slope_value: f64,
    /// `(L_{01}(h + f_1 − g), L_{01}(h + f_2 − g)) = (|2 − g(1)|, |g(1)|)`.
    pub boundary: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MsummandOutcome {
    /// `g(1) ≠ 1`: one of the pair-(0,1) slopes already exceeds 1.
    Boundary { boundary: (f64, f64), slope: f64 },
    Witness(ViolationWitness),
    /// `f_1 + g ≥ h` on the whole grid, so the slopes of `g` from 0 stay
    /// near or above those of `x^α − x` and `g` is not little.
    NotLittle { boundary: (f64, f64), min_gap: f64 },
}

impl MsummandOutcome {
    /// Slope exceeding 1 that refutes `g`, if the outcome carries one.
    pub fn violation(&self) -> Option<f64> {
        match self {
            MsummandOutcome::Boundary { slope, .. } => Some(*slope),
            MsummandOutcome::Witness(w) => Some(w.slope_value),
            MsummandOutcome::NotLittle { .. } => None,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.violation().is_some_and(|s| s > 1.0)
    }
}

/// Largest grid point in `[lo, hi]` (grid indices) where `φ > 0`,
/// searching right to left and pruning with range enclosures.
fn last_positive(phi: &PiecewiseFn, idx: &SegIndex<'_>, lo: u64, hi: u64, step: f64) -> Option<u64> {
    let (xl, xh) = (lo as f64 * step, hi as f64 * step);
    if idx.range(xl, xh).1 <= 0.0 {
        return None;
    }
    if hi - lo <= 16 {
        return (lo..=hi).rev().find(|&i| phi.value(i as f64 * step) > 0.0);
    }
    let mid = lo + (hi - lo) / 2;
    last_positive(phi, idx, mid + 1, hi, step).or_else(|| last_positive(phi, idx, lo, mid, step))
}

pub fn msummand_certificate(g: &PiecewiseFn, tol: f64) -> Result<MsummandOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    if !g.is_based() {
        return Err(Error::NotBased(g.value(0.0)));
    }
    let alpha = g.alpha();
    let g1 = g.value(1.0);
    let boundary = ((2.0 - g1).abs(), g1.abs());
    let worst = boundary.0.max(boundary.1);
    if worst > 1.0 + tol {
        return Ok(MsummandOutcome::Boundary { boundary, slope: worst });
    }
    let h = PiecewiseFn::power(alpha);
    let phi = h.sub(&PiecewiseFn::linear(alpha, 1.0))?.sub(g)?;
    let idx = SegIndex::new(&phi);
    let n = 1u64 << GRID_LEVEL;
    let step = 1.0 / n as f64;
    let Some(i0) = last_positive(&phi, &idx, 1, n, step) else {
        let min_gap = (1..=1024u64).map(|i| -phi.value(i as f64 / 1024.0)).fold(f64::INFINITY, f64::min);
        return Ok(MsummandOutcome::NotLittle { boundary, min_gap });
    };
    if i0 == n {
        return Err(Error::RootIsolation("φ is positive at 1".into()));
    }
    let x0 = i0 as f64 * step;
    let x_tilde = bisect(|x| phi.value(x), x0, x0 + step, 0.0)?;
    let slope_value = alpha.pow(1.0 - x_tilde).recip();
    Ok(MsummandOutcome::Witness(ViolationWitness { x_tilde, slope_value, boundary }))
}

/// Based polygons on uniform partitions with `2..=max_nodes` nodes and
/// values on the `1/denom` grid in `[−1, 2]`. Most candidates end at 1;
/// the rest exercise the boundary check.
pub fn polygon_family(alpha: Alpha, count: usize, max_nodes: usize, denom: u32, seed: u64) -> Result<Vec<Polygon>> {
    if max_nodes < 2 || denom == 0 {
        return Err(Error::InvalidParameter("family needs ≥ 2 nodes and a positive grid".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = |rng: &mut ChaCha8Rng| rng.gen_range(-(denom as i64)..=2 * denom as i64) as f64 / denom as f64;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let n = rng.gen_range(2..=max_nodes);
        let mut nodes = vec![(0.0, 0.0)];
        for j in 1..n - 1 {
            nodes.push((j as f64 / (n - 1) as f64, grid(&mut rng)));
        }
        let end = if rng.gen_bool(0.8) { 1.0 } else { grid(&mut rng) };
        nodes.push((1.0, end));
        out.push(Polygon::new(alpha, nodes)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub candidates: usize,
    pub boundary: usize,
    pub witnesses: usize,
    pub not_little: usize,
    /// Smallest witness slope over candidates that passed the boundary check.
    pub min_witness_slope: f64,
    pub all_violated: bool,
}

/// Certificates for every member of a family, in parallel.
pub fn msummand_family(family: &[Polygon], tol: f64) -> Result<FamilyReport> {
    let outcomes = family
        .par_iter()
        .map(|p| msummand_certificate(p.as_fn(), tol))
        .collect::<Result<Vec<_>>>()?;
    let mut report = FamilyReport {
        candidates: outcomes.len(),
        boundary: 0,
        witnesses: 0,
        not_little: 0,
        min_witness_slope: f64::INFINITY,
        all_violated: true,
    };
    for o in &outcomes {
        match o {
            MsummandOutcome::Boundary { .. } => report.boundary += 1,
            MsummandOutcome::Witness(w) => {
                report.witnesses += 1;
                report.min_witness_slope = report.min_witness_slope.min(w.slope_value);
            }
            MsummandOutcome::NotLittle { .. } => report.not_little += 1,
        }
        report.all_violated &= o.is_violation();
    }
    Ok(report)
}
