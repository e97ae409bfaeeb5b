//! The triangle system normalized in `H_α` and its coefficient functional.
//!
//! For `n = 2^m + k` with `1 ≤ k ≤ 2^m`, `φ_n` is the tent on
//! `[(k−1)/2^m, k/2^m]` with peak `w^α` at the midpoint, `w = 2^{−(m+1)}`
//! the half width, so both flanks have slope exactly 1. `φ_1` is the
//! identity. The functional
//!
//! ```text
//! a_1 = f(1),   a_n = (2f(xc) − f(xl) − f(xr)) / (2w^α)
//! ```
//!
//! is biorthogonal to the system.

use rayon::prelude::*;
use serde::Serialize;

use crate::text::fmt_num;
use crate::{Alpha, Error, PiecewiseFn, Polygon, Result};

/// Decomposition `n = 2^m + k` of a triangle index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicIndex {
    pub n: usize,
    pub m: u32,
    pub k: usize,
}

impl DyadicIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("triangle index must be ≥ 2, got {n}")));
        }
        let m = (n - 1).ilog2();
        Ok(DyadicIndex { n, m, k: n - (1usize << m) })
    }

    pub fn from_parts(m: u32, k: usize) -> Self {
        debug_assert!(k >= 1 && k <= 1 << m);
        DyadicIndex { n: (1usize << m) + k, m, k }
    }

    /// Support width `2^{−m}`.
    pub fn width(&self) -> f64 {
        (-(self.m as f64)).exp2()
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn xl(&self) -> f64 {
        (self.k - 1) as f64 * self.width()
    }

    pub fn xr(&self) -> f64 {
        self.k as f64 * self.width()
    }

    pub fn xc(&self) -> f64 {
        (2 * self.k - 1) as f64 * self.half_width()
    }

    pub fn peak(&self, alpha: Alpha) -> f64 {
        alpha.pow(self.half_width())
    }
}

/// `φ_n` as a polygon.
pub fn phi(n: usize, alpha: Alpha) -> Result<Polygon> {
    if n == 0 {
        return Err(Error::InvalidParameter("index must be ≥ 1".into()));
    }
    if n == 1 {
        return Polygon::new(alpha, vec![(0.0, 0.0), (1.0, 1.0)]);
    }
    let d = DyadicIndex::new(n)?;
    let mut nodes = Vec::with_capacity(5);
    if d.xl() > 0.0 {
        nodes.push((0.0, 0.0));
    }
    nodes.push((d.xl(), 0.0));
    nodes.push((d.xc(), d.peak(alpha)));
    nodes.push((d.xr(), 0.0));
    if d.xr() < 1.0 {
        nodes.push((1.0, 0.0));
    }
    Polygon::new(alpha, nodes)
}

/// Coefficients `a_1, …, a_N` of a finite combination of the `φ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffSeq {
    alpha: Alpha,
    coeffs: Vec<f64>,
}

impl CoeffSeq {
    pub fn zeros(alpha: Alpha, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("truncation level must be ≥ 1".into()));
        }
        Ok(CoeffSeq { alpha, coeffs: vec![0.0; n_max] })
    }

    pub fn from_vec(alpha: Alpha, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("truncation level must be ≥ 1".into()));
        }
        Ok(CoeffSeq { alpha, coeffs })
    }

    /// The unit sequence `e_n` truncated at `n_max ≥ n`.
    pub fn unit(alpha: Alpha, n: usize, n_max: usize) -> Result<Self> {
        if n == 0 || n > n_max {
            return Err(Error::InvalidParameter(format!("unit index {n} outside 1..={n_max}")));
        }
        let mut c = CoeffSeq::zeros(alpha, n_max)?;
        c.coeffs[n - 1] = 1.0;
        Ok(c)
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_n`, zero beyond the truncation.
    pub fn get(&self, n: usize) -> f64 {
        n.checked_sub(1).and_then(|i| self.coeffs.get(i)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, n: usize, value: f64) {
        self.coeffs[n - 1] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest level `m` with at least one index `≤ N`; `None` when only
    /// `φ_1` is present.
    pub fn max_level(&self) -> Option<u32> {
        (self.n_max() >= 2).then(|| (self.n_max() - 1).ilog2())
    }

    pub fn sup(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("alpha {}\n", fmt_num(self.alpha.get()));
        for (i, a) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{} {}\n", i + 1, fmt_num(*a)));
        }
        out
    }

    /// Parses the `alpha <v>` / `n a_n` format. Missing indices are zero;
    /// the truncation level is the largest index listed.
    pub fn from_text(text: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty input".into()))?;
        let alpha = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["alpha", v] => Alpha::new(v.parse().map_err(|e| parse_err(ln, format!("{e}")))?)?,
            _ => return Err(parse_err(ln, "expected `alpha <value>` header".into())),
        };
        let mut entries = Vec::new();
        for (ln, line) in lines {
            let (n, a) = match line.split_whitespace().collect::<Vec<_>>()[..] {
                [n, a] => (
                    n.parse::<usize>().map_err(|e| parse_err(ln, format!("bad index: {e}")))?,
                    a.parse::<f64>().map_err(|e| parse_err(ln, format!("bad coefficient: {e}")))?,
                ),
                _ => return Err(parse_err(ln, "expected `n a_n`".into())),
            };
            if n == 0 {
                return Err(parse_err(ln, "indices start at 1".into()));
            }
            entries.push((n, a));
        }
        let n_max = entries.iter().map(|e| e.0).max().ok_or_else(|| parse_err(ln, "no coefficients".into()))?;
        let mut c = CoeffSeq::zeros(alpha, n_max)?;
        for (n, a) in entries {
            c.set(n, a);
        }
        Ok(c)
    }
}

/// Coefficients `a_1, …, a_N` of a based `f`.
pub fn analyze(f: &PiecewiseFn, n_max: usize) -> Result<CoeffSeq> {
    if !f.is_based() {
        return Err(Error::NotBased(f.value(0.0)));
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter("truncation level must be ≥ 1".into()));
    }
    let alpha = f.alpha();
    let mut coeffs = Vec::with_capacity(n_max);
    coeffs.push(f.value(1.0));
    coeffs.par_extend((2..=n_max).into_par_iter().map(|n| {
        let d = DyadicIndex::new(n).expect("n ≥ 2");
        f.second_difference(d.xl(), d.xc(), d.xr()) / (2.0 * d.peak(alpha))
    }));
    Ok(CoeffSeq { alpha, coeffs })
}

/// `Σ_{n ≤ N} a_n φ_n` on the dyadic mesh of level `m(N) + 1`.
///
/// Node values are built coarse to fine: each midpoint receives the
/// average of its neighbours plus `a_n w^α`.
pub fn synthesize(c: &CoeffSeq) -> Result<Polygon> {
    let alpha = c.alpha;
    let Some(top) = c.max_level() else {
        return Polygon::new(alpha, vec![(0.0, 0.0), (1.0, c.get(1))]);
    };
    let level = top + 1;
    let size = 1usize << level;
    let mut v = vec![0.0; size + 1];
    v[size] = c.get(1);
    for m in 0..level {
        let step = size >> m;
        let peak = DyadicIndex::from_parts(m, 1).peak(alpha);
        for k in 1..=(1usize << m) {
            let (l, r) = ((k - 1) * step, k * step);
            let n = (1usize << m) + k;
            v[l + step / 2] = 0.5 * (v[l] + v[r]) + c.get(n) * peak;
        }
    }
    let h = 1.0 / size as f64;
    Polygon::new(alpha, v.into_iter().enumerate().map(|(i, y)| (i as f64 * h, y)).collect())
}

/// Finite-depth candidates for the cluster points of `{n : |a_n| > eps}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeavyPoints {
    pub eps: f64,
    pub depth: u32,
    /// Points of the `2^{−depth}` grid that are heavy at every scale.
    pub points: Vec<f64>,
}

/// Grid points `x = i/2^depth` such that for every `j = 1..=depth` some
/// `n ≥ 2` with `|a_n| > eps` has its support inside the open window
/// `(x − 2^{−j}, x + 2^{−j})`.
pub fn cp_profile(c: &CoeffSeq, eps: f64, depth: u32) -> Result<HeavyPoints> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be ≥ 0, got {eps}")));
    }
    let levels = c.max_level().map(|m| m as usize).unwrap_or(0);
    if depth as usize > levels || depth == 0 {
        return Err(Error::DepthExceedsLevels { depth: depth as usize, levels });
    }
    let grid = 1usize << depth;
    let scale = grid as f64;
    let heavy: Vec<DyadicIndex> = (2..=c.n_max())
        .filter(|&n| c.get(n).abs() > eps)
        .map(|n| DyadicIndex::new(n).expect("n ≥ 2"))
        .collect();
    let mut alive = vec![true; grid + 1];
    for j in 1..=depth {
        let radius = (-(j as f64)).exp2();
        let mut diff = vec![0i64; grid + 2];
        // a support of level m < j never fits inside a window of width 2^{1−j}
        for d in heavy.iter().filter(|d| d.m >= j) {
            let lo = (d.xr() - radius) * scale;
            let hi = (d.xl() + radius) * scale;
            let first = (lo.floor() + 1.0).max(0.0);
            let last = (hi.ceil() - 1.0).min(scale);
            if first <= last {
                diff[first as usize] += 1;
                diff[last as usize + 1] -= 1;
            }
        }
        let mut running = 0;
        for (i, flag) in alive.iter_mut().enumerate() {
            running += diff[i];
            *flag &= running > 0;
        }
    }
    let points = alive
        .iter()
        .enumerate()
        .filter(|(_, &a)| a)
        .map(|(i, _)| i as f64 / scale)
        .collect();
    Ok(HeavyPoints { eps, depth, points })
}

/// Slopes from 0 of `f_N = Σ_{n ≤ N} φ_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnesProfile {
    pub n_max: usize,
    pub points: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Last slope of the profile.
    pub estimate: f64,
    /// `|slope_j − slope_{j−1}|`.
    pub increments: Vec<f64>,
}

/// Profile `x ↦ L_{0x}(f_N)` over `points`; with no points given, uses
/// `x_j = 2^{−j}` for `j = 0..=m(N)+1`.
pub fn ones_profile(n_max: usize, alpha: Alpha, points: &[f64]) -> Result<OnesProfile> {
    let c = CoeffSeq::from_vec(alpha, vec![1.0; n_max.max(1)])?;
    let f = synthesize(&c)?;
    let points: Vec<f64> = if points.is_empty() {
        let top = c.max_level().map(|m| m + 1).unwrap_or(0);
        (0..=top).map(|j| (-(j as f64)).exp2()).collect()
    } else {
        points.to_vec()
    };
    let slopes = points
        .iter()
        .map(|&x| crate::func::slope(f.as_fn(), 0.0, x))
        .collect::<Result<Vec<_>>>()?;
    let increments = slopes.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let estimate = *slopes.last().ok_or_else(|| Error::InvalidParameter("no points".into()))?;
    Ok(OnesProfile { n_max, points, slopes, estimate, increments })
}
