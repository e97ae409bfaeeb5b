//! Tents of height `k·δ_k^α` at `x_k = 2^{−k}`: slope `k` across each tent
//! flank, while the slope from 0 to any point tends to 0.

use serde::Serialize;

use crate::report::{CertificateReport, ResultEntry};
use crate::{critical_set, holder_seminorm, Alpha, Error, PiecewiseFn, Polygon, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeParams {
    pub alpha: Alpha,
    pub count: usize,
    /// `x_k = 2^{−k}`, `k = 1..=count`.
    pub xs: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Peak values `k·δ_k^α`.
    pub peaks: Vec<f64>,
}

impl SpikeParams {
    /// `δ_k = min((x_k/k)^{1/α}, 2^{−k−2})`, rounded down to a multiple of
    /// `2^{−(k+52)}`, the spacing of binary64 numbers near `x_k`, so that
    /// `x_k ± δ_k` are exact.
    pub fn new(alpha: Alpha, count: usize) -> Result<Self> {
        if count == 0 || count > 900 {
            return Err(Error::InvalidParameter(format!("spike count must lie in 1..=900, got {count}")));
        }
        let a = alpha.get();
        let mut xs = Vec::with_capacity(count);
        let mut deltas = Vec::with_capacity(count);
        let mut peaks = Vec::with_capacity(count);
        for k in 1..=count {
            let x = (-(k as f64)).exp2();
            let raw = (x / k as f64).powf(1.0 / a).min((-(k as f64) - 2.0).exp2());
            let grid = (k as f64 + 52.0).exp2();
            let delta = (raw * grid).floor() / grid;
            if delta <= 0.0 {
                return Err(Error::InvalidParameter(format!("tent {k} has vanishing width")));
            }
            xs.push(x);
            deltas.push(delta);
            peaks.push(k as f64 * delta.powf(a));
        }
        Ok(SpikeParams { alpha, count, xs, deltas, peaks })
    }
}

pub fn spike_polygon(params: &SpikeParams) -> Result<Polygon> {
    let mut nodes = vec![(0.0, 0.0)];
    for i in (0..params.count).rev() {
        let (x, d) = (params.xs[i], params.deltas[i]);
        nodes.push((x - d, 0.0));
        nodes.push((x, params.peaks[i]));
        nodes.push((x + d, 0.0));
    }
    nodes.push((1.0, 0.0));
    Polygon::new(params.alpha, nodes)
}

pub fn spike_build(alpha: Alpha, count: usize) -> Result<PiecewiseFn> {
    spike_polygon(&SpikeParams::new(alpha, count)?).map(Polygon::into_fn)
}

/// `max { L_{0x}(h) : 0 < x ≤ 2^{−j} }`. On each tent `h(x)/x^α` rises
/// along the left flank and falls along the right one, so the maximum
/// is attained at a peak.
pub fn slope_from_zero(params: &SpikeParams, j: usize) -> f64 {
    let bound = (-(j as f64)).exp2();
    (0..params.count)
        .filter(|&i| params.xs[i] <= bound)
        .map(|i| params.peaks[i] / params.alpha.pow(params.xs[i]))
        .fold(0.0, f64::max)
}

/// Checks the flank slopes, decay of slopes from 0 up to scale
/// `2^{−decay_j}` and the absence of critical points.
pub fn spike_verify(h: &PiecewiseFn, params: &SpikeParams, decay_j: usize, decay_target: f64) -> Result<CertificateReport> {
    if h.alpha() != params.alpha {
        return Err(Error::AlphaMismatch(h.alpha().get(), params.alpha.get()));
    }
    let mut report = CertificateReport::new("spike", params.alpha.get())
        .param("count", params.count)
        .param("decay_j", decay_j)
        .param("decay_target", decay_target);
    for i in 0..params.count {
        let k = i + 1;
        let (x, d) = (params.xs[i], params.deltas[i]);
        if !(h.eval(x)? == params.peaks[i] && h.eval(x - d)? == 0.0 && h.eval(x + d)? == 0.0) {
            return Err(Error::InvalidParameter(format!("h does not match the tent at x_{k}")));
        }
        let s = crate::func::slope(h, x, x + d)?;
        report.push(ResultEntry::value(format!("flank_slope_{k}"), s, s == k as f64).with_witness(vec![x, x + d]));
    }
    let mut previous = f64::INFINITY;
    for j in 1..=decay_j {
        let s = slope_from_zero(params, j);
        let monotone = s <= previous;
        previous = s;
        let pass = monotone && (j < decay_j || s < decay_target);
        report.push(ResultEntry::value(format!("slope_from_zero_{j}"), s, pass));
    }
    let criticals = critical_set(h);
    report.push(ResultEntry::value("critical_points", criticals.len() as f64, criticals.is_empty()));
    let bound = match holder_seminorm(h, 1e-6) {
        Ok(b) => b,
        Err(Error::BudgetExhausted { best, .. }) => best,
        Err(e) => return Err(e),
    };
    let count = params.count as f64;
    report.push(ResultEntry::bound("seminorm", &bound, bound.lower >= count));
    Ok(report)
}
