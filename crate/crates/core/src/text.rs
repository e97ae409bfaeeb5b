//! Canonical text form of [`PiecewiseFn`].
//!
//! ```text
//! alpha 5.0000000000000000e-1
//! a b affine m c            # c + m·(x − a)
//! a b arc left|right s k o  # o + s·k·|x − anchor|^α, s = ±1, k ≥ 0
//! a b sum m c z1 k1 z2 k2…  # c + m·(x − a) + Σ k_i·|x − z_i|^α
//! ```
//!
//! Numbers are written with 17 significant digits so that parsing gives
//! back the identical binary64 values.

use std::fmt::Write as _;

use crate::func::Arcs;
use crate::{Alpha, Arc, Error, PiecewiseFn, Result, Segment};

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn segment_line(s: &Segment) -> String {
    let (a, b) = (fmt_num(s.a), fmt_num(s.b));
    match s.arcs.as_slice() {
        [] => format!("{a} {b} affine {} {}", fmt_num(s.m), fmt_num(s.c)),
        [t] if s.m == 0.0 && (t.anchor == s.a || t.anchor == s.b) => {
            let side = if t.anchor == s.a { "left" } else { "right" };
            let sign = if t.coeff < 0.0 { "-1" } else { "1" };
            format!("{a} {b} arc {side} {sign} {} {}", fmt_num(t.coeff.abs()), fmt_num(s.c))
        }
        arcs => {
            let mut line = format!("{a} {b} sum {} {}", fmt_num(s.m), fmt_num(s.c));
            for t in arcs {
                let _ = write!(line, " {} {}", fmt_num(t.anchor), fmt_num(t.coeff));
            }
            line
        }
    }
}

pub fn to_text(f: &PiecewiseFn) -> String {
    let mut out = format!("alpha {}\n", fmt_num(f.alpha().get()));
    for s in f.segments() {
        out.push_str(&segment_line(s));
        out.push('\n');
    }
    out
}

fn num(tok: Option<&str>, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| Error::Parse { line, msg: "missing field".into() })?;
    tok.parse::<f64>()
        .map_err(|e| Error::Parse { line, msg: format!("bad number {tok:?}: {e}") })
}

pub fn from_text(text: &str) -> Result<PiecewiseFn> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "empty input".into() })?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("alpha") {
        return Err(Error::Parse { line: ln, msg: "expected `alpha <value>` header".into() });
    }
    let alpha = Alpha::new(num(toks.next(), ln)?)?;
    let mut segments = Vec::new();
    for (ln, line) in lines {
        let mut t = line.split_whitespace();
        let a = num(t.next(), ln)?;
        let b = num(t.next(), ln)?;
        let seg = match t.next() {
            Some("affine") => {
                let m = num(t.next(), ln)?;
                let c = num(t.next(), ln)?;
                Segment::affine(a, b, c, m)
            }
            Some("arc") => {
                let anchor = match t.next() {
                    Some("left") => a,
                    Some("right") => b,
                    other => {
                        return Err(Error::Parse { line: ln, msg: format!("bad arc side {other:?}") })
                    }
                };
                let sign = num(t.next(), ln)?;
                if sign != 1.0 && sign != -1.0 {
                    return Err(Error::Parse { line: ln, msg: format!("sign must be ±1, got {sign}") });
                }
                let coeff = num(t.next(), ln)?;
                if coeff < 0.0 {
                    return Err(Error::Parse { line: ln, msg: "arc coefficient must be ≥ 0".into() });
                }
                let offset = num(t.next(), ln)?;
                Segment::arc(a, b, anchor, sign * coeff, offset)
            }
            Some("sum") => {
                let m = num(t.next(), ln)?;
                let c = num(t.next(), ln)?;
                let rest: Vec<&str> = t.by_ref().collect();
                if rest.len() % 2 != 0 {
                    return Err(Error::Parse { line: ln, msg: "unpaired arc term".into() });
                }
                let mut arcs = Arcs::new();
                for pair in rest.chunks(2) {
                    arcs.push(Arc { anchor: num(Some(pair[0]), ln)?, coeff: num(Some(pair[1]), ln)? });
                }
                Segment { a, b, c, m, arcs }
            }
            other => return Err(Error::Parse { line: ln, msg: format!("unknown segment kind {other:?}") }),
        };
        if t.next().is_some() {
            return Err(Error::Parse { line: ln, msg: "trailing fields".into() });
        }
        segments.push(seg);
    }
    PiecewiseFn::new(alpha, segments)
}
