//! Invariants checked on randomly generated functions.

mod common;

use holder::almond::{self, AlmondParams};
use holder::approx::{inserted_constants, kp_cell_violations, kp_interpolate, msummand_certificate, InsertedConstantsPlan};
use holder::ciesielski::{analyze, cp_profile, phi, synthesize, CoeffSeq};
use holder::spike::{slope_from_zero, spike_polygon, SpikeParams};
use holder::text::{from_text, to_text};
use holder::{band_slope, critical_set, holder_seminorm, sup_norm, Alpha, Error, PiecewiseFn, Polygon};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    }
}

fn settle(r: holder::Result<holder::CertifiedBound>) -> holder::CertifiedBound {
    match r {
        Ok(b) => b,
        Err(Error::BudgetExhausted { best, .. }) => best,
        Err(e) => panic!("{e}"),
    }
}

fn alpha() -> impl Strategy<Value = Alpha> {
    (0.15f64..0.9).prop_map(|a| Alpha::new(a).unwrap())
}

fn member() -> impl Strategy<Value = PiecewiseFn> {
    (alpha(), any::<u64>()).prop_map(|(a, seed)| common::random_member(&mut ChaCha8Rng::seed_from_u64(seed), a))
}

fn member_pair() -> impl Strategy<Value = (PiecewiseFn, PiecewiseFn)> {
    (alpha(), any::<u64>()).prop_map(|(a, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (common::random_member(&mut rng, a), common::random_member(&mut rng, a))
    })
}

fn unit() -> impl Strategy<Value = f64> {
    (0u32..=1 << 20).prop_map(|i| i as f64 / (1u32 << 20) as f64)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn slope_is_symmetric(f in member(), x in unit(), y in unit()) {
        prop_assume!(x != y);
        let a = holder::func::slope(&f, x, y).unwrap();
        let b = holder::func::slope(&f, y, x).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn slope_is_subadditive((f, g) in member_pair(), x in unit(), y in unit()) {
        prop_assume!(x != y);
        let sum = f.add(&g).unwrap();
        let lhs = holder::func::slope(&sum, x, y).unwrap();
        let fs = holder::func::slope(&f, x, y).unwrap();
        let gs = holder::func::slope(&g, x, y).unwrap();
        prop_assert!(lhs <= fs + gs + 1e-12 * (1.0 + fs + gs) / (x - y).abs().powf(f.alpha().get()));
    }

    #[test]
    fn sum_evaluates_pointwise((f, g) in member_pair(), x in unit()) {
        let s = f.add(&g).unwrap();
        let d = f.sub(&g).unwrap();
        prop_assert!((s.value(x) - f.value(x) - g.value(x)).abs() <= 1e-12);
        prop_assert!((d.value(x) - f.value(x) + g.value(x)).abs() <= 1e-12);
        prop_assert!(s.continuity_defect() <= 1e-12);
    }

    #[test]
    fn text_round_trip_is_exact(f in member()) {
        let back = from_text(&to_text(&f)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn coefficient_text_round_trip(a in alpha(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..rand::Rng::gen_range(&mut rng, 1..40)).map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0)).collect();
        let c = CoeffSeq::from_vec(a, coeffs).unwrap();
        prop_assert_eq!(CoeffSeq::from_text(&c.to_text()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn seminorm_encloses_sampled_slopes(f in member()) {
        let b = settle(holder_seminorm(&f, 1e-6));
        prop_assert!(b.lower <= b.upper);
        prop_assert!(common::grid_seminorm(&f, 300) <= b.upper);
        let (x, y) = b.witness.unwrap();
        prop_assert_eq!(holder::func::slope(&f, x, y).unwrap(), b.lower);
    }

    #[test]
    fn sup_norm_encloses_grid_values(f in member()) {
        let b = sup_norm(&f, 1e-8).unwrap();
        prop_assert!(common::grid_sup(&f, 2000) <= b.upper);
        let (x, _) = b.witness.unwrap();
        prop_assert_eq!(f.value(x).abs(), b.lower);
        prop_assert!(b.gap() <= 1e-8);
    }

    #[test]
    fn seminorm_is_homogeneous(f in member(), c in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0]) {
        let tol = 1e-6;
        let b = settle(holder_seminorm(&f, tol));
        let s = settle(holder_seminorm(&f.scale(c), tol));
        let k = c.abs();
        prop_assert!(s.lower <= k * b.upper + tol * k + 1e-12);
        prop_assert!(k * b.lower <= s.upper + tol * k + 1e-12);
    }

    #[test]
    fn bands_grow_with_their_reach(f in member(), d1 in 0.01f64..0.5, extra in 0.0f64..0.5) {
        let tol = 1e-6;
        let d2 = (d1 + extra).min(1.0);
        let small = settle(band_slope(&f, 0.0, d1, tol));
        let large = settle(band_slope(&f, 0.0, d2, tol));
        prop_assert!(small.upper <= large.upper + tol);
        prop_assert!(small.lower <= large.upper);
    }

    #[test]
    fn interpolation_does_not_raise_the_seminorm(f in member(), seed in any::<u64>()) {
        let p = common::random_partition(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let g = kp_interpolate(&f, &p).unwrap();
        let lg = settle(holder_seminorm(g.as_fn(), 1e-7));
        let lf = settle(holder_seminorm(&f, 1e-7));
        prop_assert!(lg.upper <= lf.upper + 1e-6);
        prop_assert_eq!(kp_cell_violations(&f, &g, 12), 0);
    }

    #[test]
    fn refined_partitions_keep_cells_clean(f in member(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = common::random_partition(&mut rng, 6);
        for _ in 0..3 {
            let g = kp_interpolate(&f, &p).unwrap();
            prop_assert_eq!(kp_cell_violations(&f, &g, 10), 0);
            let mids: Vec<f64> = p.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            p.extend(mids);
            p.sort_by(f64::total_cmp);
        }
    }

    #[test]
    fn inserted_constants_bookkeeping(a in alpha(), seed in any::<u64>(), delta in 1e-4f64..0.02) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = common::random_arc_sum(&mut rng, a, 4);
        let crit = critical_set(&h);
        let plan = match InsertedConstantsPlan::new(&h, &crit, delta) {
            Ok(p) => p,
            Err(Error::OverlappingIntervals(..)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let g = plan.apply(&h).unwrap();
        prop_assert!(critical_set(&g).is_empty());
        prop_assert!(g.is_based());
        prop_assert!(g.continuity_defect() <= 1e-12);
        // oracle: largest variation of h over a frozen block
        let var = plan
            .criticals
            .iter()
            .map(|&x| {
                let (lo, hi) = ((x - delta).max(0.0), (x + delta).min(1.0));
                let vals: Vec<f64> = (0..=200).map(|i| h.value(lo + (hi - lo) * i as f64 / 200.0)).collect();
                let (mn, mx) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
                mx - mn
            })
            .fold(0.0, f64::max);
        let lip = settle(holder_seminorm(&h, 1e-4)).upper;
        let var_bound = var.max(lip * (2.0 * delta).powf(a.get()));
        let norm = sup_norm(&h.sub(&g).unwrap(), 1e-8).unwrap();
        prop_assert!(norm.upper <= var_bound + plan.jump_total() + 1e-8);
        // the five-case bound below the gap between frozen blocks
        let gap = plan.criticals.windows(2).map(|w| w[1] - w[0] - 2.0 * delta).fold(1.0, f64::min);
        if gap > 1e-3 {
            let band = settle(band_slope(&h.sub(&g).unwrap(), 0.0, gap, 1e-4));
            prop_assert!(band.upper <= lip + 1e-4);
        }
    }

    #[test]
    fn polygon_candidates_are_refuted(seed in any::<u64>()) {
        let a = Alpha::half();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::random_polygon(&mut rng, a, 10);
        let nodes: Vec<(f64, f64)> = p.nodes().iter().map(|&(x, y)| (x, if x == 1.0 { 1.0 } else { y })).collect();
        let g = Polygon::new(a, nodes).unwrap();
        for cand in [p, g] {
            let o = msummand_certificate(cand.as_fn(), 1e-12).unwrap();
            prop_assert!(o.is_violation(), "{:?}", o);
        }
    }

    #[test]
    fn round_trip_at_rounding_level(a in alpha(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rand::Rng::gen_range(&mut rng, 1..600);
        let coeffs: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let c = CoeffSeq::from_vec(a, coeffs).unwrap();
        let f = synthesize(&c).unwrap();
        let back = analyze(f.as_fn(), n).unwrap();
        for (x, y) in c.as_slice().iter().zip(back.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        // uniform bound: each level adds at most sup|c|·2^{−(m+1)α}
        let levels = c.max_level().map_or(0, |m| m + 1);
        let geo: f64 = (0..levels).map(|m| a.pow((-(m as f64) - 1.0).exp2())).sum::<f64>() + 1.0;
        let norm = sup_norm(f.as_fn(), 1e-9 + 1e-10).unwrap();
        prop_assert!(norm.lower <= c.sup() * geo + 1e-12);
    }

    #[test]
    fn heavy_sets_shrink(seed in any::<u64>(), e1 in 0.01f64..0.5, e2 in 0.0f64..0.5) {
        let a = Alpha::half();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 << 8;
        let coeffs: Vec<f64> = (1..=n)
            .map(|i| {
                let decay = 1.0 / (1.0 + (i as f64).ln());
                rand::Rng::gen_range(&mut rng, -1.0..1.0) * decay
            })
            .collect();
        let c = CoeffSeq::from_vec(a, coeffs).unwrap();
        let lo = cp_profile(&c, e1, 5).unwrap();
        let hi = cp_profile(&c, e1 + e2, 5).unwrap();
        prop_assert!(hi.points.iter().all(|x| lo.points.contains(x)));
        let deeper = cp_profile(&c, e1, 6).unwrap();
        prop_assert!(deeper.points.iter().filter(|x| lo.points.contains(x)).count() <= lo.points.len());
        for x in &deeper.points {
            let coarse = (x * 32.0).floor() / 32.0;
            prop_assert!(lo.points.contains(&coarse) || lo.points.contains(&(coarse + 1.0 / 32.0)));
        }
    }
}

#[test]
fn triangles_are_normalized() {
    for a in [0.3, 0.5, 0.8] {
        let alpha = Alpha::new(a).unwrap();
        for n in 1..=1024 {
            let b = holder_seminorm(phi(n, alpha).unwrap().as_fn(), 1e-8).unwrap();
            assert!(b.contains(1.0), "α {a}, n {n}: {b:?}");
        }
    }
}

#[test]
fn almond_stages_have_seminorm_one() {
    for depth in 0..=7 {
        let stage = almond::build(Alpha::half(), depth).unwrap();
        for f in [&stage.h, &stage.h_tilde] {
            let b = settle(holder_seminorm(f, 1e-5));
            // arc coefficients are ±1 only up to the rounding of the leaf widths
            assert!(b.lower <= 1.0 + 1e-5 && b.upper >= 1.0, "depth {depth}: {b:?}");
        }
    }
}

#[test]
fn almond_nodes_persist() {
    let a = Alpha::new(0.6).unwrap();
    let mut prev = almond::build(a, 0).unwrap();
    for depth in 1..=8 {
        let next = almond::build(a, depth).unwrap();
        for n in &prev.nodes {
            let m = next.node(n.x).unwrap_or_else(|| panic!("node {} lost at depth {depth}", n.x));
            assert_eq!((m.value, m.kind, m.depth), (n.value, n.kind, n.depth));
        }
        for n in &next.nodes {
            assert_eq!(next.h.value(n.x), n.value);
        }
        prev = next;
    }
}

#[test]
fn almond_envelopes_nest_and_shrink() {
    let a = Alpha::half();
    let params = AlmondParams::new(a).unwrap();
    let grid: Vec<f64> = (0..=1 << 14).map(|i| i as f64 / (1 << 14) as f64).collect();
    let mut prev = almond::build(a, 0).unwrap();
    let mut prev_gap = f64::INFINITY;
    for depth in 1..=10 {
        let next = almond::build(a, depth).unwrap();
        for &x in &grid {
            let (lo, hi) = (next.lower_envelope(x), next.upper_envelope(x));
            assert!(lo >= prev.lower_envelope(x) - 1e-12 && hi <= prev.upper_envelope(x) + 1e-12, "x {x}, depth {depth}");
        }
        let gap = sup_norm(&next.h.sub(&next.h_tilde).unwrap(), 1e-9 + 1e-10).unwrap();
        assert!(gap.upper < prev_gap && gap.lower <= params.envelope_gap(depth) + 1e-12);
        prev_gap = gap.upper;
        prev = next;
    }
    assert!(params.envelope_gap(20) < 1e-3);
}

#[test]
fn spike_seminorm_grows_and_decays_at_zero() {
    let a = Alpha::half();
    for count in [1, 3, 6, 10] {
        let params = SpikeParams::new(a, count).unwrap();
        let h = spike_polygon(&params).unwrap().into_fn();
        assert!(settle(holder_seminorm(&h, 1e-6)).lower >= count as f64);
    }
    let params = SpikeParams::new(a, 30).unwrap();
    let decay: Vec<f64> = (1..=30).map(|j| slope_from_zero(&params, j)).collect();
    assert!(decay.windows(2).all(|w| w[1] <= w[0]));
    // oracle: sampled pairs (0, x) up to each scale
    let h = spike_polygon(&params).unwrap().into_fn();
    for j in [5, 10, 20] {
        let bound = (-(j as f64)).exp2();
        let sampled = (1..=4000)
            .map(|i| bound * i as f64 / 4000.0)
            .chain(params.xs.iter().copied().filter(|&x| x <= bound))
            .map(|x| h.value(x) / x.sqrt())
            .fold(0.0, f64::max);
        assert!(sampled <= decay[j - 1] * (1.0 + 1e-12));
    }
}

#[test]
fn inserted_constants_reject_bad_input() {
    let a = Alpha::half();
    let h = PiecewiseFn::power(a);
    assert!(inserted_constants(&h, &[0.0, 1.0], 0.0).is_err());
    assert!(inserted_constants(&h, &[1.5], 0.01).is_err());
}
