mod common;

use rdregion_core::labels::{SOURCES, X1};
use rdregion_core::optimizer::{
    enumerate_channels, optimal_rates, search, trace_frontier, wyner_ziv_reduction, ChannelGrid, EncoderProblem,
    Objective, SearchConfig, WzConfig,
};
use rdregion_core::random::{random_bn_model, random_channels, random_model, rng};
use rdregion_core::region::{corollary4_bounds, inner_bound};
use rdregion_core::source::{expected_distortion, optimal_decoder};
use rdregion_core::{Alphabet, DistortionMeasure, JointPmf, RateRegionBounds, SourceModel};

fn e1_cfg(w: usize, step: f64, d: [f64; 3], obj: Objective) -> SearchConfig {
    SearchConfig::hamming(&SourceModel::reference_e1(), [w; 3], step, d, obj).unwrap()
}

fn best(model: &SourceModel, cfg: &SearchConfig) -> Option<f64> {
    trace_frontier(model, cfg)
        .unwrap()
        .iter()
        .map(|p| cfg.objective.value(&p.rates))
        .reduce(f64::min)
}

#[test]
fn channel_counts() {
    let x = Alphabet::binary("X");
    assert_eq!(enumerate_channels(&x, 1, 0.5).unwrap().count(), 1);
    assert_eq!(enumerate_channels(&x, 2, 0.5).unwrap().count(), 9);
    assert_eq!(enumerate_channels(&x, 2, 0.25).unwrap().count(), 25);
    assert!(enumerate_channels(&x, 3, 0.0001).is_err());
    for c in enumerate_channels(&x, 3, 0.25).unwrap() {
        for r in 0..c.n_rows() {
            for v in c.row(r) {
                assert!((v * 4.0 - (v * 4.0).round()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn worst_case_targets_give_zero_rates() {
    let e1 = SourceModel::reference_e1();
    let pts = trace_frontier(&e1, &e1_cfg(2, 0.25, [1.0; 3], Objective::MinSumRate)).unwrap();
    assert!(!pts.is_empty());
    assert_eq!(pts[0].rates.sum(), 0.0);
}

#[test]
fn lossless_target_needs_conditional_entropy() {
    let e1 = SourceModel::reference_e1();
    let v = best(&e1, &e1_cfg(2, 0.25, [0.0; 3], Objective::MinR1)).unwrap();
    assert!((v - common::hb(0.1)).abs() <= 0.02, "{v}");
}

#[test]
fn relaxing_targets_never_hurts() {
    let e1 = SourceModel::reference_e1();
    for obj in [Objective::MinSumRate, Objective::MinR2] {
        let mut prev = f64::INFINITY;
        for d in [0.0, 0.05, 0.1, 0.2, 0.3] {
            let v = best(&e1, &e1_cfg(2, 0.1, [d, 0.1, d], obj)).unwrap_or(f64::INFINITY);
            assert!(v <= prev + 1e-12, "{obj:?} at {d}: {v} > {prev}");
            prev = v;
        }
    }
}

#[test]
fn larger_auxiliary_alphabets_never_hurt() {
    let e1 = SourceModel::reference_e1();
    let mut prev = f64::INFINITY;
    for w in 1..=3 {
        let v = best(&e1, &e1_cfg(w, 0.1, [0.15; 3], Objective::MinSumRate)).unwrap_or(f64::INFINITY);
        assert!(v <= prev + 1e-12, "|W|={w}: {v} > {prev}");
        prev = v;
    }
    assert!(prev.is_finite());
}

#[test]
fn refinement_trace_is_non_increasing() {
    let e1 = SourceModel::reference_e1();
    let mut cfg = e1_cfg(2, 0.25, [0.12, 0.15, 0.12], Objective::MinSumRate);
    cfg.refine_iters = 4;
    let out = search(&e1, &cfg).unwrap();
    assert_eq!(out.refine_trace.len(), 5);
    for w in out.refine_trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{:?}", out.refine_trace);
    }
    let best = out.points.iter().map(|p| p.rates.sum()).fold(f64::INFINITY, f64::min);
    assert!((best - out.refine_trace.last().unwrap()).abs() < 1e-9);
    for p in &out.points {
        for (d, t) in p.distortions.iter().zip(cfg.distortion_targets) {
            assert!(*d <= t + 1e-9);
        }
    }
}

/// The per-encoder evaluator agrees with the generic route: extend the
/// model, decode optimally, and read rates from the corollary bounds.
#[test]
fn fast_evaluator_matches_generic_route() {
    for s in 0..10u64 {
        let mut r = rng(70 + s);
        let m = random_bn_model(&mut r, 3).unwrap();
        let ch = random_channels(&mut r, &m, 3).unwrap();
        let ext = m.extend_with_test_channels(&ch).unwrap();
        let c4 = corollary4_bounds(&m, &ch).unwrap().bounds;
        for i in 0..3 {
            let d = DistortionMeasure::hamming(m.alphabet(SOURCES[i]).unwrap());
            let prob = EncoderProblem::new(m.joint(), SOURCES[i], &["Z", "F"], &d).unwrap();
            let c = ch.channel(i);
            let nw = c.out_axis().size();
            let mut sc = prob.scratch(nw);
            let (rate, dist) = prob.evaluate_matrix(c.entries(), nw, &mut sc);
            assert!((rate - c4.singles()[i]).abs() < 1e-10, "model {s} enc {i}");
            let want = expected_distortion(&ext, &optimal_decoder(&ext, &d).unwrap(), &d).unwrap();
            assert!((dist - want).abs() < 1e-10, "model {s} enc {i}: {dist} vs {want}");
        }
    }
}

#[test]
fn general_sources_use_the_inner_bound() {
    let mut r = rng(11);
    let m = random_model(&mut r, 2).unwrap();
    let cfg = SearchConfig::hamming(&m, [2; 3], 0.5, [0.5; 3], Objective::MinSumRate).unwrap();
    let pts = trace_frontier(&m, &cfg).unwrap();
    assert!(!pts.is_empty());
    for p in &pts {
        assert_eq!(p.bound_form, rdregion_core::BoundForm::Inner);
        let b = inner_bound(&m, &p.channels).unwrap();
        assert!(b.contains(&p.rates, 1e-9));
    }
    for w in pts.windows(2) {
        assert!(w[0].rates.sum() <= w[1].rates.sum());
    }
}

#[test]
fn optimal_rates_sit_on_a_vertex() {
    let b = RateRegionBounds {
        r1: 0.2,
        r2: 0.3,
        r3: 0.1,
        r12: Some(0.9),
        r13: Some(0.2),
        r23: Some(0.4),
        r123: Some(1.2),
        form: rdregion_core::BoundForm::Inner,
    };
    let r = optimal_rates(&b, Objective::MinSumRate);
    assert!(b.contains(&r, 1e-12));
    assert!((r.sum() - 1.2).abs() < 1e-12);
    let r = optimal_rates(&b, Objective::MinR1);
    assert!((r.r1 - 0.2).abs() < 1e-12 && b.contains(&r, 1e-12));
}

#[test]
fn grid_index_round_trip() {
    let g = ChannelGrid::new(&Alphabet::indexed("X", 3).unwrap(), "W", 2, 0.25).unwrap();
    let mut d = vec![0; 3];
    for i in (0..g.len()).step_by(7) {
        g.digits(i, &mut d);
        assert_eq!(g.index_of(&d), i);
    }
}

/// Lower convex hull of `(x, h(p*x) - h(x))` sampled on a fine grid, plus
/// the zero-rate point `(p, 0)`, evaluated at `d`.
fn wz_oracle(p: f64, d: f64) -> f64 {
    let conv = |x: f64| p * (1.0 - x) + (1.0 - p) * x;
    let mut pts: Vec<(f64, f64)> = (0..20000)
        .map(|k| p * k as f64 / 20000.0)
        .map(|x| (x, common::hb(conv(x)) - common::hb(x)))
        .collect();
    pts.push((p, 0.0));
    if d >= p {
        return 0.0;
    }
    // best chord through (d, .) from pairs straddling d
    let left: Vec<_> = pts.iter().filter(|q| q.0 <= d).collect();
    let right: Vec<_> = pts.iter().filter(|q| q.0 >= d).collect();
    let mut best = f64::INFINITY;
    for a in left.iter().step_by(10) {
        for b in right.iter().step_by(10).chain(std::iter::once(&&(p, 0.0))) {
            let v = if b.0 == a.0 { a.1 } else { a.1 + (b.1 - a.1) * (d - a.0) / (b.0 - a.0) };
            best = best.min(v);
        }
    }
    best
}

#[test]
fn wyner_ziv_trivial_cases() {
    let xy = vec![Alphabet::binary("X"), Alphabet::binary("Y")];
    let d = DistortionMeasure::hamming(&Alphabet::binary(X1));
    let cfg = WzConfig { w_size: 2, grid_step: 0.1, levels: vec![0.0, 0.1, 0.5] };
    let same = JointPmf::new(xy.clone(), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    for p in wyner_ziv_reduction(&same, &d, &cfg).unwrap() {
        assert!(p.r_grid.unwrap().abs() < 1e-12);
    }
    let indep = JointPmf::uniform(xy).unwrap();
    let pts = wyner_ziv_reduction(&indep, &d, &cfg).unwrap();
    assert!(pts[2].r_grid.unwrap().abs() < 1e-12);
    assert!((pts[0].r_grid.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn wyner_ziv_bsc_quarter_matches_closed_form() {
    let p = 0.25;
    let xy = JointPmf::new(
        vec![Alphabet::binary("X"), Alphabet::binary("Y")],
        vec![0.5 * (1.0 - p), 0.5 * p, 0.5 * p, 0.5 * (1.0 - p)],
    )
    .unwrap();
    let d = DistortionMeasure::hamming(&Alphabet::binary(X1));
    let levels = vec![0.01, 0.05, 0.10, 0.15, 0.20];
    let cfg = WzConfig { w_size: 3, grid_step: 0.01, levels: levels.clone() };
    let pts = wyner_ziv_reduction(&xy, &d, &cfg).unwrap();
    for (pt, lvl) in pts.iter().zip(levels) {
        let want = wz_oracle(p, lvl);
        let closed = rdregion_core::optimizer::binary_wz_rate(p, lvl);
        assert!((closed - want).abs() < 1e-3, "closed form {closed} vs oracle {want} at {lvl}");
        let got = pt.r_grid.unwrap();
        assert!((got - want).abs() <= 0.02, "grid {got} vs {want} at {lvl}");
        assert!(got >= want - 1e-3, "grid below the achievable curve at {lvl}");
    }
}
