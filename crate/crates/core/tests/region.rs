mod common;

use proptest::prelude::*;
use rand::Rng;
use rdregion_core::labels::{AUX, F, SOURCES, W1, W2, W3, X1, X2, X3, Z};
use rdregion_core::random::{correlated_auxiliary, random_bn_model, random_channels, random_model, rng};
use rdregion_core::region::{
    corollary4_bounds, corollary5_bounds, inner_bound, marginal_residuals, outer_bound, theorem6_wprime,
    verify_converse_identities,
};
use rdregion_core::{Auxiliary, ConditionalPmf, JointPmf, SourceModel, TestChannelTriple};

/// The seven inner-bound right-hand sides summed directly from the tensor.
fn inner_oracle(ext: &JointPmf) -> [f64; 7] {
    let s = |i: usize| {
        let rest: Vec<&str> = AUX.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, w)| *w).chain([Z, F]).collect();
        common::mi(ext, &[SOURCES[i]], &[AUX[i]], &[]) - common::mi(ext, &[AUX[i]], &rest, &[])
    };
    let p12 = common::mi(ext, &[W1], &[W2], &[W3, Z, F]);
    let p13 = common::mi(ext, &[W1], &[W3], &[W2, Z, F]);
    let p23 = common::mi(ext, &[W2], &[W3], &[W1, Z, F]);
    let t = common::mi(ext, &[W1, W2], &[W3], &[Z, F]);
    let (a, b, c) = (s(0), s(1), s(2));
    [a, b, c, a + b + p12, a + c + p13, b + c + p23, a + b + c + p12 + t].map(|v| v.max(0.0))
}

fn values(b: &rdregion_core::RateRegionBounds) -> [f64; 7] {
    b.values().map(|v| v.expect("all seven present"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inner_bound_matches_oracle_and_outer_on_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_model(&mut r, 3).unwrap();
        let ch = random_channels(&mut r, &m, 3).unwrap();
        let ext = m.extend_with_test_channels(&ch).unwrap();
        let got = values(&inner_bound(&m, &ch).unwrap());
        for (g, o) in got.iter().zip(inner_oracle(&ext)) {
            prop_assert!((g - o).abs() <= 1e-10, "{g} vs {o}");
        }
        let outer = outer_bound(&m, &Auxiliary::Product(ch)).unwrap();
        prop_assert!(outer.product_form);
        for (a, b) in values(&outer.bounds).iter().zip(got) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn degrading_a_channel_never_helps(seed in any::<u64>(), e in 0.0f64..0.5) {
        let mut r = rng(seed);
        let m = random_bn_model(&mut r, 3).unwrap();
        let ch = random_channels(&mut r, &m, 3).unwrap();
        let i = r.random_range(0..3);
        let c = ch.channel(i);
        let k = c.out_axis().size();
        let mix = |w: usize, v: usize| if k == 1 { 1.0 } else if w == v { 1.0 - e } else { e / (k - 1) as f64 };
        let rows = (0..c.n_rows())
            .flat_map(|row| (0..k).map(move |v| (0..k).map(|w| c.row(row)[w] * mix(w, v)).sum::<f64>()))
            .collect();
        let worse = ConditionalPmf::new(c.given_axes().to_vec(), c.out_axis().clone(), rows).unwrap();
        let before = corollary5_bounds(&m, &Auxiliary::Product(ch.clone())).unwrap().singles()[i];
        let after = corollary5_bounds(&m, &Auxiliary::Product(ch.with_channel(i, worse).unwrap())).unwrap().singles()[i];
        // rates are clamped at zero, so compare the clamped values
        prop_assert!(after <= before + 1e-10, "{after} > {before}");
    }
}

#[test]
fn corollary4_cross_terms_vanish_on_networks() {
    for s in 0..20u64 {
        let mut r = rng(s);
        let m = random_bn_model(&mut r, 3).unwrap();
        for _ in 0..50 {
            let ch = random_channels(&mut r, &m, 3).unwrap();
            let c4 = corollary4_bounds(&m, &ch).unwrap();
            for (name, v) in c4.cross_terms {
                assert!(v.abs() <= 1e-9, "model {s}: {name} = {v}");
            }
            let b = c4.bounds;
            assert!((b.r12.unwrap() - b.r1 - b.r2).abs() <= 1e-9);
            assert!((b.r13.unwrap() - b.r1 - b.r3).abs() <= 1e-9);
            assert!((b.r23.unwrap() - b.r2 - b.r3).abs() <= 1e-9);
            assert!((b.r123.unwrap() - b.r1 - b.r2 - b.r3).abs() <= 1e-9);
            let inner = inner_bound(&m, &ch).unwrap();
            for (a, c) in inner.singles().iter().zip(b.singles()) {
                assert!((a - c).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn corollary4_rejects_general_sources() {
    let mut r = rng(3);
    let m = random_model(&mut r, 2).unwrap();
    let ch = random_channels(&mut r, &m, 2).unwrap();
    assert!(matches!(corollary4_bounds(&m, &ch), Err(rdregion_core::Error::Constraint { .. })));
}

#[test]
fn e1_singles() {
    let e1 = SourceModel::reference_e1();
    let ch = TestChannelTriple::constant(&e1)
        .with_channel(0, ConditionalPmf::identity(e1.alphabet(X1).unwrap(), W1))
        .unwrap();
    let hb = common::hb(0.1);
    assert!((inner_bound(&e1, &ch).unwrap().r1 - hb).abs() < 1e-10);
    assert!((corollary4_bounds(&e1, &ch).unwrap().bounds.r1 - 0.469).abs() < 1e-4);
    let zero = TestChannelTriple::constant(&e1);
    assert!(values(&inner_bound(&e1, &zero).unwrap()).iter().all(|&v| v == 0.0));
    assert!(corollary5_bounds(&e1, &Auxiliary::Product(zero)).unwrap().singles() == [0.0; 3]);

    // identity channels: r1 = H(X1 | X2, X3, Z, F)
    let id = TestChannelTriple::identity(&e1);
    let ext = e1.extend_with_test_channels(&id).unwrap();
    let oracle = common::h(&ext, &[X1, X2, X3, Z, F]) - common::h(&ext, &[X2, X3, Z, F]);
    assert!((inner_bound(&e1, &id).unwrap().r1 - oracle).abs() < 1e-10);
}

#[test]
fn theorem6_preserves_marginals_and_singles() {
    for s in 0..20u64 {
        let mut r = rng(500 + s);
        let m = random_bn_model(&mut r, 3).unwrap();
        let w = [0, 1, 2].map(|_| r.random_range(2..=3));
        let joint = correlated_auxiliary(&mut r, &m, w, 3).unwrap();
        let wp = theorem6_wprime(&m, &joint).unwrap();
        let ext = m.extend_with_test_channels(&wp).unwrap();
        for v in marginal_residuals(&joint, &ext).unwrap() {
            assert!(v <= 1e-10, "model {s}: residual {v}");
        }
        let before = corollary5_bounds(&m, &Auxiliary::Joint(joint.clone())).unwrap().singles();
        let after = corollary5_bounds(&m, &Auxiliary::Product(wp)).unwrap().singles();
        for (a, b) in before.iter().zip(after) {
            assert!((a - b).abs() <= 1e-10);
        }
        // relaxation direction: I(Xi;Wi) - I(Wi;Z,F) <= I(X1,X2,X3;Wi|W-i,Z,F)
        let outer = outer_bound(&m, &Auxiliary::Joint(joint)).unwrap();
        for (c5, o) in before.iter().zip(outer.bounds.singles()) {
            assert!(*c5 <= o + 1e-9, "model {s}: {c5} > {o}");
        }
    }
}

#[test]
fn correlated_auxiliary_outer_bound_differs_from_product() {
    let e1 = SourceModel::reference_e1();
    let mut r = rng(42);
    let joint = correlated_auxiliary(&mut r, &e1, [2, 2, 2], 2).unwrap();
    let outer = outer_bound(&e1, &Auxiliary::Joint(joint.clone())).unwrap();
    assert!(!outer.product_form);
    let all_x = [X1, X2, X3];
    let oracle = [
        common::mi(&joint, &all_x, &[W1], &[W2, W3, Z, F]),
        common::mi(&joint, &all_x, &[W2], &[W1, W3, Z, F]),
        common::mi(&joint, &all_x, &[W3], &[W1, W2, Z, F]),
        common::mi(&joint, &all_x, &[W1, W2], &[W3, Z, F]),
        common::mi(&joint, &all_x, &[W1, W3], &[W2, Z, F]),
        common::mi(&joint, &all_x, &[W2, W3], &[W1, Z, F]),
        common::mi(&joint, &all_x, &AUX, &[Z, F]),
    ];
    for (g, o) in values(&outer.bounds).iter().zip(oracle) {
        assert!((g - o).abs() <= 1e-10);
    }
    let wp = theorem6_wprime(&e1, &joint).unwrap();
    let product = values(&inner_bound(&e1, &wp).unwrap());
    let gap = values(&outer.bounds).iter().zip(product).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap > 1e-6, "gap {gap}");
}

#[test]
fn joint_auxiliary_must_respect_channel_constraints() {
    let e1 = SourceModel::reference_e1();
    // W1 copies Z, which X1 alone cannot produce
    let ext = e1.extend_with_test_channels(&TestChannelTriple::identity(&e1)).unwrap();
    let src = e1.joint();
    let bad = JointPmf::from_fn(ext.axes().to_vec(), |ix| {
        let copies = ix[5] == ix[3] && ix[6] == ix[1] && ix[7] == ix[2];
        if copies { src.get(&ix[..5]) } else { 0.0 }
    })
    .unwrap();
    assert!(matches!(
        outer_bound(&e1, &Auxiliary::Joint(bad)),
        Err(rdregion_core::Error::Constraint { .. })
    ));
}

#[test]
fn converse_identities_hold() {
    for s in 0..20u64 {
        let mut r = rng(900 + s);
        let m = if s % 2 == 0 { random_bn_model(&mut r, 3) } else { random_model(&mut r, 3) }.unwrap();
        for _ in 0..20 {
            let ch = random_channels(&mut r, &m, 3).unwrap();
            for id in verify_converse_identities(&m, &ch, 1e-9).unwrap() {
                assert!(id.residual <= 1e-9 && id.within_tol, "model {s}: {} = {}", id.name, id.residual);
            }
        }
    }
}

#[test]
fn constant_channels_fix_everything() {
    let e1 = SourceModel::reference_e1();
    let c = TestChannelTriple::constant(&e1);
    assert!(verify_converse_identities(&e1, &c, 1e-12).unwrap().iter().all(|r| r.residual <= 1e-12));
    let ext = e1.extend_with_test_channels(&c).unwrap();
    let wp = theorem6_wprime(&e1, &ext).unwrap();
    for i in 0..3 {
        assert!(wp.channel(i).max_abs_diff(c.channel(i)).unwrap() <= 1e-12);
    }
    let sym = TestChannelTriple::symmetric(&e1, 0.25).unwrap();
    let ext = e1.extend_with_test_channels(&sym).unwrap();
    let wp = theorem6_wprime(&e1, &ext).unwrap();
    for i in 0..3 {
        assert!(wp.channel(i).max_abs_diff(sym.channel(i)).unwrap() <= 1e-12);
    }
    let ids = verify_converse_identities(&e1, &sym, 1e-10).unwrap();
    assert!(ids.iter().all(|r| r.residual <= 1e-10));
}
