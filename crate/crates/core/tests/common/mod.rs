//! Direct-summation oracles. Nothing here calls the crate's information
//! routines; marginals are built by walking every cell of the tensor.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rdregion_core::JointPmf;

pub fn sizes(p: &JointPmf) -> Vec<usize> {
    p.axes().iter().map(|a| a.size()).collect()
}

/// Multi-index of flat position `k`, last axis fastest.
pub fn unravel(mut k: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        out[i] = k % sizes[i];
        k /= sizes[i];
    }
    out
}

fn pos(p: &JointPmf, labels: &[&str]) -> Vec<usize> {
    labels
        .iter()
        .map(|l| p.axes().iter().position(|a| a.name() == *l).expect("label"))
        .collect()
}

pub fn marginal(p: &JointPmf, labels: &[&str]) -> BTreeMap<Vec<usize>, f64> {
    let s = sizes(p);
    let ps = pos(p, labels);
    let mut m = BTreeMap::new();
    for (k, &v) in p.probs().iter().enumerate() {
        let idx = unravel(k, &s);
        let key: Vec<usize> = ps.iter().map(|&i| idx[i]).collect();
        *m.entry(key).or_insert(0.0) += v;
    }
    m
}

pub fn h(p: &JointPmf, labels: &[&str]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    marginal(p, labels)
        .values()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

/// `I(A;B|C)` as the expected log-ratio `p(abc) p(c) / (p(ac) p(bc))`.
pub fn mi(p: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> f64 {
    let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    let pabc = marginal(p, &abc);
    let pc = marginal(p, c);
    let ac: Vec<&str> = a.iter().chain(c).copied().collect();
    let bc: Vec<&str> = b.iter().chain(c).copied().collect();
    let pac = marginal(p, &ac);
    let pbc = marginal(p, &bc);
    let (na, nb) = (a.len(), b.len());
    let mut s = 0.0;
    for (k, &v) in &pabc {
        if v <= 0.0 {
            continue;
        }
        let ka = &k[..na];
        let kb = &k[na..na + nb];
        let kc = &k[na + nb..];
        let join = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
        let vc = if c.is_empty() { 1.0 } else { pc[kc] };
        s += v * (v * vc / (pac[&join(ka, kc)] * pbc[&join(kb, kc)])).log2();
    }
    s
}

pub fn hb(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}
