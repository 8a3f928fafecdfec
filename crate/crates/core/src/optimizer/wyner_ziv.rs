//! The single-encoder special case: `X1 = X`, `(Z, F)` carrying the side
//! information `Y`, and the other two sources constant.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::evaluator::EncoderProblem;
use super::frontier::FEASIBILITY_TOL;
use super::grid::ChannelGrid;
use super::hull::{lower_hull, Envelope};
use crate::labels::{F, MODEL, SIDE, W1, X1, Z};
use crate::par::fold_chunks;
use crate::prob::{Alphabet, JointPmf};
use crate::source::{DistortionMeasure, SourceModel};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WzConfig {
    pub w_size: usize,
    pub grid_step: f64,
    /// Distortion levels at which the curve is reported.
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WzPoint {
    pub d: f64,
    /// Smallest grid rate with distortion at most `d`; `None` if no grid
    /// channel reaches `d`.
    pub r_grid: Option<f64>,
    /// Lower convex envelope (time sharing) of all grid points at `d`.
    pub r_envelope: Option<f64>,
}

/// Embed a two-variable `p(x, y)` as a five-variable source: the first axis
/// becomes `X1`, the second `Z`, and `X2`, `X3`, `F` are constants.
pub fn embed_two_variable(p_xy: &JointPmf) -> Result<SourceModel> {
    if p_xy.axes().len() != 2 {
        return Err(Error::Model(format!(
            "the single-encoder case needs a pmf over two variables, got {}",
            p_xy.axes().len()
        )));
    }
    let x = p_xy.axes()[0].renamed(X1);
    let y = p_xy.axes()[1].renamed(Z);
    let one = |name: &str| Alphabet::indexed(name, 1).expect("one symbol");
    let axes = vec![x, one(MODEL[1]), one(MODEL[2]), y, one(F)];
    let joint = JointPmf::new(axes, p_xy.probs().to_vec())?;
    SourceModel::from_joint(joint)
}

/// Sweep encoder-1 channels of the embedded source and report, at each
/// requested distortion, the smallest `I(X;W) - I(W;Y)` over channels whose
/// Bayes-optimal distortion is within the level, along with the convex
/// envelope of every grid point.
pub fn wyner_ziv_reduction(p_xy: &JointPmf, d: &DistortionMeasure, cfg: &WzConfig) -> Result<Vec<WzPoint>> {
    let model = embed_two_variable(p_xy)?;
    let x = model.alphabet(X1)?.clone();
    if !x.same_symbols(d.source()) {
        return Err(Error::Model("distortion alphabet does not match the source".into()));
    }
    let d1 = DistortionMeasure::new(x.clone(), d.recon().clone(), d.costs().to_vec())?;
    let prob = EncoderProblem::new(model.joint(), X1, &SIDE, &d1)?;
    let grid = ChannelGrid::new(&x, W1, cfg.w_size, cfg.grid_step)?;
    let levels = &cfg.levels;
    let nw = grid.out().size();

    struct Acc {
        best: Vec<f64>,
        hull: Vec<(f64, f64)>,
    }
    let chunks = fold_chunks(grid.len(), 1 << 16, |range| {
        let mut sc = prob.scratch(nw);
        let mut digits = vec![0; x.size()];
        let mut best = vec![f64::INFINITY; levels.len()];
        let mut pts = Vec::with_capacity(range.len());
        for i in range {
            let (r, dist) = prob.evaluate_grid(&grid, i, &mut digits, &mut sc);
            for (b, &lvl) in best.iter_mut().zip(levels) {
                if dist <= lvl + FEASIBILITY_TOL && r < *b {
                    *b = r;
                }
            }
            pts.push((dist, r));
        }
        Acc {
            best,
            hull: lower_hull(&pts),
        }
    });
    let mut best = vec![f64::INFINITY; levels.len()];
    let mut hull_pts = Vec::new();
    for c in chunks {
        for (b, v) in best.iter_mut().zip(c.best) {
            *b = b.min(v);
        }
        hull_pts.extend(c.hull);
    }
    let env = Envelope::new(&hull_pts);
    Ok(levels
        .iter()
        .zip(best)
        .map(|(&lvl, b)| WzPoint {
            d: lvl,
            r_grid: b.is_finite().then_some(b),
            r_envelope: env.eval(lvl + FEASIBILITY_TOL).map(|r| r.max(0.0)),
        })
        .collect())
}

/// Closed-form rate for a uniform binary source, side information through
/// a BSC with crossover `p < 1/2` and Hamming distortion: the convex hull of
/// `h(p * D) - h(D)` on `[0, p)` and the zero-rate point `(p, 0)`, where
/// `p * D` is the cascaded crossover.
pub fn binary_wz_rate(p: f64, d: f64) -> f64 {
    use crate::math::{binary_entropy as h, bsc_cascade, log2};
    if d >= p {
        return 0.0;
    }
    let g = |x: f64| h(bsc_cascade(p, x)) - h(x);
    let dg = |x: f64| {
        let c = bsc_cascade(p, x);
        (1.0 - 2.0 * p) * log2((1.0 - c) / c) - log2((1.0 - x) / x)
    };
    // tangent point from (p, 0): g'(t) (p - t) + g(t) = 0, increasing in t
    let (mut lo, mut hi) = (1e-15, p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dg(mid) * (p - mid) + g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    if d <= t {
        g(d)
    } else {
        g(t) * (p - d) / (p - t)
    }
}

/// Whether `p_xy` and `d` are the uniform-binary, symmetric-side-information,
/// Hamming case covered by [`binary_wz_rate`]; returns the crossover.
pub fn binary_symmetric_crossover(p_xy: &JointPmf, d: &DistortionMeasure) -> Option<f64> {
    let p = p_xy.probs();
    if p.len() != 4 || p_xy.axes().len() != 2 || d.costs() != [0.0, 1.0, 1.0, 0.0] {
        return None;
    }
    let tol = 1e-12;
    let sym = (p[0] - p[3]).abs() <= tol && (p[1] - p[2]).abs() <= tol;
    let e = 2.0 * p[1];
    (sym && e <= 0.5).then_some(e)
}
