use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::evaluator::EncoderProblem;
use super::grid::ChannelGrid;
use crate::labels::{AUX, SIDE, SOURCES};
use crate::par::fold_chunks;
use crate::prob::{ConditionalPmf, JointPmf};
use crate::region::{inner_bound_on, BoundForm, RateRegionBounds, RateTriple, TestChannelTriple};
use crate::source::{expected_distortion, optimal_decoder, DistortionMeasure, SourceModel};
use crate::{Error, Result, STRUCTURAL_TOL};

/// Slack on distortion targets and on the objective when collecting ties.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const DOMINANCE_TOL: f64 = 1e-12;
const DEDUP_TOL: f64 = 1e-9;
/// Largest number of channel triples the joint (non-separable) search visits.
pub const MAX_JOINT_TRIPLES: usize = 1_000_000;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MinSumRate,
    MinR1,
    MinR2,
    MinR3,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::MinSumRate => "min_sum_rate",
            Objective::MinR1 => "min_r1",
            Objective::MinR2 => "min_r2",
            Objective::MinR3 => "min_r3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "min_sum_rate" => Objective::MinSumRate,
            "min_r1" => Objective::MinR1,
            "min_r2" => Objective::MinR2,
            "min_r3" => Objective::MinR3,
            _ => return Err(Error::Config(format!("unknown objective `{s}`"))),
        })
    }

    fn weights(self) -> [f64; 3] {
        match self {
            Objective::MinSumRate => [1.0, 1.0, 1.0],
            Objective::MinR1 => [1.0, 0.0, 0.0],
            Objective::MinR2 => [0.0, 1.0, 0.0],
            Objective::MinR3 => [0.0, 0.0, 1.0],
        }
    }

    pub fn value(self, r: &RateTriple) -> f64 {
        let w = self.weights();
        w[0] * r.r1 + w[1] * r.r2 + w[2] * r.r3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub w_alphabet_sizes: [usize; 3],
    pub grid_step: f64,
    pub refine_iters: usize,
    pub distortion_targets: [f64; 3],
    pub objective: Objective,
    pub measures: [DistortionMeasure; 3],
}

impl SearchConfig {
    /// Hamming distortion on every source.
    pub fn hamming(
        model: &SourceModel,
        w_alphabet_sizes: [usize; 3],
        grid_step: f64,
        distortion_targets: [f64; 3],
        objective: Objective,
    ) -> Result<Self> {
        let m = |i: usize| -> Result<DistortionMeasure> {
            Ok(DistortionMeasure::hamming(model.alphabet(SOURCES[i])?))
        };
        let cfg = SearchConfig {
            w_alphabet_sizes,
            grid_step,
            refine_iters: 0,
            distortion_targets,
            objective,
            measures: [m(0)?, m(1)?, m(2)?],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `|W_i| = |X_i| + 1`.
    pub fn default_w_sizes(model: &SourceModel) -> [usize; 3] {
        let s = |i: usize| model.alphabet(SOURCES[i]).map_or(2, |a| a.size() + 1);
        [s(0), s(1), s(2)]
    }

    pub fn validate(&self) -> Result<()> {
        super::grid::grid_steps(self.grid_step)?;
        if self.w_alphabet_sizes.contains(&0) {
            return Err(Error::Config("auxiliary alphabet sizes must be at least 1".into()));
        }
        if self.distortion_targets.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::Config("distortion targets must be finite and nonnegative".into()));
        }
        for (i, m) in self.measures.iter().enumerate() {
            if m.source().name() != SOURCES[i] {
                return Err(Error::Config(format!(
                    "distortion measure {} must be for {}",
                    i + 1,
                    SOURCES[i]
                )));
            }
        }
        Ok(())
    }
}

/// One operating point: rates achieving the objective for a channel triple,
/// and the distortions its Bayes-optimal decoders reach.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub rates: RateTriple,
    pub distortions: [f64; 3],
    pub channels: TestChannelTriple,
    pub bound_form: BoundForm,
    /// Position in the channel-triple grid; `None` for refined points.
    pub grid_index: Option<u128>,
}

/// Full output of a frontier search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub points: Vec<FrontierPoint>,
    /// Best objective value before refinement and after each round.
    pub refine_trace: Vec<f64>,
}

/// Rate triple in the region minimising `obj`; ties go to the smallest sum
/// and then lexicographically. The region is the intersection of the
/// present bounds, so the optimum sits on a vertex where three of them are
/// tight.
pub fn optimal_rates(b: &RateRegionBounds, obj: Objective) -> RateTriple {
    let cons: Vec<([f64; 3], f64)> = [
        ([1.0, 0.0, 0.0], Some(b.r1)),
        ([0.0, 1.0, 0.0], Some(b.r2)),
        ([0.0, 0.0, 1.0], Some(b.r3)),
        ([1.0, 1.0, 0.0], b.r12),
        ([1.0, 0.0, 1.0], b.r13),
        ([0.0, 1.0, 1.0], b.r23),
        ([1.0, 1.0, 1.0], b.r123),
    ]
    .into_iter()
    .filter_map(|(a, v)| v.map(|v| (a, v.max(0.0))))
    .collect();
    let feasible = |r: &[f64; 3]| {
        r.iter().all(|x| *x >= -1e-12)
            && cons.iter().all(|(a, v)| a[0] * r[0] + a[1] * r[1] + a[2] * r[2] >= v - 1e-12)
    };
    let w = obj.weights();
    let key = |r: &[f64; 3]| (w[0] * r[0] + w[1] * r[1] + w[2] * r[2], r[0] + r[1] + r[2]);
    let mut best = b.corner().as_array();
    let mut best_key = key(&best);
    let n = cons.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(r) = solve3([cons[i], cons[j], cons[k]]) else {
                    continue;
                };
                if !feasible(&r) {
                    continue;
                }
                let kr = key(&r);
                let better = kr.0 < best_key.0 - 1e-12
                    || (kr.0 <= best_key.0 + 1e-12
                        && (kr.1 < best_key.1 - 1e-12
                            || (kr.1 <= best_key.1 + 1e-12 && r < best)));
                if better {
                    best = r;
                    best_key = kr;
                }
            }
        }
    }
    let [r1, r2, r3] = best.map(|x| x.max(0.0));
    RateTriple { r1, r2, r3 }
}

fn solve3(rows: [([f64; 3], f64); 3]) -> Option<[f64; 3]> {
    let m = rows.map(|r| r.0);
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = rows[r].1;
        }
        *o = det(mc) / d;
    }
    Some(out)
}

/// `a` dominates `b` on rates and distortions.
fn dominates(a: &[f64; 6], b: &[f64; 6]) -> bool {
    let mut strict = false;
    for i in 0..6 {
        if a[i] > b[i] + DOMINANCE_TOL {
            return false;
        }
        if a[i] < b[i] - DOMINANCE_TOL {
            strict = true;
        }
    }
    strict
}

fn near(a: &[f64; 6], b: &[f64; 6]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= DEDUP_TOL)
}

/// Keep points within `FEASIBILITY_TOL` of the best objective, drop
/// dominated ones and near-duplicates (first in input order wins), and sort
/// stably by sum rate.
fn select(mut cand: Vec<FrontierPoint>, obj: Objective) -> Vec<FrontierPoint> {
    let Some(opt) = cand.iter().map(|p| obj.value(&p.rates)).min_by(f64::total_cmp) else {
        return cand;
    };
    cand.retain(|p| obj.value(&p.rates) <= opt + FEASIBILITY_TOL);
    let key = |p: &FrontierPoint| {
        let r = p.rates.as_array();
        let d = p.distortions;
        [r[0], r[1], r[2], d[0], d[1], d[2]]
    };
    let keys: Vec<[f64; 6]> = cand.iter().map(key).collect();
    let mut keep = vec![true; cand.len()];
    for i in 0..cand.len() {
        if keys.iter().any(|k| dominates(k, &keys[i])) {
            keep[i] = false;
        }
    }
    for i in 0..cand.len() {
        if keep[i] && (0..i).any(|j| keep[j] && near(&keys[j], &keys[i])) {
            keep[i] = false;
        }
    }
    let mut out: Vec<FrontierPoint> = cand
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    out.sort_by(|a, b| a.rates.sum().total_cmp(&b.rates.sum()));
    out
}

/// Per-encoder view of a conditionally independent source.
struct Separable {
    grids: [ChannelGrid; 3],
    problems: [EncoderProblem; 3],
}

#[derive(Clone, Copy)]
struct EncPoint {
    index: usize,
    rate: f64,
    dist: f64,
}

/// Pareto-minimal `(rate, distortion)` points, first index kept on ties.
fn pareto2(mut pts: Vec<EncPoint>) -> Vec<EncPoint> {
    pts.sort_by(|a, b| {
        a.rate
            .total_cmp(&b.rate)
            .then(a.dist.total_cmp(&b.dist))
            .then(a.index.cmp(&b.index))
    });
    let mut out: Vec<EncPoint> = Vec::new();
    'next: for p in pts {
        for q in out.iter_mut() {
            let le = q.rate <= p.rate + DOMINANCE_TOL && q.dist <= p.dist + DOMINANCE_TOL;
            let lt = q.rate < p.rate - DOMINANCE_TOL || q.dist < p.dist - DOMINANCE_TOL;
            if le && lt {
                continue 'next;
            }
            if (q.rate - p.rate).abs() <= DEDUP_TOL && (q.dist - p.dist).abs() <= DEDUP_TOL {
                if p.index < q.index {
                    *q = p;
                }
                continue 'next;
            }
        }
        out.push(p);
    }
    out
}

impl Separable {
    fn new(model: &SourceModel, cfg: &SearchConfig) -> Result<Self> {
        let g = |i: usize| -> Result<ChannelGrid> {
            ChannelGrid::new(model.alphabet(SOURCES[i])?, AUX[i], cfg.w_alphabet_sizes[i], cfg.grid_step)
        };
        let p = |i: usize| EncoderProblem::new(model.joint(), SOURCES[i], &SIDE, &cfg.measures[i]);
        Ok(Separable {
            grids: [g(0)?, g(1)?, g(2)?],
            problems: [p(0)?, p(1)?, p(2)?],
        })
    }

    /// Feasible Pareto front of encoder `i`, sorted by grid index.
    fn front(&self, i: usize, target: f64) -> Vec<EncPoint> {
        let grid = &self.grids[i];
        let prob = &self.problems[i];
        let chunks = fold_chunks(grid.len(), CHUNK, |range| {
            let mut sc = prob.scratch(grid.out().size());
            let mut digits = vec![0; prob.nx()];
            let pts = range
                .filter_map(|index| {
                    let (rate, dist) = prob.evaluate_grid(grid, index, &mut digits, &mut sc);
                    (dist <= target + FEASIBILITY_TOL).then_some(EncPoint { index, rate, dist })
                })
                .collect();
            pareto2(pts)
        });
        let mut front = pareto2(chunks.into_iter().flatten().collect());
        front.sort_by_key(|p| p.index);
        front
    }

    fn rates_dists(&self, m: &[Vec<f64>; 3]) -> ([f64; 3], [f64; 3]) {
        let mut r = [0.0; 3];
        let mut d = [0.0; 3];
        for i in 0..3 {
            let nw = self.grids[i].out().size();
            let mut sc = self.problems[i].scratch(nw);
            (r[i], d[i]) = self.problems[i].evaluate_matrix(&m[i], nw, &mut sc);
        }
        (r, d)
    }
}

fn triple_from(grids: &[ChannelGrid; 3], idx: [usize; 3]) -> TestChannelTriple {
    TestChannelTriple::new([
        grids[0].channel(idx[0]),
        grids[1].channel(idx[1]),
        grids[2].channel(idx[2]),
    ])
    .expect("grid channels are well formed")
}

fn triple_from_matrices(grids: &[ChannelGrid; 3], m: &[Vec<f64>; 3]) -> TestChannelTriple {
    let c = |i: usize| {
        ConditionalPmf::new(vec![grids[i].input().clone()], grids[i].out().clone(), m[i].clone())
            .expect("refined rows stay stochastic")
    };
    TestChannelTriple::new([c(0), c(1), c(2)]).expect("well formed")
}

fn matrices(t: &TestChannelTriple) -> [Vec<f64>; 3] {
    [0, 1, 2].map(|i| t.channel(i).entries().to_vec())
}

fn feasible(d: &[f64; 3], targets: &[f64; 3]) -> bool {
    d.iter().zip(targets).all(|(d, t)| *d <= t + FEASIBILITY_TOL)
}

/// Joint evaluation of a channel triple on any source model.
fn evaluate_triple(model: &SourceModel, t: &TestChannelTriple, cfg: &SearchConfig) -> Result<(RateTriple, [f64; 3])> {
    let ext: JointPmf = model.extend_with_test_channels(t)?;
    let mut d = [0.0; 3];
    for i in 0..3 {
        let g = optimal_decoder(&ext, &cfg.measures[i])?;
        d[i] = expected_distortion(&ext, &g, &cfg.measures[i])?;
    }
    let b = inner_bound_on(&ext)?;
    Ok((optimal_rates(&b, cfg.objective), d))
}

/// Greedy dyadic refinement: in round `k` move `grid_step / 2^k` of mass
/// between two entries of one row, accepting any feasible strict
/// improvement of the objective.
fn refine(
    start: &FrontierPoint,
    cfg: &SearchConfig,
    mut eval: impl FnMut(&[Vec<f64>; 3]) -> Result<(RateTriple, [f64; 3])>,
    grids: &[ChannelGrid; 3],
) -> Result<(FrontierPoint, Vec<f64>)> {
    let obj = cfg.objective;
    let mut cur = matrices(&start.channels);
    let mut cur_rates = start.rates;
    let mut cur_d = start.distortions;
    let mut best = obj.value(&cur_rates);
    let mut trace = vec![best];
    let mut delta = cfg.grid_step;
    for _ in 0..cfg.refine_iters {
        delta /= 2.0;
        let mut improved = true;
        let mut passes = 0;
        while improved && passes < 64 {
            improved = false;
            passes += 1;
            for i in 0..3 {
                let nw = grids[i].out().size();
                let nx = grids[i].input().size();
                for x in 0..nx {
                    for a in 0..nw {
                        for b in 0..nw {
                            if a == b || cur[i][x * nw + a] < delta - 1e-15 {
                                continue;
                            }
                            let mut cand = cur.clone();
                            cand[i][x * nw + a] = (cand[i][x * nw + a] - delta).max(0.0);
                            cand[i][x * nw + b] += delta;
                            let (r, d) = eval(&cand)?;
                            let v = obj.value(&r);
                            if feasible(&d, &cfg.distortion_targets) && v < best - 1e-12 {
                                cur = cand;
                                cur_rates = r;
                                cur_d = d;
                                best = v;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        trace.push(best);
    }
    let point = FrontierPoint {
        rates: cur_rates,
        distortions: cur_d,
        channels: triple_from_matrices(grids, &cur),
        bound_form: start.bound_form,
        grid_index: if best < trace[0] - 1e-12 { None } else { start.grid_index },
    };
    Ok((point, trace))
}

/// Whether the grid search may treat the encoders separately: on a
/// conditionally independent source both the rate bounds and the optimal
/// decoders split per encoder.
pub fn is_separable(model: &SourceModel) -> bool {
    model.is_bayes_net(STRUCTURAL_TOL)
}

/// Sweep the channel grid, keep triples meeting every distortion target
/// and return the Pareto-minimal points under the objective, sorted by sum
/// rate. An empty result means no grid triple is feasible.
pub fn trace_frontier(model: &SourceModel, cfg: &SearchConfig) -> Result<Vec<FrontierPoint>> {
    Ok(search(model, cfg)?.points)
}

pub fn search(model: &SourceModel, cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    if is_separable(model) {
        search_separable(model, cfg)
    } else {
        search_joint(model, cfg)
    }
}

fn search_separable(model: &SourceModel, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let sep = Separable::new(model, cfg)?;
    let w = cfg.objective.weights();
    let mut lists: Vec<Vec<EncPoint>> = Vec::with_capacity(3);
    for i in 0..3 {
        let mut front = sep.front(i, cfg.distortion_targets[i]);
        if front.is_empty() {
            return Ok(SearchOutcome {
                points: Vec::new(),
                refine_trace: Vec::new(),
            });
        }
        if w[i] > 0.0 {
            let m = front.iter().map(|p| p.rate).fold(f64::INFINITY, f64::min);
            front.retain(|p| p.rate <= m + FEASIBILITY_TOL);
        }
        lists.push(front);
    }
    let combos = lists.iter().map(Vec::len).product::<usize>();
    if combos > MAX_JOINT_TRIPLES {
        return Err(Error::Config(format!(
            "{combos} Pareto combinations exceed the cap of {MAX_JOINT_TRIPLES}"
        )));
    }
    let n = [0, 1, 2].map(|i| sep.grids[i].len() as u128);
    let mut cand = Vec::with_capacity(combos);
    for a in &lists[0] {
        for b in &lists[1] {
            for c in &lists[2] {
                let idx = [a.index, b.index, c.index];
                cand.push(FrontierPoint {
                    rates: RateTriple {
                        r1: a.rate,
                        r2: b.rate,
                        r3: c.rate,
                    },
                    distortions: [a.dist, b.dist, c.dist],
                    channels: triple_from(&sep.grids, idx),
                    bound_form: BoundForm::Corollary4,
                    grid_index: Some((idx[0] as u128 * n[1] + idx[1] as u128) * n[2] + idx[2] as u128),
                });
            }
        }
    }
    let points = select(cand, cfg.objective);
    finish(points, cfg, &sep.grids, |m| {
        let (r, d) = sep.rates_dists(m);
        Ok((
            RateTriple {
                r1: r[0],
                r2: r[1],
                r3: r[2],
            },
            d,
        ))
    })
}

fn finish(
    points: Vec<FrontierPoint>,
    cfg: &SearchConfig,
    grids: &[ChannelGrid; 3],
    eval: impl FnMut(&[Vec<f64>; 3]) -> Result<(RateTriple, [f64; 3])>,
) -> Result<SearchOutcome> {
    if cfg.refine_iters == 0 || points.is_empty() {
        let trace = points.first().map(|p| vec![cfg.objective.value(&p.rates)]).unwrap_or_default();
        return Ok(SearchOutcome {
            points,
            refine_trace: trace,
        });
    }
    let incumbent = points
        .iter()
        .min_by(|a, b| cfg.objective.value(&a.rates).total_cmp(&cfg.objective.value(&b.rates)))
        .expect("nonempty")
        .clone();
    let (refined, trace) = refine(&incumbent, cfg, eval, grids)?;
    let improved = *trace.last().unwrap() < trace[0] - FEASIBILITY_TOL;
    let points = if improved {
        let mut all = vec![refined];
        all.extend(points);
        select(all, cfg.objective)
    } else {
        points
    };
    Ok(SearchOutcome {
        points,
        refine_trace: trace,
    })
}

fn search_joint(model: &SourceModel, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let g = |i: usize| -> Result<ChannelGrid> {
        ChannelGrid::new(model.alphabet(SOURCES[i])?, AUX[i], cfg.w_alphabet_sizes[i], cfg.grid_step)
    };
    let grids = [g(0)?, g(1)?, g(2)?];
    let n = [0, 1, 2].map(|i| grids[i].len());
    let total = n.iter().map(|&x| x as u128).product::<u128>();
    if total > MAX_JOINT_TRIPLES as u128 {
        return Err(Error::Config(format!(
            "the source is not conditionally independent, so the search enumerates all {total} channel triples; \
             this exceeds the cap of {MAX_JOINT_TRIPLES}"
        )));
    }
    let total = total as usize;
    let split = |t: usize| [t / (n[1] * n[2]), (t / n[2]) % n[1], t % n[2]];
    let chunks = fold_chunks(total, 256, |range| -> Result<Vec<(usize, RateTriple, [f64; 3])>> {
        let mut out = Vec::new();
        for t in range {
            let (rates, d) = evaluate_triple(model, &triple_from(&grids, split(t)), cfg)?;
            if feasible(&d, &cfg.distortion_targets) {
                out.push((t, rates, d));
            }
        }
        Ok(out)
    });
    let mut feasible_pts = Vec::new();
    for c in chunks {
        feasible_pts.extend(c?);
    }
    let opt = feasible_pts
        .iter()
        .map(|p| cfg.objective.value(&p.1))
        .fold(f64::INFINITY, f64::min);
    let cand = feasible_pts
        .into_iter()
        .filter(|p| cfg.objective.value(&p.1) <= opt + FEASIBILITY_TOL)
        .map(|(t, rates, distortions)| FrontierPoint {
            rates,
            distortions,
            channels: triple_from(&grids, split(t)),
            bound_form: BoundForm::Inner,
            grid_index: Some(t as u128),
        })
        .collect();
    let points = select(cand, cfg.objective);
    finish(points, cfg, &grids, |m| {
        let t = triple_from_matrices(&grids, m);
        evaluate_triple(model, &t, cfg)
    })
}
