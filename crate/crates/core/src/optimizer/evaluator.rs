//! Rate and distortion of one encoder's channel when that encoder can be
//! treated on its own: `X - W` with decoder side information `S`, rate
//! `I(X;W) - I(W;S)` and the Bayes-optimal decoder from `(W, S)`.

use alloc::vec;
use alloc::vec::Vec;

use super::grid::ChannelGrid;
use crate::math::plogp;
use crate::prob::JointPmf;
use crate::source::DistortionMeasure;
use crate::{Error, Result, CLAMP_TOL};

#[derive(Debug, Clone)]
pub struct EncoderProblem {
    nx: usize,
    ns: usize,
    /// `p(x, s)`, x-major.
    q: Vec<f64>,
    px: Vec<f64>,
    h_s: f64,
    nr: usize,
    cost: Vec<f64>,
}

/// Scratch space reused across evaluations.
pub struct Scratch {
    ws: Vec<f64>,
    acc: Vec<f64>,
}

impl EncoderProblem {
    /// `source` and `side` name axes of `joint`; `side` may be empty.
    pub fn new(joint: &JointPmf, source: &str, side: &[&str], d: &DistortionMeasure) -> Result<Self> {
        let x = joint.axis(source)?;
        if !x.same_symbols(d.source()) {
            return Err(Error::Model(alloc::format!(
                "distortion alphabet for {source} does not match the model"
            )));
        }
        let nx = x.size();
        let (q, ns) = if side.is_empty() {
            (joint.marginalize(&[source])?.probs().to_vec(), 1)
        } else {
            let mut order = vec![source];
            order.extend_from_slice(side);
            let p = joint.project(&order)?;
            let ns = p.len() / nx;
            (p.probs().to_vec(), ns)
        };
        let px: Vec<f64> = q.chunks(ns).map(|r| r.iter().sum()).collect();
        let mut ps = vec![0.0; ns];
        for r in q.chunks(ns) {
            for (s, p) in r.iter().enumerate() {
                ps[s] += p;
            }
        }
        Ok(EncoderProblem {
            nx,
            ns,
            q,
            px,
            h_s: ps.iter().map(|&p| plogp(p)).sum(),
            nr: d.recon().size(),
            cost: d.costs().to_vec(),
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn scratch(&self, nw: usize) -> Scratch {
        Scratch {
            ws: vec![0.0; nw * self.ns],
            acc: vec![0.0; self.nr],
        }
    }

    /// `(rate, distortion)` of the channel with rows `rows[x]` (each of
    /// length `nw`) and row entropies `row_h[x]`.
    pub fn evaluate<'a>(
        &self,
        rows: impl Fn(usize) -> &'a [f64],
        row_h: impl Fn(usize) -> f64,
        nw: usize,
        sc: &mut Scratch,
    ) -> (f64, f64) {
        let ns = self.ns;
        sc.ws.iter_mut().for_each(|v| *v = 0.0);
        let mut h_w_given_x = 0.0;
        for x in 0..self.nx {
            let row = rows(x);
            h_w_given_x += self.px[x] * row_h(x);
            let qx = &self.q[x * ns..(x + 1) * ns];
            for (w, &c) in row.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let dst = &mut sc.ws[w * ns..(w + 1) * ns];
                for (d, &p) in dst.iter_mut().zip(qx) {
                    *d += p * c;
                }
            }
        }
        let h_ws: f64 = sc.ws.iter().map(|&p| plogp(p)).sum();
        let rate = crate::math::clamp_nonneg(h_ws - self.h_s - h_w_given_x, CLAMP_TOL).max(0.0);

        let mut dist = 0.0;
        for w in 0..nw {
            for s in 0..ns {
                if sc.ws[w * ns + s] == 0.0 {
                    continue;
                }
                sc.acc.iter_mut().for_each(|v| *v = 0.0);
                for x in 0..self.nx {
                    let m = self.q[x * ns + s] * rows(x)[w];
                    if m == 0.0 {
                        continue;
                    }
                    let cost = &self.cost[x * self.nr..(x + 1) * self.nr];
                    for (a, &c) in sc.acc.iter_mut().zip(cost) {
                        *a += m * c;
                    }
                }
                dist += sc.acc.iter().copied().fold(f64::INFINITY, f64::min);
            }
        }
        (rate, dist)
    }

    /// Evaluate grid channel `index`; `digits` is scratch of length `nx`.
    pub fn evaluate_grid(&self, grid: &ChannelGrid, index: usize, digits: &mut [usize], sc: &mut Scratch) -> (f64, f64) {
        grid.digits(index, digits);
        let d: &[usize] = digits;
        self.evaluate(|x| grid.row_probs(d[x]), |x| grid.row_entropy(d[x]), grid.out().size(), sc)
    }

    /// Evaluate a flattened row-major channel matrix.
    pub fn evaluate_matrix(&self, entries: &[f64], nw: usize, sc: &mut Scratch) -> (f64, f64) {
        self.evaluate(
            |x| &entries[x * nw..(x + 1) * nw],
            |x| entries[x * nw..(x + 1) * nw].iter().map(|&p| plogp(p)).sum(),
            nw,
            sc,
        )
    }
}
