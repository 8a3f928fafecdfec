//! Monte Carlo experiments at finite blocklength: the Markov-lemma
//! typicality experiment and the random-binning scheme with joint
//! typicality encoding and decoding.

mod rng;
mod typical;

pub use typical::{is_typical, TypicalSet, TypicalityParams};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::labels::{AUX, F, SOURCES, W1, W2, W3, Z};
use crate::math::ceil;
use crate::par::fold_chunks;
use crate::prob::JointPmf;
use crate::region::TestChannelTriple;
use crate::source::{optimal_decoder, DecoderRule, DistortionMeasure, SourceModel};
use crate::{Error, Result};
use rng::{stream, Categorical, ROLE_BINS, ROLE_CHANNEL, ROLE_CODEBOOK, ROLE_SOURCE};

/// Largest codebook, as a power of two.
pub const MAX_CODEBOOK_BITS: u32 = 20;
pub const MAX_BLOCKLENGTH: usize = 2000;
/// Largest expected number of index triples the decoder may have to test,
/// as a power of two.
pub const MAX_CANDIDATE_BITS: u32 = 24;

const TRIAL_CHUNK: usize = 8;

/// Draws i.i.d. source blocks from a model.
struct SourceSampler {
    cat: Categorical,
    sizes: [usize; 5],
}

impl SourceSampler {
    fn new(model: &SourceModel) -> Self {
        let j = model.joint();
        let sizes = [0, 1, 2, 3, 4].map(|k| j.axes()[k].size());
        SourceSampler {
            cat: Categorical::new(j.probs()),
            sizes,
        }
    }

    /// Fill `out[k][t]` with axis `k` of symbol `t`; returns the flat cell
    /// index of each symbol.
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng, n: usize, out: &mut [Vec<u32>; 5], cells: &mut Vec<usize>) {
        cells.clear();
        for o in out.iter_mut() {
            o.clear();
        }
        for _ in 0..n {
            let cell = self.cat.draw(rng);
            cells.push(cell);
            let mut rem = cell;
            for k in (0..5).rev() {
                out[k].push((rem % self.sizes[k]) as u32);
                rem /= self.sizes[k];
            }
        }
    }
}

fn channel_samplers(ch: &crate::prob::ConditionalPmf) -> Vec<Categorical> {
    (0..ch.n_rows()).map(|r| Categorical::new(ch.row(r))).collect()
}

/// Counts of a Markov-lemma experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LemmaCounts {
    pub trials: usize,
    /// Source blocks that passed the typicality filter.
    pub accepted: usize,
    /// Accepted blocks whose full eight-variable block was typical.
    pub typical: usize,
}

/// Sample source blocks, keep the typical ones, pass each source through
/// its test channel symbol by symbol and count how often the full block
/// `(x1, x2, x3, z, f, w1, w2, w3)` is typical.
pub fn markov_lemma_counts(
    model: &SourceModel,
    channels: &TestChannelTriple,
    params: TypicalityParams,
    trials: usize,
    seed: u64,
) -> Result<LemmaCounts> {
    let ext = model.extend_with_test_channels(channels)?;
    let src_set = TypicalSet::new(model.joint(), params);
    let ext_set = TypicalSet::new(&ext, params);
    let sampler = SourceSampler::new(model);
    let chans: Vec<Vec<Categorical>> = channels.channels().iter().map(channel_samplers).collect();
    let ext_strides = ext_set.strides().to_vec();
    let n = params.n;

    let parts = fold_chunks(trials, TRIAL_CHUNK, |range| {
        let mut acc = LemmaCounts::default();
        let mut seqs: [Vec<u32>; 5] = Default::default();
        let mut cells = Vec::with_capacity(n);
        let mut counts = vec![0u32; src_set.n_cells()];
        let mut ext_counts = vec![0u32; ext_set.n_cells()];
        let mut w = [vec![0u32; n], vec![0u32; n], vec![0u32; n]];
        for t in range {
            acc.trials += 1;
            let mut rng = stream(seed, t as u64, ROLE_SOURCE);
            sampler.draw(&mut rng, n, &mut seqs, &mut cells);
            counts.iter_mut().for_each(|c| *c = 0);
            for &c in &cells {
                counts[c] += 1;
            }
            if !src_set.counts_typical(&counts) {
                continue;
            }
            acc.accepted += 1;
            for (m, wm) in w.iter_mut().enumerate() {
                let mut r = stream(seed, t as u64, ROLE_CHANNEL + m as u64);
                for (k, slot) in wm.iter_mut().enumerate() {
                    *slot = chans[m][seqs[m][k] as usize].draw(&mut r) as u32;
                }
            }
            ext_counts.iter_mut().for_each(|c| *c = 0);
            for k in 0..n {
                let mut cell = 0;
                for a in 0..5 {
                    cell += seqs[a][k] as usize * ext_strides[a];
                }
                for m in 0..3 {
                    cell += w[m][k] as usize * ext_strides[5 + m];
                }
                ext_counts[cell] += 1;
            }
            if ext_set.counts_typical(&ext_counts) {
                acc.typical += 1;
            }
        }
        acc
    });
    Ok(parts.into_iter().fold(LemmaCounts::default(), |a, b| LemmaCounts {
        trials: a.trials + b.trials,
        accepted: a.accepted + b.accepted,
        typical: a.typical + b.typical,
    }))
}

/// Fraction of typical source blocks whose channel outputs are jointly
/// typical with them. Deterministic in `seed`.
pub fn markov_lemma_trial(
    model: &SourceModel,
    channels: &TestChannelTriple,
    params: TypicalityParams,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let c = markov_lemma_counts(model, channels, params, trials, seed)?;
    if c.accepted == 0 {
        return Err(Error::InsufficientSamples {
            trials: c.trials,
            accepted: 0,
            acceptance_rate: 0.0,
        });
    }
    Ok(c.typical as f64 / c.accepted as f64)
}

/// Parameters of a random-binning experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningConfig {
    /// Bin rates `R_m` (bits per symbol actually sent).
    pub rates: [f64; 3],
    /// Codebook rates `R'_m >= R_m`.
    pub rates_prime: [f64; 3],
    pub params: TypicalityParams,
    pub trials: usize,
    pub seed: u64,
    pub measures: [DistortionMeasure; 3],
}

/// `ceil(n R)` with a small allowance for rates that are exact multiples of
/// `1/n` but carry rounding error.
pub fn index_bits(n: usize, rate: f64) -> u32 {
    let x = n as f64 * rate;
    let b = ceil(x - 1e-9);
    if b <= 0.0 {
        0
    } else {
        b as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassRates {
    pub event1: f64,
    pub event2: f64,
    pub event3: f64,
    pub decode_failure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: usize,
    /// Some encoder found no codeword typical with its source block.
    pub event1_count: usize,
    /// Codewords found, but the chosen triple is not typical with `(Z, F)`.
    pub event2_count: usize,
    /// The chosen triple is typical but another triple from the received
    /// bins is too.
    pub event3_count: usize,
    /// Trials whose decoder output is missing or wrong.
    pub decode_failures: usize,
    pub successes: usize,
    /// Mean per-letter distortion over successful trials (zero when there
    /// are none).
    pub empirical_distortions: [f64; 3],
    pub per_class_rates: ClassRates,
    /// `ceil(n R'_m)` and `ceil(n R_m)`.
    pub codebook_bits: [u32; 3],
    pub bin_bits: [u32; 3],
}

#[derive(Default)]
struct Tally {
    trials: usize,
    e1: usize,
    e2: usize,
    e3: usize,
    fail: usize,
    ok: usize,
    dist: [f64; 3],
}

struct Encoder {
    word_cat: Categorical,
    pair: TypicalSet,
    /// Stride of `W_m` in the `(X_m, W_m)` table.
    nw: usize,
    side: TypicalSet,
    bits: u32,
    bin_bits: u32,
}

impl Encoder {
    fn word(&self, seed: u64, trial: u64, m: usize, s: u64, n: usize, out: &mut Vec<u32>) {
        let mut r = stream(seed, trial, ROLE_CODEBOOK + m as u64);
        r.set_word_pos(s as u128 * n as u128 * 2);
        out.clear();
        for _ in 0..n {
            out.push(self.word_cat.draw(&mut r) as u32);
        }
    }

    fn bin(&self, seed: u64, trial: u64, m: usize, s: u64) -> u64 {
        if self.bin_bits == self.bits {
            return s;
        }
        if self.bin_bits == 0 {
            return 0;
        }
        let mut r = stream(seed, trial, ROLE_BINS + m as u64);
        r.set_word_pos(s as u128 * 2);
        r.next_u64() >> (64 - self.bin_bits)
    }
}

fn table_typical(set: &TypicalSet, counts: &mut [u32], cells: impl Iterator<Item = usize>) -> bool {
    counts.iter_mut().for_each(|c| *c = 0);
    for c in cells {
        counts[c] += 1;
    }
    set.counts_typical(counts)
}

/// Run the random-binning scheme. Each trial draws a fresh source block,
/// fresh i.i.d. codebooks from `p(w_m)` and fresh uniform bin maps; encoders
/// take the lowest-index codeword typical with their source block, and the
/// decoder scans the received bins in lexicographic `(s1, s2, s3)` order for
/// triples typical with `(z, f)`.
pub fn run_binning_trials(model: &SourceModel, channels: &TestChannelTriple, cfg: &BinningConfig) -> Result<SimReport> {
    let n = cfg.params.n;
    if n > MAX_BLOCKLENGTH {
        return Err(Error::Config(format!("blocklength {n} exceeds the cap of {MAX_BLOCKLENGTH}")));
    }
    let mut bits = [0u32; 3];
    let mut bin_bits = [0u32; 3];
    for m in 0..3 {
        let (r, rp) = (cfg.rates[m], cfg.rates_prime[m]);
        if !(r.is_finite() && rp.is_finite() && r >= 0.0 && rp >= 0.0) {
            return Err(Error::Config(format!("rates for encoder {} must be finite and nonnegative", m + 1)));
        }
        if r > rp + 1e-12 {
            return Err(Error::Config(format!(
                "encoder {}: bin rate {r} exceeds codebook rate {rp}",
                m + 1
            )));
        }
        bits[m] = index_bits(n, rp);
        bin_bits[m] = index_bits(n, r).min(bits[m]);
        if bits[m] > MAX_CODEBOOK_BITS {
            return Err(Error::Config(format!(
                "encoder {} needs 2^{} codewords (n = {n}, R' = {rp}); the cap is 2^{MAX_CODEBOOK_BITS}",
                m + 1,
                bits[m]
            )));
        }
    }
    let spread: u32 = (0..3).map(|m| bits[m] - bin_bits[m]).sum();
    if spread > MAX_CANDIDATE_BITS {
        return Err(Error::Config(format!(
            "decoding would test about 2^{spread} index triples; the cap is 2^{MAX_CANDIDATE_BITS}"
        )));
    }
    for (m, d) in cfg.measures.iter().enumerate() {
        if d.source().name() != SOURCES[m] {
            return Err(Error::Config(format!("distortion measure {} must be for {}", m + 1, SOURCES[m])));
        }
    }

    let ext = model.extend_with_test_channels(channels)?;
    let dec_axes = [W1, W2, W3, Z, F];
    let p_dec = ext.project(&dec_axes)?;
    let dec_set = TypicalSet::new(&p_dec, cfg.params);
    let dec_strides = dec_set.strides().to_vec();
    let p12 = ext.project(&[W1, W2, Z, F])?;
    let set12 = TypicalSet::new(&p12, cfg.params);
    let s12 = set12.strides().to_vec();
    let side_sizes = [ext.axis(Z)?.size(), ext.axis(F)?.size()];
    let decoders: Vec<DecoderRule> = cfg
        .measures
        .iter()
        .map(|d| optimal_decoder(&ext, d))
        .collect::<Result<_>>()?;

    let enc: Vec<Encoder> = (0..3)
        .map(|m| -> Result<Encoder> {
            let pw: JointPmf = ext.marginalize(&[AUX[m]])?;
            let pair = ext.project(&[SOURCES[m], AUX[m]])?;
            let side = ext.project(&[AUX[m], Z, F])?;
            Ok(Encoder {
                word_cat: Categorical::new(pw.probs()),
                nw: ext.axis(AUX[m])?.size(),
                pair: TypicalSet::new(&pair, cfg.params),
                side: TypicalSet::new(&side, cfg.params),
                bits: bits[m],
                bin_bits: bin_bits[m],
            })
        })
        .collect::<Result<_>>()?;

    let sampler = SourceSampler::new(model);
    let seed = cfg.seed;

    let parts = fold_chunks(cfg.trials, TRIAL_CHUNK, |range| {
        let mut tally = Tally::default();
        let mut seqs: [Vec<u32>; 5] = Default::default();
        let mut cells = Vec::with_capacity(n);
        let mut word = Vec::with_capacity(n);
        let mut pair_counts: Vec<Vec<u32>> = enc.iter().map(|e| vec![0; e.pair.n_cells()]).collect();
        let mut side_counts: Vec<Vec<u32>> = enc.iter().map(|e| vec![0; e.side.n_cells()]).collect();
        let mut dec_counts = vec![0u32; dec_set.n_cells()];
        let mut c12 = vec![0u32; set12.n_cells()];
        for t in range {
            let trial = t as u64;
            tally.trials += 1;
            let mut rng = stream(seed, trial, ROLE_SOURCE);
            sampler.draw(&mut rng, n, &mut seqs, &mut cells);
            let zf: Vec<usize> = (0..n)
                .map(|k| seqs[3][k] as usize * side_sizes[1] + seqs[4][k] as usize)
                .collect();

            // encoding
            let mut chosen: [Option<(u64, Vec<u32>)>; 3] = [None, None, None];
            for m in 0..3 {
                let e = &enc[m];
                let x = &seqs[m];
                for s in 0..(1u64 << e.bits) {
                    e.word(seed, trial, m, s, n, &mut word);
                    let ok = table_typical(
                        &e.pair,
                        &mut pair_counts[m],
                        (0..n).map(|k| x[k] as usize * e.nw + word[k] as usize),
                    );
                    if ok {
                        chosen[m] = Some((s, word.clone()));
                        break;
                    }
                }
            }
            if chosen.iter().any(Option::is_none) {
                tally.e1 += 1;
                tally.fail += 1;
                continue;
            }
            let chosen: Vec<(u64, Vec<u32>)> = chosen.into_iter().map(Option::unwrap).collect();
            let true_cell = |k: usize, w: [&Vec<u32>; 3]| {
                w[0][k] as usize * dec_strides[0]
                    + w[1][k] as usize * dec_strides[1]
                    + w[2][k] as usize * dec_strides[2]
                    + seqs[3][k] as usize * dec_strides[3]
                    + seqs[4][k] as usize * dec_strides[4]
            };
            let truth_typical = table_typical(
                &dec_set,
                &mut dec_counts,
                (0..n).map(|k| true_cell(k, [&chosen[0].1, &chosen[1].1, &chosen[2].1])),
            );

            // decoding: members of each received bin that are typical with (z, f)
            let mut lists: [Vec<(u64, Vec<u32>)>; 3] = Default::default();
            for m in 0..3 {
                let e = &enc[m];
                let t_m = e.bin(seed, trial, m, chosen[m].0);
                let members: Vec<u64> = if e.bin_bits == e.bits {
                    vec![t_m]
                } else {
                    (0..(1u64 << e.bits)).filter(|&s| e.bin(seed, trial, m, s) == t_m).collect()
                };
                let side_stride = side_sizes[0] * side_sizes[1];
                for s in members {
                    e.word(seed, trial, m, s, n, &mut word);
                    if table_typical(
                        &e.side,
                        &mut side_counts[m],
                        (0..n).map(|k| word[k] as usize * side_stride + zf[k]),
                    ) {
                        lists[m].push((s, word.clone()));
                    }
                }
            }
            let mut found: Vec<[u64; 3]> = Vec::new();
            'scan: for (s1, w1) in &lists[0] {
                for (s2, w2) in &lists[1] {
                    let pair_ok = table_typical(
                        &set12,
                        &mut c12,
                        (0..n).map(|k| {
                            w1[k] as usize * s12[0]
                                + w2[k] as usize * s12[1]
                                + seqs[3][k] as usize * s12[2]
                                + seqs[4][k] as usize * s12[3]
                        }),
                    );
                    if !pair_ok {
                        continue;
                    }
                    for (s3, w3) in &lists[2] {
                        if table_typical(&dec_set, &mut dec_counts, (0..n).map(|k| true_cell(k, [w1, w2, w3]))) {
                            found.push([*s1, *s2, *s3]);
                            if found.len() == 2 {
                                break 'scan;
                            }
                        }
                    }
                }
            }
            let truth = [chosen[0].0, chosen[1].0, chosen[2].0];
            if !truth_typical {
                tally.e2 += 1;
            } else if found.len() >= 2 {
                tally.e3 += 1;
            }
            if found.len() == 1 && found[0] == truth {
                tally.ok += 1;
                for (i, g) in decoders.iter().enumerate() {
                    let mut sum = 0.0;
                    for k in 0..n {
                        let cell = true_cell(k, [&chosen[0].1, &chosen[1].1, &chosen[2].1]);
                        sum += cfg.measures[i].cost(seqs[i][k] as usize, g.decode(cell));
                    }
                    tally.dist[i] += sum / n as f64;
                }
            } else {
                tally.fail += 1;
            }
        }
        tally
    });

    let mut total = Tally::default();
    for p in parts {
        total.trials += p.trials;
        total.e1 += p.e1;
        total.e2 += p.e2;
        total.e3 += p.e3;
        total.fail += p.fail;
        total.ok += p.ok;
        for i in 0..3 {
            total.dist[i] += p.dist[i];
        }
    }
    let frac = |c: usize| if total.trials == 0 { 0.0 } else { c as f64 / total.trials as f64 };
    let dist = if total.ok == 0 {
        [0.0; 3]
    } else {
        total.dist.map(|d| d / total.ok as f64)
    };
    Ok(SimReport {
        trials: total.trials,
        event1_count: total.e1,
        event2_count: total.e2,
        event3_count: total.e3,
        decode_failures: total.fail,
        successes: total.ok,
        empirical_distortions: dist,
        per_class_rates: ClassRates {
            event1: frac(total.e1),
            event2: frac(total.e2),
            event3: frac(total.e3),
            decode_failure: frac(total.fail),
        },
        codebook_bits: bits,
        bin_bits,
    })
}
