use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::prob::JointPmf;
use crate::{Error, Result};

/// Robust typicality with slack `epsilon` at blocklength `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalityParams {
    pub epsilon: f64,
    pub n: usize,
}

impl TypicalityParams {
    pub fn new(epsilon: f64, n: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {epsilon} must lie in (0, 1)")));
        }
        if n == 0 {
            return Err(Error::Config("blocklength must be positive".into()));
        }
        Ok(TypicalityParams { epsilon, n })
    }
}

/// Typicality test against a fixed pmf, reusable across many sequences.
#[derive(Debug, Clone)]
pub struct TypicalSet {
    probs: Vec<f64>,
    sizes: Vec<usize>,
    strides: Vec<usize>,
    params: TypicalityParams,
}

impl TypicalSet {
    pub fn new(p: &JointPmf, params: TypicalityParams) -> Self {
        let sizes: Vec<usize> = p.axes().iter().map(|a| a.size()).collect();
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        TypicalSet {
            probs: p.probs().to_vec(),
            sizes,
            strides,
            params,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.probs.len()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Whether a table of joint-symbol counts (summing to `n`) is typical.
    pub fn counts_typical(&self, counts: &[u32]) -> bool {
        let n = self.params.n as f64;
        let eps = self.params.epsilon;
        self.probs.iter().zip(counts).all(|(&p, &c)| {
            if p == 0.0 {
                c == 0
            } else {
                (c as f64 / n - p).abs() <= eps * p
            }
        })
    }

    /// Check sequences given one per axis, each of length `n`.
    pub fn check(&self, seqs: &[&[usize]]) -> Result<bool> {
        if seqs.len() != self.sizes.len() {
            return Err(Error::Input(format!(
                "expected {} sequences, got {}",
                self.sizes.len(),
                seqs.len()
            )));
        }
        for (k, s) in seqs.iter().enumerate() {
            if s.len() != self.params.n {
                return Err(Error::Input(format!(
                    "sequence {k} has length {}, expected {}",
                    s.len(),
                    self.params.n
                )));
            }
            if let Some(bad) = s.iter().find(|&&v| v >= self.sizes[k]) {
                return Err(Error::Input(format!("sequence {k} has symbol {bad} outside its alphabet")));
            }
        }
        let mut counts = vec![0u32; self.probs.len()];
        for t in 0..self.params.n {
            let cell: usize = seqs.iter().zip(&self.strides).map(|(s, st)| s[t] * st).sum();
            counts[cell] += 1;
        }
        Ok(self.counts_typical(&counts))
    }
}

/// Whether the tuple of sequences (one per axis of `p`, in axis order) is
/// robustly typical: every joint symbol's frequency is within `epsilon`
/// times its probability, and zero-probability symbols never occur.
pub fn is_typical(seqs: &[&[usize]], p: &JointPmf, params: TypicalityParams) -> Result<bool> {
    TypicalSet::new(p, params).check(seqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    fn bern(p1: f64) -> JointPmf {
        JointPmf::new(vec![Alphabet::binary("X")], vec![1.0 - p1, p1]).unwrap()
    }

    fn ones(n: usize, k: usize) -> Vec<usize> {
        (0..n).map(|i| usize::from(i < k)).collect()
    }

    #[test]
    fn fair_bit_exact_half() {
        for eps in [1e-6, 0.1, 0.9] {
            let prm = TypicalityParams::new(eps, 10).unwrap();
            assert!(is_typical(&[&ones(10, 5)], &bern(0.5), prm).unwrap());
        }
    }

    #[test]
    fn point_mass_rejects_other_symbols() {
        let prm = TypicalityParams::new(0.5, 10).unwrap();
        assert!(!is_typical(&[&ones(10, 1)], &bern(0.0), prm).unwrap());
        assert!(is_typical(&[&ones(10, 0)], &bern(0.0), prm).unwrap());
    }

    #[test]
    fn bernoulli_tenth_boundary() {
        let prm = TypicalityParams::new(0.3, 100).unwrap();
        assert!(!is_typical(&[&ones(100, 14)], &bern(0.1), prm).unwrap());
        assert!(is_typical(&[&ones(100, 12)], &bern(0.1), prm).unwrap());
    }

    #[test]
    fn length_mismatch_is_input_error() {
        let prm = TypicalityParams::new(0.3, 100).unwrap();
        assert!(matches!(is_typical(&[&ones(99, 10)], &bern(0.1), prm), Err(Error::Input(_))));
        assert!(matches!(is_typical(&[&[2; 100][..]], &bern(0.1), prm), Err(Error::Input(_))));
        assert!(TypicalityParams::new(1.0, 5).is_err());
        assert!(TypicalityParams::new(0.1, 0).is_err());
    }
}
