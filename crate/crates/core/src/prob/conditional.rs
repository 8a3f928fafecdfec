use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::joint::{checked_size, normalize};
use super::Alphabet;
use crate::{Error, Result};

/// A conditional pmf `p(out | given)`: one distribution over `out_axis` for
/// every joint assignment of `given_axes` (row-major in the order listed).
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPmf {
    given: Vec<Alphabet>,
    out: Alphabet,
    rows: Vec<f64>,
    defined: Vec<bool>,
}

impl ConditionalPmf {
    /// Build from flattened rows. Each row must sum to one within `1e-9`
    /// and is renormalised.
    pub fn new(given: Vec<Alphabet>, out: Alphabet, mut rows: Vec<f64>) -> Result<Self> {
        let n_rows = checked_size(&given)?;
        let k = out.size();
        if rows.len() != n_rows * k {
            return Err(Error::InvalidDistribution(format!(
                "p({}|..) expects {} entries, got {}",
                out.name(),
                n_rows * k,
                rows.len()
            )));
        }
        for r in 0..n_rows {
            let what = format!("p({}|..) row {r}", out.name());
            normalize(&mut rows[r * k..(r + 1) * k], &what)?;
        }
        Ok(ConditionalPmf {
            given,
            out,
            rows,
            defined: vec![true; n_rows],
        })
    }

    pub fn from_rows(given: Vec<Alphabet>, out: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = out.size();
        if let Some(bad) = rows.iter().position(|r| r.len() != k) {
            return Err(Error::InvalidDistribution(format!(
                "p({}|..) row {bad} has {} entries, expected {k}",
                out.name(),
                rows[bad].len()
            )));
        }
        Self::new(given, out, rows.concat())
    }

    pub(crate) fn from_parts(
        given: Vec<Alphabet>,
        out: Alphabet,
        rows: Vec<f64>,
        defined: Vec<bool>,
    ) -> Self {
        ConditionalPmf {
            given,
            out,
            rows,
            defined,
        }
    }

    /// `W = X`, with `W` carrying `input`'s symbols.
    pub fn identity(input: &Alphabet, out_name: impl Into<String>) -> Self {
        let k = input.size();
        let mut rows = vec![0.0; k * k];
        for i in 0..k {
            rows[i * k + i] = 1.0;
        }
        ConditionalPmf {
            given: vec![input.clone()],
            out: input.renamed(out_name),
            rows,
            defined: vec![true; k],
        }
    }

    /// `W` always equal to its first symbol, over a single-symbol alphabet.
    pub fn constant(input: &Alphabet, out_name: impl Into<String>) -> Self {
        let out = Alphabet::indexed(out_name, 1).expect("one symbol");
        ConditionalPmf {
            given: vec![input.clone()],
            out,
            rows: vec![1.0; input.size()],
            defined: vec![true; input.size()],
        }
    }

    /// Symmetric channel: keep the symbol with probability `1 - crossover`,
    /// otherwise move uniformly to one of the others. For binary alphabets
    /// this is the binary symmetric channel.
    pub fn symmetric(input: &Alphabet, out_name: impl Into<String>, crossover: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&crossover) {
            return Err(Error::InvalidDistribution(format!(
                "crossover {crossover} outside [0, 1]"
            )));
        }
        let k = input.size();
        if k == 1 {
            return Ok(Self::identity(input, out_name));
        }
        let off = crossover / (k - 1) as f64;
        let mut rows = vec![off; k * k];
        for i in 0..k {
            rows[i * k + i] = 1.0 - crossover;
        }
        Self::new(vec![input.clone()], input.renamed(out_name), rows)
    }

    pub fn given_axes(&self) -> &[Alphabet] {
        &self.given
    }

    pub fn out_axis(&self) -> &Alphabet {
        &self.out
    }

    pub fn n_rows(&self) -> usize {
        self.defined.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let k = self.out.size();
        &self.rows[r * k..(r + 1) * k]
    }

    /// Flattened rows, row-major.
    pub fn entries(&self) -> &[f64] {
        &self.rows
    }

    /// False when the row's conditioning event had zero probability.
    pub fn is_defined(&self, r: usize) -> bool {
        self.defined[r]
    }

    /// Same rows with the output relabelled.
    pub fn with_out_name(&self, name: impl Into<String>) -> Self {
        let mut c = self.clone();
        c.out = self.out.renamed(name);
        c
    }

    /// Largest entrywise difference over rows defined in both.
    pub fn max_abs_diff(&self, other: &ConditionalPmf) -> Result<f64> {
        if self.rows.len() != other.rows.len() || self.n_rows() != other.n_rows() {
            return Err(Error::InvalidQuery("channel shapes differ".into()));
        }
        let k = self.out.size();
        let mut worst: f64 = 0.0;
        for r in 0..self.n_rows() {
            if !(self.defined[r] && other.defined[r]) {
                continue;
            }
            for j in 0..k {
                worst = worst.max(crate::math::abs(self.rows[r * k + j] - other.rows[r * k + j]));
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_must_be_stochastic() {
        let x = Alphabet::binary("X");
        let w = Alphabet::binary("W");
        assert!(ConditionalPmf::from_rows(vec![x.clone()], w.clone(), vec![vec![0.5, 0.4], vec![1.0, 0.0]]).is_err());
        assert!(ConditionalPmf::from_rows(vec![x.clone()], w.clone(), vec![vec![1.0]]).is_err());
        let c = ConditionalPmf::from_rows(vec![x], w, vec![vec![0.25, 0.75], vec![1.0, 0.0]]).unwrap();
        assert_eq!(c.row(0), &[0.25, 0.75]);
    }

    #[test]
    fn symmetric_channel_rows() {
        let x = Alphabet::indexed("X", 3).unwrap();
        let c = ConditionalPmf::symmetric(&x, "W", 0.3).unwrap();
        assert!((c.row(1)[1] - 0.7).abs() < 1e-15);
        assert!((c.row(1)[0] - 0.15).abs() < 1e-15);
    }
}
