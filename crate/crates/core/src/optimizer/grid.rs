use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, plogp, round};
use crate::prob::{Alphabet, ConditionalPmf};
use crate::{Error, Result};

/// Longest channel stream a grid may describe.
pub const MAX_GRID_CHANNELS: u128 = 100_000_000;

/// Every channel `p(w|x)` whose entries are multiples of `1/steps`.
///
/// A row is a composition of `steps` into `|W|` parts; rows are listed in
/// lexicographic order of their parts. A channel is one row per input
/// symbol, and channel indices are mixed-radix numbers over the input
/// symbols with the first input most significant.
#[derive(Debug, Clone)]
pub struct ChannelGrid {
    input: Alphabet,
    out: Alphabet,
    steps: usize,
    rows: Vec<Vec<u32>>,
    row_probs: Vec<f64>,
    row_entropy: Vec<f64>,
    len: usize,
}

/// Number of grid steps for `grid_step`, which must divide one evenly.
pub fn grid_steps(grid_step: f64) -> Result<usize> {
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::Config(format!("grid step {grid_step} must lie in (0, 1]")));
    }
    let steps = round(1.0 / grid_step);
    if abs(steps * grid_step - 1.0) > 1e-9 {
        return Err(Error::Config(format!(
            "grid step {grid_step} does not divide 1 into an integer number of steps"
        )));
    }
    Ok(steps as usize)
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(left as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k as u32);
            rec(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

impl ChannelGrid {
    pub fn new(input: &Alphabet, out_name: impl Into<String>, w_size: usize, grid_step: f64) -> Result<Self> {
        if w_size == 0 {
            return Err(Error::Config("auxiliary alphabet size must be at least 1".into()));
        }
        let steps = grid_steps(grid_step)?;
        let n_rows = binomial((steps + w_size - 1) as u128, (w_size - 1) as u128);
        let total = (0..input.size()).fold(1u128, |acc, _| acc.saturating_mul(n_rows));
        if total > MAX_GRID_CHANNELS {
            return Err(Error::Config(format!(
                "grid of {total} channels exceeds the cap of {MAX_GRID_CHANNELS}; use a coarser step"
            )));
        }
        let rows = compositions(steps, w_size);
        let row_probs: Vec<f64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&k| k as f64 / steps as f64))
            .collect();
        let row_entropy = row_probs.chunks(w_size).map(|r| r.iter().map(|&p| plogp(p)).sum()).collect();
        Ok(ChannelGrid {
            input: input.clone(),
            out: Alphabet::indexed(out_name, w_size)?,
            steps,
            rows,
            row_probs,
            row_entropy,
            len: total as usize,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn out(&self) -> &Alphabet {
        &self.out
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Parts of grid row `r` (they sum to `steps`).
    pub fn row_parts(&self, r: usize) -> &[u32] {
        &self.rows[r]
    }

    pub fn row_probs(&self, r: usize) -> &[f64] {
        let k = self.out.size();
        &self.row_probs[r * k..(r + 1) * k]
    }

    /// Entropy in bits of grid row `r`.
    pub fn row_entropy(&self, r: usize) -> f64 {
        self.row_entropy[r]
    }

    /// Grid-row index of each input symbol for channel `index`.
    pub fn digits(&self, index: usize, out: &mut [usize]) {
        let base = self.rows.len();
        let mut rem = index;
        for d in out.iter_mut().rev() {
            *d = rem % base;
            rem /= base;
        }
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.rows.len() + d)
    }

    pub fn channel(&self, index: usize) -> ConditionalPmf {
        let mut d = vec![0; self.input.size()];
        self.digits(index, &mut d);
        let entries = d.iter().flat_map(|&r| self.row_probs(r).iter().copied()).collect();
        ConditionalPmf::new(vec![self.input.clone()], self.out.clone(), entries)
            .expect("grid rows are stochastic")
    }

    pub fn iter(&self) -> impl Iterator<Item = ConditionalPmf> + '_ {
        (0..self.len).map(move |i| self.channel(i))
    }
}

/// Stream every grid channel from `alphabet` to a `w_size`-symbol output
/// named `W`, in grid order.
pub fn enumerate_channels(
    alphabet: &Alphabet,
    w_size: usize,
    grid_step: f64,
) -> Result<impl Iterator<Item = ConditionalPmf>> {
    let grid = ChannelGrid::new(alphabet, "W", w_size, grid_step)?;
    Ok((0..grid.len()).map(move |i| grid.channel(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let x = Alphabet::binary("X");
        assert_eq!(enumerate_channels(&x, 1, 0.5).unwrap().count(), 1);
        assert_eq!(enumerate_channels(&x, 2, 0.5).unwrap().count(), 9);
        assert_eq!(enumerate_channels(&x, 2, 0.25).unwrap().count(), 25);
        assert_eq!(ChannelGrid::new(&x, "W", 3, 0.01).unwrap().len(), 5151 * 5151);
    }

    #[test]
    fn order_and_rows() {
        let x = Alphabet::binary("X");
        let g = ChannelGrid::new(&x, "W", 2, 0.5).unwrap();
        assert_eq!(g.row_parts(0), &[0, 2]);
        assert_eq!(g.row_parts(2), &[2, 0]);
        let c = g.channel(5); // digits (1, 2)
        assert_eq!(c.row(0), &[0.5, 0.5]);
        assert_eq!(c.row(1), &[1.0, 0.0]);
        let mut d = [0; 2];
        g.digits(5, &mut d);
        assert_eq!(g.index_of(&d), 5);
        let all: Vec<_> = g.iter().collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn bad_configs() {
        let x = Alphabet::binary("X");
        assert!(matches!(ChannelGrid::new(&x, "W", 2, 0.3), Err(Error::Config(_))));
        assert!(matches!(ChannelGrid::new(&x, "W", 2, 0.0), Err(Error::Config(_))));
        assert!(matches!(ChannelGrid::new(&x, "W", 0, 0.5), Err(Error::Config(_))));
        assert!(matches!(ChannelGrid::new(&x, "W", 4, 0.001), Err(Error::Config(_))));
    }
}
