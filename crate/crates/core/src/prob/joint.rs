use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Alphabet, ConditionalPmf, MAX_ENTRIES, NORMALIZE_SLACK};
use crate::math::abs;
use crate::{Error, Result};

/// Dense joint pmf over an ordered list of labelled alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    probs: Vec<f64>,
    strides: Vec<usize>,
}

pub(crate) fn checked_size(axes: &[Alphabet]) -> Result<usize> {
    let mut total: u128 = 1;
    for a in axes {
        total = total.saturating_mul(a.size() as u128);
    }
    if total > MAX_ENTRIES as u128 {
        return Err(Error::TooLarge {
            entries: total,
            cap: MAX_ENTRIES,
        });
    }
    Ok(total as usize)
}

fn strides_of(axes: &[Alphabet]) -> Vec<usize> {
    let mut strides = vec![1; axes.len()];
    for i in (0..axes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * axes[i + 1].size();
    }
    strides
}

/// Check entries, renormalising when the total is within [`NORMALIZE_SLACK`].
pub(crate) fn normalize(probs: &mut [f64], what: &str) -> Result<()> {
    let mut total = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} is {p}"
            )));
        }
        total += p;
    }
    if abs(total - 1.0) > NORMALIZE_SLACK {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entries sum to {total}"
        )));
    }
    for p in probs.iter_mut() {
        *p /= total;
    }
    Ok(())
}

impl JointPmf {
    /// Build from row-major probabilities. Totals within `1e-9` of one are
    /// renormalised; anything else is rejected.
    pub fn new(axes: Vec<Alphabet>, mut probs: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidDistribution("no axes".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name() == a.name()) {
                return Err(Error::DuplicateVariable(a.name().to_string()));
            }
        }
        let len = checked_size(&axes)?;
        if probs.len() != len {
            return Err(Error::InvalidDistribution(format!(
                "expected {len} entries, got {}",
                probs.len()
            )));
        }
        normalize(&mut probs, "joint pmf")?;
        let strides = strides_of(&axes);
        Ok(JointPmf {
            axes,
            probs,
            strides,
        })
    }

    /// Build by evaluating `f` at every multi-index.
    pub fn from_fn(axes: Vec<Alphabet>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = checked_size(&axes)?;
        let mut probs = Vec::with_capacity(len);
        let sizes: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let mut digits = vec![0usize; axes.len()];
        for _ in 0..len {
            probs.push(f(&digits));
            increment(&mut digits, &sizes);
        }
        Self::new(axes, probs)
    }

    /// Point mass at the given multi-index.
    pub fn point_mass(axes: Vec<Alphabet>, at: &[usize]) -> Result<Self> {
        Self::from_fn(axes, |d| if d == at { 1.0 } else { 0.0 })
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        let len = checked_size(&axes)?;
        Self::new(axes, vec![1.0 / len as f64; len])
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.axes.iter().map(Alphabet::name)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn has_axis(&self, label: &str) -> bool {
        self.axes.iter().any(|a| a.name() == label)
    }

    pub fn axis_index(&self, label: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name() == label)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    pub fn axis(&self, label: &str) -> Result<&Alphabet> {
        Ok(&self.axes[self.axis_index(label)?])
    }

    /// Probability at a multi-index (one symbol index per axis).
    pub fn get(&self, index: &[usize]) -> f64 {
        let flat: usize = index.iter().zip(&self.strides).map(|(i, s)| i * s).sum();
        self.probs[flat]
    }

    /// Resolve labels to axis positions, rejecting unknown or repeated ones.
    pub(crate) fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut pos = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.axis_index(l)?;
            if pos.contains(&i) {
                return Err(Error::InvalidQuery(format!("`{l}` listed twice")));
            }
            pos.push(i);
        }
        Ok(pos)
    }

    /// For every flat index, the flat index of its restriction to `pos`
    /// (row-major over `pos` in the order given).
    pub(crate) fn projection_map(&self, pos: &[usize]) -> Vec<usize> {
        let sizes: Vec<usize> = self.axes.iter().map(Alphabet::size).collect();
        let mut sub_stride = vec![0usize; self.axes.len()];
        let mut s = 1;
        for &p in pos.iter().rev() {
            sub_stride[p] = s;
            s *= sizes[p];
        }
        let mut map = Vec::with_capacity(self.probs.len());
        let mut digits = vec![0usize; sizes.len()];
        let mut sub = 0usize;
        for _ in 0..self.probs.len() {
            map.push(sub);
            // odometer step, keeping `sub` in sync
            for ax in (0..sizes.len()).rev() {
                digits[ax] += 1;
                sub += sub_stride[ax];
                if digits[ax] < sizes[ax] {
                    break;
                }
                sub -= sub_stride[ax] * digits[ax];
                digits[ax] = 0;
            }
        }
        map
    }

    /// Sum onto the listed axes, in the order listed.
    pub(crate) fn sum_onto(&self, pos: &[usize]) -> Vec<f64> {
        let len: usize = pos.iter().map(|&p| self.axes[p].size()).product();
        let mut out = vec![0.0; len];
        if pos.is_empty() {
            out[0] = self.probs.iter().sum();
            return out;
        }
        let map = self.projection_map(pos);
        for (p, &j) in self.probs.iter().zip(&map) {
            out[j] += p;
        }
        out
    }

    /// Marginal on `keep`; axes stay in their original relative order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::InvalidQuery("nothing to keep".into()));
        }
        let mut pos = self.positions(keep)?;
        pos.sort_unstable();
        self.project_positions(&pos)
    }

    /// Marginal on `labels` with axes in exactly the order given. Listing
    /// every axis permutes the tensor.
    pub fn project(&self, labels: &[&str]) -> Result<JointPmf> {
        if labels.is_empty() {
            return Err(Error::InvalidQuery("nothing to keep".into()));
        }
        let pos = self.positions(labels)?;
        self.project_positions(&pos)
    }

    fn project_positions(&self, pos: &[usize]) -> Result<JointPmf> {
        let axes: Vec<Alphabet> = pos.iter().map(|&p| self.axes[p].clone()).collect();
        let probs = self.sum_onto(pos);
        let strides = strides_of(&axes);
        Ok(JointPmf {
            axes,
            probs,
            strides,
        })
    }

    /// Conditional of `target` given `given`. Rows are indexed row-major over
    /// `given` in the order listed; several targets are fused into one product
    /// alphabet labelled `"A,B"`. Rows whose conditioning event has zero
    /// probability are flagged undefined and filled uniformly.
    pub fn condition(&self, target: &[&str], given: &[&str]) -> Result<ConditionalPmf> {
        if target.is_empty() {
            return Err(Error::InvalidQuery("empty target".into()));
        }
        let tpos = self.positions(target)?;
        let gpos = self.positions(given)?;
        if tpos.iter().any(|t| gpos.contains(t)) {
            return Err(Error::InvalidQuery(
                "target and conditioning sets overlap".into(),
            ));
        }
        let mut all = gpos.clone();
        all.extend_from_slice(&tpos);
        let joint = self.sum_onto(&all);

        let given_axes: Vec<Alphabet> = gpos.iter().map(|&p| self.axes[p].clone()).collect();
        let out_axis = if tpos.len() == 1 {
            self.axes[tpos[0]].clone()
        } else {
            fused_alphabet(tpos.iter().map(|&p| &self.axes[p]))?
        };
        let out = out_axis.size();
        let n_rows = joint.len() / out;
        let mut rows = joint;
        let mut defined = vec![true; n_rows];
        for r in 0..n_rows {
            let row = &mut rows[r * out..(r + 1) * out];
            let mass: f64 = row.iter().sum();
            if mass > 0.0 {
                row.iter_mut().for_each(|v| *v /= mass);
            } else {
                defined[r] = false;
                row.iter_mut().for_each(|v| *v = 1.0 / out as f64);
            }
        }
        Ok(ConditionalPmf::from_parts(given_axes, out_axis, rows, defined))
    }

    /// Extend by `channel`: `p(..., w) = p(...) * channel(w | given)`.
    pub fn attach_channel(&self, channel: &ConditionalPmf) -> Result<JointPmf> {
        let out = channel.out_axis();
        if self.has_axis(out.name()) {
            return Err(Error::DuplicateVariable(out.name().to_string()));
        }
        let mut gpos = Vec::with_capacity(channel.given_axes().len());
        for g in channel.given_axes() {
            let i = self.axis_index(g.name())?;
            if !self.axes[i].same_symbols(g) {
                return Err(Error::Model(format!(
                    "channel alphabet for `{}` does not match the pmf",
                    g.name()
                )));
            }
            gpos.push(i);
        }
        let mut axes = self.axes.clone();
        axes.push(out.clone());
        checked_size(&axes)?;
        let row_of = self.projection_map(&gpos);
        let k = out.size();
        let mut probs = Vec::with_capacity(self.probs.len() * k);
        for (p, &r) in self.probs.iter().zip(&row_of) {
            let row = channel.row(r);
            probs.extend(row.iter().map(|c| p * c));
        }
        let strides = strides_of(&axes);
        Ok(JointPmf {
            axes,
            probs,
            strides,
        })
    }

    /// Rename one axis.
    pub fn rename_axis(&self, from: &str, to: &str) -> Result<JointPmf> {
        let i = self.axis_index(from)?;
        if from != to && self.has_axis(to) {
            return Err(Error::DuplicateVariable(to.to_string()));
        }
        let mut out = self.clone();
        out.axes[i] = self.axes[i].renamed(to);
        Ok(out)
    }

    /// Largest absolute entrywise difference to `other` after aligning axes
    /// by label. Errors if the label sets differ.
    pub fn max_abs_diff(&self, other: &JointPmf) -> Result<f64> {
        if self.axes.len() != other.axes.len() {
            return Err(Error::InvalidQuery("axis sets differ".into()));
        }
        let labels: Vec<&str> = self.labels().collect();
        let aligned = other.project(&labels)?;
        if aligned
            .axes
            .iter()
            .zip(&self.axes)
            .any(|(a, b)| !a.same_symbols(b))
        {
            return Err(Error::InvalidQuery("alphabets differ".into()));
        }
        Ok(self
            .probs
            .iter()
            .zip(&aligned.probs)
            .map(|(a, b)| abs(a - b))
            .fold(0.0, f64::max))
    }
}

/// Fuse several alphabets into one product alphabet.
pub(crate) fn fused_alphabet<'a>(axes: impl Iterator<Item = &'a Alphabet> + Clone) -> Result<Alphabet> {
    let name: Vec<&str> = axes.clone().map(Alphabet::name).collect();
    let mut symbols: Vec<String> = vec![String::new()];
    for a in axes {
        let mut next = Vec::with_capacity(symbols.len() * a.size());
        for prefix in &symbols {
            for s in a.symbols() {
                if prefix.is_empty() {
                    next.push(s.clone());
                } else {
                    next.push(format!("{prefix},{s}"));
                }
            }
        }
        symbols = next;
    }
    Alphabet::new(name.join(","), symbols)
}

pub(crate) fn increment(digits: &mut [usize], sizes: &[usize]) {
    for ax in (0..sizes.len()).rev() {
        digits[ax] += 1;
        if digits[ax] < sizes[ax] {
            return;
        }
        digits[ax] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(names: &[&str]) -> Vec<Alphabet> {
        names.iter().map(|n| Alphabet::binary(*n)).collect()
    }

    #[test]
    fn uniform_marginal_is_uniform() {
        let p = JointPmf::uniform(bits(&["A", "B"])).unwrap();
        let m = p.marginalize(&["A"]).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn correlated_bits_marginal() {
        let p = JointPmf::new(bits(&["A", "B"]), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(p.marginalize(&["B"]).unwrap().probs(), &[0.5, 0.5]);
    }

    #[test]
    fn unknown_axis_is_reported() {
        let p = JointPmf::uniform(bits(&["A"])).unwrap();
        assert_eq!(
            p.marginalize(&["Q"]).unwrap_err(),
            Error::UnknownVariable("Q".into())
        );
    }

    #[test]
    fn rejects_bad_totals_and_negatives() {
        assert!(JointPmf::new(bits(&["A"]), vec![0.5, 0.4]).is_err());
        assert!(JointPmf::new(bits(&["A"]), vec![1.5, -0.5]).is_err());
        // within slack: renormalised
        let p = JointPmf::new(bits(&["A"]), vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_oversized_and_duplicate_axes() {
        let big: Vec<Alphabet> = (0..24).map(|i| Alphabet::binary(format!("A{i}"))).collect();
        assert!(matches!(
            JointPmf::uniform(big),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(
            JointPmf::uniform(bits(&["A", "A"])),
            Err(Error::DuplicateVariable(_))
        ));
    }

    #[test]
    fn project_permutes_axes() {
        let p = JointPmf::new(bits(&["A", "B"]), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let q = p.project(&["B", "A"]).unwrap();
        assert_eq!(q.probs(), &[0.1, 0.3, 0.2, 0.4]);
        assert_eq!(p.max_abs_diff(&q).unwrap(), 0.0);
    }

    #[test]
    fn condition_independent_and_deterministic() {
        let p = JointPmf::uniform(bits(&["A", "B"])).unwrap();
        let c = p.condition(&["A"], &["B"]).unwrap();
        for r in 0..2 {
            assert_eq!(c.row(r), &[0.5, 0.5]);
        }
        let q = JointPmf::new(bits(&["A", "B"]), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let c = q.condition(&["B"], &["A"]).unwrap();
        assert_eq!(c.row(0), &[1.0, 0.0]);
        assert_eq!(c.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn condition_flags_zero_probability_rows() {
        let p = JointPmf::new(bits(&["A", "B"]), vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let c = p.condition(&["B"], &["A"]).unwrap();
        assert!(c.is_defined(0));
        assert!(!c.is_defined(1));
    }

    #[test]
    fn condition_rejects_overlap() {
        let p = JointPmf::uniform(bits(&["A", "B"])).unwrap();
        assert!(matches!(
            p.condition(&["A"], &["A"]),
            Err(Error::InvalidQuery(_))
        ));
    }

    #[test]
    fn multi_target_condition_fuses_alphabets() {
        let p = JointPmf::uniform(bits(&["A", "B", "C"])).unwrap();
        let c = p.condition(&["A", "B"], &["C"]).unwrap();
        assert_eq!(c.out_axis().name(), "A,B");
        assert_eq!(c.out_axis().symbols()[3], "1,1");
        assert_eq!(c.row(1), &[0.25; 4]);
    }

    #[test]
    fn attach_identity_channel() {
        let p = JointPmf::new(bits(&["X"]), vec![0.3, 0.7]).unwrap();
        let ch = ConditionalPmf::identity(&Alphabet::binary("X"), "W");
        let q = p.attach_channel(&ch).unwrap();
        let c = q.condition(&["W"], &["X"]).unwrap();
        assert_eq!(c.row(0), &[1.0, 0.0]);
        assert_eq!(c.row(1), &[0.0, 1.0]);
        assert!(q.marginalize(&["X"]).unwrap().max_abs_diff(&p).unwrap() < 1e-15);
    }

    #[test]
    fn attach_rejects_collision() {
        let p = JointPmf::uniform(bits(&["X", "W"])).unwrap();
        let ch = ConditionalPmf::identity(&Alphabet::binary("X"), "W");
        assert_eq!(
            p.attach_channel(&ch).unwrap_err(),
            Error::DuplicateVariable("W".into())
        );
    }
}
