//! Entropy and (conditional) mutual information over a [`JointPmf`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cell::RefCell;

use super::JointPmf;
use crate::math::{clamp_nonneg, plogp};
use crate::{Error, Result, CLAMP_TOL};

impl JointPmf {
    /// `H(vars)` in bits.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Err(Error::InvalidQuery("entropy of no variables".into()));
        }
        let pos = self.positions(vars)?;
        Ok(self.sum_onto(&pos).iter().map(|&p| plogp(p)).sum())
    }

    /// `I(A; B | C)` in bits; `c` may be empty. Values in `[-1e-12, 0)` are
    /// clamped to zero.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        Ok(clamp_nonneg(self.mutual_information_raw(a, b, c)?, CLAMP_TOL))
    }

    /// `I(A; B | C)` without clamping, as `H(A,C) + H(B,C) - H(A,B,C) - H(C)`.
    pub fn mutual_information_raw(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        Entropies::new(self).mi_raw(a, b, c)
    }

    /// `I(A; C | B)`: zero exactly when `A - B - C` is a Markov chain.
    pub fn verify_markov(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        if b.is_empty() {
            return Err(Error::InvalidQuery("Markov chain needs a middle set".into()));
        }
        self.mutual_information(a, c, b)
    }
}

/// Memoised entropies of marginals of one pmf, keyed by axis subset.
///
/// Bound evaluations ask for many overlapping `I(.;.|.)` terms on the same
/// extended joint; each marginal entropy is computed once.
pub struct Entropies<'a> {
    pmf: &'a JointPmf,
    cache: RefCell<BTreeMap<u64, f64>>,
}

impl<'a> Entropies<'a> {
    pub fn new(pmf: &'a JointPmf) -> Self {
        assert!(pmf.axes().len() <= 64, "at most 64 axes");
        Entropies {
            pmf,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn pmf(&self) -> &JointPmf {
        self.pmf
    }

    fn mask(&self, vars: &[&str]) -> Result<u64> {
        let mut m = 0u64;
        for v in vars {
            let i = self.pmf.axis_index(v)?;
            if m & (1 << i) != 0 {
                return Err(Error::InvalidQuery(format!("`{v}` listed twice")));
            }
            m |= 1 << i;
        }
        Ok(m)
    }

    fn h_mask(&self, m: u64) -> f64 {
        if m == 0 {
            return 0.0;
        }
        if let Some(&h) = self.cache.borrow().get(&m) {
            return h;
        }
        let pos: Vec<usize> = (0..self.pmf.axes().len()).filter(|i| m & (1 << i) != 0).collect();
        let h = self.pmf.sum_onto(&pos).iter().map(|&p| plogp(p)).sum();
        self.cache.borrow_mut().insert(m, h);
        h
    }

    /// `H(vars)`; the empty set has entropy zero.
    pub fn h(&self, vars: &[&str]) -> Result<f64> {
        Ok(self.h_mask(self.mask(vars)?))
    }

    pub fn mi_raw(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidQuery("mutual information needs two nonempty sets".into()));
        }
        let (ma, mb, mc) = (self.mask(a)?, self.mask(b)?, self.mask(c)?);
        if ma & mb != 0 || ma & mc != 0 || mb & mc != 0 {
            return Err(Error::InvalidQuery("variable sets overlap".into()));
        }
        Ok(self.h_mask(ma | mc) + self.h_mask(mb | mc) - self.h_mask(ma | mb | mc) - self.h_mask(mc))
    }

    /// `I(A; B | C)`, clamped like [`JointPmf::mutual_information`].
    pub fn mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        Ok(clamp_nonneg(self.mi_raw(a, b, c)?, CLAMP_TOL))
    }
}
