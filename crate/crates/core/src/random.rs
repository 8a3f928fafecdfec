//! Seeded random models and channels for property sweeps.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::labels::{AUX, EXTENDED, F, MODEL, SOURCES, X1, X2, X3, Z};
use crate::prob::{Alphabet, ConditionalPmf, JointPmf};
use crate::region::TestChannelTriple;
use crate::source::{BayesNetSpec, SourceModel};
use crate::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random point of the simplex of dimension `k`, skewed so that small and
/// zero-ish entries occur: each coordinate is `u^3` before normalisation.
pub fn simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| {
        let u: f64 = rng.random();
        u * u * u + 1e-12
    }).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn random_joint(rng: &mut impl Rng, axes: Vec<Alphabet>) -> Result<JointPmf> {
    let n = crate::prob::checked_size(&axes)?;
    JointPmf::new(axes, simplex(rng, n))
}

pub fn random_channel(rng: &mut impl Rng, input: &Alphabet, out: Alphabet) -> Result<ConditionalPmf> {
    let k = out.size();
    let rows = (0..input.size()).flat_map(|_| simplex(rng, k)).collect();
    ConditionalPmf::new(vec![input.clone()], out, rows)
}

/// A general (usually not conditionally independent) five-variable source
/// with alphabet sizes drawn from `2..=max_size`.
pub fn random_model(rng: &mut impl Rng, max_size: usize) -> Result<SourceModel> {
    let axes = MODEL
        .iter()
        .map(|l| Alphabet::indexed(*l, rng.random_range(2..=max_size.max(2))))
        .collect::<Result<Vec<_>>>()?;
    SourceModel::from_joint(random_joint(rng, axes)?)
}

/// Random network factors with alphabet sizes drawn from `2..=max_size`.
pub fn random_bn_spec(rng: &mut impl Rng, max_size: usize) -> Result<BayesNetSpec> {
    let mut size = || rng.random_range(2..=max_size.max(2));
    let (sf, sz, s1, s2, s3) = (size(), size(), size(), size(), size());
    let f = Alphabet::indexed(F, sf)?;
    let z = Alphabet::indexed(Z, sz)?;
    Ok(BayesNetSpec {
        p_f: JointPmf::new(vec![f.clone()], simplex(rng, sf))?,
        p_z_given_f: random_channel(rng, &f, z.clone())?,
        p_x1_given_z: random_channel(rng, &z, Alphabet::indexed(X1, s1)?)?,
        p_x2_given_z: random_channel(rng, &z, Alphabet::indexed(X2, s2)?)?,
        p_x3_given_f: random_channel(rng, &f, Alphabet::indexed(X3, s3)?)?,
    })
}

pub fn random_bn_model(rng: &mut impl Rng, max_size: usize) -> Result<SourceModel> {
    random_bn_spec(rng, max_size)?.assemble_joint()
}

/// Random product channels with `|W_i|` drawn from `1..=max_w`.
pub fn random_channels(rng: &mut impl Rng, model: &SourceModel, max_w: usize) -> Result<TestChannelTriple> {
    let mut c = Vec::with_capacity(3);
    for i in 0..3 {
        let w = rng.random_range(1..=max_w.max(1));
        c.push(random_channel(rng, model.alphabet(SOURCES[i])?, Alphabet::indexed(AUX[i], w)?)?);
    }
    let [a, b, d]: [ConditionalPmf; 3] = c.try_into().expect("three channels");
    TestChannelTriple::new([a, b, d])
}

/// A joint auxiliary with shared randomness: `U` uniform on `u_size`
/// symbols and independent of the source, and `W_i ~ p(w_i | x_i, u)`.
/// Each `W_i` is a channel from `X_i` alone, but the three are correlated
/// through `U`. Returned over the eight canonical axes.
pub fn correlated_auxiliary(
    rng: &mut impl Rng,
    model: &SourceModel,
    w_sizes: [usize; 3],
    u_size: usize,
) -> Result<JointPmf> {
    let u = Alphabet::indexed("U", u_size)?;
    let mut chans = Vec::with_capacity(3);
    for i in 0..3 {
        let x = model.alphabet(SOURCES[i])?.clone();
        let given = vec![x.clone(), u.clone()];
        let rows = (0..x.size() * u_size)
            .flat_map(|_| simplex(rng, w_sizes[i]))
            .collect();
        chans.push(ConditionalPmf::new(given, Alphabet::indexed(AUX[i], w_sizes[i])?, rows)?);
    }
    let pu = JointPmf::uniform(vec![u])?;
    let mut j = model.joint().clone();
    // attach U as an independent coordinate, then the three channels
    let mut axes = j.axes().to_vec();
    axes.push(pu.axes()[0].clone());
    let base = j.probs().to_vec();
    let probs = base
        .iter()
        .flat_map(|p| pu.probs().iter().map(move |q| p * q))
        .collect();
    j = JointPmf::new(axes, probs)?;
    for c in &chans {
        j = j.attach_channel(c)?;
    }
    j.marginalize(&EXTENDED)?.project(&EXTENDED)
}
