//! The five-variable source `p(x1, x2, x3, z, f)`, its Bayesian-network
//! special case `p(f) p(z|f) p(x1|z) p(x2|z) p(x3|f)`, distortion measures
//! and Bayes-optimal decoders.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::labels::{EXTENDED, F, MODEL, SOURCES, X1, X2, X3, Z};
use crate::prob::{Alphabet, ConditionalPmf, Entropies, JointPmf};
use crate::region::TestChannelTriple;
use crate::{Error, Result};

/// The semantic source: a joint pmf over exactly `X1, X2, X3, Z, F`
/// (stored in that order), optionally remembering the network factors it
/// was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    joint: JointPmf,
    bn: Option<BayesNetSpec>,
}

/// Factors of the five-node Bayesian network.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNetSpec {
    pub p_f: JointPmf,
    pub p_z_given_f: ConditionalPmf,
    pub p_x1_given_z: ConditionalPmf,
    pub p_x2_given_z: ConditionalPmf,
    pub p_x3_given_f: ConditionalPmf,
}

/// One conditional independence implied by the network and its residual
/// conditional mutual information.
#[derive(Debug, Clone, PartialEq)]
pub struct BnResidual {
    pub statement: &'static str,
    pub residual: f64,
}

impl SourceModel {
    /// Wrap a joint pmf; its axes must be exactly the five source labels (in
    /// any order).
    pub fn from_joint(joint: JointPmf) -> Result<Self> {
        if joint.axes().len() != MODEL.len() || MODEL.iter().any(|l| !joint.has_axis(l)) {
            let got: Vec<&str> = joint.labels().collect();
            return Err(Error::Model(format!(
                "a source model needs axes X1, X2, X3, Z, F; got {}",
                got.join(", ")
            )));
        }
        Ok(SourceModel {
            joint: joint.project(&MODEL)?,
            bn: None,
        })
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn bayes_net(&self) -> Option<&BayesNetSpec> {
        self.bn.as_ref()
    }

    pub fn alphabet(&self, label: &str) -> Result<&Alphabet> {
        self.joint.axis(label)
    }

    /// The repository's reference model: `F ~ Bernoulli(0.5)`, `Z = BSC(0.1)(F)`,
    /// `X1 = BSC(0.1)(Z)`, `X2 = BSC(0.2)(Z)`, `X3 = BSC(0.1)(F)`.
    pub fn reference_e1() -> Self {
        BayesNetSpec::binary_symmetric(0.5, 0.1, 0.1, 0.2, 0.1)
            .and_then(|s| s.assemble_joint())
            .expect("reference model is valid")
    }

    /// Residuals of the network's conditional independences. The first five
    /// are the pairwise statements; the sixth, `I(X1,X2;F|Z)`, closes the gap
    /// that pairwise independence leaves (together with `I(X1;X2|Z)`,
    /// `I(X3;Z|F)` and `I(X1,X2;X3|Z,F)` it is equivalent to the factorisation).
    pub fn check_bn_structure(&self) -> Vec<BnResidual> {
        let e = Entropies::new(&self.joint);
        let mi = |a: &[&str], b: &[&str], c: &[&str]| e.mi(a, b, c).expect("model axes");
        vec![
            BnResidual {
                statement: "I(X1;X2|Z)",
                residual: mi(&[X1], &[X2], &[Z]),
            },
            BnResidual {
                statement: "I(X1;F|Z)",
                residual: mi(&[X1], &[F], &[Z]),
            },
            BnResidual {
                statement: "I(X2;F|Z)",
                residual: mi(&[X2], &[F], &[Z]),
            },
            BnResidual {
                statement: "I(X3;Z|F)",
                residual: mi(&[X3], &[Z], &[F]),
            },
            BnResidual {
                statement: "I(X1,X2;X3|Z,F)",
                residual: mi(&[X1, X2], &[X3], &[Z, F]),
            },
            BnResidual {
                statement: "I(X1,X2;F|Z)",
                residual: mi(&[X1, X2], &[F], &[Z]),
            },
        ]
    }

    /// True when every network residual is within `tol`.
    pub fn is_bayes_net(&self, tol: f64) -> bool {
        self.check_bn_structure().iter().all(|r| r.residual <= tol)
    }

    /// `p(w1|x1) p(w2|x2) p(w3|x3) p(x1, x2, x3, z, f)` over the eight
    /// canonical axes.
    pub fn extend_with_test_channels(&self, channels: &TestChannelTriple) -> Result<JointPmf> {
        let mut joint = self.joint.clone();
        for (i, ch) in channels.channels().iter().enumerate() {
            let src = SOURCES[i];
            let given = ch.given_axes();
            if given.len() != 1 || given[0].name() != src {
                return Err(Error::Model(format!(
                    "channel {} must condition on {src} only",
                    ch.out_axis().name()
                )));
            }
            if !given[0].same_symbols(self.alphabet(src)?) {
                return Err(Error::Model(format!(
                    "channel {} uses a different {src} alphabet than the model",
                    ch.out_axis().name()
                )));
            }
            joint = joint.attach_channel(ch)?;
        }
        debug_assert!(joint.labels().eq(EXTENDED.iter().copied()));
        Ok(joint)
    }
}

impl BayesNetSpec {
    /// Binary network with `F ~ Bernoulli(p_f1)` and BSC factors of the given
    /// crossovers.
    pub fn binary_symmetric(p_f1: f64, z_f: f64, x1_z: f64, x2_z: f64, x3_f: f64) -> Result<Self> {
        let f = Alphabet::binary(F);
        let z = Alphabet::binary(Z);
        let bsc = |input: &Alphabet, out: &str, e: f64| ConditionalPmf::symmetric(input, out, e);
        Ok(BayesNetSpec {
            p_f: JointPmf::new(vec![f.clone()], vec![1.0 - p_f1, p_f1])?,
            p_z_given_f: bsc(&f, Z, z_f)?,
            p_x1_given_z: bsc(&z, X1, x1_z)?,
            p_x2_given_z: bsc(&z, X2, x2_z)?,
            p_x3_given_f: bsc(&f, X3, x3_f)?,
        })
    }

    fn validate(&self) -> Result<()> {
        let pf = self.p_f.axes();
        if pf.len() != 1 || pf[0].name() != F {
            return Err(Error::Model("p_f must be a pmf over F".into()));
        }
        let f = &pf[0];
        let check = |name: &str, c: &ConditionalPmf, given: &str, out: &str| -> Result<()> {
            let g = c.given_axes();
            if g.len() != 1 || g[0].name() != given || c.out_axis().name() != out {
                return Err(Error::Model(format!(
                    "factor {name} must be p({out}|{given})"
                )));
            }
            Ok(())
        };
        check("p_z_given_f", &self.p_z_given_f, F, Z)?;
        check("p_x1_given_z", &self.p_x1_given_z, Z, X1)?;
        check("p_x2_given_z", &self.p_x2_given_z, Z, X2)?;
        check("p_x3_given_f", &self.p_x3_given_f, F, X3)?;
        let z = self.p_z_given_f.out_axis();
        let consistent = self.p_z_given_f.given_axes()[0].same_symbols(f)
            && self.p_x3_given_f.given_axes()[0].same_symbols(f)
            && self.p_x1_given_z.given_axes()[0].same_symbols(z)
            && self.p_x2_given_z.given_axes()[0].same_symbols(z);
        if !consistent {
            return Err(Error::Model(
                "factor alphabets for Z or F are inconsistent".into(),
            ));
        }
        Ok(())
    }

    /// Multiply the factors into a [`SourceModel`].
    pub fn assemble_joint(&self) -> Result<SourceModel> {
        self.validate()?;
        let joint = self
            .p_f
            .attach_channel(&self.p_z_given_f)?
            .attach_channel(&self.p_x3_given_f)?
            .attach_channel(&self.p_x1_given_z)?
            .attach_channel(&self.p_x2_given_z)?
            .project(&MODEL)?;
        Ok(SourceModel {
            joint,
            bn: Some(self.clone()),
        })
    }
}

/// Per-letter distortion `d(x, x_hat)` between a source alphabet and a
/// reconstruction alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMeasure {
    source: Alphabet,
    recon: Alphabet,
    cost: Vec<f64>,
}

impl DistortionMeasure {
    /// `cost` is row-major: one row per source symbol.
    pub fn new(source: Alphabet, recon: Alphabet, cost: Vec<f64>) -> Result<Self> {
        if cost.len() != source.size() * recon.size() {
            return Err(Error::Model(format!(
                "distortion for {} needs {} costs, got {}",
                source.name(),
                source.size() * recon.size(),
                cost.len()
            )));
        }
        if let Some(bad) = cost.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::Model(format!(
                "distortion for {} has invalid cost {bad}",
                source.name()
            )));
        }
        Ok(DistortionMeasure { source, recon, cost })
    }

    /// Hamming distortion with the reconstruction alphabet equal to the
    /// source alphabet.
    pub fn hamming(source: &Alphabet) -> Self {
        let k = source.size();
        let cost = (0..k * k)
            .map(|i| if i / k == i % k { 0.0 } else { 1.0 })
            .collect();
        DistortionMeasure {
            recon: source.renamed(format!("{}_hat", source.name())),
            source: source.clone(),
            cost,
        }
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn recon(&self) -> &Alphabet {
        &self.recon
    }

    #[inline]
    pub fn cost(&self, x: usize, x_hat: usize) -> f64 {
        self.cost[x * self.recon.size() + x_hat]
    }

    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    /// Largest entry of the cost matrix; any target at or above it is met by
    /// every decoder.
    pub fn max_cost(&self) -> f64 {
        self.cost.iter().copied().fold(0.0, f64::max)
    }

    /// Same measure with every cost multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(
            self.source.clone(),
            self.recon.clone(),
            self.cost.iter().map(|c| c * k).collect(),
        )
    }
}

/// A deterministic decoder: one reconstruction symbol per joint assignment of
/// the observed axes (row-major in the order of `observed`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderRule {
    source: String,
    observed: Vec<String>,
    table: Vec<usize>,
}

impl DecoderRule {
    pub fn new(source: impl Into<String>, observed: Vec<String>, table: Vec<usize>) -> Self {
        DecoderRule {
            source: source.into(),
            observed,
            table,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn observed(&self) -> &[String] {
        &self.observed
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Reconstruction for an observed tuple given by its flat index.
    pub fn decode(&self, observed_index: usize) -> usize {
        self.table[observed_index]
    }
}

/// The decoder's view of the extended joint: `W1, W2, W3, Z, F`.
pub const DECODER_INPUTS: [&str; 5] = ["W1", "W2", "W3", "Z", "F"];

fn source_and_observed<'a>(
    joint: &JointPmf,
    d: &'a DistortionMeasure,
    observed: &[&'a str],
) -> Result<(JointPmf, &'a str)> {
    let src = d.source().name();
    if !joint.axis(src)?.same_symbols(d.source()) {
        return Err(Error::Model(format!(
            "distortion alphabet for {src} does not match the pmf"
        )));
    }
    let mut order: Vec<&str> = observed.to_vec();
    order.push(src);
    Ok((joint.project(&order)?, src))
}

/// Bayes-optimal decoder of `d.source()` from the `observed` axes: for each
/// observed tuple the reconstruction minimising expected cost, ties going to
/// the lowest reconstruction index.
pub fn optimal_decoder_on(joint: &JointPmf, observed: &[&str], d: &DistortionMeasure) -> Result<DecoderRule> {
    let (proj, src) = source_and_observed(joint, d, observed)?;
    let nx = d.source().size();
    let nr = d.recon().size();
    let probs = proj.probs();
    let table = probs
        .chunks(nx)
        .map(|px| {
            let mut best = 0;
            let mut best_cost = f64::INFINITY;
            for r in 0..nr {
                let c: f64 = px.iter().enumerate().map(|(x, p)| p * d.cost(x, r)).sum();
                if c < best_cost {
                    best_cost = c;
                    best = r;
                }
            }
            best
        })
        .collect();
    Ok(DecoderRule::new(
        src,
        observed.iter().map(|s| s.to_string()).collect(),
        table,
    ))
}

/// Bayes-optimal `g_i(W1, W2, W3, Z, F)` for the source named by `d`.
pub fn optimal_decoder(extended: &JointPmf, d: &DistortionMeasure) -> Result<DecoderRule> {
    optimal_decoder_on(extended, &DECODER_INPUTS, d)
}

/// `E d(X_i, g(observed))` under `joint`.
pub fn expected_distortion(joint: &JointPmf, decoder: &DecoderRule, d: &DistortionMeasure) -> Result<f64> {
    if decoder.source() != d.source().name() {
        return Err(Error::Decoder(format!(
            "decoder reconstructs {} but the distortion measures {}",
            decoder.source(),
            d.source().name()
        )));
    }
    let observed: Vec<&str> = decoder.observed().iter().map(String::as_str).collect();
    for o in &observed {
        if !joint.has_axis(o) {
            return Err(Error::Decoder(format!("decoder observes unknown axis {o}")));
        }
    }
    let (proj, _) = source_and_observed(joint, d, &observed)?;
    let nx = d.source().size();
    let n_tuples = proj.len() / nx;
    if decoder.table().len() != n_tuples {
        return Err(Error::Decoder(format!(
            "decoder covers {} of {n_tuples} observed tuples",
            decoder.table().len()
        )));
    }
    let nr = d.recon().size();
    let mut total = 0.0;
    for (t, px) in proj.probs().chunks(nx).enumerate() {
        let r = decoder.decode(t);
        if r >= nr {
            return Err(Error::Decoder(format!(
                "tuple {t} maps to reconstruction index {r} of {nr}"
            )));
        }
        total += px.iter().enumerate().map(|(x, p)| p * d.cost(x, r)).sum::<f64>();
    }
    Ok(total)
}
