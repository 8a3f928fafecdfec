//! Rate-region bounds for a fixed choice of auxiliaries: the achievable
//! (inner) and converse (outer) seven-inequality families, their
//! simplifications on conditionally independent sources, and the
//! marginal-channel construction that makes the two coincide.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::labels::{AUX, EXTENDED, F, MODEL, SOURCES, W1, W2, W3, X1, X2, X3, Z};
use crate::prob::{ConditionalPmf, Entropies, JointPmf};
use crate::source::SourceModel;
use crate::{Error, Result, IDENTITY_TOL, STRUCTURAL_TOL};

/// Product-form auxiliaries `p(w1|x1) p(w2|x2) p(w3|x3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestChannelTriple {
    channels: [ConditionalPmf; 3],
}

impl TestChannelTriple {
    /// Channel `i` must condition on exactly `X{i+1}` and emit `W{i+1}`.
    pub fn new(channels: [ConditionalPmf; 3]) -> Result<Self> {
        for (i, ch) in channels.iter().enumerate() {
            let given = ch.given_axes();
            if given.len() != 1 || given[0].name() != SOURCES[i] {
                return Err(Error::Model(format!(
                    "channel {} must condition on {} only",
                    i + 1,
                    SOURCES[i]
                )));
            }
            if ch.out_axis().name() != AUX[i] {
                return Err(Error::Model(format!(
                    "channel {} must output {}, not {}",
                    i + 1,
                    AUX[i],
                    ch.out_axis().name()
                )));
            }
        }
        Ok(TestChannelTriple { channels })
    }

    pub fn channels(&self) -> &[ConditionalPmf; 3] {
        &self.channels
    }

    pub fn channel(&self, i: usize) -> &ConditionalPmf {
        &self.channels[i]
    }

    pub fn into_channels(self) -> [ConditionalPmf; 3] {
        self.channels
    }

    fn build(f: impl Fn(usize) -> Result<ConditionalPmf>) -> Result<Self> {
        Self::new([f(0)?, f(1)?, f(2)?])
    }

    /// `W_i = X_i`.
    pub fn identity(model: &SourceModel) -> Self {
        Self::build(|i| {
            Ok(ConditionalPmf::identity(model.alphabet(SOURCES[i])?, AUX[i]))
        })
        .expect("model has the source axes")
    }

    /// Every `W_i` constant.
    pub fn constant(model: &SourceModel) -> Self {
        Self::build(|i| {
            Ok(ConditionalPmf::constant(model.alphabet(SOURCES[i])?, AUX[i]))
        })
        .expect("model has the source axes")
    }

    /// The same symmetric channel on every source.
    pub fn symmetric(model: &SourceModel, crossover: f64) -> Result<Self> {
        Self::build(|i| {
            ConditionalPmf::symmetric(model.alphabet(SOURCES[i])?, AUX[i], crossover)
        })
    }

    /// Replace channel `i` (0-based).
    pub fn with_channel(&self, i: usize, ch: ConditionalPmf) -> Result<Self> {
        let mut c = self.channels.clone();
        c[i] = ch;
        Self::new(c)
    }
}

/// Auxiliaries admitted by the converse: product channels, or any joint
/// over the eight canonical axes whose per-channel Markov constraints hold.
#[derive(Debug, Clone, PartialEq)]
pub enum Auxiliary {
    Product(TestChannelTriple),
    Joint(JointPmf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundForm {
    Inner,
    Outer,
    Corollary4,
    Corollary5,
}

impl BoundForm {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundForm::Inner => "inner",
            BoundForm::Outer => "outer",
            BoundForm::Corollary4 => "corollary4",
            BoundForm::Corollary5 => "corollary5",
        }
    }
}

/// Right-hand sides of the seven rate inequalities. The sum bounds are
/// absent for forms that drop them.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegionBounds {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r12: Option<f64>,
    pub r13: Option<f64>,
    pub r23: Option<f64>,
    pub r123: Option<f64>,
    pub form: BoundForm,
}

impl RateRegionBounds {
    pub fn singles(&self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    /// The seven values in the order r1, r2, r3, r12, r13, r23, r123.
    pub fn values(&self) -> [Option<f64>; 7] {
        [
            Some(self.r1),
            Some(self.r2),
            Some(self.r3),
            self.r12,
            self.r13,
            self.r23,
            self.r123,
        ]
    }

    /// Whether `rates` satisfies every present inequality up to `tol`.
    pub fn contains(&self, rates: &RateTriple, tol: f64) -> bool {
        let [a, b, c] = [rates.r1, rates.r2, rates.r3];
        let need = [
            (Some(self.r1), a),
            (Some(self.r2), b),
            (Some(self.r3), c),
            (self.r12, a + b),
            (self.r13, a + c),
            (self.r23, b + c),
            (self.r123, a + b + c),
        ];
        need.iter().all(|(bound, r)| bound.map_or(true, |v| *r + tol >= v))
    }

    /// A point of the region: start from the single bounds and raise the
    /// later rates until every sum bound holds.
    pub fn corner(&self) -> RateTriple {
        let mut r = [self.r1, self.r2, self.r3];
        if let Some(v) = self.r12 {
            r[1] = r[1].max(v - r[0]);
        }
        if let Some(v) = self.r13 {
            r[2] = r[2].max(v - r[0]);
        }
        if let Some(v) = self.r23 {
            r[2] = r[2].max(v - r[1]);
        }
        if let Some(v) = self.r123 {
            r[2] = r[2].max(v - r[0] - r[1]);
        }
        RateTriple {
            r1: r[0],
            r2: r[1],
            r3: r[2],
        }
    }
}

/// A rate per encoder, in bits per source symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTriple {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl RateTriple {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        for r in [r1, r2, r3] {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::Config(format!("rate {r} must be finite and nonnegative")));
            }
        }
        Ok(RateTriple { r1, r2, r3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.r1, self.r2, self.r3]
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2 + self.r3
    }
}

fn others(i: usize) -> [usize; 2] {
    match i {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Terms shared by the inner-bound expressions.
struct InnerTerms {
    /// `I(X_i;W_i)`
    cover: [f64; 3],
    /// `I(W_i; W_{-i}, Z, F)`
    bin: [f64; 3],
    /// `I(W_i;W_j|W_k,Z,F)` indexed by the excluded `k`
    pair: [f64; 3],
    /// `I(W1,W2;W3|Z,F)`
    triple: f64,
}

impl InnerTerms {
    fn new(e: &Entropies) -> Result<Self> {
        let mut cover = [0.0; 3];
        let mut bin = [0.0; 3];
        let mut pair = [0.0; 3];
        for i in 0..3 {
            let [j, k] = others(i);
            cover[i] = e.mi_raw(&[SOURCES[i]], &[AUX[i]], &[])?;
            bin[i] = e.mi_raw(&[AUX[i]], &[AUX[j], AUX[k], Z, F], &[])?;
            pair[i] = e.mi_raw(&[AUX[j]], &[AUX[k]], &[AUX[i], Z, F])?;
        }
        let triple = e.mi_raw(&[W1, W2], &[W3], &[Z, F])?;
        Ok(InnerTerms {
            cover,
            bin,
            pair,
            triple,
        })
    }

    fn single(&self, i: usize) -> f64 {
        self.cover[i] - self.bin[i]
    }

    fn bounds(&self, form: BoundForm) -> RateRegionBounds {
        let s = |i| self.single(i);
        RateRegionBounds {
            r1: pos(s(0)),
            r2: pos(s(1)),
            r3: pos(s(2)),
            r12: Some(pos(s(0) + s(1) + self.pair[2])),
            r13: Some(pos(s(0) + s(2) + self.pair[1])),
            r23: Some(pos(s(1) + s(2) + self.pair[0])),
            r123: Some(pos(s(0) + s(1) + s(2) + self.pair[2] + self.triple)),
            form,
        }
    }
}

/// The achievable region's seven right-hand sides for product channels.
pub fn inner_bound(model: &SourceModel, channels: &TestChannelTriple) -> Result<RateRegionBounds> {
    let ext = model.extend_with_test_channels(channels)?;
    Ok(InnerTerms::new(&Entropies::new(&ext))?.bounds(BoundForm::Inner))
}

/// Inner-bound expressions evaluated on an already extended joint.
pub fn inner_bound_on(extended: &JointPmf) -> Result<RateRegionBounds> {
    Ok(InnerTerms::new(&Entropies::new(extended))?.bounds(BoundForm::Inner))
}

/// Resolve an auxiliary into the canonical 8-axis joint and check that it
/// sits on `model` and obeys `p(w_i | x1, x2, x3, z, f) = p(w_i | x_i)`.
pub fn auxiliary_joint(model: &SourceModel, aux: &Auxiliary) -> Result<JointPmf> {
    match aux {
        Auxiliary::Product(ch) => model.extend_with_test_channels(ch),
        Auxiliary::Joint(j) => {
            if j.axes().len() != EXTENDED.len() || EXTENDED.iter().any(|l| !j.has_axis(l)) {
                return Err(Error::Model(
                    "a joint auxiliary must range over X1, X2, X3, Z, F, W1, W2, W3".into(),
                ));
            }
            let j = j.project(&EXTENDED)?;
            let src = j.marginalize(&MODEL)?;
            let diff = src.max_abs_diff(model.joint())?;
            if diff > STRUCTURAL_TOL {
                return Err(Error::Constraint {
                    what: "source marginal of the joint auxiliary differs from the model".into(),
                    residual: diff,
                });
            }
            let r = channel_markov_residuals(&j)?;
            for (i, v) in r.iter().enumerate() {
                if *v > IDENTITY_TOL {
                    return Err(Error::Constraint {
                        what: format!("I({};other sources,Z,F|{})", AUX[i], SOURCES[i]),
                        residual: *v,
                    });
                }
            }
            Ok(j)
        }
    }
}

/// `I(W_i; X_{-i}, Z, F | X_i)` for each channel.
pub fn channel_markov_residuals(extended: &JointPmf) -> Result<[f64; 3]> {
    let e = Entropies::new(extended);
    let mut r = [0.0; 3];
    for i in 0..3 {
        let [j, k] = others(i);
        r[i] = e.mi(&[AUX[i]], &[SOURCES[j], SOURCES[k], Z, F], &[SOURCES[i]])?;
    }
    Ok(r)
}

/// Total correlation of `(W1, W2, W3)` given all five model variables; zero
/// exactly when (with the per-channel constraints) the auxiliary factors as
/// a product of its marginal channels.
pub fn product_residual(extended: &JointPmf) -> Result<f64> {
    let e = Entropies::new(extended);
    let mut all = Vec::from(MODEL);
    let h_joint = e.h(&[&all[..], &AUX[..]].concat())? - e.h(&all)?;
    let mut sum = 0.0;
    for w in AUX {
        all.push(w);
        sum += e.h(&all)?;
        all.pop();
    }
    Ok(crate::math::clamp_nonneg(
        sum - 3.0 * e.h(&all)? - h_joint,
        crate::CLAMP_TOL,
    ))
}

/// Converse bounds in their conditional-MI form, with the expanded
/// (inner-bound) form alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterBound {
    pub bounds: RateRegionBounds,
    /// The inner-bound expressions evaluated on the same joint.
    pub expanded: RateRegionBounds,
    /// Whether the auxiliary factors into product channels.
    pub product_form: bool,
    /// Largest gap between the two forms.
    pub form_gap: f64,
}

/// Evaluate the converse region. On product-form auxiliaries the two forms
/// must agree within `1e-10`; a larger gap is reported as a constraint error.
pub fn outer_bound(model: &SourceModel, aux: &Auxiliary) -> Result<OuterBound> {
    let ext = auxiliary_joint(model, aux)?;
    let e = Entropies::new(&ext);
    let all_x = [X1, X2, X3];
    let mut single = [0.0; 3];
    let mut pairs = [0.0; 3];
    for i in 0..3 {
        let [j, k] = others(i);
        single[i] = e.mi(&all_x, &[AUX[i]], &[AUX[j], AUX[k], Z, F])?;
        pairs[i] = e.mi(&all_x, &[AUX[j], AUX[k]], &[AUX[i], Z, F])?;
    }
    let bounds = RateRegionBounds {
        r1: single[0],
        r2: single[1],
        r3: single[2],
        r12: Some(pairs[2]),
        r13: Some(pairs[1]),
        r23: Some(pairs[0]),
        r123: Some(e.mi(&all_x, &AUX, &[Z, F])?),
        form: BoundForm::Outer,
    };
    let expanded = InnerTerms::new(&e)?.bounds(BoundForm::Inner);
    let product_form = match aux {
        Auxiliary::Product(_) => true,
        Auxiliary::Joint(_) => product_residual(&ext)? <= IDENTITY_TOL,
    };
    let form_gap = bounds
        .values()
        .iter()
        .zip(expanded.values())
        .map(|(a, b)| crate::math::abs(a.unwrap() - b.unwrap()))
        .fold(0.0, f64::max);
    if product_form && form_gap > IDENTITY_TOL {
        return Err(Error::Constraint {
            what: "conditional and expanded converse forms disagree on product channels".into(),
            residual: form_gap,
        });
    }
    Ok(OuterBound {
        bounds,
        expanded,
        product_form,
        form_gap,
    })
}

fn require_bn(model: &SourceModel) -> Result<()> {
    for r in model.check_bn_structure() {
        if r.residual > STRUCTURAL_TOL {
            return Err(Error::Constraint {
                what: format!("source is not conditionally independent: {}", r.statement),
                residual: r.residual,
            });
        }
    }
    Ok(())
}

fn side_info_singles(e: &Entropies) -> Result<[f64; 3]> {
    let mut r = [0.0; 3];
    for i in 0..3 {
        r[i] = pos(e.mi_raw(&[SOURCES[i]], &[AUX[i]], &[])? - e.mi_raw(&[AUX[i]], &[Z, F], &[])?);
    }
    Ok(r)
}

/// Simplified bounds on conditionally independent sources, with the four
/// cross terms that vanish there.
#[derive(Debug, Clone, PartialEq)]
pub struct Corollary4 {
    pub bounds: RateRegionBounds,
    pub cross_terms: [(&'static str, f64); 4],
}

pub fn corollary4_bounds(model: &SourceModel, channels: &TestChannelTriple) -> Result<Corollary4> {
    require_bn(model)?;
    let ext = model.extend_with_test_channels(channels)?;
    let e = Entropies::new(&ext);
    let cross_terms = [
        ("I(W1;W2|W3,Z,F)", e.mi(&[W1], &[W2], &[W3, Z, F])?),
        ("I(W1;W3|W2,Z,F)", e.mi(&[W1], &[W3], &[W2, Z, F])?),
        ("I(W2;W3|W1,Z,F)", e.mi(&[W2], &[W3], &[W1, Z, F])?),
        ("I(W1,W2;W3|Z,F)", e.mi(&[W1, W2], &[W3], &[Z, F])?),
    ];
    for (what, v) in cross_terms {
        if v > STRUCTURAL_TOL {
            return Err(Error::Constraint {
                what: format!("{what} should vanish"),
                residual: v,
            });
        }
    }
    let [r1, r2, r3] = side_info_singles(&e)?;
    Ok(Corollary4 {
        bounds: RateRegionBounds {
            r1,
            r2,
            r3,
            r12: Some(r1 + r2),
            r13: Some(r1 + r3),
            r23: Some(r2 + r3),
            r123: Some(r1 + r2 + r3),
            form: BoundForm::Corollary4,
        },
        cross_terms,
    })
}

/// Single-rate bounds `I(X_i;W_i) - I(W_i;Z,F)` for any admissible
/// auxiliary; the sum bounds are dropped.
pub fn corollary5_bounds(model: &SourceModel, aux: &Auxiliary) -> Result<RateRegionBounds> {
    let ext = auxiliary_joint(model, aux)?;
    let [r1, r2, r3] = side_info_singles(&Entropies::new(&ext))?;
    Ok(RateRegionBounds {
        r1,
        r2,
        r3,
        r12: None,
        r13: None,
        r23: None,
        r123: None,
        form: BoundForm::Corollary5,
    })
}

/// Replace a joint auxiliary by its marginal channels
/// `p(w_i|x_i) = sum p(w1,w2,w3|x1,x2,x3) p(x_{-i}|x_i)`. Rows for source
/// symbols of zero probability come out uniform.
pub fn theorem6_wprime(model: &SourceModel, joint_aux: &JointPmf) -> Result<TestChannelTriple> {
    let ext = auxiliary_joint(model, &Auxiliary::Joint(joint_aux.clone()))?;
    let c = |i: usize| ext.condition(&[AUX[i]], &[SOURCES[i]]);
    TestChannelTriple::new([c(0)?, c(1)?, c(2)?])
}

/// Largest difference of the `(X_i, W_i, Z, F)` marginals between two
/// extended joints, one per encoder.
pub fn marginal_residuals(a: &JointPmf, b: &JointPmf) -> Result<[f64; 3]> {
    let mut r = [0.0; 3];
    for i in 0..3 {
        let keep = [SOURCES[i], AUX[i], Z, F];
        r[i] = a.project(&keep)?.max_abs_diff(&b.project(&keep)?)?;
    }
    Ok(r)
}

/// One numerically checked step of the converse argument.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub name: String,
    pub residual: f64,
    pub within_tol: bool,
}

/// Check each equality and each vanishing term used to show that the
/// converse expressions equal the achievable ones on product channels.
/// The two terms that vanish only on conditionally independent sources,
/// `I(X2;W3|Z,F,X1,W1)` and `I(X2;W3|Z,F,X1)`, are checked only when the
/// model passes the structure test.
pub fn verify_converse_identities(
    model: &SourceModel,
    channels: &TestChannelTriple,
    tol: f64,
) -> Result<Vec<IdentityResidual>> {
    let ext = model.extend_with_test_channels(channels)?;
    let e = Entropies::new(&ext);
    let t = InnerTerms::new(&e)?;
    let xs = [X1, X2, X3];
    let mut out: Vec<(String, f64)> = Vec::new();
    let mut zero = |name: &str, v: f64| out.push((name.to_string(), crate::math::abs(v)));
    let mut push_eq = Vec::new();

    for i in 0..3 {
        let [j, k] = others(i);
        let (x, w) = (SOURCES[i], AUX[i]);
        let rest = [AUX[j], AUX[k], Z, F];
        let full = e.mi_raw(&xs, &[w], &rest)?;
        push_eq.push((format!("single {}: I(X1,X2,X3;{w}|rest) = I({x};{w}) - I({w};rest)", i + 1), full - t.single(i)));
        let mut cond = Vec::from(&rest[..]);
        cond.push(x);
        zero(
            &format!("zero: I({},{};{w}|{x},{},{},Z,F)", SOURCES[j], SOURCES[k], AUX[j], AUX[k]),
            e.mi_raw(&[SOURCES[j], SOURCES[k]], &[w], &cond)?,
        );
        zero(
            &format!("zero: I({w};{},{},Z,F|{x})", AUX[j], AUX[k]),
            e.mi_raw(&[w], &rest, &[x])?,
        );
        push_eq.push((
            format!("single {}: I({x};{w}|rest) + I({w};rest) = I({w};{x},rest)", i + 1),
            e.mi_raw(&[x], &[w], &rest)? + t.bin[i] - e.mi_raw(&[w], &[&[x][..], &rest[..]].concat(), &[])?,
        ));
    }

    // pairs (i, j) with the third encoder k as side information
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let (xi, xj, wi, wj, wk) = (SOURCES[i], SOURCES[j], AUX[i], AUX[j], AUX[k]);
        let name = format!("{}{}", i + 1, j + 1);
        let lhs = e.mi_raw(&xs, &[wi, wj], &[wk, Z, F])?;
        push_eq.push((
            format!("pair {name}: I(X1,X2,X3;{wi},{wj}|{wk},Z,F) = expanded"),
            lhs - (t.single(i) + t.single(j) + t.pair[k]),
        ));
        let not_i = [SOURCES[j], SOURCES[k]];
        zero(
            &format!("zero: I({},{};{wi}|{wk},Z,F,{xi})", not_i[0], not_i[1]),
            e.mi_raw(&not_i, &[wi], &[wk, Z, F, xi])?,
        );
        let not_j = [SOURCES[i], SOURCES[k]];
        zero(
            &format!("zero: I({},{};{wj}|{wi},{wk},Z,F,{xj})", not_j[0], not_j[1]),
            e.mi_raw(&not_j, &[wj], &[wi, wk, Z, F, xj])?,
        );
        zero(
            &format!("zero: I({wi};{wj}|{xi},{wk},Z,F)"),
            e.mi_raw(&[wi], &[wj], &[xi, wk, Z, F])?,
        );
        let i_xi_wj = e.mi_raw(&[xi], &[wj], &[wi, wk, Z, F])?;
        push_eq.push((
            format!("pair {name}: I({xi};{wj}|{wi},{wk},Z,F) = I({xi};{wj}|{wk},Z,F) - I({wi};{wj}|{wk},Z,F)"),
            i_xi_wj - (e.mi_raw(&[xi], &[wj], &[wk, Z, F])? - e.mi_raw(&[wi], &[wj], &[wk, Z, F])?),
        ));
        let xk = SOURCES[k];
        push_eq.push((
            format!("pair {name}: I({xj},{xk};{wj}|{wi},{wk},Z,F,{xi}) = I({xj};{wj}|{wi},{wk},Z,F) - I({xi};{wj}|{wi},{wk},Z,F)"),
            e.mi_raw(&[xj, xk], &[wj], &[wi, wk, Z, F, xi])?
                - (e.mi_raw(&[xj], &[wj], &[wi, wk, Z, F])? - i_xi_wj),
        ));
    }

    let lhs = e.mi_raw(&xs, &AUX, &[Z, F])?;
    push_eq.push((
        "triple: I(X1,X2,X3;W1,W2,W3|Z,F) = expanded".to_string(),
        lhs - (t.single(0) + t.single(1) + t.single(2) + t.pair[2] + t.triple),
    ));
    push_eq.push((
        "triple: chain rule over X1, X2, X3".to_string(),
        lhs - (e.mi_raw(&[X1], &AUX, &[Z, F])?
            + e.mi_raw(&[X2], &AUX, &[Z, F, X1])?
            + e.mi_raw(&[X3], &AUX, &[Z, F, X1, X2])?),
    ));
    zero("zero: I(X2;W1|Z,F,X1)", e.mi_raw(&[X2], &[W1], &[Z, F, X1])?);
    zero("zero: I(X3;W1,W2|Z,F,X1,X2)", e.mi_raw(&[X3], &[W1, W2], &[Z, F, X1, X2])?);
    zero("zero: I(X1;W2|Z,F,W1,W3,X2)", e.mi_raw(&[X1], &[W2], &[Z, F, W1, W3, X2])?);
    zero("zero: I(X1,X2;W3|Z,F,W1,W2,X3)", e.mi_raw(&[X1, X2], &[W3], &[Z, F, W1, W2, X3])?);
    zero("zero: I(W1,W2;W3|Z,F,X1,X2)", e.mi_raw(&[W1, W2], &[W3], &[Z, F, X1, X2])?);
    if model.is_bayes_net(STRUCTURAL_TOL) {
        zero("zero: I(X2;W3|Z,F,X1,W1)", e.mi_raw(&[X2], &[W3], &[Z, F, X1, W1])?);
        zero("zero: I(X2;W3|Z,F,X1)", e.mi_raw(&[X2], &[W3], &[Z, F, X1])?);
    }
    push_eq.push((
        "triple: I(X1,X2;W3|Z,F,W1,W2) = I(X1,X2,W1,W2;W3|Z,F) - I(W1,W2;W3|Z,F)".to_string(),
        e.mi_raw(&[X1, X2], &[W3], &[Z, F, W1, W2])?
            - (e.mi_raw(&[X1, X2, W1, W2], &[W3], &[Z, F])? - t.triple),
    ));

    let mut all: Vec<(String, f64)> = push_eq
        .into_iter()
        .map(|(n, v)| (n, crate::math::abs(v)))
        .collect();
    all.extend(out);
    Ok(all
        .into_iter()
        .map(|(name, residual)| IdentityResidual {
            name,
            residual,
            within_tol: residual <= tol,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::binary_entropy;
    use crate::prob::Alphabet;

    fn e1() -> SourceModel {
        SourceModel::reference_e1()
    }

    fn only_first_identity(m: &SourceModel) -> TestChannelTriple {
        TestChannelTriple::constant(m)
            .with_channel(0, ConditionalPmf::identity(m.alphabet(X1).unwrap(), W1))
            .unwrap()
    }

    #[test]
    fn constant_channels_give_zero_everywhere() {
        let m = e1();
        let c = TestChannelTriple::constant(&m);
        let inner = inner_bound(&m, &c).unwrap();
        assert!(inner.values().iter().all(|v| v.unwrap() == 0.0));
        let outer = outer_bound(&m, &Auxiliary::Product(c.clone())).unwrap();
        assert!(outer.bounds.values().iter().all(|v| v.unwrap() == 0.0));
        let c4 = corollary4_bounds(&m, &c).unwrap();
        assert!(c4.bounds.values().iter().all(|v| v.unwrap() == 0.0));
        let c5 = corollary5_bounds(&m, &Auxiliary::Product(c.clone())).unwrap();
        assert_eq!(c5.singles(), [0.0; 3]);
        assert!(c5.r12.is_none() && c5.r123.is_none());
        for r in verify_converse_identities(&m, &c, 1e-12).unwrap() {
            assert!(r.residual <= 1e-12, "{}: {}", r.name, r.residual);
        }
    }

    #[test]
    fn identity_on_x1_only_costs_h_of_x1_given_side_info() {
        let m = e1();
        let ch = only_first_identity(&m);
        let r1 = inner_bound(&m, &ch).unwrap().r1;
        assert!((r1 - binary_entropy(0.1)).abs() < 1e-12);
        assert!((r1 - 0.46900).abs() < 1e-4);
        let c4 = corollary4_bounds(&m, &ch).unwrap();
        assert!((c4.bounds.r1 - r1).abs() < 1e-12);
    }

    #[test]
    fn full_identity_r1_is_conditional_entropy() {
        let m = e1();
        let r1 = inner_bound(&m, &TestChannelTriple::identity(&m)).unwrap().r1;
        let oracle = m.joint().entropy(&MODEL).unwrap() - m.joint().entropy(&[X2, X3, Z, F]).unwrap();
        assert!((r1 - oracle).abs() < 1e-12);
    }

    #[test]
    fn wrong_channel_is_rejected() {
        let m = e1();
        let x2 = m.alphabet(X2).unwrap();
        let c = TestChannelTriple::constant(&m);
        assert!(matches!(
            c.with_channel(0, ConditionalPmf::identity(x2, W1)),
            Err(Error::Model(_))
        ));
        assert!(matches!(
            c.with_channel(0, ConditionalPmf::identity(m.alphabet(X1).unwrap(), "V")),
            Err(Error::Model(_))
        ));
    }

    #[test]
    fn corollary4_refuses_non_bn_models() {
        let base = e1().joint().marginalize(&[X1, X2, Z, F]).unwrap();
        let axes = MODEL.iter().map(|l| Alphabet::binary(*l)).collect();
        let j = JointPmf::from_fn(axes, |d| {
            if d[2] == d[0] {
                base.get(&[d[0], d[1], d[3], d[4]])
            } else {
                0.0
            }
        })
        .unwrap();
        let m = SourceModel::from_joint(j).unwrap();
        let c = TestChannelTriple::constant(&m);
        assert!(matches!(
            corollary4_bounds(&m, &c),
            Err(Error::Constraint { .. })
        ));
    }

    #[test]
    fn joint_auxiliary_violating_markov_is_rejected() {
        // W1 copies X2: not a channel from X1
        let m = e1();
        let ext = m.extend_with_test_channels(&TestChannelTriple::constant(&m)).unwrap();
        let w1 = Alphabet::binary(W1);
        let mut axes: Vec<Alphabet> = ext.axes().to_vec();
        axes[5] = w1;
        let j = JointPmf::from_fn(axes, |d| {
            if d[5] == d[1] {
                ext.get(&[d[0], d[1], d[2], d[3], d[4], 0, 0, 0])
            } else {
                0.0
            }
        })
        .unwrap();
        match outer_bound(&m, &Auxiliary::Joint(j)) {
            Err(Error::Constraint { residual, .. }) => assert!(residual > 0.1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bounds_membership() {
        let b = RateRegionBounds {
            r1: 0.2,
            r2: 0.3,
            r3: 0.0,
            r12: Some(0.6),
            r13: None,
            r23: None,
            r123: Some(0.7),
            form: BoundForm::Inner,
        };
        assert!(!b.contains(&RateTriple::new(0.2, 0.3, 0.2).unwrap(), 1e-12));
        assert!(b.contains(&RateTriple::new(0.3, 0.3, 0.1).unwrap(), 1e-12));
        let c = b.corner();
        assert!(b.contains(&c, 1e-12));
        assert!((c.sum() - 0.7).abs() < 1e-12);
        assert!(RateTriple::new(-0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn identities_hold_on_e1_with_bsc_quarter() {
        let m = e1();
        let c = TestChannelTriple::symmetric(&m, 0.25).unwrap();
        let r = verify_converse_identities(&m, &c, 1e-10).unwrap();
        assert!(r.len() > 20);
        for x in &r {
            assert!(x.within_tol, "{}: {}", x.name, x.residual);
        }
    }

    #[test]
    fn wprime_of_product_is_a_fixed_point() {
        let m = e1();
        let c = TestChannelTriple::symmetric(&m, 0.25).unwrap();
        let ext = m.extend_with_test_channels(&c).unwrap();
        let back = theorem6_wprime(&m, &ext).unwrap();
        for i in 0..3 {
            assert!(back.channel(i).max_abs_diff(c.channel(i)).unwrap() < 1e-12);
        }
        let k = TestChannelTriple::constant(&m);
        let back = theorem6_wprime(&m, &m.extend_with_test_channels(&k).unwrap()).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn outer_equals_inner_for_product_channels() {
        let m = e1();
        let c = TestChannelTriple::symmetric(&m, 0.25).unwrap();
        let inner = inner_bound(&m, &c).unwrap();
        let outer = outer_bound(&m, &Auxiliary::Product(c)).unwrap();
        assert!(outer.product_form);
        for (a, b) in inner.values().iter().zip(outer.bounds.values()) {
            assert!((a.unwrap() - b.unwrap()).abs() < 1e-10);
        }
    }
}
