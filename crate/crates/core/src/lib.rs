//! Rate-distortion regions for distributed compression of three correlated
//! sources `X1, X2, X3` with side information `(Z, F)` at the decoder.
//!
//! The crate is organised bottom-up:
//!
//! * [`prob`]: dense finite-alphabet pmfs and information measures (bits).
//! * [`source`]: the five-variable source model, its Bayesian-network
//!   special case, distortion measures and Bayes-optimal decoders.
//! * [`region`]: inner/outer bound evaluation, the conditionally independent
//!   special case, the auxiliary-variable reduction and identity checks.
//! * [`optimizer`]: grid search over test channels, frontier tracing and the
//!   single-source Wyner-Ziv anchor.
//! * [`sim`]: Monte Carlo typicality and random-binning experiments.
//!
//! Everything is `no_std` + `alloc`. The `parallel` feature (which implies
//! `std`) spreads grid sweeps and Monte Carlo trials over a rayon pool;
//! results are merged in index order so outputs do not depend on it.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod math;
pub mod optimizer;
mod par;
pub mod prob;
pub mod random;
pub mod region;
pub mod sim;
pub mod source;

pub use error::{Error, Result};
pub use prob::{Alphabet, ConditionalPmf, JointPmf};
pub use region::{Auxiliary, BoundForm, RateRegionBounds, RateTriple, TestChannelTriple};
pub use source::{BayesNetSpec, DecoderRule, DistortionMeasure, SourceModel};

/// Axis labels of the five-variable source and the three auxiliaries.
pub mod labels {
    pub const X1: &str = "X1";
    pub const X2: &str = "X2";
    pub const X3: &str = "X3";
    pub const Z: &str = "Z";
    pub const F: &str = "F";
    pub const W1: &str = "W1";
    pub const W2: &str = "W2";
    pub const W3: &str = "W3";

    pub const SOURCES: [&str; 3] = [X1, X2, X3];
    pub const AUX: [&str; 3] = [W1, W2, W3];
    pub const SIDE: [&str; 2] = [Z, F];
    /// Canonical axis order of a source model.
    pub const MODEL: [&str; 5] = [X1, X2, X3, Z, F];
    /// Canonical axis order of a model extended by its auxiliaries.
    pub const EXTENDED: [&str; 8] = [X1, X2, X3, Z, F, W1, W2, W3];
}

/// Tolerance under which a negative information quantity is treated as
/// floating-point noise and clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Tolerance for quantities that vanish structurally (Markov chains,
/// conditional independences of a Bayesian network).
pub const STRUCTURAL_TOL: f64 = 1e-9;
/// Tolerance for floating-point identities between two evaluation routes.
pub const IDENTITY_TOL: f64 = 1e-10;
