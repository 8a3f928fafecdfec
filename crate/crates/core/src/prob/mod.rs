//! Exact finite-alphabet probability arithmetic.
//!
//! All information quantities are in bits and follow the `0 log 0 = 0`
//! convention. Storage is dense and row-major (last axis varies fastest);
//! the total state space is capped at [`MAX_ENTRIES`].

mod alphabet;
mod conditional;
mod info;
mod joint;

pub use alphabet::Alphabet;
pub use conditional::ConditionalPmf;
pub use info::Entropies;
pub use joint::JointPmf;
pub(crate) use joint::checked_size;

/// Largest dense tensor any pmf may occupy.
pub const MAX_ENTRIES: usize = 10_000_000;

/// Slack within which a loaded distribution is silently renormalised.
pub const NORMALIZE_SLACK: f64 = 1e-9;
