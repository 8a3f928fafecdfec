//! JSON report shapes. Every real goes through [`crate::num::round6`].

use serde::Serialize;

use rdregion_core::sim::SimReport;
use rdregion_core::RateRegionBounds;

use crate::num::round6;

fn r6<const N: usize>(x: [f64; N]) -> [f64; N] {
    x.map(round6)
}

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub name: String,
    pub residual: f64,
    pub ok: bool,
}

impl Residual {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Residual {
            name: name.into(),
            residual: round6(residual),
            ok: residual <= tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema_version: u64,
    pub tolerance: f64,
    pub bayes_net: bool,
    pub structure: Vec<Residual>,
    /// Where the test channels for the identity checks came from.
    pub channels: String,
    pub identities: Vec<Residual>,
    pub violations: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    pub form: &'static str,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r12: Option<f64>,
    pub r13: Option<f64>,
    pub r23: Option<f64>,
    pub r123: Option<f64>,
}

impl From<&RateRegionBounds> for Bounds {
    fn from(b: &RateRegionBounds) -> Self {
        Bounds {
            form: b.form.as_str(),
            r1: round6(b.r1),
            r2: round6(b.r2),
            r3: round6(b.r3),
            r12: b.r12.map(round6),
            r13: b.r13.map(round6),
            r23: b.r23.map(round6),
            r123: b.r123.map(round6),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRates {
    pub event1: f64,
    pub event2: f64,
    pub event3: f64,
    pub decode_failure: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analytic {
    /// Achievable-region bounds for the simulated channels.
    pub inner: Bounds,
    /// The simplified bounds, present on conditionally independent sources.
    pub corollary4: Option<Bounds>,
    /// Whether the bin rates `R` lie in the achievable region.
    pub rates_inside: bool,
    /// `R'_m - I(X_m;W_m)`: positive when the codebook can cover.
    pub covering_margins: [f64; 3],
    /// `I(W_m; W_-m, Z, F) - (R'_m - R_m)`: positive when the bins are
    /// small enough to be resolved.
    pub binning_margins: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub schema_version: u64,
    pub n: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub rates: [f64; 3],
    pub rates_prime: [f64; 3],
    pub trials: usize,
    pub event1_count: usize,
    pub event2_count: usize,
    pub event3_count: usize,
    pub decode_failures: usize,
    pub successes: usize,
    pub empirical_distortions: [f64; 3],
    pub per_class_rates: ClassRates,
    pub codebook_bits: [u32; 3],
    pub bin_bits: [u32; 3],
    pub analytic: Analytic,
}

impl SimulationReport {
    pub fn new(
        r: &SimReport,
        n: usize,
        epsilon: f64,
        seed: u64,
        rates: [f64; 3],
        rates_prime: [f64; 3],
        analytic: Analytic,
    ) -> Self {
        let c = &r.per_class_rates;
        SimulationReport {
            schema_version: crate::model::SCHEMA_VERSION,
            n,
            epsilon: round6(epsilon),
            seed,
            rates: r6(rates),
            rates_prime: r6(rates_prime),
            trials: r.trials,
            event1_count: r.event1_count,
            event2_count: r.event2_count,
            event3_count: r.event3_count,
            decode_failures: r.decode_failures,
            successes: r.successes,
            empirical_distortions: r6(r.empirical_distortions),
            per_class_rates: ClassRates {
                event1: round6(c.event1),
                event2: round6(c.event2),
                event3: round6(c.event3),
                decode_failure: round6(c.decode_failure),
            },
            codebook_bits: r.codebook_bits,
            bin_bits: r.bin_bits,
            analytic,
        }
    }
}

pub fn analytic_margins(cover: [f64; 3], bin: [f64; 3], rates: [f64; 3], rates_prime: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let mut c = [0.0; 3];
    let mut b = [0.0; 3];
    for m in 0..3 {
        c[m] = round6(rates_prime[m] - cover[m]);
        b[m] = round6(bin[m] - (rates_prime[m] - rates[m]));
    }
    (c, b)
}
