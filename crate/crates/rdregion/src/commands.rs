//! The four subcommands as library calls. Each validates everything before
//! computing and returns the full output, so nothing partial is written.

use rdregion_core::labels::{AUX, F, SOURCES, Z};
use rdregion_core::optimizer::{
    binary_symmetric_crossover, binary_wz_rate, search, wyner_ziv_reduction, Objective, SearchConfig, WzConfig,
};
use rdregion_core::region::{corollary4_bounds, inner_bound, verify_converse_identities};
use rdregion_core::sim::{run_binning_trials, BinningConfig, TypicalityParams};
use rdregion_core::{RateTriple, STRUCTURAL_TOL};

use crate::error::{CliError, Result};
use crate::model::{load_channels, ModelFile, PairFile, SCHEMA_VERSION};
use crate::num::fmt6;
use crate::report::{analytic_margins, Analytic, Bounds, CheckReport, Residual, SimulationReport};

/// A command's product: the bytes to write, warnings for stderr and the
/// exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub warnings: Vec<String>,
    pub exit: u8,
}

fn json(v: &impl serde::Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn check(file: &ModelFile, channels: Option<&str>, tol: f64) -> Result<Output> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Input(format!("tolerance {tol} must be finite and nonnegative")));
    }
    let model = &file.model;
    let structure: Vec<Residual> = model
        .check_bn_structure()
        .into_iter()
        .map(|r| Residual::new(r.statement, r.residual, tol))
        .collect();
    let (label, ch) = match (channels, &file.channels) {
        (Some(arg), _) => (arg.to_string(), load_channels(arg, model)?),
        (None, Some(c)) => ("model file".to_string(), c.clone()),
        (None, None) => ("identity".to_string(), rdregion_core::TestChannelTriple::identity(model)),
    };
    let identities: Vec<Residual> = verify_converse_identities(model, &ch, tol)?
        .into_iter()
        .map(|r| Residual::new(r.name, r.residual, tol))
        .collect();
    let violations: Vec<String> = structure
        .iter()
        .chain(&identities)
        .filter(|r| !r.ok)
        .map(|r| r.name.clone())
        .collect();
    let pass = violations.is_empty();
    let warnings = violations
        .iter()
        .map(|v| format!("violated: {v} exceeds tolerance {}", fmt6(tol)))
        .collect();
    let report = CheckReport {
        schema_version: SCHEMA_VERSION,
        tolerance: tol,
        bayes_net: model.is_bayes_net(STRUCTURAL_TOL),
        structure,
        channels: label,
        identities,
        violations,
        pass,
    };
    Ok(Output {
        body: json(&report)?,
        warnings,
        exit: if pass { 0 } else { 1 },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionArgs {
    pub grid_step: f64,
    /// `None` means `|X_i| + 1`.
    pub w_sizes: Option<[usize; 3]>,
    pub distortion: [f64; 3],
    pub objective: Objective,
    pub refine_iters: usize,
}

pub fn region(file: &ModelFile, args: &RegionArgs) -> Result<Output> {
    let model = &file.model;
    let cfg = SearchConfig {
        w_alphabet_sizes: args.w_sizes.unwrap_or_else(|| SearchConfig::default_w_sizes(model)),
        grid_step: args.grid_step,
        refine_iters: args.refine_iters,
        distortion_targets: args.distortion,
        objective: args.objective,
        measures: file.distortions.clone(),
    };
    cfg.validate()?;
    let outcome = search(model, &cfg)?;

    let mut header: Vec<String> = ["D1", "D2", "D3", "R1", "R2", "R3", "sum_rate", "bound_form"]
        .map(String::from)
        .to_vec();
    for i in 0..3 {
        let x = model.alphabet(SOURCES[i])?;
        for xs in x.symbols() {
            for w in 0..cfg.w_alphabet_sizes[i] {
                header.push(format!("p({}={w}|{}={xs})", AUX[i], SOURCES[i]));
            }
        }
    }
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&header)?;
    for p in &outcome.points {
        let mut row: Vec<String> = p.distortions.iter().map(|&d| fmt6(d)).collect();
        row.extend(p.rates.as_array().iter().map(|&r| fmt6(r)));
        row.push(fmt6(p.rates.sum()));
        row.push(p.bound_form.as_str().to_string());
        for c in p.channels.channels() {
            row.extend(c.entries().iter().map(|&v| fmt6(v)));
        }
        wtr.write_record(&row)?;
    }
    let body = String::from_utf8(wtr.into_inner().map_err(|e| CliError::Input(e.to_string()))?)
        .expect("csv output is utf-8");
    let mut warnings = Vec::new();
    if outcome.points.is_empty() {
        warnings.push(format!(
            "no channel triple on the grid meets the distortion targets ({}, {}, {})",
            fmt6(args.distortion[0]),
            fmt6(args.distortion[1]),
            fmt6(args.distortion[2])
        ));
    }
    Ok(Output {
        body,
        warnings,
        exit: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateArgs {
    pub channels: Option<String>,
    pub n: usize,
    pub rates: [f64; 3],
    pub rates_prime: [f64; 3],
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
}

pub fn simulate(file: &ModelFile, args: &SimulateArgs) -> Result<Output> {
    let model = &file.model;
    let ch = match (&args.channels, &file.channels) {
        (Some(arg), _) => load_channels(arg, model)?,
        (None, Some(c)) => c.clone(),
        (None, None) => {
            return Err(CliError::Input(
                "no test channels: pass --channels or add a channels object to the model".into(),
            ))
        }
    };
    let cfg = BinningConfig {
        rates: args.rates,
        rates_prime: args.rates_prime,
        params: TypicalityParams::new(args.epsilon, args.n)?,
        trials: args.trials,
        seed: args.seed,
        measures: file.distortions.clone(),
    };
    let inner = inner_bound(model, &ch)?;
    let c4 = if model.is_bayes_net(STRUCTURAL_TOL) {
        Some(Bounds::from(&corollary4_bounds(model, &ch)?.bounds))
    } else {
        None
    };
    let ext = model.extend_with_test_channels(&ch)?;
    let mut cover = [0.0; 3];
    let mut bin = [0.0; 3];
    for m in 0..3 {
        cover[m] = ext.mutual_information(&[SOURCES[m]], &[AUX[m]], &[])?;
        let rest: Vec<&str> = (0..3).filter(|&k| k != m).map(|k| AUX[k]).chain([Z, F]).collect();
        bin[m] = ext.mutual_information(&[AUX[m]], &rest, &[])?;
    }
    let r = RateTriple {
        r1: args.rates[0],
        r2: args.rates[1],
        r3: args.rates[2],
    };
    let (covering_margins, binning_margins) = analytic_margins(cover, bin, args.rates, args.rates_prime);
    let analytic = Analytic {
        inner: Bounds::from(&inner),
        corollary4: c4,
        rates_inside: inner.contains(&r, STRUCTURAL_TOL),
        covering_margins,
        binning_margins,
    };
    let rep = run_binning_trials(model, &ch, &cfg)?;
    let report = SimulationReport::new(&rep, args.n, args.epsilon, args.seed, args.rates, args.rates_prime, analytic);
    Ok(Output {
        body: json(&report)?,
        warnings: Vec::new(),
        exit: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WynerZivArgs {
    pub levels: Vec<f64>,
    pub grid_step: f64,
    pub w_size: usize,
}

/// Parse `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_levels(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Input(format!("bad distortion grid `{s}`"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let out = if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(num).collect::<Result<_>>()?;
        let [a, b, h] = parts[..] else { return Err(bad()) };
        if !(h > 0.0 && b >= a) {
            return Err(bad());
        }
        let k = ((b - a) / h + 1e-9).floor() as usize;
        if k > 100_000 {
            return Err(bad());
        }
        (0..=k).map(|i| a + i as f64 * h).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if out.is_empty() || out.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(bad());
    }
    Ok(out)
}

pub fn wyner_ziv(file: &PairFile, args: &WynerZivArgs) -> Result<Output> {
    let cfg = WzConfig {
        w_size: args.w_size,
        grid_step: args.grid_step,
        levels: args.levels.clone(),
    };
    let pts = wyner_ziv_reduction(&file.joint, &file.distortion, &cfg)?;
    let closed = binary_symmetric_crossover(&file.joint, &file.distortion);
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["D", "R", "R_envelope", "R_closed_form"])?;
    let opt = |v: Option<f64>| v.map(fmt6).unwrap_or_default();
    for p in &pts {
        wtr.write_record([
            fmt6(p.d),
            opt(p.r_grid),
            opt(p.r_envelope),
            opt(closed.map(|e| binary_wz_rate(e, p.d))),
        ])?;
    }
    let body = String::from_utf8(wtr.into_inner().map_err(|e| CliError::Input(e.to_string()))?)
        .expect("csv output is utf-8");
    let warnings = pts
        .iter()
        .filter(|p| p.r_grid.is_none())
        .map(|p| format!("no grid channel reaches distortion {}", fmt6(p.d)))
        .collect();
    Ok(Output {
        body,
        warnings,
        exit: 0,
    })
}
