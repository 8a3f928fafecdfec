//! Model files: JSON with `"schema_version": 1` and exactly one of
//! `"joint"` (a nested dense array) or `"bayes_net"` (the five factors),
//! plus optional `"alphabets"`, `"distortions"` and `"channels"`.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "bayes_net": {
//!     "p_f": ["0.5", "0.5"],
//!     "p_z_given_f": [["0.9", "0.1"], ["0.1", "0.9"]],
//!     "p_x1_given_z": [[0.9, 0.1], [0.1, 0.9]],
//!     "p_x2_given_z": [[0.8, 0.2], [0.2, 0.8]],
//!     "p_x3_given_f": [[0.9, 0.1], [0.1, 0.9]]
//!   },
//!   "distortions": { "X1": [[0, 1], [1, 0]] },
//!   "channels": { "W1": [[0.75, 0.25], [0.25, 0.75]], "W2": ..., "W3": ... }
//! }
//! ```
//!
//! Probabilities may be JSON numbers or decimal strings. Rows off by at
//! most `1e-9` are renormalised; anything else is rejected with the factor
//! and row named.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value};

use rdregion_core::labels::{AUX, F, MODEL, SOURCES, X1, X2, X3, Z};
use rdregion_core::prob::NORMALIZE_SLACK;
use rdregion_core::{
    Alphabet, BayesNetSpec, ConditionalPmf, DistortionMeasure, JointPmf, SourceModel, TestChannelTriple,
};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// A validated model file.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: SourceModel,
    /// One per source; Hamming where the file gives none.
    pub distortions: [DistortionMeasure; 3],
    pub channels: Option<TestChannelTriple>,
}

/// A validated two-variable file for the single-encoder command.
#[derive(Debug, Clone)]
pub struct PairFile {
    pub joint: JointPmf,
    /// For the first variable; Hamming where the file gives none.
    pub distortion: DistortionMeasure,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(format!("{what} must be an object")))
}

fn check_version(doc: &Map<String, Value>) -> Result<()> {
    match doc.get("schema_version") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(bad(format!("unsupported schema_version {v}; expected {SCHEMA_VERSION}"))),
        None => Err(bad("missing schema_version")),
    }
}

/// A probability or cost: a JSON number or a decimal string.
fn real(v: &Value, what: &str) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    };
    match x {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(bad(format!("{what}: `{v}` is not a finite number"))),
    }
}

fn vector(v: &Value, what: &str) -> Result<Vec<f64>> {
    let arr = v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))?;
    arr.iter().enumerate().map(|(i, x)| real(x, &format!("{what}[{i}]"))).collect()
}

fn matrix(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    let arr = v.as_array().ok_or_else(|| bad(format!("{what} must be an array of rows")))?;
    if arr.is_empty() {
        return Err(bad(format!("{what} has no rows")));
    }
    let rows: Vec<Vec<f64>> = arr
        .iter()
        .enumerate()
        .map(|(r, row)| vector(row, &format!("{what} row {r}")))
        .collect::<Result<_>>()?;
    let k = rows[0].len();
    if let Some(r) = rows.iter().position(|row| row.len() != k) {
        return Err(bad(format!("{what} row {r} has {} entries, expected {k}", rows[r].len())));
    }
    Ok(rows)
}

/// Check a probability vector and renormalise it within the slack.
fn stochastic(mut row: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if row.is_empty() {
        return Err(bad(format!("{what} is empty")));
    }
    if let Some(i) = row.iter().position(|&p| p < 0.0) {
        return Err(bad(format!("{what} entry {i} is negative ({})", row[i])));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > NORMALIZE_SLACK {
        return Err(bad(format!("{what} sums to {}, not 1", crate::num::fmt6(s))));
    }
    row.iter_mut().for_each(|p| *p /= s);
    Ok(row)
}

fn stochastic_rows(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    matrix(v, what)?
        .into_iter()
        .enumerate()
        .map(|(r, row)| stochastic(row, &format!("{what} row {r}")))
        .collect()
}

/// Declared alphabets, keyed by variable.
fn declared_alphabets(doc: &Map<String, Value>) -> Result<BTreeMap<String, Alphabet>> {
    let mut out = BTreeMap::new();
    if let Some(a) = doc.get("alphabets") {
        for (name, syms) in object(a, "alphabets")? {
            let arr = syms
                .as_array()
                .ok_or_else(|| bad(format!("alphabets.{name} must be an array of symbols")))?;
            let symbols = arr
                .iter()
                .map(|s| match s {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(bad(format!("alphabets.{name}: symbols must be strings or numbers"))),
                })
                .collect::<Result<Vec<_>>>()?;
            out.insert(name.clone(), Alphabet::new(name.clone(), symbols)?);
        }
    }
    Ok(out)
}

fn alphabet_for(decl: &BTreeMap<String, Alphabet>, name: &str, size: usize, what: &str) -> Result<Alphabet> {
    match decl.get(name) {
        Some(a) if a.size() == size => Ok(a.clone()),
        Some(a) => Err(bad(format!(
            "{what} implies {size} symbols for {name}, but alphabets.{name} declares {}",
            a.size()
        ))),
        None => Ok(Alphabet::indexed(name, size)?),
    }
}

/// Flatten a nested array, checking it is a full `depth`-dimensional box.
fn flatten(v: &Value, depth: usize, what: &str) -> Result<(Vec<usize>, Vec<f64>)> {
    fn shape_of(v: &Value, depth: usize) -> Vec<usize> {
        let mut shape = Vec::new();
        let mut cur = v;
        for _ in 0..depth {
            match cur.as_array() {
                Some(a) if !a.is_empty() => {
                    shape.push(a.len());
                    cur = &a[0];
                }
                _ => break,
            }
        }
        shape
    }
    fn walk(v: &Value, shape: &[usize], at: &mut Vec<usize>, out: &mut Vec<f64>, what: &str) -> Result<()> {
        if shape.is_empty() {
            out.push(real(v, &format!("{what}{at:?}"))?);
            return Ok(());
        }
        let arr = v
            .as_array()
            .ok_or_else(|| bad(format!("{what}{at:?} must be an array")))?;
        if arr.len() != shape[0] {
            return Err(bad(format!(
                "{what}{at:?} has {} entries, expected {}",
                arr.len(),
                shape[0]
            )));
        }
        for (i, x) in arr.iter().enumerate() {
            at.push(i);
            walk(x, &shape[1..], at, out, what)?;
            at.pop();
        }
        Ok(())
    }
    let shape = shape_of(v, depth);
    if shape.len() != depth {
        return Err(bad(format!("{what} must be a nested array of depth {depth}")));
    }
    let mut out = Vec::new();
    walk(v, &shape, &mut Vec::new(), &mut out, what)?;
    Ok((shape, out))
}

fn dense_joint(doc: &Map<String, Value>, default_axes: &[&str]) -> Result<JointPmf> {
    let axes: Vec<String> = match doc.get("axes") {
        Some(a) => a
            .as_array()
            .and_then(|a| a.iter().map(|s| s.as_str().map(String::from)).collect::<Option<Vec<_>>>())
            .ok_or_else(|| bad("axes must be an array of variable names"))?,
        None => default_axes.iter().map(|s| s.to_string()).collect(),
    };
    let decl = declared_alphabets(doc)?;
    let (shape, probs) = flatten(&doc["joint"], axes.len(), "joint")?;
    let alphabets = axes
        .iter()
        .zip(&shape)
        .map(|(name, &k)| alphabet_for(&decl, name, k, "joint"))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = probs.iter().position(|&p| p < 0.0) {
        return Err(bad(format!("joint entry {i} is negative")));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > NORMALIZE_SLACK {
        return Err(bad(format!("joint sums to {}, not 1", crate::num::fmt6(s))));
    }
    Ok(JointPmf::new(alphabets, probs)?)
}

fn bayes_net(doc: &Map<String, Value>) -> Result<SourceModel> {
    let bn = object(&doc["bayes_net"], "bayes_net")?;
    let get = |k: &str| bn.get(k).ok_or_else(|| bad(format!("bayes_net.{k} is missing")));
    for k in bn.keys() {
        if !["p_f", "p_z_given_f", "p_x1_given_z", "p_x2_given_z", "p_x3_given_f"].contains(&k.as_str()) {
            return Err(bad(format!("bayes_net.{k} is not a known factor")));
        }
    }
    let decl = declared_alphabets(doc)?;
    let p_f = stochastic(vector(get("p_f")?, "bayes_net.p_f")?, "bayes_net.p_f")?;
    let f = alphabet_for(&decl, F, p_f.len(), "bayes_net.p_f")?;
    let factor = |key: &str, given: &Alphabet, out: &str| -> Result<ConditionalPmf> {
        let what = format!("bayes_net.{key}");
        let rows = stochastic_rows(get(key)?, &what)?;
        if rows.len() != given.size() {
            return Err(bad(format!(
                "{what} has {} rows but {} has {} symbols",
                rows.len(),
                given.name(),
                given.size()
            )));
        }
        let out = alphabet_for(&decl, out, rows[0].len(), &what)?;
        Ok(ConditionalPmf::from_rows(vec![given.clone()], out, rows)?)
    };
    let p_z_given_f = factor("p_z_given_f", &f, Z)?;
    let z = p_z_given_f.out_axis().clone();
    let spec = BayesNetSpec {
        p_f: JointPmf::new(vec![f.clone()], p_f)?,
        p_x1_given_z: factor("p_x1_given_z", &z, X1)?,
        p_x2_given_z: factor("p_x2_given_z", &z, X2)?,
        p_x3_given_f: factor("p_x3_given_f", &f, X3)?,
        p_z_given_f,
    };
    Ok(spec.assemble_joint()?)
}

fn distortion(doc: &Map<String, Value>, source: &Alphabet) -> Result<DistortionMeasure> {
    let name = source.name();
    let Some(d) = doc.get("distortions").and_then(|d| d.get(name)) else {
        return Ok(DistortionMeasure::hamming(source));
    };
    let what = format!("distortions.{name}");
    let (cost_v, recon) = match d {
        Value::Object(o) => {
            let cost = o.get("cost").ok_or_else(|| bad(format!("{what}.cost is missing")))?;
            let recon = match o.get("recon") {
                Some(r) => Some(
                    r.as_array()
                        .and_then(|a| a.iter().map(|s| s.as_str().map(String::from)).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| bad(format!("{what}.recon must be an array of symbols")))?,
                ),
                None => None,
            };
            (cost, recon)
        }
        other => (other, None),
    };
    let rows = matrix(cost_v, &what)?;
    if rows.len() != source.size() {
        return Err(bad(format!("{what} has {} rows, {name} has {} symbols", rows.len(), source.size())));
    }
    let k = rows[0].len();
    let recon_name = format!("{name}_hat");
    let recon = match recon {
        Some(syms) if syms.len() == k => Alphabet::new(recon_name, syms)?,
        Some(syms) => {
            return Err(bad(format!("{what}.recon has {} symbols but the rows have {k} columns", syms.len())))
        }
        None if k == source.size() => source.renamed(recon_name),
        None => Alphabet::indexed(recon_name, k)?,
    };
    Ok(DistortionMeasure::new(source.clone(), recon, rows.concat())?)
}

/// Parse a `{"W1": rows, "W2": rows, "W3": rows}` object against `model`.
pub fn channels_from(v: &Value, model: &SourceModel, what: &str) -> Result<TestChannelTriple> {
    let o = object(v, what)?;
    for k in o.keys() {
        if !AUX.contains(&k.as_str()) {
            return Err(bad(format!("{what}.{k} is not one of W1, W2, W3")));
        }
    }
    let mut chans = Vec::with_capacity(3);
    for (i, w) in AUX.iter().enumerate() {
        let key = format!("{what}.{w}");
        let rows = stochastic_rows(o.get(*w).ok_or_else(|| bad(format!("{key} is missing")))?, &key)?;
        let x = model.alphabet(SOURCES[i])?;
        if rows.len() != x.size() {
            return Err(bad(format!("{key} has {} rows, {} has {} symbols", rows.len(), x.name(), x.size())));
        }
        let out = Alphabet::indexed(*w, rows[0].len())?;
        chans.push(ConditionalPmf::from_rows(vec![x.clone()], out, rows)?);
    }
    let [a, b, c]: [ConditionalPmf; 3] = chans.try_into().expect("three channels");
    Ok(TestChannelTriple::new([a, b, c])?)
}

pub fn parse_model(v: &Value) -> Result<ModelFile> {
    let doc = object(v, "model file")?;
    check_version(doc)?;
    let model = match (doc.contains_key("joint"), doc.contains_key("bayes_net")) {
        (true, false) => {
            let j = dense_joint(doc, &MODEL)?;
            if j.axes().len() != 5 || MODEL.iter().any(|l| !j.has_axis(l)) {
                return Err(bad("joint must range over exactly X1, X2, X3, Z, F"));
            }
            SourceModel::from_joint(j)?
        }
        (false, true) => bayes_net(doc)?,
        (true, true) => return Err(bad("give either joint or bayes_net, not both")),
        (false, false) => return Err(bad("model file needs a joint or a bayes_net")),
    };
    let d = |i: usize| distortion(doc, model.alphabet(SOURCES[i])?);
    let distortions = [d(0)?, d(1)?, d(2)?];
    let channels = match doc.get("channels") {
        Some(c) => Some(channels_from(c, &model, "channels")?),
        None => None,
    };
    Ok(ModelFile {
        model,
        distortions,
        channels,
    })
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    parse_model(&read_json(path)?).map_err(|e| prefix(path, e))
}

pub fn parse_pair(v: &Value) -> Result<PairFile> {
    let doc = object(v, "model file")?;
    check_version(doc)?;
    if !doc.contains_key("joint") {
        return Err(bad("the single-encoder command needs a two-variable joint"));
    }
    let joint = dense_joint(doc, &["X", "Y"])?;
    if joint.axes().len() != 2 {
        return Err(bad(format!("expected two variables, got {}", joint.axes().len())));
    }
    let distortion = distortion(doc, &joint.axes()[0])?;
    Ok(PairFile { joint, distortion })
}

pub fn load_pair(path: &Path) -> Result<PairFile> {
    parse_pair(&read_json(path)?).map_err(|e| prefix(path, e))
}

/// Channels from a standalone file (`{"schema_version": 1, "channels": {...}}`)
/// or one of the shorthands `identity`, `constant`, `symmetric:<crossover>`.
pub fn load_channels(arg: &str, model: &SourceModel) -> Result<TestChannelTriple> {
    if arg == "identity" {
        return Ok(TestChannelTriple::identity(model));
    }
    if arg == "constant" {
        return Ok(TestChannelTriple::constant(model));
    }
    if let Some(p) = arg.strip_prefix("symmetric:") {
        let e: f64 = p.parse().map_err(|_| bad(format!("bad crossover in `{arg}`")))?;
        return Ok(TestChannelTriple::symmetric(model, e)?);
    }
    let path = Path::new(arg);
    let v = read_json(path)?;
    let doc = object(&v, "channel file")?;
    check_version(doc)?;
    let c = doc.get("channels").ok_or_else(|| bad(format!("{arg}: no channels object")))?;
    channels_from(c, model, "channels").map_err(|e| prefix(path, e))
}

fn prefix(path: &Path, e: CliError) -> CliError {
    match e {
        CliError::Input(m) if !m.starts_with(&path.display().to_string()) => {
            CliError::Input(format!("{}: {m}", path.display()))
        }
        CliError::Core(c) => CliError::Input(format!("{}: {c}", path.display())),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn e1() -> Value {
        json!({
            "schema_version": 1,
            "bayes_net": {
                "p_f": ["0.5", "0.5"],
                "p_z_given_f": [["0.9", "0.1"], ["0.1", "0.9"]],
                "p_x1_given_z": [[0.9, 0.1], [0.1, 0.9]],
                "p_x2_given_z": [[0.8, 0.2], [0.2, 0.8]],
                "p_x3_given_f": [[0.9, 0.1], [0.1, 0.9]]
            }
        })
    }

    #[test]
    fn bayes_net_matches_reference() {
        let m = parse_model(&e1()).unwrap();
        let diff = m.model.joint().max_abs_diff(SourceModel::reference_e1().joint()).unwrap();
        assert!(diff < 1e-15);
        assert!(m.channels.is_none());
    }

    #[test]
    fn bad_row_names_factor_and_row() {
        let mut v = e1();
        v["bayes_net"]["p_x2_given_z"][1] = json!(["0.2", "0.7"]);
        let e = parse_model(&v).unwrap_err().to_string();
        assert!(e.contains("p_x2_given_z row 1"), "{e}");
        assert!(e.contains("0.9"), "{e}");
    }

    #[test]
    fn rows_within_slack_are_renormalised() {
        let mut v = e1();
        v["bayes_net"]["p_f"] = json!(["0.5", "0.5000000001"]);
        assert!(parse_model(&v).is_ok());
    }

    #[test]
    fn dense_joint_round_trip() {
        let e = SourceModel::reference_e1();
        let p = e.joint().probs();
        let nest: Vec<Value> = p
            .chunks(16)
            .map(|a| {
                json!(a
                    .chunks(8)
                    .map(|b| b.chunks(4).map(|c| c.chunks(2).map(|d| json!(d)).collect::<Vec<_>>()).collect::<Vec<_>>())
                    .collect::<Vec<_>>())
            })
            .collect();
        let v = json!({"schema_version": 1, "joint": nest});
        let m = parse_model(&v).unwrap();
        assert!(m.model.joint().max_abs_diff(e.joint()).unwrap() < 1e-15);
    }

    #[test]
    fn structural_errors() {
        let mut v = e1();
        v["joint"] = json!([]);
        assert!(parse_model(&v).unwrap_err().to_string().contains("not both"));
        let v = json!({"schema_version": 2, "joint": []});
        assert!(parse_model(&v).unwrap_err().to_string().contains("schema_version"));
        let v = json!({"schema_version": 1, "joint": [[0.5, 0.5], [0.0]]});
        assert!(parse_model(&v).is_err());
        let mut v = e1();
        v["bayes_net"]["p_x1_given_z"] = json!([[1.0, 0.0]]);
        assert!(parse_model(&v).unwrap_err().to_string().contains("rows"));
    }

    #[test]
    fn channels_and_distortions() {
        let mut v = e1();
        v["channels"] = json!({
            "W1": [[0.75, 0.25], [0.25, 0.75]],
            "W2": [[1, 0, 0], [0, 0.5, 0.5]],
            "W3": [[1], [1]]
        });
        v["distortions"] = json!({"X2": {"cost": [[0, 1, 0.5], [1, 0, 0.5]], "recon": ["0", "1", "?"]}});
        let m = parse_model(&v).unwrap();
        let c = m.channels.unwrap();
        assert_eq!(c.channel(1).out_axis().size(), 3);
        assert_eq!(m.distortions[1].recon().size(), 3);
        assert_eq!(m.distortions[0].costs(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn pair_files() {
        let v = json!({"schema_version": 1, "axes": ["X", "Y"], "joint": [["0.375", "0.125"], ["0.125", "0.375"]]});
        let p = parse_pair(&v).unwrap();
        assert_eq!(p.joint.axes()[0].name(), "X");
        assert_eq!(p.distortion.costs(), &[0.0, 1.0, 1.0, 0.0]);
    }
}
