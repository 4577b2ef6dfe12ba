//! Text and JSON encodings of a pmf.
//!
//! Text: one outcome per line, `x y z p`, whitespace separated, `#` starts a
//! comment. Labels are ordered by first appearance; outcomes that never
//! appear have zero mass.
//!
//! JSON: `{"alphabets": {"X": [...], "Y": [...], "Z": [...]}, "pmf": [{"x":..,"y":..,"z":..,"p":..}, ...]}`.
//! Labels may be strings or numbers; numbers are mapped through their decimal form.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dist::{Alphabet, JointDist3};
use crate::error::{PidError, Result};
use crate::scalar::Real;

pub fn parse_pmf_text<T: Real>(text: &str) -> Result<JointDist3<T>> {
    let mut labels: [Vec<String>; 3] = Default::default();
    let mut index: [HashMap<String, usize>; 3] = Default::default();
    let mut outcomes: Vec<([usize; 3], f64, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(PidError::Parse {
                line: lineno + 1,
                message: format!("expected 4 fields `x y z p`, found {}", fields.len()),
            });
        }
        let p: f64 = fields[3].parse().map_err(|_| PidError::Parse {
            line: lineno + 1,
            message: format!("probability '{}' is not a number", fields[3]),
        })?;
        if !p.is_finite() || p < 0.0 {
            return Err(PidError::Parse {
                line: lineno + 1,
                message: format!("probability {p} of ({}, {}, {}) is negative or not finite", fields[0], fields[1], fields[2]),
            });
        }
        let mut idx = [0usize; 3];
        for k in 0..3 {
            let label = fields[k];
            idx[k] = *index[k].entry(label.to_string()).or_insert_with(|| {
                labels[k].push(label.to_string());
                labels[k].len() - 1
            });
        }
        outcomes.push((idx, p, lineno + 1));
    }
    if outcomes.is_empty() {
        return Err(PidError::Malformed("no outcomes".into()));
    }
    let alphabets = labels.map(|l| Alphabet::new(l).expect("labels are non-empty and unique"));
    assemble(alphabets, outcomes)
}

fn assemble<T: Real>(
    alphabets: [Alphabet; 3],
    outcomes: Vec<([usize; 3], f64, usize)>,
) -> Result<JointDist3<T>> {
    let [_, ny, nz] = [alphabets[0].len(), alphabets[1].len(), alphabets[2].len()];
    let cells = alphabets.iter().map(Alphabet::len).product::<usize>();
    if cells > crate::dist::MAX_CELLS {
        return Err(PidError::TooLarge { cells, limit: crate::dist::MAX_CELLS });
    }
    let mut probs = vec![T::zero(); cells];
    let mut seen = vec![false; cells];
    for ([x, y, z], p, line) in outcomes {
        let i = (x * ny + y) * nz + z;
        if seen[i] {
            return Err(PidError::Parse {
                line,
                message: format!(
                    "outcome ({}, {}, {}) listed twice",
                    alphabets[0].label(x),
                    alphabets[1].label(y),
                    alphabets[2].label(z)
                ),
            });
        }
        seen[i] = true;
        probs[i] = T::lit(p);
    }
    JointDist3::new(alphabets, probs)
}

/// Writes the support of `dist` in the text format (zero cells omitted).
pub fn to_pmf_text<T: Real>(dist: &JointDist3<T>) -> String {
    let [ax, ay, az] = dist.alphabets();
    let mut out = String::new();
    for (x, y, z, p) in dist.support() {
        out.push_str(&format!(
            "{} {} {} {:e}\n",
            ax.label(x),
            ay.label(y),
            az.label(z),
            p.f64()
        ));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct PmfJson {
    alphabets: BTreeMap<String, Vec<Value>>,
    pmf: Vec<BTreeMap<String, Value>>,
}

fn label_of(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(PidError::Malformed(format!("label {other} must be a string or number"))),
    }
}

pub fn parse_pmf_json<T: Real>(text: &str) -> Result<JointDist3<T>> {
    let doc: PmfJson =
        serde_json::from_str(text).map_err(|e| PidError::Malformed(format!("pmf JSON: {e}")))?;
    let mut alphabets = Vec::with_capacity(3);
    for name in ["X", "Y", "Z"] {
        let raw = doc
            .alphabets
            .get(name)
            .ok_or_else(|| PidError::Malformed(format!("missing alphabet '{name}'")))?;
        let labels = raw.iter().map(label_of).collect::<Result<Vec<_>>>()?;
        alphabets.push(Alphabet::new(labels)?);
    }
    let alphabets: [Alphabet; 3] = alphabets.try_into().expect("three alphabets");
    if doc.pmf.is_empty() {
        return Err(PidError::Malformed("no outcomes".into()));
    }
    let mut outcomes = Vec::with_capacity(doc.pmf.len());
    for (n, entry) in doc.pmf.iter().enumerate() {
        let mut idx = [0usize; 3];
        for (k, key) in ["x", "y", "z"].iter().enumerate() {
            let v = entry
                .get(*key)
                .ok_or_else(|| PidError::Malformed(format!("pmf entry {n} lacks '{key}'")))?;
            let label = label_of(v)?;
            idx[k] = alphabets[k].position(&label).ok_or_else(|| {
                PidError::Malformed(format!("pmf entry {n}: '{label}' not in alphabet {}", key.to_uppercase()))
            })?;
        }
        let p = entry
            .get("p")
            .and_then(Value::as_f64)
            .ok_or_else(|| PidError::Malformed(format!("pmf entry {n}: 'p' must be a number")))?;
        if !p.is_finite() || p < 0.0 {
            return Err(PidError::Malformed(format!("pmf entry {n}: probability {p} is negative")));
        }
        outcomes.push((idx, p, n + 1));
    }
    assemble(alphabets, outcomes)
}

pub fn to_pmf_json<T: Real>(dist: &JointDist3<T>) -> Value {
    let [ax, ay, az] = dist.alphabets();
    let pmf: Vec<Value> = dist
        .support()
        .map(|(x, y, z, p)| {
            serde_json::json!({"x": ax.label(x), "y": ay.label(y), "z": az.label(z), "p": p.f64()})
        })
        .collect();
    serde_json::json!({
        "alphabets": {"X": ax.labels(), "Y": ay.labels(), "Z": az.labels()},
        "pmf": pmf,
    })
}

/// Parses either encoding, choosing JSON when the first non-blank character is `{`.
pub fn parse_pmf<T: Real>(text: &str) -> Result<JointDist3<T>> {
    if text.trim_start().starts_with('{') {
        parse_pmf_json(text)
    } else {
        parse_pmf_text(text)
    }
}
