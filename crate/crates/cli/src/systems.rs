//! Turning `--system` and parameter flags into catalog specs and sweep rows.

use std::path::Path;

use clap::Args;
use serde_json::Value;
use trivariate_pid::{Role, SystemKind, SystemSpec};

use crate::error::{CliError, CliResult};
use crate::grid::parse_grid;
use crate::output::fmt_num;
use crate::report::Analysis;

#[derive(Args, Debug, Default)]
pub struct SystemArgs {
    /// Catalog system name (copy, and, xor, dice, dyadic, triadic, parallel)
    /// or a path to a system spec JSON file.
    #[arg(long)]
    pub system: Option<String>,
    /// Coupling λ in [0,1]; `start:stop:step` in sweeps.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Dice face count α in 1..=6.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda3: Option<String>,
}

impl SystemArgs {
    fn flag(&self, name: &str) -> Option<&String> {
        match name {
            "lambda" => self.lambda.as_ref(),
            "alpha" => self.alpha.as_ref(),
            "lambda1" => self.lambda1.as_ref(),
            "lambda2" => self.lambda2.as_ref(),
            "lambda3" => self.lambda3.as_ref(),
            _ => None,
        }
    }

    fn any_flag(&self) -> Option<&'static str> {
        ["lambda", "alpha", "lambda1", "lambda2", "lambda3"].into_iter().find(|n| self.flag(n).is_some())
    }

    /// One spec per grid point, in row-major order over the kind's parameters.
    pub fn specs(&self, allow_grid: bool) -> CliResult<Vec<SystemSpec>> {
        let name = self.system.as_deref().ok_or_else(|| CliError::invalid("--system is required"))?;
        let kind = match name.parse::<SystemKind>() {
            Ok(k) => k,
            Err(e) => {
                if !Path::new(name).is_file() {
                    return Err(e.into());
                }
                let text = std::fs::read_to_string(name)
                    .map_err(|e| CliError::invalid(format!("cannot read {name}: {e}")))?;
                let spec = SystemSpec::from_json(&text)?;
                if let Some(f) = self.any_flag() {
                    return Err(CliError::invalid(format!("--{f} cannot be combined with a spec file")));
                }
                return Ok(vec![spec]);
            }
        };
        let accepted = kind.params();
        if let Some(f) = self.any_flag().filter(|f| !accepted.contains(f)) {
            return Err(CliError::invalid(format!("{kind} does not take --{f} (accepted: {accepted:?})")));
        }
        if kind == SystemKind::Markov {
            return Err(CliError::invalid("markov chains need their tables; pass a spec JSON file to --system"));
        }
        let mut specs = vec![SystemSpec::new(kind)];
        for &p in accepted {
            let text = self.flag(p).ok_or_else(|| CliError::invalid(format!("{kind} needs --{p}")))?;
            let values = parse_grid(p, text)?;
            if values.len() > 1 && !allow_grid {
                return Err(CliError::invalid(format!("--{p} takes a single value here; use sweep for grids")));
            }
            specs = specs
                .into_iter()
                .flat_map(|s| values.iter().map(move |&v| s.clone().with(p, number(v))))
                .collect();
        }
        Ok(specs)
    }
}

fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        Value::from(v as i64)
    } else {
        Value::from(v)
    }
}

/// CSV header; append new columns only at the end.
pub const CSV_COLUMNS: [&str; 19] = [
    "kind",
    "lambda",
    "alpha",
    "lambda1",
    "lambda2",
    "lambda3",
    "target",
    "si",
    "sr",
    "nsr",
    "ci",
    "i_sources",
    "rsi",
    "rci",
    "rui_xy",
    "rui_xz",
    "rui_yz",
    "irsi_first",
    "irsi_second",
];

/// One output row per (system, target).
pub fn rows(kind: &str, spec: Option<&SystemSpec>, a: &Analysis, targets: &[Role], digits: usize) -> Vec<Vec<String>> {
    let n = |v: f64| fmt_num(v, digits);
    let param = |name: &str| -> String {
        spec.and_then(|s| s.params.get(name))
            .and_then(Value::as_f64)
            .map(|v| fmt_num(v, digits))
            .unwrap_or_default()
    };
    targets
        .iter()
        .map(|&t| {
            let p = a.pids.get(t);
            let split = a.splits[t.index()];
            let mut row = vec![kind.to_string()];
            row.extend(["lambda", "alpha", "lambda1", "lambda2", "lambda3"].map(param));
            row.push(t.to_string());
            row.extend([p.si, split.sr, split.nsr, p.ci, a.shannon.mi(p.source_a, p.source_b)].map(n));
            row.extend(a.mset.values().map(n));
            row
        })
        .collect()
}

pub fn csv(rows: &[Vec<String>]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Rows as JSON objects keyed by column name, numbers kept as numbers.
pub fn rows_json(rows: &[Vec<String>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                let obj = CSV_COLUMNS
                    .iter()
                    .zip(r)
                    .filter(|(_, v)| !v.is_empty())
                    .map(|(k, v)| {
                        let val = v.parse::<f64>().ok().and_then(serde_json::Number::from_f64).map(Value::Number);
                        (k.to_string(), val.unwrap_or_else(|| Value::String(v.clone())))
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(system: &str) -> SystemArgs {
        SystemArgs { system: Some(system.into()), ..Default::default() }
    }

    #[test]
    fn grid_expands_in_parameter_order() {
        let a = SystemArgs { alpha: Some("1:2:1".into()), lambda: Some("0:1:0.5".into()), ..args("dice") };
        let specs = a.specs(true).unwrap();
        assert_eq!(specs.len(), 6);
        assert_eq!(specs[0].params["lambda"], 0);
        assert_eq!(specs[0].params["alpha"], 1);
        assert_eq!(specs[1].params["alpha"], 2);
        assert_eq!(specs[2].params["lambda"], 0.5);
    }

    #[test]
    fn flag_validation() {
        assert!(args("and").specs(false).is_err());
        assert!(SystemArgs { alpha: Some("2".into()), ..args("and") }.specs(false).is_err());
        assert!(SystemArgs { lambda: Some("0:1:0.5".into()), ..args("and") }.specs(false).is_err());
        assert!(args("markov").specs(false).is_err());
        assert!(args("nonsense").specs(false).is_err());
        assert_eq!(args("xor").specs(false).unwrap().len(), 1);
    }
}
