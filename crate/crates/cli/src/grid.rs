//! Parameter grids written as `start:stop:step` or a single value.

use crate::error::{CliError, CliResult};

/// Endpoint slack: a grid reaches `stop` if its last step lands within this.
const ENDPOINT_TOL: f64 = 1e-12;
const MAX_POINTS: usize = 100_000;

pub fn parse_grid(name: &str, text: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::invalid(format!("--{name} '{text}': {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| -> CliResult<f64> {
        let v: f64 = s.trim().parse().map_err(|_| bad(&format!("'{s}' is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("values must be finite"))
        }
    };
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(bad("step must be positive"));
            }
            if stop < start {
                return Err(bad("stop is below start"));
            }
            let span = (stop - start) / step;
            let mut n = span.floor() as usize;
            if (start + (n + 1) as f64 * step - stop).abs() <= ENDPOINT_TOL {
                n += 1;
            }
            if n >= MAX_POINTS {
                return Err(bad("too many grid points"));
            }
            let mut out: Vec<f64> = (0..=n).map(|i| start + i as f64 * step).collect();
            let last = out.last_mut().expect("grid has at least one point");
            if (*last - stop).abs() <= ENDPOINT_TOL {
                *last = stop;
            }
            Ok(out)
        }
        _ => Err(bad("expected a number or start:stop:step")),
    }
}
