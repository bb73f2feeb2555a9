//! Sweep value lists: `start:stop:step` ranges or comma-separated numbers.

use crate::error::{CliError, CliResult};

fn number(text: &str) -> CliResult<f64> {
    let t = text.trim();
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("not a finite number: {t:?}")))
}

/// Digits after the decimal point in plain decimal notation, if any.
fn decimals(text: &str) -> Option<i32> {
    let t = text.trim();
    if t.contains(['e', 'E']) {
        return None;
    }
    Some(t.split_once('.').map_or(0, |(_, frac)| frac.len() as i32))
}

/// Expands a value specification.
///
/// Ranges include `stop` when it lies within half a step of the last grid point.
/// Grid points are rounded to the decimal precision written in the range, so
/// `0.1:1.0:0.1` yields exactly the literals `0.1, 0.2, …, 1.0`.
pub fn parse_values(spec: &str) -> CliResult<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(CliError::Usage("empty value list".into()));
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(number).collect(),
        [start, stop, step] => {
            let (a, b, h) = (number(start)?, number(stop)?, number(step)?);
            if h == 0.0 || (b - a) * h < 0.0 {
                return Err(CliError::Usage(format!(
                    "step {h} does not move from {a} towards {b}"
                )));
            }
            let count = ((b - a) / h + 0.5).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(CliError::Usage(format!("range {spec} has too many points")));
            }
            let places = [start, stop, step]
                .iter()
                .map(|t| decimals(t))
                .try_fold(0, |m, d| d.map(|d| m.max(d)));
            Ok((0..count)
                .map(|i| {
                    let v = a + h * i as f64;
                    match places {
                        Some(p) if p <= 15 => {
                            let scale = 10f64.powi(p);
                            (v * scale).round() / scale
                        }
                        _ => v,
                    }
                })
                .collect())
        }
        _ => Err(CliError::Usage(format!(
            "expected start:stop:step or a comma list, got {spec:?}"
        ))),
    }
}
