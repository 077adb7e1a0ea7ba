//! Small value grammars shared by flags and config files.

use std::collections::BTreeMap;

use ouwedge::{Family, LevySeed};

use crate::error::{CliError, CliResult};

fn number(text: &str) -> CliResult<f64> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .ok()
        .filter(|v| !v.is_nan())
        .ok_or_else(|| CliError::Usage(format!("'{t}' is not a number")))
}

/// `a`, `a,b,c` or inclusive `start:stop:step`.
pub fn sweep(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => text.split(',').map(number).collect(),
        3 => {
            let (a, b, step) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
            if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
                return Err(CliError::Usage(format!("bad sweep '{text}': need start <= stop and step > 0")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| a + k as f64 * step).collect())
        }
        _ => Err(CliError::Usage(format!("bad sweep '{text}': expected start:stop:step"))),
    }
}

/// `k=v,k=v,...` matched against the family's parameter names.
pub fn basis_params(family: Family, text: &str) -> CliResult<LevySeed> {
    let mut given = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("basis parameter '{item}' is not key=value")))?;
        given.insert(k.trim().to_ascii_lowercase(), number(v)?);
    }
    let names = family.param_names();
    for k in given.keys() {
        if !names.contains(&k.as_str()) {
            return Err(CliError::Usage(format!(
                "unknown {family} parameter '{k}' (expected {})",
                names.join(", ")
            )));
        }
    }
    let values = names
        .iter()
        .map(|n| given.get(*n).copied().ok_or_else(|| CliError::Usage(format!("missing {family} parameter '{n}'"))))
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(LevySeed::from_params(family, &values)?)
}

/// `x,t` site.
pub fn site(text: &str) -> CliResult<(f64, f64)> {
    let (x, t) = text
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("site '{text}' must be x,t")))?;
    Ok((number(x)?, number(t)?))
}

/// `key = value` lines; `#` starts a comment. Later keys override earlier ones.
pub fn key_values(text: &str) -> CliResult<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::ParseError { line: k + 1, reason: format!("expected key = value, found '{line}'") })?;
        out.insert(key.trim().to_ascii_lowercase(), (k + 1, value.trim().to_string()));
    }
    Ok(out)
}
