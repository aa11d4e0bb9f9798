pub mod calibrate;
pub mod fer;
pub mod kurtosis;
pub mod roundtrip;
pub mod stats;
pub mod sweep;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::shaping::{min_emax_for_rate, QuarticBound};
use klss_core::{Error, Result};

use crate::output::Value;

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Success,
    /// A verification command found a mismatch (exit code 2, distinct from
    /// configuration errors).
    VerificationFailure,
}

pub fn quartic_bound(kmax: Option<u64>) -> QuarticBound {
    match kmax {
        Some(v) => QuarticBound::Bounded(v),
        None => QuarticBound::Unbounded,
    }
}

pub fn bound_value(bound: QuarticBound) -> Value {
    match bound {
        QuarticBound::Unbounded => Value::Str("unbounded".into()),
        QuarticBound::Bounded(v) => Value::U64(v),
    }
}

/// Resolves the energy ceiling: taken verbatim from `--emax`, or derived as
/// the smallest ceiling reaching 2^k sequences when only `--k` is given.
pub fn resolve_emax(
    n: usize,
    alphabet: &AmplitudeAlphabet,
    emax: Option<u64>,
    k: Option<u64>,
    bound: QuarticBound,
) -> Result<u64> {
    match (emax, k) {
        (Some(e), _) => Ok(e),
        (None, Some(k)) => min_emax_for_rate(n, alphabet, k, bound),
        (None, None) => Err(Error::InvalidArgument(
            "one of --emax or --k is required".into(),
        )),
    }
}

/// Parses "start:step:stop" (inclusive) or a comma-separated value list into
/// an ascending grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| Error::InvalidArgument(format!("bad grid '{text}': {msg}"));
    let parse = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(&format!("'{s}' is not a number")))?;
        if !v.is_finite() {
            return Err(bad("values must be finite"));
        }
        Ok(v)
    };
    let mut values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("ranges are start:step:stop"));
        }
        let (start, step, stop) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step <= 0.0 {
            return Err(bad("step must be positive"));
        }
        if stop < start {
            return Err(bad("stop is below start"));
        }
        let mut out = Vec::new();
        let mut i = 0u64;
        loop {
            let v = start + i as f64 * step;
            if v > stop + step * 1e-9 {
                break;
            }
            out.push(v);
            i += 1;
        }
        out
    } else {
        text.split(',').map(parse).collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("grid is empty"));
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(values)
}
