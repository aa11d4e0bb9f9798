//! Fourth-moment tables over (blocklength, rate) grids: the pure
//! energy-bounded design, the frontier minimum, and the uniform and
//! Gaussian reference levels.

use serde::Serialize;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::shaping::{
    frontier_from_table, uniform_mu4, CompositionTable, QuarticBound, GAUSSIAN_MU4,
};
use klss_core::{Error, Result};

use crate::output::{columns, ExperimentResult, Value};

use super::{parse_grid, Outcome};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// QAM bits per real axis.
    #[arg(long)]
    pub m: u32,
    /// Shaping rates in bits per amplitude: "start:step:stop" or a list.
    #[arg(long = "rate-grid")]
    pub rate_grid: String,
    /// Blocklengths, comma separated.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Vec<usize>,
}

#[derive(Serialize)]
struct Config {
    m: u32,
    rates: Vec<f64>,
    n_list: Vec<usize>,
}

pub fn run(args: Args, json: bool) -> Result<Outcome> {
    let alphabet = AmplitudeAlphabet::new(args.m)?;
    let rates = parse_grid(&args.rate_grid)?;
    if args.n_list.is_empty() {
        return Err(Error::InvalidArgument("--n-list is empty".into()));
    }
    let config = Config {
        m: args.m,
        rates: rates.clone(),
        n_list: args.n_list.clone(),
    };
    let mut result = ExperimentResult::new(
        "kurtosis",
        &config,
        columns(&["n", "rate", "scheme", "e_max", "k_max", "mu4"]),
    );

    for &n in &args.n_list {
        let table = CompositionTable::build(n, &alphabet)?;
        for &rate in &rates {
            let k_real = rate * n as f64;
            let k = k_real.round();
            if (k_real - k).abs() > 1e-9 || k < 0.0 {
                eprintln!("warning: skipping rate {rate} at n={n}: k={k_real} is not an integer");
                continue;
            }
            let k = k as u64;
            if k > (n as u64) * (args.m - 1) as u64 {
                eprintln!("warning: skipping rate {rate} at n={n}: above the full cube");
                continue;
            }
            let e_ess = match table.min_emax(k, QuarticBound::Unbounded) {
                Ok(e) => e,
                Err(Error::InfeasibleRate(msg)) => {
                    eprintln!("warning: skipping rate {rate} at n={n}: {msg}");
                    continue;
                }
                Err(e) => return Err(e),
            };
            let ess = table.aggregates(e_ess, QuarticBound::Unbounded);
            result.push(vec![
                Value::U64(n as u64),
                Value::F64(rate),
                Value::Str("ess".into()),
                Value::U64(e_ess),
                Value::Null,
                Value::F64(ess.mu4(n)),
            ]);
            let frontier = frontier_from_table(&table, k)?;
            let best = frontier
                .iter()
                .find(|p| p.min_mu4)
                .expect("non-empty frontier flags a minimum");
            result.push(vec![
                Value::U64(n as u64),
                Value::F64(rate),
                Value::Str("klss_min".into()),
                Value::U64(best.e_max),
                super::bound_value(best.k_max),
                Value::F64(best.mu4),
            ]);
        }
    }
    result.push(vec![
        Value::Null,
        Value::Null,
        Value::Str("uniform_reference".into()),
        Value::Null,
        Value::Null,
        Value::F64(uniform_mu4(&alphabet)),
    ]);
    result.push(vec![
        Value::Null,
        Value::Null,
        Value::Str("gaussian_reference".into()),
        Value::Null,
        Value::Null,
        Value::F64(GAUSSIAN_MU4),
    ]);
    result.emit(json)?;
    Ok(Outcome::Success)
}
