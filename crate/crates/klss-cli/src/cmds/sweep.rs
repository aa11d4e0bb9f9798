//! Full (e_max, k_max) design frontier at one rate, the minimal-mu4 row
//! flagged.

use serde::Serialize;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::shaping::sweep_frontier;
use klss_core::Result;

use crate::output::{columns, ExperimentResult, Value};

use super::{bound_value, Outcome};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Shaping blocklength.
    #[arg(long)]
    pub n: usize,
    /// QAM bits per real axis.
    #[arg(long)]
    pub m: u32,
    /// Target shaping bits per block.
    #[arg(long)]
    pub k: u64,
}

#[derive(Serialize)]
struct Config {
    n: usize,
    m: u32,
    k: u64,
}

pub fn run(args: Args, json: bool) -> Result<Outcome> {
    let alphabet = AmplitudeAlphabet::new(args.m)?;
    let config = Config {
        n: args.n,
        m: args.m,
        k: args.k,
    };
    let points = sweep_frontier(args.n, &alphabet, args.k)?;
    let mut result = ExperimentResult::new(
        "sweep",
        &config,
        columns(&[
            "e_max",
            "k_max",
            "cardinality",
            "k_bits",
            "rate",
            "mean_energy",
            "mu4",
            "min_mu4",
        ]),
    );
    for p in &points {
        result.push(vec![
            Value::U64(p.e_max),
            bound_value(p.k_max),
            Value::Str(p.cardinality.to_string()),
            Value::U64(p.k_bits),
            Value::F64(p.rate),
            Value::F64(p.mean_energy),
            Value::F64(p.mu4),
            Value::U64(p.min_mu4 as u64),
        ]);
    }
    result.emit(json)?;
    Ok(Outcome::Success)
}
