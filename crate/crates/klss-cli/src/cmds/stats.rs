//! Exact statistics of one shaping set: cardinality, carried bits, rate,
//! induced moments, and the per-level distribution.

use serde::Serialize;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::shaping::{compute_moments, BoundedTrellis, ShapingSpec};
use klss_core::Result;

use crate::output::{columns, ExperimentResult, Value};

use super::{bound_value, quartic_bound, resolve_emax, Outcome};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Shaping blocklength (amplitudes per block).
    #[arg(long)]
    pub n: usize,
    /// QAM bits per real axis; the alphabet is the 2^(m-1) odd levels.
    #[arg(long)]
    pub m: u32,
    /// Energy ceiling. Omit to derive the tightest ceiling for --k.
    #[arg(long, required_unless_present = "k", conflicts_with = "k")]
    pub emax: Option<u64>,
    /// Target shaping bits per block, used to derive --emax when omitted.
    #[arg(long)]
    pub k: Option<u64>,
    /// Fourth-power ceiling. Omitted means unbounded.
    #[arg(long)]
    pub kmax: Option<u64>,
}

#[derive(Serialize)]
struct Config {
    n: usize,
    m: u32,
    emax: u64,
    kmax: Option<u64>,
    derived_from_k: Option<u64>,
}

pub fn run(args: Args, json: bool) -> Result<Outcome> {
    let alphabet = AmplitudeAlphabet::new(args.m)?;
    let bound = quartic_bound(args.kmax);
    let emax = resolve_emax(args.n, &alphabet, args.emax, args.k, bound)?;
    let config = Config {
        n: args.n,
        m: args.m,
        emax,
        kmax: args.kmax,
        derived_from_k: if args.emax.is_none() { args.k } else { None },
    };
    let spec = ShapingSpec::new(args.n, alphabet.clone(), emax, bound)?;
    let trellis = BoundedTrellis::build(spec)?;
    let pmf = trellis.induced_pmf_f64();
    let moments = compute_moments(&pmf, &alphabet)?;

    let mut cols = columns(&[
        "n",
        "m",
        "e_max",
        "k_max",
        "cardinality",
        "k",
        "rate",
        "mean_energy",
        "mu4",
    ]);
    for level in alphabet.levels() {
        cols.push(format!("p{level}"));
    }
    let mut result = ExperimentResult::new("stats", &config, cols);
    let mut row = vec![
        Value::U64(args.n as u64),
        Value::U64(args.m as u64),
        Value::U64(emax),
        bound_value(bound),
        Value::Str(trellis.total().to_string()),
        Value::U64(trellis.shaping_bits()),
        Value::F64(trellis.shaping_bits() as f64 / args.n as f64),
        Value::F64(moments.mean_energy_per_amplitude),
        Value::F64(moments.mu4),
    ];
    row.extend(pmf.iter().map(|&p| Value::F64(p)));
    result.push(row);
    result.emit(json)?;
    Ok(Outcome::Success)
}
