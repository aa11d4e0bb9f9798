//! Fits the link model's kurtosis sensitivities so that the launch-optimized
//! SNR penalties of this artifact's own shaped designs match prescribed
//! targets, and emits the resulting link parameter JSON (directly usable as
//! a --link file; the extra "calibration" block is ignored on load).

use serde::Serialize;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::channel::{
    calibrate_link, launch_optimized_penalty_db, linear_to_db, optimal_launch_power_exact,
    SurrogateLinkParams,
};
use klss_core::shaping::{frontier_from_table, uniform_mu4, CompositionTable, QuarticBound};
use klss_core::Result;

use super::Outcome;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Additive noise power (linear).
    #[arg(long, default_value_t = 2e-3)]
    pub ase: f64,
    /// Kurtosis-independent interference coefficient.
    #[arg(long, default_value_t = 0.5)]
    pub eta0: f64,
    /// Shaping blocklength of the designs being calibrated against.
    #[arg(long, default_value_t = 108)]
    pub n: usize,
    /// QAM bits per real axis.
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    /// Shaping bits per block.
    #[arg(long, default_value_t = 162)]
    pub k: u64,
    /// Target penalty (dB) of the energy-only design vs uniform.
    #[arg(long = "pen-ess", default_value_t = 0.35)]
    pub pen_ess: f64,
    /// Target penalty (dB) of the minimal-mu4 design vs uniform.
    #[arg(long = "pen-kess", default_value_t = 0.09)]
    pub pen_kess: f64,
}

#[derive(Serialize)]
struct CalibrationReport {
    n: usize,
    m: u32,
    k: u64,
    mu4_uniform: f64,
    ess_e_max: u64,
    mu4_ess: f64,
    kess_e_max: u64,
    kess_k_max: u64,
    mu4_kess: f64,
    penalty_ess_db: f64,
    penalty_kess_db: f64,
    snr_opt_uniform_db: f64,
    snr_opt_kess_db: f64,
    snr_opt_ess_db: f64,
}

#[derive(Serialize)]
struct Output {
    #[serde(flatten)]
    link: SurrogateLinkParams,
    calibration: CalibrationReport,
}

pub fn run(args: Args, _json: bool) -> Result<Outcome> {
    let alphabet = AmplitudeAlphabet::new(args.m)?;
    let table = CompositionTable::build(args.n, &alphabet)?;

    let ess_e_max = table.min_emax(args.k, QuarticBound::Unbounded)?;
    let mu4_ess = table
        .aggregates(ess_e_max, QuarticBound::Unbounded)
        .mu4(args.n);
    let frontier = frontier_from_table(&table, args.k)?;
    let best = frontier
        .iter()
        .find(|p| p.min_mu4)
        .expect("non-empty frontier flags a minimum");
    let kess_k_max = match best.k_max {
        QuarticBound::Bounded(v) => v,
        // Degenerate frontier (no active quartic bound): the anchor itself.
        QuarticBound::Unbounded => args.n as u64 * alphabet.max_quartic(),
    };

    let mu4_ref = uniform_mu4(&alphabet);
    let link = calibrate_link(
        args.ase,
        args.eta0,
        mu4_ref,
        [(mu4_ess, args.pen_ess), (best.mu4, args.pen_kess)],
    )?;

    let report = CalibrationReport {
        n: args.n,
        m: args.m,
        k: args.k,
        mu4_uniform: mu4_ref,
        ess_e_max,
        mu4_ess,
        kess_e_max: best.e_max,
        kess_k_max,
        mu4_kess: best.mu4,
        penalty_ess_db: launch_optimized_penalty_db(&link, mu4_ess)?,
        penalty_kess_db: launch_optimized_penalty_db(&link, best.mu4)?,
        snr_opt_uniform_db: linear_to_db(optimal_launch_power_exact(&link, mu4_ref)?.1),
        snr_opt_kess_db: linear_to_db(optimal_launch_power_exact(&link, best.mu4)?.1),
        snr_opt_ess_db: linear_to_db(optimal_launch_power_exact(&link, mu4_ess)?.1),
    };
    let doc = Output { link, calibration: report };
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
    Ok(Outcome::Success)
}
