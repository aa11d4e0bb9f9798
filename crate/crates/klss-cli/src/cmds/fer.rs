//! Monte-Carlo frame error rate over an SNR grid, or over a launch-power
//! grid mapped through a link model first.

use serde::Serialize;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::channel::{effective_snr, linear_to_db, SurrogateLinkParams};
use klss_core::fer::{run_grid, FerGridEntry, FerSettings};
use klss_core::pas::{PasChain, PasFrameConfig};
use klss_core::shaping::{BoundedTrellis, ShapingSpec};
use klss_core::{Error, Result};

use crate::output::{columns, ExperimentResult, Value};

use super::{parse_grid, quartic_bound, resolve_emax, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Shaped,
    Uniform,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Transmitter flavor: amplitude-shaped rate-5/6 or uniform rate-2/3.
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Shaping blocklength (shaped mode).
    #[arg(long, default_value_t = 108)]
    pub n: usize,
    /// QAM bits per real axis (shaped mode).
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    /// Shaping bits per block (shaped mode).
    #[arg(long, default_value_t = 162)]
    pub k: u64,
    /// Energy ceiling override; defaults to the tightest ceiling for --k.
    #[arg(long)]
    pub emax: Option<u64>,
    /// Fourth-power ceiling (shaped mode); omitted means unbounded.
    #[arg(long)]
    pub kmax: Option<u64>,
    /// SNR grid in dB: "start:step:stop" or a comma list.
    #[arg(long = "snr-grid", required_unless_present = "launch_grid", conflicts_with = "launch_grid")]
    pub snr_grid: Option<String>,
    /// Launch-power grid in linear units, mapped through --link.
    #[arg(long = "launch-grid", requires = "link")]
    pub launch_grid: Option<String>,
    /// Link parameter JSON for launch-grid mode.
    #[arg(long)]
    pub link: Option<std::path::PathBuf>,
    /// Frame budget per grid point.
    #[arg(long, default_value_t = 10_000)]
    pub frames: u64,
    /// Frames to run before early stopping is considered.
    #[arg(long = "min-frames", default_value_t = 1_000)]
    pub min_frames: u64,
    /// Frames between stopping decisions.
    #[arg(long, default_value_t = 500)]
    pub batch: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Reference FER for early stopping (Wilson bound rule).
    #[arg(long = "target-fer")]
    pub target_fer: Option<f64>,
    /// LDPC decoder iteration cap.
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
}

#[derive(Serialize)]
struct Config {
    mode: Mode,
    frame: PasFrameConfig,
    emax: Option<u64>,
    kmax: Option<u64>,
    snr_grid_db: Vec<f64>,
    launch_grid: Option<Vec<f64>>,
    link: Option<SurrogateLinkParams>,
    mu4: f64,
    frames: u64,
    min_frames: u64,
    batch_frames: u64,
    seed: u64,
    target_fer: Option<f64>,
    decoder_iters: usize,
}

pub fn run(args: Args, json: bool) -> Result<Outcome> {
    if args.frames == 0 {
        return Err(Error::InvalidArgument("--frames must be at least 1".into()));
    }
    if let Some(f) = args.target_fer {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "--target-fer must be in (0, 1), got {f}"
            )));
        }
    }
    let (chain, resolved_emax) = match args.mode {
        Mode::Shaped => {
            let alphabet = AmplitudeAlphabet::new(args.m)?;
            let bound = quartic_bound(args.kmax);
            let emax = resolve_emax(args.n, &alphabet, args.emax, Some(args.k), bound)?;
            let spec = ShapingSpec::new(args.n, alphabet, emax, bound)?;
            (PasChain::shaped(BoundedTrellis::build(spec)?)?, Some(emax))
        }
        Mode::Uniform => {
            if args.emax.is_some() || args.kmax.is_some() {
                return Err(Error::InvalidArgument(
                    "--emax/--kmax only apply to shaped mode".into(),
                ));
            }
            (PasChain::uniform()?, None)
        }
    };
    let mu4 = chain.expected_moments().mu4;

    let (entries, link) = match (&args.snr_grid, &args.launch_grid) {
        (Some(grid), None) => {
            let entries = parse_grid(grid)?
                .into_iter()
                .map(|snr_db| FerGridEntry {
                    snr_db,
                    launch_power: None,
                })
                .collect::<Vec<_>>();
            (entries, None)
        }
        (None, Some(grid)) => {
            let path = args.link.as_ref().expect("clap enforces --link");
            let text = std::fs::read_to_string(path)?;
            let link = SurrogateLinkParams::from_json(&text)?;
            let entries = parse_grid(grid)?
                .into_iter()
                .map(|p| {
                    Ok(FerGridEntry {
                        snr_db: linear_to_db(effective_snr(p, &link, mu4)?),
                        launch_power: Some(p),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (entries, Some(link))
        }
        _ => unreachable!("clap enforces exactly one grid flag"),
    };

    let settings = FerSettings {
        seed: args.seed,
        max_frames: args.frames,
        min_frames: args.min_frames,
        batch_frames: args.batch,
        target_fer: args.target_fer,
        decoder_iters: args.iters.max(1),
    };
    let config = Config {
        mode: args.mode,
        frame: chain.config().clone(),
        emax: resolved_emax,
        kmax: args.kmax,
        snr_grid_db: entries.iter().map(|e| e.snr_db).collect(),
        launch_grid: args
            .launch_grid
            .as_ref()
            .map(|_| entries.iter().filter_map(|e| e.launch_power).collect()),
        link,
        mu4,
        frames: settings.max_frames,
        min_frames: settings.min_frames,
        batch_frames: settings.batch_frames,
        seed: settings.seed,
        target_fer: settings.target_fer,
        decoder_iters: settings.decoder_iters,
    };

    let points = run_grid(&chain, &entries, &settings);
    let mut result = ExperimentResult::new(
        "fer",
        &config,
        columns(&[
            "launch_power",
            "snr_db",
            "frames",
            "frame_errors",
            "fer",
            "wilson_low",
            "wilson_high",
        ]),
    );
    for p in &points {
        result.push(vec![
            p.launch_power.map_or(Value::Null, Value::F64),
            Value::F64(p.snr_db),
            Value::U64(p.frames),
            Value::U64(p.frame_errors),
            Value::F64(p.fer),
            Value::F64(p.wilson_low),
            Value::F64(p.wilson_high),
        ]);
    }
    result.emit(json)?;
    Ok(Outcome::Success)
}
