//! Deterministic Monte-Carlo frame-error-rate measurement.
//!
//! Every frame draws its payload and noise from a private generator keyed by
//! (seed, grid index, frame index), so results are byte-identical across
//! thread counts and runs, and grid points never share randomness.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{awgn_apply_with_rng, db_to_linear};
use crate::pas::PasChain;

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FerSettings {
    pub seed: u64,
    pub max_frames: u64,
    /// Early stopping is only consulted once this many frames have run.
    pub min_frames: u64,
    /// Stopping decisions happen at these deterministic boundaries, never
    /// mid-batch, so parallel execution cannot change the frame count.
    pub batch_frames: u64,
    /// Reference rate F for early stopping: a point stops once its Wilson
    /// upper bound falls below F/10 or its lower bound exceeds 10 F.
    pub target_fer: Option<f64>,
    pub decoder_iters: usize,
}

impl Default for FerSettings {
    fn default() -> Self {
        Self {
            seed: 1,
            max_frames: 30_000,
            min_frames: 1_000,
            batch_frames: 500,
            target_fer: None,
            decoder_iters: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FerPoint {
    pub snr_db: f64,
    /// Present when the point was specified as a launch power and mapped
    /// through a link model.
    pub launch_power: Option<f64>,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Wilson score interval for `errors` successes in `trials` Bernoulli draws.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let radius = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - radius).max(0.0), (center + radius).min(1.0))
}

/// Private generator for one frame of one grid point.
pub fn frame_rng(seed: u64, grid_index: u64, frame: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&grid_index.to_le_bytes());
    key[16..24].copy_from_slice(&frame.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var("KLSS_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
        {
            builder = builder.num_threads(n.max(1));
        }
        builder.build().expect("thread pool")
    })
}

fn frame_is_error(chain: &PasChain, snr_db: f64, settings: &FerSettings, grid: u64, frame: u64) -> bool {
    let mut rng = frame_rng(settings.seed, grid, frame);
    let bits = chain.config().data_bits_per_codeword;
    let data: Vec<u8> = (0..bits).map(|_| rng.gen_range(0..2u8)).collect();
    let tx = chain.transmit(&data).expect("frame geometry is fixed");
    let noisy = awgn_apply_with_rng(&tx.normalized(), snr_db, &mut rng);
    let rx = chain
        .receive(&noisy, db_to_linear(-snr_db), settings.decoder_iters)
        .expect("symbol count and noise variance are valid");
    rx.data != data
}

/// Measures FER at one SNR point. `grid_index` keys the randomness so that
/// multi-point sweeps stay reproducible point by point.
pub fn run_point(
    chain: &PasChain,
    snr_db: f64,
    launch_power: Option<f64>,
    grid_index: u64,
    settings: &FerSettings,
) -> FerPoint {
    let max_frames = settings.max_frames.max(1);
    let batch = settings.batch_frames.max(1);
    let mut frames = 0u64;
    let mut errors = 0u64;
    while frames < max_frames {
        let end = (frames + batch).min(max_frames);
        errors += pool().install(|| {
            (frames..end)
                .into_par_iter()
                .filter(|&f| frame_is_error(chain, snr_db, settings, grid_index, f))
                .count() as u64
        });
        frames = end;
        if let Some(target) = settings.target_fer {
            if frames >= settings.min_frames {
                let (lo, hi) = wilson_interval(errors, frames, WILSON_Z95);
                if hi < target / 10.0 || lo > 10.0 * target {
                    break;
                }
            }
        }
    }
    let (wilson_low, wilson_high) = wilson_interval(errors, frames, WILSON_Z95);
    FerPoint {
        snr_db,
        launch_power,
        frames,
        frame_errors: errors,
        fer: errors as f64 / frames as f64,
        wilson_low,
        wilson_high,
    }
}

/// One entry of a measurement grid: an SNR, optionally tagged with the
/// launch power it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FerGridEntry {
    pub snr_db: f64,
    pub launch_power: Option<f64>,
}

pub fn run_grid(chain: &PasChain, grid: &[FerGridEntry], settings: &FerSettings) -> Vec<FerPoint> {
    grid.iter()
        .enumerate()
        .map(|(i, e)| run_point(chain, e.snr_db, e.launch_power, i as u64, settings))
        .collect()
}
