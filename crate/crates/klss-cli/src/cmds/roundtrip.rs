//! Verifies the index -> sequence -> index bijection, exhaustively over the
//! k-bit index domain or on random samples. Exits 2 on the first mismatch.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::shaping::{BoundedTrellis, ShapingSpec};
use klss_core::{Error, Result};

use super::{quartic_bound, resolve_emax, Outcome};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Shaping blocklength.
    #[arg(long)]
    pub n: usize,
    /// QAM bits per real axis.
    #[arg(long)]
    pub m: u32,
    /// Energy ceiling. Omit to derive the tightest ceiling for --k.
    #[arg(long, required_unless_present = "k", conflicts_with = "k")]
    pub emax: Option<u64>,
    /// Target shaping bits per block, used to derive --emax when omitted.
    #[arg(long)]
    pub k: Option<u64>,
    /// Fourth-power ceiling; omitted means unbounded.
    #[arg(long)]
    pub kmax: Option<u64>,
    /// Check every index in [0, 2^k); requires k <= 20.
    #[arg(long, conflicts_with = "samples", required_unless_present = "samples")]
    pub exhaustive: bool,
    /// Check this many uniformly random k-bit indices instead.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Corrupts the completion-count table first (negative control).
    #[arg(long, hide = true)]
    pub corrupt_table: bool,
}

pub fn run(args: Args, _json: bool) -> Result<Outcome> {
    let alphabet = AmplitudeAlphabet::new(args.m)?;
    let bound = quartic_bound(args.kmax);
    let emax = resolve_emax(args.n, &alphabet, args.emax, args.k, bound)?;
    let spec = ShapingSpec::new(args.n, alphabet, emax, bound)?;
    let mut trellis = BoundedTrellis::build(spec)?;
    if args.corrupt_table {
        trellis.corrupt_terminal_count_for_tests();
    }
    let k = trellis.shaping_bits();

    let verify = |index: BigUint| -> std::result::Result<(), String> {
        let seq = trellis
            .encode_index(&index)
            .map_err(|e| format!("index {index}: encode failed: {e}"))?;
        let rank = trellis
            .decode_sequence(&seq)
            .map_err(|e| format!("index {index}: decode of {seq:?} failed: {e}"))?;
        if rank == index {
            Ok(())
        } else {
            Err(format!("index {index} encoded to {seq:?} but decoded to {rank}"))
        }
    };

    let outcome = if args.exhaustive {
        if k > 20 {
            return Err(Error::InvalidArgument(format!(
                "--exhaustive needs k <= 20, but this set carries k = {k} bits"
            )));
        }
        (0..(1u64 << k)).try_for_each(|i| verify(BigUint::from(i)))
    } else {
        let samples = args
            .samples
            .ok_or_else(|| Error::InvalidArgument("--samples needs a count".into()))?;
        let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
        (0..samples).try_for_each(|_| verify(random_bits(&mut rng, k)))
    };
    match outcome {
        Ok(()) => {
            let count = if args.exhaustive {
                1u64 << k
            } else {
                args.samples.unwrap_or(0)
            };
            println!(
                "roundtrip ok: {count} indices verified (n={}, m={}, e_max={emax}, k_max={bound}, k={k})",
                args.n, args.m
            );
            Ok(Outcome::Success)
        }
        Err(msg) => {
            println!("roundtrip FAILED: {msg}");
            Ok(Outcome::VerificationFailure)
        }
    }
}

/// Uniform draw from [0, 2^bits).
fn random_bits(rng: &mut ChaCha12Rng, bits: u64) -> BigUint {
    let n_bytes = (bits as usize + 7) / 8;
    let mut buf = vec![0u8; n_bytes];
    rng.fill_bytes(&mut buf);
    let excess = (n_bytes * 8) as u64 - bits;
    if let Some(top) = buf.last_mut() {
        // Little-endian byte order puts the most significant byte last.
        *top &= 0xffu8 >> excess;
    }
    BigUint::from_bytes_le(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_bits_stay_in_range() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        for bits in [0u64, 1, 7, 8, 9, 162] {
            let cap = BigUint::from(1u32) << bits;
            for _ in 0..200 {
                assert!(random_bits(&mut rng, bits) < cap);
            }
        }
    }

    #[test]
    fn random_bits_reach_high_values() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let half = BigUint::from(1u32) << 161;
        assert!((0..64).any(|_| random_bits(&mut rng, 162) > half));
    }
}
