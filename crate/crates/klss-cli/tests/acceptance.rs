//! Release gate: one pass/fail line per criterion, nonzero exit if any
//! fails. Each criterion is independent and runs even if earlier ones fail.
//!
//! Run directly with `cargo test -p klss-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use klss_core::alphabet::AmplitudeAlphabet;
use klss_core::fer::{run_point, FerSettings};
use klss_core::ldpc::{load_code, CodeRate};
use klss_core::pas::{empirical_mu4, PasChain};
use klss_core::reference::{enumerate_admissible, pmf_by_enumeration};
use klss_core::shaping::{
    frontier_from_table, BoundedTrellis, CompositionTable, QuarticBound, ShapingSpec, SweepPoint,
};

type Criterion = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("trellis matches brute-force enumeration", c01_oracle_equivalence),
        ("round-trip verification command", c02_bijectivity),
        ("loosest quartic bound equals unbounded", c03_generalization),
        ("kurtosis reduction across blocklengths", c04_kurtosis_tables),
        ("energy-kurtosis trade-off on frontiers", c05_trade_off),
        ("frame geometry closure", c06_frame_closure),
        ("zero-noise round trip", c07_zero_noise),
        ("transmitted kurtosis tracks design", c08_transmit_stats),
        ("LDPC encode validity and flip recovery", c09_ldpc_validity),
        ("AWGN shaping gain with separated intervals", c10_shaping_gain),
        ("surrogate link calibration and SNR ordering", c11_surrogate_ordering),
    ];

    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(Ok(detail)) => {
                println!("PASS criterion {:2}: {name} ({secs:.1}s) -- {detail}", i + 1);
            }
            Ok(Err(msg)) => {
                failures += 1;
                println!("FAIL criterion {:2}: {name} ({secs:.1}s) -- {msg}", i + 1);
            }
            Err(panic) => {
                failures += 1;
                let msg = panic
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| panic.downcast_ref::<&str>().copied())
                    .unwrap_or("panic without message");
                println!("FAIL criterion {:2}: {name} ({secs:.1}s) -- panicked: {msg}", i + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} of 11 criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}

fn fail(msg: impl Into<String>) -> Result<String, String> {
    Err(msg.into())
}

fn alphabet(m: u32) -> AmplitudeAlphabet {
    AmplitudeAlphabet::new(m).unwrap()
}

fn spec(n: usize, m: u32, e_max: u64, k_max: QuarticBound) -> ShapingSpec {
    ShapingSpec::new(n, alphabet(m), e_max, k_max).unwrap()
}

/// Criterion 1: on 200 randomized small geometries, the trellis agrees with
/// direct enumeration on cardinality, induced pmf, and the complete rank
/// order, within a minute.
fn c01_oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE01);
    let mut sequences_checked = 0u64;
    for case in 0..200 {
        let n = rng.gen_range(1..=8usize);
        let m = if rng.gen_bool(0.5) { 2u32 } else { 3 };
        let a = alphabet(m);
        let e_max = rng.gen_range(n as u64..=n as u64 * a.max_square());
        let k_max = if rng.gen_bool(1.0 / 3.0) {
            QuarticBound::Unbounded
        } else {
            QuarticBound::Bounded(rng.gen_range(n as u64..=n as u64 * a.max_quartic()))
        };
        let sp = spec(n, m, e_max, k_max);
        let set = enumerate_admissible(&sp);
        let trellis = BoundedTrellis::build(sp.clone())
            .map_err(|e| format!("case {case}: build failed: {e}"))?;
        if trellis.total() != &BigUint::from(set.len()) {
            return fail(format!(
                "case {case} (n={n} m={m} e_max={e_max} k_max={k_max}): cardinality {} != {}",
                trellis.total(),
                set.len()
            ));
        }
        if trellis.induced_pmf() != pmf_by_enumeration(&sp, &set) {
            return fail(format!("case {case}: pmf mismatch"));
        }
        for (rank, seq) in set.iter().enumerate() {
            let idx = BigUint::from(rank);
            if trellis.encode_index(&idx).unwrap() != *seq {
                return fail(format!("case {case}: encode({rank}) disagrees"));
            }
            if trellis.decode_sequence(seq).unwrap() != idx {
                return fail(format!("case {case}: decode rank {rank} disagrees"));
            }
        }
        sequences_checked += set.len() as u64;
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return fail(format!("took {secs:.1}s, budget is 60s"));
    }
    Ok(format!(
        "200 geometries, {sequences_checked} ranked sequences bit-exact"
    ))
}

fn run_cli(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_klss"))
        .args(args)
        .output()
        .expect("binary spawns");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Criterion 2: the round-trip command verifies the bijection exhaustively
/// on small geometries and on 10^4 sampled indices at both n=108 operating
/// points, all inside a minute.
fn c02_bijectivity() -> Result<String, String> {
    let start = Instant::now();
    let small: &[&[&str]] = &[
        &["roundtrip", "--n", "4", "--m", "2", "--emax", "12", "--exhaustive"],
        &["roundtrip", "--n", "4", "--m", "2", "--emax", "20", "--kmax", "164", "--exhaustive"],
        &["roundtrip", "--n", "4", "--m", "2", "--emax", "20", "--kmax", "84", "--exhaustive"],
        &["roundtrip", "--n", "2", "--m", "2", "--emax", "18", "--exhaustive"],
        &["roundtrip", "--n", "6", "--m", "2", "--emax", "24", "--exhaustive"],
        &["roundtrip", "--n", "8", "--m", "2", "--emax", "40", "--kmax", "328", "--exhaustive"],
        &["roundtrip", "--n", "5", "--m", "3", "--emax", "45", "--exhaustive"],
        &["roundtrip", "--n", "8", "--m", "3", "--emax", "88", "--exhaustive"],
        &["roundtrip", "--n", "8", "--m", "3", "--emax", "104", "--kmax", "2120", "--exhaustive"],
    ];
    let sampled: &[&[&str]] = &[
        // Pure energy-bounded operating point.
        &["roundtrip", "--n", "108", "--m", "3", "--k", "162", "--samples", "10000", "--seed", "21"],
        // Mid-frontier kurtosis-bounded operating point.
        &["roundtrip", "--n", "108", "--m", "3", "--k", "162", "--kmax", "16572", "--samples", "10000", "--seed", "22"],
    ];
    let mut runs = 0;
    for args in small.iter().chain(sampled) {
        let (code, out, err) = run_cli(args);
        if code != Some(0) || !out.starts_with("roundtrip ok") {
            return fail(format!("{args:?} -> exit {code:?}, stdout {out:?}, stderr {err:?}"));
        }
        runs += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return fail(format!("took {secs:.1}s, budget is 60s"));
    }
    Ok(format!(
        "{runs} verification runs (9 exhaustive, 2x10^4 sampled at n=108)"
    ))
}

/// Criterion 3: a quartic bound at the loosest spendable value n*(2^m-1)^4
/// is indistinguishable from no bound at the operating geometry: same
/// total, same pmf, same encodes on 10^3 random indices.
fn c03_generalization() -> Result<String, String> {
    let n = 108;
    let a = alphabet(3);
    let e_max = 860;
    let loosest = n as u64 * a.max_quartic();
    let unb = BoundedTrellis::build(spec(n, 3, e_max, QuarticBound::Unbounded)).unwrap();
    let capped = BoundedTrellis::build(spec(n, 3, e_max, QuarticBound::Bounded(loosest))).unwrap();
    if unb.total() != capped.total() {
        return fail("cardinalities differ");
    }
    if unb.induced_pmf() != capped.induced_pmf() {
        return fail("pmfs differ");
    }
    let k = unb.shaping_bits();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE03);
    for i in 0..1000 {
        let idx = random_index(&mut rng, k);
        if unb.encode_index(&idx).unwrap() != capped.encode_index(&idx).unwrap() {
            return fail(format!("encode diverges on sample {i}"));
        }
    }
    Ok(format!(
        "n=108 e_max=860: k_max={loosest} identical to unbounded on 10^3 encodes"
    ))
}

/// Uniform random k-bit index.
fn random_index(rng: &mut ChaCha12Rng, k_bits: u64) -> BigUint {
    let mut bytes = vec![0u8; k_bits.div_ceil(8) as usize];
    rng.fill(&mut bytes[..]);
    let excess = (bytes.len() as u64 * 8 - k_bits) as u32;
    if let Some(top) = bytes.last_mut() {
        *top &= 0xffu8 >> excess;
    }
    BigUint::from_bytes_le(&bytes)
}

fn ess_point(n: usize, k: u64) -> SweepPoint {
    let table = CompositionTable::build(n, &alphabet(3)).unwrap();
    let points = frontier_from_table(&table, k).unwrap();
    points[0].clone()
}

/// Criterion 4: kurtosis tables at m=3 over the rate grid: ESS mu4 grows
/// with blocklength, the frontier minimum beats ESS wherever there is any
/// kurtosis freedom, reference rows are emitted, and the n=108 build stays
/// inside 60 s and 4 GB.
fn c04_kurtosis_tables() -> Result<String, String> {
    // (a) ESS mu4 strictly increasing in n at rate 1.5.
    let mu_by_n: Vec<f64> = [(32usize, 48u64), (64, 96), (108, 162)]
        .iter()
        .map(|&(n, k)| ess_point(n, k).mu4)
        .collect();
    if !(mu_by_n[0] < mu_by_n[1] && mu_by_n[1] < mu_by_n[2]) {
        return fail(format!("ESS mu4 not increasing in n: {mu_by_n:?}"));
    }

    // (b) frontier minimum strictly below ESS wherever the frontier has a
    // second point, for n in {32, 64} across the whole rate grid.
    let mut compared = 0;
    for n in [32usize, 64] {
        let table = CompositionTable::build(n, &alphabet(3)).unwrap();
        for quarters in [2u64, 3, 4, 5, 6] {
            let k = n as u64 * quarters / 4;
            let points = frontier_from_table(&table, k).unwrap();
            if points.len() < 2 {
                continue;
            }
            let anchor = &points[0];
            let best = points.iter().find(|p| p.min_mu4).unwrap();
            if best.mu4 >= anchor.mu4 {
                return fail(format!(
                    "n={n} rate={}: frontier min {:.6} not below ESS {:.6}",
                    quarters as f64 / 4.0,
                    best.mu4,
                    anchor.mu4
                ));
            }
            compared += 1;
        }
    }
    if compared == 0 {
        return fail("no frontier had a second point to compare");
    }

    // (c) reference rows from the tabulation command.
    let (code, out, err) = run_cli(&[
        "kurtosis", "--m", "3", "--rate-grid", "0.5:0.25:1.5", "--n-list", "32,64",
    ]);
    if code != Some(0) {
        return fail(format!("kurtosis command failed: {err}"));
    }
    let uniform_row = out
        .lines()
        .find(|l| l.contains("uniform_reference"))
        .ok_or("no uniform reference row")?;
    let gaussian_row = out
        .lines()
        .find(|l| l.contains("gaussian_reference"))
        .ok_or("no gaussian reference row")?;
    let uniform_val: f64 = uniform_row.rsplit(',').next().unwrap().parse().unwrap();
    let gaussian_val: f64 = gaussian_row.rsplit(',').next().unwrap().parse().unwrap();
    if (uniform_val - 1.38095).abs() > 1e-4 {
        return fail(format!("uniform reference {uniform_val} != 1.38095 +- 1e-4"));
    }
    if gaussian_val != 2.0 {
        return fail(format!("gaussian reference {gaussian_val} != 2.0"));
    }

    // Resource envelope for the full-scale trellis build.
    let build_start = Instant::now();
    let trellis = BoundedTrellis::build(spec(108, 3, 860, QuarticBound::Unbounded)).unwrap();
    let build_secs = build_start.elapsed().as_secs_f64();
    if build_secs >= 60.0 {
        return fail(format!("n=108 trellis build took {build_secs:.1}s"));
    }
    let peak_gb = peak_rss_gb();
    if let Some(gb) = peak_gb {
        if gb >= 4.0 {
            return fail(format!("peak RSS {gb:.2} GB exceeds 4 GB"));
        }
    }
    Ok(format!(
        "ESS mu4 {:.4}<{:.4}<{:.4}; {compared} frontier wins; refs ok; n=108 build {build_secs:.1}s ({} states{})",
        mu_by_n[0],
        mu_by_n[1],
        mu_by_n[2],
        trellis.state_count(),
        peak_gb.map_or(String::new(), |g| format!(", peak {g:.2} GB"))
    ))
}

/// Peak resident set of this process in GB, if the kernel exposes it.
fn peak_rss_gb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0 / 1024.0)
}

/// Criterion 5: energy-kurtosis trade-off along rate-constant frontiers.
/// The minimum-mu4 design strictly reduces kurtosis against the pure
/// energy-bounded anchor on every frontier. Wherever the rate constraint is
/// tight (n >= 32 at >= 0.75 shaped bits per amplitude, which covers every
/// n=108 operating point) that reduction is paid for with mean energy. At
/// slack rates the integer bit target leaves cardinality headroom, so the
/// quartic bound can instead prune rare maximum-energy outliers inside the
/// anchor's own energy budget, improving both axes at once; those frontiers
/// are counted and reported rather than required to pay.
fn c05_trade_off() -> Result<String, String> {
    let mut frontiers = 0;
    let mut paid = 0;
    let mut tight_count = 0;
    let mut free = Vec::new();
    for (n, ks) in [
        (16usize, vec![8u64, 12, 16, 20, 24]),
        (32, vec![16, 24, 32, 40, 48]),
        (64, vec![32, 48, 64, 80, 96]),
        (108, vec![54, 81, 108, 135, 162]),
    ] {
        let table = CompositionTable::build(n, &alphabet(3)).unwrap();
        for k in ks {
            let points = frontier_from_table(&table, k).unwrap();
            let anchor = &points[0];
            let best = points.iter().find(|p| p.min_mu4).unwrap();
            if points.len() > 1 && best.mu4 >= anchor.mu4 - 1e-12 {
                return fail(format!(
                    "n={n} k={k}: no kurtosis reduction at constant rate"
                ));
            }
            let tight = n >= 32 && 4 * k >= 3 * n as u64;
            if tight {
                tight_count += 1;
            }
            if best.mean_energy >= anchor.mean_energy - 1e-12 {
                paid += 1;
            } else if tight {
                return fail(format!(
                    "n={n} k={k}: tight-rate min-mu4 energy {:.6} below anchor {:.6}",
                    best.mean_energy, anchor.mean_energy
                ));
            } else {
                free.push(format!("n={n} k={k}"));
            }
            frontiers += 1;
        }
    }
    Ok(format!(
        "{frontiers} frontiers: mu4 always drops; energy price paid on {paid} incl. all {tight_count} tight-rate; free wins at slack rate: {}",
        free.join(", ")
    ))
}

/// Criterion 6: bit-budget closure of both frame geometries.
fn c06_frame_closure() -> Result<String, String> {
    let shaped = PasChain::shaped(
        BoundedTrellis::build(spec(108, 3, 860, QuarticBound::Unbounded)).unwrap(),
    )
    .unwrap();
    let cfg = shaped.config();
    if cfg.amplitude_bit_count != 432 || cfg.sign_info_bit_count != 108 {
        return fail(format!(
            "shaped split {} + {} != 432 + 108",
            cfg.amplitude_bit_count, cfg.sign_info_bit_count
        ));
    }
    if cfg.amplitude_bit_count + cfg.sign_info_bit_count != 540 {
        return fail("info bits != 540");
    }
    // 216 sign slots = 108 info signs + 108 parity signs.
    if cfg.symbols_per_codeword * 2 != 216 || cfg.codeword_bits - 540 != 108 {
        return fail("sign budget does not close");
    }
    if cfg.bits_per_4d() != 8.0 {
        return fail(format!("shaped net rate {} != 8 bit/4D", cfg.bits_per_4d()));
    }
    let uniform = PasChain::uniform().unwrap();
    if uniform.config().bits_per_4d() != 8.0 {
        return fail(format!(
            "uniform net rate {} != 8 bit/4D",
            uniform.config().bits_per_4d()
        ));
    }
    Ok("432+108=540 info bits, 108+108 signs, both modes 8 bit/4D".into())
}

/// Criterion 7: 10^3 random frames per mode survive a noiseless channel
/// bit-exactly.
fn c07_zero_noise() -> Result<String, String> {
    let chains = [
        PasChain::shaped(
            BoundedTrellis::build(spec(108, 3, 860, QuarticBound::Unbounded)).unwrap(),
        )
        .unwrap(),
        PasChain::uniform().unwrap(),
    ];
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE07);
    for chain in &chains {
        let bits = chain.config().data_bits_per_codeword;
        for frame in 0..1000 {
            let data: Vec<u8> = (0..bits).map(|_| rng.gen_range(0..2u8)).collect();
            let tx = chain.transmit(&data).unwrap();
            let rx = chain.receive(&tx.normalized(), 1e-9, 50).unwrap();
            if rx.data != data || !rx.fec_converged || !rx.shaper_admissible {
                return fail(format!(
                    "{} frame {frame} failed the noiseless round trip",
                    chain.config().mode.label()
                ));
            }
        }
    }
    Ok("1000 shaped + 1000 uniform frames bit-exact".into())
}

/// Criterion 8: kurtosis of over 10^6 transmitted shaped symbols within 1%
/// of the configured trellis moments.
fn c08_transmit_stats() -> Result<String, String> {
    let chain = PasChain::shaped(
        BoundedTrellis::build(spec(108, 3, 860, QuarticBound::Unbounded)).unwrap(),
    )
    .unwrap();
    let design = chain.expected_moments().mu4;
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE08);
    let bits = chain.config().data_bits_per_codeword;
    let mut symbols = Vec::with_capacity(1_000_188);
    while symbols.len() < 1_000_000 {
        let data: Vec<u8> = (0..bits).map(|_| rng.gen_range(0..2u8)).collect();
        symbols.extend(chain.transmit(&data).unwrap().normalized());
    }
    let mu4 = empirical_mu4(&symbols);
    let rel = (mu4 - design).abs() / design;
    if rel >= 0.01 {
        return fail(format!(
            "empirical mu4 {mu4:.6} vs design {design:.6} ({:.2}% off)",
            rel * 100.0
        ));
    }
    Ok(format!(
        "mu4 {mu4:.5} vs design {design:.5} over {} symbols ({:.2}% off)",
        symbols.len(),
        rel * 100.0
    ))
}

/// Criterion 9: every random encode has a zero syndrome for both rates, and
/// the decoder repairs any single high-confidence bit flip.
fn c09_ldpc_validity() -> Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE09);
    for rate in [CodeRate::R23, CodeRate::R56] {
        let code = load_code(rate).unwrap();
        for i in 0..10_000 {
            let info: Vec<u8> = (0..code.info_bits()).map(|_| rng.gen_range(0..2u8)).collect();
            let cw = code.encode(&info).unwrap();
            if !code.syndrome_ok(&cw) {
                return fail(format!("{rate}: nonzero syndrome on encode {i}"));
            }
        }
        let info: Vec<u8> = (0..code.info_bits()).map(|_| rng.gen_range(0..2u8)).collect();
        let cw = code.encode(&info).unwrap();
        for flip in 0..code.codeword_bits() {
            let llrs: Vec<f64> = cw
                .iter()
                .enumerate()
                .map(|(i, &b)| {
                    let sign = if b == 0 { 20.0 } else { -20.0 };
                    if i == flip {
                        -sign
                    } else {
                        sign
                    }
                })
                .collect();
            let dec = code.decode(&llrs, 50);
            if !dec.converged || dec.bits != cw {
                return fail(format!("{rate}: flip at bit {flip} not repaired"));
            }
        }
    }
    Ok("2x10^4 clean syndromes; all 2x648 single flips repaired".into())
}

/// Criterion 10: at a pilot-located mid-waterfall SNR, shaping wins with
/// non-overlapping 95% intervals at 3x10^4 frames per mode.
fn c10_shaping_gain() -> Result<String, String> {
    let uniform = PasChain::uniform().unwrap();
    let shaped = PasChain::shaped(
        BoundedTrellis::build(spec(108, 3, 860, QuarticBound::Unbounded)).unwrap(),
    )
    .unwrap();

    // Pilot: walk the uniform waterfall and keep the highest SNR whose FER
    // still sits in the mid-waterfall band.
    let pilot = FerSettings {
        seed: 1001,
        max_frames: 400,
        min_frames: 400,
        batch_frames: 200,
        target_fer: None,
        decoder_iters: 50,
    };
    let mut operating = None;
    for (i, snr) in [13.0, 13.5, 14.0, 14.5, 15.0].iter().enumerate() {
        let p = run_point(&uniform, *snr, None, i as u64, &pilot);
        if (0.05..=0.5).contains(&p.fer) {
            operating = Some(*snr);
        }
    }
    let Some(snr) = operating else {
        return fail("pilot scan found no SNR with uniform FER in [0.05, 0.5]");
    };

    let full = FerSettings {
        seed: 2002,
        max_frames: 30_000,
        min_frames: 30_000,
        batch_frames: 1_000,
        target_fer: None,
        decoder_iters: 50,
    };
    let u = run_point(&uniform, snr, None, 0, &full);
    let s = run_point(&shaped, snr, None, 1, &full);
    if u.frames < 30_000 || s.frames < 30_000 {
        return fail("fewer than 3x10^4 frames per point");
    }
    if s.fer >= u.fer || s.wilson_high >= u.wilson_low {
        return fail(format!(
            "no separation at {snr} dB: shaped {:.4} [{:.4},{:.4}] vs uniform {:.4} [{:.4},{:.4}]",
            s.fer, s.wilson_low, s.wilson_high, u.fer, u.wilson_low, u.wilson_high
        ));
    }
    Ok(format!(
        "at {snr} dB: shaped FER {:.4} [{:.4},{:.4}] < uniform {:.4} [{:.4},{:.4}]",
        s.fer, s.wilson_low, s.wilson_high, u.fer, u.wilson_low, u.wilson_high
    ))
}

/// Criterion 11: the calibration command pins the launch-power penalties
/// and the optimal-SNR ordering uniform > kurtosis-limited > pure ESS.
fn c11_surrogate_ordering() -> Result<String, String> {
    let (code, out, err) = run_cli(&["calibrate"]);
    if code != Some(0) {
        return fail(format!("calibrate failed: {err}"));
    }
    let doc: serde_json::Value =
        serde_json::from_str(&out).map_err(|e| format!("calibrate output not JSON: {e}"))?;
    let cal = &doc["calibration"];
    let get = |k: &str| -> Result<f64, String> {
        cal[k].as_f64().ok_or_else(|| format!("missing field {k}"))
    };
    let pen_ess = get("penalty_ess_db")?;
    let pen_kess = get("penalty_kess_db")?;
    let snr_u = get("snr_opt_uniform_db")?;
    let snr_k = get("snr_opt_kess_db")?;
    let snr_e = get("snr_opt_ess_db")?;
    if !(snr_u > snr_k && snr_k > snr_e) {
        return fail(format!(
            "SNR ordering violated: uniform {snr_u:.3}, kess {snr_k:.3}, ess {snr_e:.3}"
        ));
    }
    if (pen_ess - 0.35).abs() > 0.02 {
        return fail(format!("ESS penalty {pen_ess:.4} dB not within 0.02 of 0.35"));
    }
    if ((pen_ess - pen_kess) - 0.26).abs() > 0.02 {
        return fail(format!(
            "recovered gap {:.4} dB not within 0.02 of 0.26",
            pen_ess - pen_kess
        ));
    }
    // The eta coefficients must be a genuine quadratic fit, not a collapse.
    let eta1 = doc["eta1"].as_f64().ok_or("missing eta1")?;
    let eta2 = doc["eta2"].as_f64().ok_or("missing eta2")?;
    if eta1 <= 0.0 || eta2 <= 0.0 {
        return fail(format!("degenerate calibration: eta1={eta1}, eta2={eta2}"));
    }
    Ok(format!(
        "SNR* {snr_u:.3} > {snr_k:.3} > {snr_e:.3} dB; penalties {pen_ess:.3}/{pen_kess:.3} dB"
    ))
}
