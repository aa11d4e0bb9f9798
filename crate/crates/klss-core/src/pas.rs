//! Probabilistic amplitude shaping transceiver: shaper -> amplitude bit
//! labels -> systematic LDPC -> signs -> square-QAM symbols, and the reverse
//! receive chain with per-axis soft demapping.
//!
//! Fixed conventions (see FRAMING.md): reflected Gray labels for amplitude
//! bits, sign bit 0 -> +, index chunks serialized most-significant bit
//! first, consecutive real amplitudes alternate I then Q.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::alphabet::AmplitudeAlphabet;
use crate::error::{Error, Result};
use crate::ldpc::{load_code, CodeRate, LdpcCode};
use crate::shaping::{compute_moments, uniform_pmf, BoundedTrellis, InputMoments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PasMode {
    Shaped,
    Uniform,
}

impl PasMode {
    pub fn label(&self) -> &'static str {
        match self {
            PasMode::Shaped => "shaped",
            PasMode::Uniform => "uniform",
        }
    }
}

/// Bit-budget arithmetic binding shaper blocks, FEC info/parity bits,
/// amplitude bits, and sign bits into one codeword frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PasFrameConfig {
    pub mode: PasMode,
    pub qam_bits_per_real: u32,
    pub fec_rate: String,
    pub shaping_blocklength: usize,
    pub shaping_bits_per_block: usize,
    pub blocks_per_codeword: usize,
    pub amplitude_bit_count: usize,
    pub sign_info_bit_count: usize,
    pub data_bits_per_codeword: usize,
    pub codeword_bits: usize,
    pub symbols_per_codeword: usize,
}

impl PasFrameConfig {
    pub fn bits_per_4d(&self) -> f64 {
        self.data_bits_per_codeword as f64 / (self.symbols_per_codeword as f64 / 2.0)
    }
}

/// One codeword's worth of QAM symbols on the odd-integer lattice, plus the
/// factor normalizing average power to 1 under the configured distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct QamSymbolBlock {
    pub symbols: Vec<Complex64>,
    pub scale: f64,
}

impl QamSymbolBlock {
    pub fn normalized(&self) -> Vec<Complex64> {
        self.symbols.iter().map(|s| s * self.scale).collect()
    }

    /// Writes one normalized "I,Q" pair per line for external DSP tools.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i,q")?;
        for s in self.normalized() {
            writeln!(w, "{},{}", s.re, s.im)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PasDecodeOutcome {
    pub data: Vec<u8>,
    pub fec_converged: bool,
    /// False when the decoded amplitude bits spell a sequence outside the
    /// shaping set (the frame is an error but not a crash).
    pub shaper_admissible: bool,
}

/// An immutable transmit/receive chain for one frame geometry.
pub struct PasChain {
    config: PasFrameConfig,
    alphabet: AmplitudeAlphabet,
    code: LdpcCode,
    shaper: Option<BoundedTrellis>,
    scale: f64,
}

impl PasChain {
    /// Shaped mode with the standard pairing: rate-5/6 FEC around the given
    /// amplitude shaper.
    pub fn shaped(shaper: BoundedTrellis) -> Result<Self> {
        Self::shaped_with_code(shaper, load_code(CodeRate::R56)?)
    }

    pub fn shaped_with_code(shaper: BoundedTrellis, code: LdpcCode) -> Result<Self> {
        let alphabet = shaper.spec().alphabet().clone();
        let m = alphabet.m() as usize;
        if m < 2 {
            return Err(Error::Config(
                "shaped mode needs at least one amplitude bit per axis (m >= 2)".into(),
            ));
        }
        let cw = code.codeword_bits();
        if cw % m != 0 {
            return Err(Error::Config(format!(
                "closure failed: codeword bits {cw} not divisible by {m} bits per axis"
            )));
        }
        let axes = cw / m;
        let n = shaper.spec().n();
        if axes % n != 0 {
            return Err(Error::Config(format!(
                "closure failed: {axes} amplitudes per codeword not divisible into blocks of {n}"
            )));
        }
        if axes % 2 != 0 {
            return Err(Error::Config(format!(
                "closure failed: {axes} amplitudes per codeword cannot pair into I/Q symbols"
            )));
        }
        let blocks = axes / n;
        if axes < code.parity_bits() {
            return Err(Error::Config(format!(
                "closure failed: {axes} sign slots cannot absorb {} parity bits",
                code.parity_bits()
            )));
        }
        let sign_info = axes - code.parity_bits();
        let amp_bits = axes * (m - 1);
        if amp_bits + sign_info != code.info_bits() {
            return Err(Error::Config(format!(
                "closure failed: {amp_bits} amplitude bits + {sign_info} sign-info bits != {} FEC info bits",
                code.info_bits()
            )));
        }
        let k = shaper.shaping_bits() as usize;
        if k == 0 {
            return Err(Error::Config(
                "closure failed: shaper carries zero bits per block".into(),
            ));
        }
        let config = PasFrameConfig {
            mode: PasMode::Shaped,
            qam_bits_per_real: alphabet.m(),
            fec_rate: code.rate().label().to_string(),
            shaping_blocklength: n,
            shaping_bits_per_block: k,
            blocks_per_codeword: blocks,
            amplitude_bit_count: amp_bits,
            sign_info_bit_count: sign_info,
            data_bits_per_codeword: blocks * k + sign_info,
            codeword_bits: cw,
            symbols_per_codeword: axes / 2,
        };
        let pmf = shaper.induced_pmf_f64();
        let e2: f64 = pmf
            .iter()
            .zip(alphabet.squares())
            .map(|(p, &s)| p * s as f64)
            .sum();
        Ok(Self {
            config,
            alphabet,
            code,
            shaper: Some(shaper),
            scale: 1.0 / (2.0 * e2).sqrt(),
        })
    }

    /// Uniform 64-QAM baseline: rate-2/3 FEC, no shaper, every codeword bit
    /// mapped straight onto sign and Gray amplitude bits.
    pub fn uniform() -> Result<Self> {
        Self::uniform_with_code(AmplitudeAlphabet::new(3)?, load_code(CodeRate::R23)?)
    }

    pub fn uniform_with_code(alphabet: AmplitudeAlphabet, code: LdpcCode) -> Result<Self> {
        let m = alphabet.m() as usize;
        let cw = code.codeword_bits();
        if cw % (2 * m) != 0 {
            return Err(Error::Config(format!(
                "closure failed: codeword bits {cw} not divisible by {} bits per symbol",
                2 * m
            )));
        }
        let axes = cw / m;
        let config = PasFrameConfig {
            mode: PasMode::Uniform,
            qam_bits_per_real: alphabet.m(),
            fec_rate: code.rate().label().to_string(),
            shaping_blocklength: 0,
            shaping_bits_per_block: 0,
            blocks_per_codeword: 0,
            amplitude_bit_count: axes * (m - 1),
            sign_info_bit_count: 0,
            data_bits_per_codeword: code.info_bits(),
            codeword_bits: cw,
            symbols_per_codeword: axes / 2,
        };
        let e2: f64 =
            alphabet.squares().iter().sum::<u64>() as f64 / alphabet.len() as f64;
        Ok(Self {
            config,
            alphabet,
            code,
            shaper: None,
            scale: 1.0 / (2.0 * e2).sqrt(),
        })
    }

    pub fn config(&self) -> &PasFrameConfig {
        &self.config
    }

    pub fn alphabet(&self) -> &AmplitudeAlphabet {
        &self.alphabet
    }

    pub fn shaper(&self) -> Option<&BoundedTrellis> {
        self.shaper.as_ref()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Moments of the amplitude distribution this chain is configured to
    /// induce (exact pmf for shaped mode, uniform otherwise).
    pub fn expected_moments(&self) -> InputMoments {
        let pmf = match &self.shaper {
            Some(t) => t.induced_pmf_f64(),
            None => uniform_pmf(&self.alphabet),
        };
        compute_moments(&pmf, &self.alphabet).expect("induced pmfs are normalized")
    }

    pub fn transmit(&self, data: &[u8]) -> Result<QamSymbolBlock> {
        if data.len() != self.config.data_bits_per_codeword {
            return Err(Error::InvalidArgument(format!(
                "data length {} does not match {} data bits per codeword",
                data.len(),
                self.config.data_bits_per_codeword
            )));
        }
        debug_assert!(data.iter().all(|&b| b <= 1));
        match self.config.mode {
            PasMode::Shaped => self.transmit_shaped(data),
            PasMode::Uniform => self.transmit_uniform(data),
        }
    }

    fn transmit_shaped(&self, data: &[u8]) -> Result<QamSymbolBlock> {
        let cfg = &self.config;
        let shaper = self.shaper.as_ref().expect("shaped chain has a shaper");
        let m = self.alphabet.m() as usize;
        let k = cfg.shaping_bits_per_block;

        let mut amplitudes = Vec::with_capacity(cfg.blocks_per_codeword * cfg.shaping_blocklength);
        for b in 0..cfg.blocks_per_codeword {
            let index = bits_to_biguint(&data[b * k..(b + 1) * k]);
            amplitudes.extend(shaper.encode_index(&index)?);
        }
        let sign_info = &data[cfg.blocks_per_codeword * k..];

        let mut info = Vec::with_capacity(self.code.info_bits());
        for &a in &amplitudes {
            let li = self.alphabet.level_index(a).expect("shaper emits alphabet levels");
            let gray = self.alphabet.gray_label(li);
            for b in (0..m - 1).rev() {
                info.push(((gray >> b) & 1) as u8);
            }
        }
        info.extend_from_slice(sign_info);
        let cw = self.code.encode(&info)?;
        let parity = &cw[self.code.info_bits()..];

        let s = cfg.sign_info_bit_count;
        let signed: Vec<f64> = amplitudes
            .iter()
            .enumerate()
            .map(|(t, &a)| {
                let sign_bit = if t < s { sign_info[t] } else { parity[t - s] };
                if sign_bit == 0 {
                    a as f64
                } else {
                    -(a as f64)
                }
            })
            .collect();
        Ok(self.pair_axes(&signed))
    }

    fn transmit_uniform(&self, data: &[u8]) -> Result<QamSymbolBlock> {
        let m = self.alphabet.m() as usize;
        let cw = self.code.encode(data)?;
        let axes = self.config.codeword_bits / m;
        let mut signed = Vec::with_capacity(axes);
        for t in 0..axes {
            let bits = &cw[t * m..(t + 1) * m];
            let mut gray = 0u64;
            for &b in &bits[1..] {
                gray = (gray << 1) | b as u64;
            }
            let li = self
                .alphabet
                .level_index_from_gray(gray)
                .expect("m-1 bits always name a level");
            let a = self.alphabet.levels()[li] as f64;
            signed.push(if bits[0] == 0 { a } else { -a });
        }
        Ok(self.pair_axes(&signed))
    }

    fn pair_axes(&self, signed: &[f64]) -> QamSymbolBlock {
        let symbols = signed
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        QamSymbolBlock {
            symbols,
            scale: self.scale,
        }
    }

    /// Demaps normalized-domain symbols, runs FEC, and recovers the data
    /// bits. `noise_var` is the noise power per complex dimension.
    pub fn receive(
        &self,
        symbols: &[Complex64],
        noise_var: f64,
        max_iters: usize,
    ) -> Result<PasDecodeOutcome> {
        if noise_var <= 0.0 || !noise_var.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be positive and finite, got {noise_var}"
            )));
        }
        if symbols.len() != self.config.symbols_per_codeword {
            return Err(Error::InvalidArgument(format!(
                "got {} symbols, expected {}",
                symbols.len(),
                self.config.symbols_per_codeword
            )));
        }
        let llrs = self.channel_llrs(symbols, noise_var);
        let dec = self.code.decode(&llrs, max_iters);
        match self.config.mode {
            PasMode::Shaped => self.extract_shaped(dec.bits, dec.converged),
            PasMode::Uniform => Ok(PasDecodeOutcome {
                data: dec.bits[..self.code.info_bits()].to_vec(),
                fec_converged: dec.converged,
                shaper_admissible: true,
            }),
        }
    }

    /// Per-codeword channel LLRs in codeword bit order (max-log demapper).
    pub fn channel_llrs(&self, symbols: &[Complex64], noise_var: f64) -> Vec<f64> {
        let m = self.alphabet.m() as usize;
        let cfg = &self.config;
        let mut llrs = vec![0.0; cfg.codeword_bits];
        let axes = cfg.codeword_bits / m;
        for t in 0..axes {
            let y = if t % 2 == 0 {
                symbols[t / 2].re
            } else {
                symbols[t / 2].im
            };
            let axis = axis_llrs_maxlog(y, noise_var, self.scale, &self.alphabet);
            match cfg.mode {
                PasMode::Shaped => {
                    for b in 0..m - 1 {
                        llrs[t * (m - 1) + b] = axis[1 + b];
                    }
                    let s = cfg.sign_info_bit_count;
                    let pos = if t < s {
                        cfg.amplitude_bit_count + t
                    } else {
                        self.code.info_bits() + (t - s)
                    };
                    llrs[pos] = axis[0];
                }
                PasMode::Uniform => {
                    llrs[t * m..(t + 1) * m].copy_from_slice(&axis);
                }
            }
        }
        llrs
    }

    fn extract_shaped(&self, bits: Vec<u8>, converged: bool) -> Result<PasDecodeOutcome> {
        let cfg = &self.config;
        let shaper = self.shaper.as_ref().expect("shaped chain has a shaper");
        let m = self.alphabet.m() as usize;
        let n = cfg.shaping_blocklength;
        let k = cfg.shaping_bits_per_block;
        let mut data = Vec::with_capacity(cfg.data_bits_per_codeword);
        let mut admissible = true;
        for block in 0..cfg.blocks_per_codeword {
            let mut seq = Vec::with_capacity(n);
            for i in 0..n {
                let t = block * n + i;
                let mut gray = 0u64;
                for b in 0..m - 1 {
                    gray = (gray << 1) | bits[t * (m - 1) + b] as u64;
                }
                let li = self
                    .alphabet
                    .level_index_from_gray(gray)
                    .expect("m-1 bits always name a level");
                seq.push(self.alphabet.levels()[li]);
            }
            // Inadmissible decodes (or ranks outside the k-bit index range)
            // make this block unrecoverable; the frame counts as an error.
            let block_bits = shaper
                .decode_sequence(&seq)
                .ok()
                .and_then(|rank| biguint_to_bits(&rank, k));
            match block_bits {
                Some(b) => data.extend(b),
                None => {
                    admissible = false;
                    data.extend(std::iter::repeat(0u8).take(k));
                }
            }
        }
        data.extend_from_slice(
            &bits[cfg.amplitude_bit_count..cfg.amplitude_bit_count + cfg.sign_info_bit_count],
        );
        Ok(PasDecodeOutcome {
            data,
            fec_converged: converged,
            shaper_admissible: admissible,
        })
    }
}

/// Interprets bits most-significant first.
pub fn bits_to_biguint(bits: &[u8]) -> BigUint {
    let mut x = BigUint::zero();
    for &b in bits {
        x = (x << 1u32) | BigUint::from(b);
    }
    x
}

/// Serializes `x` as `width` bits, most-significant first; `None` when `x`
/// does not fit.
pub fn biguint_to_bits(x: &BigUint, width: usize) -> Option<Vec<u8>> {
    if x.bits() as usize > width {
        return None;
    }
    let mut out = vec![0u8; width];
    for i in 0..width {
        if x.bit((width - 1 - i) as u64) {
            out[i] = 1;
        }
    }
    Some(out)
}

/// Max-log LLRs for one real axis: [sign bit, amplitude Gray bits msb-first].
///
/// `y` lives in the normalized domain; candidate points are the scaled
/// signed levels; `noise_var` is per complex dimension (each axis sees half
/// of it), which makes the max-log LLR (min d^2 at bit 1 - min d^2 at bit 0)
/// divided by `noise_var`. Positive means bit 0. Priors are uniform over the
/// constellation; the shaped prior is deliberately not exploited.
pub fn axis_llrs_maxlog(
    y: f64,
    noise_var: f64,
    scale: f64,
    alphabet: &AmplitudeAlphabet,
) -> Vec<f64> {
    let m = alphabet.m() as usize;
    let mut best = vec![[f64::INFINITY; 2]; m];
    for_each_axis_point(scale, alphabet, |x, bits| {
        let d2 = (y - x) * (y - x);
        for (b, &bit) in bits.iter().enumerate() {
            if d2 < best[b][bit as usize] {
                best[b][bit as usize] = d2;
            }
        }
    });
    best.iter().map(|b| (b[1] - b[0]) / noise_var).collect()
}

/// Exact marginalization counterpart of `axis_llrs_maxlog` (test oracle and
/// reference demapper).
pub fn axis_llrs_exact(
    y: f64,
    noise_var: f64,
    scale: f64,
    alphabet: &AmplitudeAlphabet,
) -> Vec<f64> {
    let m = alphabet.m() as usize;
    let mut metrics: Vec<[Vec<f64>; 2]> = vec![[Vec::new(), Vec::new()]; m];
    for_each_axis_point(scale, alphabet, |x, bits| {
        let metric = -((y - x) * (y - x)) / noise_var;
        for (b, &bit) in bits.iter().enumerate() {
            metrics[b][bit as usize].push(metric);
        }
    });
    metrics
        .iter()
        .map(|sides| log_sum_exp(&sides[0]) - log_sum_exp(&sides[1]))
        .collect()
}

fn for_each_axis_point(
    scale: f64,
    alphabet: &AmplitudeAlphabet,
    mut visit: impl FnMut(f64, &[u8]),
) {
    let m = alphabet.m() as usize;
    let mut bits = vec![0u8; m];
    for sign in [0u8, 1u8] {
        for li in 0..alphabet.len() {
            let a = alphabet.levels()[li] as f64 * scale;
            let x = if sign == 0 { a } else { -a };
            bits[0] = sign;
            let gray = alphabet.gray_label(li);
            for b in 0..m - 1 {
                bits[1 + b] = ((gray >> (m - 2 - b)) & 1) as u8;
            }
            visit(x, &bits);
        }
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Empirical standardized fourth moment of complex samples (scale-free).
pub fn empirical_mu4(symbols: &[Complex64]) -> f64 {
    let n = symbols.len() as f64;
    let p2: f64 = symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / n;
    let p4: f64 = symbols.iter().map(|s| s.norm_sqr() * s.norm_sqr()).sum::<f64>() / n;
    p4 / (p2 * p2)
}
