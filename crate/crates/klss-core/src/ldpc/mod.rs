//! Quasi-cyclic LDPC encoder and decoder for the 648-bit IEEE 802.11n codes
//! at rates 2/3 and 5/6.
//!
//! Base matrices live in data files ("z nrows ncols" header, then rows of
//! circulant shifts, -1 for the all-zero block) so they can be audited
//! against the standard's tables. Bit/LLR sign convention throughout the
//! repo: a positive LLR means bit 0.

use crate::error::{Error, Result};

pub const CODEWORD_BITS: usize = 648;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeRate {
    R23,
    R56,
}

impl CodeRate {
    pub fn numerator(&self) -> usize {
        match self {
            CodeRate::R23 => 2,
            CodeRate::R56 => 5,
        }
    }

    pub fn denominator(&self) -> usize {
        match self {
            CodeRate::R23 => 3,
            CodeRate::R56 => 6,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator() as f64 / self.denominator() as f64
    }

    pub fn info_bits(&self) -> usize {
        CODEWORD_BITS * self.numerator() / self.denominator()
    }

    pub fn parity_bits(&self) -> usize {
        CODEWORD_BITS - self.info_bits()
    }

    pub fn label(&self) -> &'static str {
        match self {
            CodeRate::R23 => "2/3",
            CodeRate::R56 => "5/6",
        }
    }
}

impl std::fmt::Display for CodeRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug)]
pub struct LdpcCode {
    rate: CodeRate,
    z: usize,
    base: Vec<Vec<i32>>,
    n: usize,
    k: usize,
    /// Bit positions of each expanded parity check, one entry per base row
    /// times circulant offset.
    check_neighbors: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdpcDecodeResult {
    pub bits: Vec<u8>,
    pub converged: bool,
    pub iterations: usize,
}

pub fn load_code(rate: CodeRate) -> Result<LdpcCode> {
    let text = match rate {
        CodeRate::R23 => include_str!("data/wifi_648_r23.txt"),
        CodeRate::R56 => include_str!("data/wifi_648_r56.txt"),
    };
    let (z, base) = parse_base_matrix(text)?;
    LdpcCode::from_base(rate, z, base)
}

/// Parses the documented base-matrix format: a "z nrows ncols" header line,
/// then nrows whitespace-separated rows of ncols shift entries.
pub fn parse_base_matrix(text: &str) -> Result<(usize, Vec<Vec<i32>>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::BadData("empty base-matrix file".into()))?;
    let header: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::BadData(format!("bad header token {t:?}")))
        })
        .collect::<Result<_>>()?;
    let [z, nrows, ncols] = header[..] else {
        return Err(Error::BadData("header must be: z nrows ncols".into()));
    };
    if z == 0 || nrows == 0 || ncols == 0 {
        return Err(Error::BadData("header values must be positive".into()));
    }
    let mut base = Vec::with_capacity(nrows);
    for line in lines {
        let row: Vec<i32> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i32>()
                    .map_err(|_| Error::BadData(format!("bad shift token {t:?}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != ncols {
            return Err(Error::BadData(format!(
                "row has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for &s in &row {
            if s < -1 || s >= z as i32 {
                return Err(Error::BadData(format!("shift {s} outside -1..{z}")));
            }
        }
        base.push(row);
    }
    if base.len() != nrows {
        return Err(Error::BadData(format!(
            "found {} rows, expected {nrows}",
            base.len()
        )));
    }
    Ok((z, base))
}

impl LdpcCode {
    pub fn from_base(rate: CodeRate, z: usize, base: Vec<Vec<i32>>) -> Result<Self> {
        let mb = base.len();
        let nb = base[0].len();
        let n = z * nb;
        let k = n - z * mb;
        if n != CODEWORD_BITS || k != rate.info_bits() {
            return Err(Error::BadData(format!(
                "base matrix expands to ({k}, {n}), expected ({}, {CODEWORD_BITS}) for rate {rate}",
                rate.info_bits()
            )));
        }
        let mut check_neighbors = Vec::with_capacity(z * mb);
        for row in &base {
            for q in 0..z {
                let mut nb_bits = Vec::new();
                for (j, &s) in row.iter().enumerate() {
                    if s >= 0 {
                        nb_bits.push(j * z + (q + s as usize) % z);
                    }
                }
                check_neighbors.push(nb_bits);
            }
        }
        Ok(Self {
            rate,
            z,
            base,
            n,
            k,
            check_neighbors,
        })
    }

    pub fn rate(&self) -> CodeRate {
        self.rate
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn base(&self) -> &[Vec<i32>] {
        &self.base
    }

    pub fn codeword_bits(&self) -> usize {
        self.n
    }

    pub fn info_bits(&self) -> usize {
        self.k
    }

    pub fn parity_bits(&self) -> usize {
        self.n - self.k
    }

    pub fn check_count(&self) -> usize {
        self.check_neighbors.len()
    }

    pub fn check_neighbors(&self, check: usize) -> &[usize] {
        &self.check_neighbors[check]
    }

    /// Systematic encode: info bits first, parity blocks last.
    ///
    /// Exploits the standard's parity structure: the first parity column has
    /// shift-1 blocks at the top and bottom rows and one shift-0 block in
    /// between, and the remaining parity columns form a shift-0 dual
    /// diagonal. Summing all block rows isolates p0; forward substitution
    /// yields the rest.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k {
            return Err(Error::InvalidArgument(format!(
                "info length {} does not match {} info bits",
                info.len(),
                self.k
            )));
        }
        let z = self.z;
        let mb = self.base.len();
        let kb = self.k / z;
        let p0_col = kb;

        // t[i] = sum over info columns of the shifted info blocks of row i.
        let mut t = vec![vec![0u8; z]; mb];
        for (i, row) in self.base.iter().enumerate() {
            for (j, &s) in row.iter().enumerate().take(kb) {
                if s < 0 {
                    continue;
                }
                let s = s as usize;
                let block = &info[j * z..(j + 1) * z];
                for q in 0..z {
                    t[i][q] ^= block[(q + s) % z];
                }
            }
        }

        let mut parity = vec![vec![0u8; z]; mb];
        for q in 0..z {
            let mut acc = 0u8;
            for ti in &t {
                acc ^= ti[q];
            }
            parity[0][q] = acc;
        }
        // Row 0: t0 + shift(p0, s) + p1 = 0.
        let s0 = self.base[0][p0_col];
        debug_assert!(s0 >= 0);
        for q in 0..z {
            parity[1][q] = t[0][q] ^ parity[0][(q + s0 as usize) % z];
        }
        // Rows 1..mb-1: t_i + [shift(p0)] + p_i + p_{i+1} = 0.
        for i in 1..mb - 1 {
            let s = self.base[i][p0_col];
            for q in 0..z {
                let mut v = t[i][q] ^ parity[i][q];
                if s >= 0 {
                    v ^= parity[0][(q + s as usize) % z];
                }
                parity[i + 1][q] = v;
            }
        }

        let mut cw = Vec::with_capacity(self.n);
        cw.extend_from_slice(info);
        for p in parity {
            cw.extend_from_slice(&p);
        }
        debug_assert!(self.syndrome_ok(&cw));
        Ok(cw)
    }

    pub fn syndrome_ok(&self, cw: &[u8]) -> bool {
        assert_eq!(cw.len(), self.n);
        self.check_neighbors
            .iter()
            .all(|nb| nb.iter().fold(0u8, |acc, &v| acc ^ cw[v]) == 0)
    }

    /// Layered normalized min-sum decoding (scale 0.75), early exit on a
    /// zero syndrome. Non-convergence is a result, not an error. A frame is
    /// only declared converged when every posterior is nonzero, so an
    /// all-zero (no-information) input never converges.
    pub fn decode(&self, llrs: &[f64], max_iters: usize) -> LdpcDecodeResult {
        assert_eq!(llrs.len(), self.n);
        let max_iters = max_iters.max(1);
        const SCALE: f64 = 0.75;
        let mut post = llrs.to_vec();
        let mut msgs: Vec<Vec<f64>> = self
            .check_neighbors
            .iter()
            .map(|nb| vec![0.0; nb.len()])
            .collect();
        let max_deg = self
            .check_neighbors
            .iter()
            .map(|nb| nb.len())
            .max()
            .unwrap_or(0);
        let mut q = vec![0.0f64; max_deg];

        for iter in 1..=max_iters {
            for (c, nb) in self.check_neighbors.iter().enumerate() {
                let m = &mut msgs[c];
                let mut min1 = f64::INFINITY;
                let mut min2 = f64::INFINITY;
                let mut arg = 0usize;
                let mut parity = false;
                for (ei, &v) in nb.iter().enumerate() {
                    let ext = post[v] - m[ei];
                    q[ei] = ext;
                    let a = ext.abs();
                    if a < min1 {
                        min2 = min1;
                        min1 = a;
                        arg = ei;
                    } else if a < min2 {
                        min2 = a;
                    }
                    parity ^= ext < 0.0;
                }
                for (ei, &v) in nb.iter().enumerate() {
                    let mag = SCALE * if ei == arg { min2 } else { min1 };
                    let flip = parity ^ (q[ei] < 0.0);
                    let new = if flip { -mag } else { mag };
                    post[v] = q[ei] + new;
                    m[ei] = new;
                }
            }
            let bits: Vec<u8> = post.iter().map(|l| (*l < 0.0) as u8).collect();
            if self.syndrome_ok(&bits) && post.iter().all(|l| *l != 0.0) {
                return LdpcDecodeResult {
                    bits,
                    converged: true,
                    iterations: iter,
                };
            }
        }
        LdpcDecodeResult {
            bits: post.iter().map(|l| (*l < 0.0) as u8).collect(),
            converged: false,
            iterations: max_iters,
        }
    }
}
