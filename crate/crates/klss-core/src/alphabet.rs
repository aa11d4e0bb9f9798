//! Amplitude alphabets for square QAM: the odd levels 1, 3, ..., 2^m - 1
//! of one real dimension, with exact squares and fourth powers.

use crate::error::{Error, Result};

/// Ordered odd amplitude levels with precomputed integer powers.
///
/// `m` counts QAM bits per real dimension (one sign bit plus `m - 1`
/// amplitude bits), so the alphabet has `2^(m-1)` levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplitudeAlphabet {
    m: u32,
    levels: Vec<u64>,
    squares: Vec<u64>,
    quartics: Vec<u64>,
}

impl AmplitudeAlphabet {
    pub fn new(m: u32) -> Result<Self> {
        if !(1..=8).contains(&m) {
            return Err(Error::InvalidArgument(format!(
                "bits per real dimension must be in 1..=8, got {m}"
            )));
        }
        let levels: Vec<u64> = (0..1u64 << (m - 1)).map(|i| 2 * i + 1).collect();
        let squares: Vec<u64> = levels.iter().map(|a| a * a).collect();
        let quartics: Vec<u64> = squares.iter().map(|s| s * s).collect();
        Ok(Self {
            m,
            levels,
            squares,
            quartics,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Bits needed to label an amplitude (sign excluded).
    pub fn amplitude_bits(&self) -> u32 {
        self.m - 1
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn squares(&self) -> &[u64] {
        &self.squares
    }

    pub fn quartics(&self) -> &[u64] {
        &self.quartics
    }

    pub fn max_level(&self) -> u64 {
        *self.levels.last().unwrap()
    }

    pub fn max_square(&self) -> u64 {
        *self.squares.last().unwrap()
    }

    pub fn max_quartic(&self) -> u64 {
        *self.quartics.last().unwrap()
    }

    /// Index of `level` in the alphabet, if present.
    pub fn level_index(&self, level: u64) -> Option<usize> {
        if level % 2 == 1 && level <= self.max_level() {
            Some((level / 2) as usize)
        } else {
            None
        }
    }

    /// Reflected Gray label of the level at `index`, `m - 1` bits wide.
    ///
    /// For m = 3 this is the labeling 1 -> 00, 3 -> 01, 5 -> 11, 7 -> 10.
    pub fn gray_label(&self, index: usize) -> u64 {
        let i = index as u64;
        i ^ (i >> 1)
    }

    /// Level index carrying the Gray label `label`, if the label is in range.
    pub fn level_index_from_gray(&self, label: u64) -> Option<usize> {
        if label >= self.levels.len() as u64 {
            return None;
        }
        // Invert i ^ (i >> 1) by prefix-xor folding.
        let mut i = label;
        let mut shift = 1;
        while shift < 64 {
            i ^= i >> shift;
            shift <<= 1;
        }
        Some(i as usize)
    }
}
