//! Constraint triples defining energy- and kurtosis-bounded shaping sets.

use crate::alphabet::AmplitudeAlphabet;
use crate::error::{Error, Result};

/// Ceiling on the per-sequence fourth-power sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuarticBound {
    Unbounded,
    Bounded(u64),
}

impl QuarticBound {
    pub fn is_bounded(&self) -> bool {
        matches!(self, QuarticBound::Bounded(_))
    }

    /// The bound value, or `cap` when unbounded.
    pub fn value_or(&self, cap: u64) -> u64 {
        match self {
            QuarticBound::Unbounded => cap,
            QuarticBound::Bounded(v) => (*v).min(cap),
        }
    }

    pub fn admits(&self, quartic_sum: u64) -> bool {
        match self {
            QuarticBound::Unbounded => true,
            QuarticBound::Bounded(v) => quartic_sum <= *v,
        }
    }
}

impl std::fmt::Display for QuarticBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuarticBound::Unbounded => write!(f, "unbounded"),
            QuarticBound::Bounded(v) => write!(f, "{v}"),
        }
    }
}

/// An admissible set of amplitude sequences: all `a^n` over the alphabet with
/// `sum(a_i^2) <= e_max` and, when bounded, `sum(a_i^4) <= k_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapingSpec {
    n: usize,
    alphabet: AmplitudeAlphabet,
    e_max: u64,
    k_max: QuarticBound,
}

impl ShapingSpec {
    pub fn new(
        n: usize,
        alphabet: AmplitudeAlphabet,
        e_max: u64,
        k_max: QuarticBound,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "blocklength must be at least 1".into(),
            ));
        }
        if e_max < n as u64 {
            return Err(Error::InvalidArgument(format!(
                "e_max {e_max} leaves even the all-ones sequence inadmissible (need >= {n})"
            )));
        }
        if let QuarticBound::Bounded(v) = k_max {
            if v < n as u64 {
                return Err(Error::InvalidArgument(format!(
                    "k_max {v} leaves even the all-ones sequence inadmissible (need >= {n})"
                )));
            }
        }
        Ok(Self {
            n,
            alphabet,
            e_max,
            k_max,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> &AmplitudeAlphabet {
        &self.alphabet
    }

    pub fn e_max(&self) -> u64 {
        self.e_max
    }

    pub fn k_max(&self) -> QuarticBound {
        self.k_max
    }

    /// Energy budget clamped to the most any n-sequence can spend.
    pub fn energy_budget(&self) -> u64 {
        self.e_max.min(self.n as u64 * self.alphabet.max_square())
    }

    /// Quartic budget clamped likewise; unbounded collapses to the cap.
    pub fn quartic_budget(&self) -> u64 {
        self.k_max
            .value_or(self.n as u64 * self.alphabet.max_quartic())
    }

    /// Checks membership of `seq` in the admissible set, naming the violated
    /// constraint on failure.
    pub fn check_admissible(&self, seq: &[u64]) -> Result<()> {
        if seq.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "sequence length {} does not match blocklength {}",
                seq.len(),
                self.n
            )));
        }
        let mut energy = 0u64;
        let mut quartic = 0u64;
        for (pos, &a) in seq.iter().enumerate() {
            let idx = self.alphabet.level_index(a).ok_or_else(|| {
                Error::InvalidArgument(format!("level {a} at position {pos} is not in the alphabet"))
            })?;
            energy += self.alphabet.squares()[idx];
            quartic += self.alphabet.quartics()[idx];
        }
        if energy > self.e_max {
            return Err(Error::InvalidArgument(format!(
                "energy {energy} exceeds e_max {}",
                self.e_max
            )));
        }
        if !self.k_max.admits(quartic) {
            return Err(Error::InvalidArgument(format!(
                "fourth-power sum {quartic} exceeds k_max {}",
                self.k_max
            )));
        }
        Ok(())
    }

    pub fn is_admissible(&self, seq: &[u64]) -> bool {
        self.check_admissible(seq).is_ok()
    }
}
