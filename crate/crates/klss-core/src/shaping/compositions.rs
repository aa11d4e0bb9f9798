//! Level-composition table: statistics of admissible sets without per-point
//! trellis builds.
//!
//! Both constraints are symmetric in sequence positions, so cardinalities and
//! moments depend only on how many times each level is used. A composition
//! (c_1, ..., c_L) with sum n covers n!/prod(c_i!) sequences, all sharing one
//! (energy, quartic-sum) pair. Tables are only viable when the composition
//! count is modest; callers fall back to the trellis otherwise.

use num_bigint::BigUint;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::alphabet::AmplitudeAlphabet;
use crate::error::{Error, Result};
use crate::shaping::spec::QuarticBound;

pub const DEFAULT_MAX_ROWS: usize = 2_000_000;

/// One level composition: its shared energy, quartic sum, and the number of
/// sequences realizing it.
#[derive(Debug, Clone)]
pub struct CompRow {
    pub e: u64,
    pub f: u64,
    pub weight: BigUint,
}

/// Running sums over a collection of composition rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SetAggregates {
    pub cardinality: BigUint,
    /// Sum over sequences of the per-sequence energy.
    pub energy_weighted: BigUint,
    /// Sum over sequences of the per-sequence fourth-power sum.
    pub quartic_weighted: BigUint,
}

impl SetAggregates {
    pub fn zero() -> Self {
        Self {
            cardinality: BigUint::zero(),
            energy_weighted: BigUint::zero(),
            quartic_weighted: BigUint::zero(),
        }
    }

    pub fn add_row(&mut self, row: &CompRow) {
        self.cardinality += &row.weight;
        self.energy_weighted += &row.weight * row.e;
        self.quartic_weighted += &row.weight * row.f;
    }

    pub fn remove(&mut self, other: &SetAggregates) {
        self.cardinality -= &other.cardinality;
        self.energy_weighted -= &other.energy_weighted;
        self.quartic_weighted -= &other.quartic_weighted;
    }

    pub fn merge(&mut self, other: &SetAggregates) {
        self.cardinality += &other.cardinality;
        self.energy_weighted += &other.energy_weighted;
        self.quartic_weighted += &other.quartic_weighted;
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality.is_zero()
    }

    /// E[a^2] of the induced amplitude distribution, exact.
    pub fn mean_energy_exact(&self, n: usize) -> BigRational {
        let denom = BigUint::from(n as u64) * &self.cardinality;
        BigRational::new(self.energy_weighted.clone().into(), denom.into())
    }

    /// E[a^4] of the induced amplitude distribution, exact.
    pub fn mean_quartic_exact(&self, n: usize) -> BigRational {
        let denom = BigUint::from(n as u64) * &self.cardinality;
        BigRational::new(self.quartic_weighted.clone().into(), denom.into())
    }

    pub fn mean_energy(&self, n: usize) -> f64 {
        self.mean_energy_exact(n).to_f64().expect("finite")
    }

    /// Standardized fourth moment of the 2D input built from two independent,
    /// sign-symmetric amplitudes: (E[a^4] + E[a^2]^2) / (2 E[a^2]^2).
    pub fn mu4(&self, n: usize) -> f64 {
        let e2 = self.mean_energy_exact(n);
        let e4 = self.mean_quartic_exact(n);
        let mu4 = (&e4 + &e2 * &e2) / (BigRational::from_integer(2.into()) * &e2 * &e2);
        mu4.to_f64().expect("finite")
    }
}

/// All level compositions of `n`, sorted by (energy, quartic sum).
#[derive(Debug)]
pub struct CompositionTable {
    n: usize,
    alphabet: AmplitudeAlphabet,
    rows: Vec<CompRow>,
}

impl CompositionTable {
    pub fn build(n: usize, alphabet: &AmplitudeAlphabet) -> Result<Self> {
        Self::build_with_row_limit(n, alphabet, DEFAULT_MAX_ROWS)
    }

    pub fn build_with_row_limit(
        n: usize,
        alphabet: &AmplitudeAlphabet,
        max_rows: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
        }
        let levels = alphabet.len();
        let row_count = binomial(
            BigUint::from((n + levels - 1) as u64),
            BigUint::from((levels - 1) as u64),
        );
        if row_count > BigUint::from(max_rows as u64) {
            return Err(Error::ResourceLimit(format!(
                "composition table for n={n}, {levels} levels needs {row_count} rows (limit {max_rows})"
            )));
        }

        let mut fact = Vec::with_capacity(n + 1);
        fact.push(BigUint::one());
        for i in 1..=n {
            let next = &fact[i - 1] * BigUint::from(i as u64);
            fact.push(next);
        }

        let mut rows = Vec::with_capacity(row_count.to_usize().unwrap_or(0));
        let mut counts = vec![0usize; levels];
        emit_compositions(0, n, &mut counts, alphabet, &fact, &mut rows);
        rows.sort_unstable_by_key(|r| (r.e, r.f));
        Ok(Self {
            n,
            alphabet: alphabet.clone(),
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> &AmplitudeAlphabet {
        &self.alphabet
    }

    pub fn rows(&self) -> &[CompRow] {
        &self.rows
    }

    pub fn cardinality(&self, e_max: u64, k_max: QuarticBound) -> BigUint {
        self.aggregates(e_max, k_max).cardinality
    }

    pub fn aggregates(&self, e_max: u64, k_max: QuarticBound) -> SetAggregates {
        let mut agg = SetAggregates::zero();
        for row in &self.rows {
            if row.e > e_max {
                break;
            }
            if k_max.admits(row.f) {
                agg.add_row(row);
            }
        }
        agg
    }

    /// Smallest e_max whose admissible set reaches 2^k_target sequences under
    /// the given quartic bound. Cardinality only changes at achievable
    /// energies, so scanning the sorted distinct energies finds the exact
    /// threshold.
    pub fn min_emax(&self, k_target: u64, k_max: QuarticBound) -> Result<u64> {
        let target = BigUint::one() << k_target;
        let mut card = BigUint::zero();
        let mut i = 0usize;
        while i < self.rows.len() {
            let e = self.rows[i].e;
            while i < self.rows.len() && self.rows[i].e == e {
                if k_max.admits(self.rows[i].f) {
                    card += &self.rows[i].weight;
                }
                i += 1;
            }
            if card >= target {
                return Ok(e);
            }
        }
        Err(Error::InfeasibleRate(format!(
            "no energy bound reaches 2^{k_target} sequences at n={} under quartic bound {}",
            self.n, k_max
        )))
    }
}

fn emit_compositions(
    level: usize,
    remaining: usize,
    counts: &mut Vec<usize>,
    alphabet: &AmplitudeAlphabet,
    fact: &[BigUint],
    rows: &mut Vec<CompRow>,
) {
    if level == alphabet.len() - 1 {
        counts[level] = remaining;
        let mut e = 0u64;
        let mut f = 0u64;
        let mut weight = fact[counts.iter().sum::<usize>()].clone();
        for (li, &c) in counts.iter().enumerate() {
            e += c as u64 * alphabet.squares()[li];
            f += c as u64 * alphabet.quartics()[li];
            weight /= &fact[c];
        }
        rows.push(CompRow { e, f, weight });
        return;
    }
    for v in 0..=remaining {
        counts[level] = v;
        emit_compositions(level + 1, remaining - v, counts, alphabet, fact, rows);
    }
}
