//! Sparse backward-counting table over (energy budget, quartic budget)
//! states, and the lexicographic index <-> sequence bijection built on it.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::shaping::spec::ShapingSpec;

/// State-count ceiling for a single build; generous for every geometry in
/// this repo while still catching runaway configurations.
pub const DEFAULT_STATE_LIMIT: usize = 20_000_000;

/// (remaining energy budget, remaining quartic budget), both clamped to what
/// the remaining positions can actually spend.
type State = (u64, u64);

/// Completion-count table for one shaping spec.
///
/// `counts[p]` maps each reachable state at position `p` to the number of
/// admissible ways to fill positions `p..n`. Budgets are clamped per
/// position, which merges states that admit identical completions; with the
/// quartic budget clamped, an unbounded spec and one bounded at the loosest
/// achievable value build byte-identical tables.
#[derive(Debug)]
pub struct BoundedTrellis {
    spec: ShapingSpec,
    counts: Vec<HashMap<State, BigUint>>,
    total: BigUint,
    k_bits: u64,
    state_count: usize,
}

impl BoundedTrellis {
    pub fn build(spec: ShapingSpec) -> Result<Self> {
        Self::build_with_state_limit(spec, DEFAULT_STATE_LIMIT)
    }

    pub fn build_with_state_limit(spec: ShapingSpec, state_limit: usize) -> Result<Self> {
        let n = spec.n();
        let max_sq = spec.alphabet().max_square();
        let max_q = spec.alphabet().max_quartic();
        let clamp = |e: u64, f: u64, r: u64| (e.min(r * max_sq), f.min(r * max_q));

        let levels = spec.alphabet().len();
        let squares = spec.alphabet().squares().to_vec();
        let quartics = spec.alphabet().quartics().to_vec();

        let root = clamp(spec.energy_budget(), spec.quartic_budget(), n as u64);

        // Forward pass: collect exactly the states reachable from the root,
        // pruning children that cannot be completed even by all-ones.
        let mut reach: Vec<HashSet<State>> = Vec::with_capacity(n + 1);
        reach.push(HashSet::from([root]));
        let mut state_count = 1usize;
        for p in 0..n {
            let r = (n - p) as u64;
            let mut next = HashSet::new();
            for &(e, f) in &reach[p] {
                for li in 0..levels {
                    let (sq, q) = (squares[li], quartics[li]);
                    if sq > e || q > f {
                        continue;
                    }
                    let (e2, f2) = (e - sq, f - q);
                    if e2 < r - 1 || f2 < r - 1 {
                        continue;
                    }
                    next.insert(clamp(e2, f2, r - 1));
                }
            }
            state_count += next.len();
            if state_count > state_limit {
                return Err(Error::ResourceLimit(format!(
                    "trellis for n={n} exceeded {state_limit} states at position {} (reached {state_count})",
                    p + 1
                )));
            }
            reach.push(next);
        }
        debug_assert_eq!(reach[n], HashSet::from([(0, 0)]));

        // Backward pass: completion counts over the reachable states only.
        let mut counts: Vec<HashMap<State, BigUint>> = vec![HashMap::new(); n + 1];
        counts[n].insert((0, 0), BigUint::one());
        for p in (0..n).rev() {
            let r = (n - p) as u64;
            let mut layer = HashMap::with_capacity(reach[p].len());
            for &(e, f) in &reach[p] {
                let mut c = BigUint::zero();
                for li in 0..levels {
                    let (sq, q) = (squares[li], quartics[li]);
                    if sq > e || q > f {
                        continue;
                    }
                    let (e2, f2) = (e - sq, f - q);
                    if e2 < r - 1 || f2 < r - 1 {
                        continue;
                    }
                    c += counts[p + 1]
                        .get(&clamp(e2, f2, r - 1))
                        .expect("forward pass inserted every pruned child");
                }
                layer.insert((e, f), c);
            }
            counts[p] = layer;
        }

        let total = counts[0].get(&root).expect("root is reachable").clone();
        debug_assert!(total >= BigUint::one());
        let k_bits = total.bits() - 1;
        Ok(Self {
            spec,
            counts,
            total,
            k_bits,
            state_count,
        })
    }

    pub fn spec(&self) -> &ShapingSpec {
        &self.spec
    }

    /// Exact cardinality of the admissible set.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// k = floor(log2 |A|); k/n is the shaping rate in bits per amplitude.
    pub fn shaping_bits(&self) -> u64 {
        self.k_bits
    }

    pub fn shaping_rate(&self) -> f64 {
        self.k_bits as f64 / self.spec.n() as f64
    }

    /// Number of stored states across all positions (diagnostic).
    pub fn state_count(&self) -> usize {
        self.state_count
    }

    fn clamp(&self, e: u64, f: u64, r: u64) -> State {
        (
            e.min(r * self.spec.alphabet().max_square()),
            f.min(r * self.spec.alphabet().max_quartic()),
        )
    }

    fn root(&self) -> State {
        self.clamp(
            self.spec.energy_budget(),
            self.spec.quartic_budget(),
            self.spec.n() as u64,
        )
    }

    /// Maps `index` to the admissible sequence of that lexicographic rank
    /// (levels ascending, leftmost position most significant). Defined for
    /// every rank in the set, including ranks at or above 2^k.
    pub fn encode_index(&self, index: &BigUint) -> Result<Vec<u64>> {
        if *index >= self.total {
            return Err(Error::InvalidArgument(format!(
                "index {} is outside the set of cardinality {}",
                index, self.total
            )));
        }
        let n = self.spec.n();
        let alphabet = self.spec.alphabet();
        let mut idx = index.clone();
        let (mut e, mut f) = self.root();
        let mut out = Vec::with_capacity(n);
        for p in 0..n {
            let r = (n - p) as u64;
            let mut advanced = false;
            for li in 0..alphabet.len() {
                let (sq, q) = (alphabet.squares()[li], alphabet.quartics()[li]);
                if sq > e || q > f {
                    continue;
                }
                let (e2, f2) = (e - sq, f - q);
                if e2 < r - 1 || f2 < r - 1 {
                    continue;
                }
                let child = self.clamp(e2, f2, r - 1);
                let c = self.counts[p + 1]
                    .get(&child)
                    .expect("reachable child has a count");
                if idx < *c {
                    out.push(alphabet.levels()[li]);
                    (e, f) = child;
                    advanced = true;
                    break;
                }
                idx -= c;
            }
            if !advanced {
                return Err(Error::InvalidArgument(format!(
                    "index exceeds the set cardinality at position {p}"
                )));
            }
        }
        Ok(out)
    }

    /// Lexicographic rank of an admissible sequence; exact inverse of
    /// `encode_index` over the whole set, including sequences whose rank is
    /// at or above 2^k.
    pub fn decode_sequence(&self, seq: &[u64]) -> Result<BigUint> {
        self.spec.check_admissible(seq)?;
        let n = self.spec.n();
        let alphabet = self.spec.alphabet();
        let mut rank = BigUint::zero();
        let (mut e, mut f) = self.root();
        for (p, &a) in seq.iter().enumerate() {
            let r = (n - p) as u64;
            let ai = alphabet.level_index(a).expect("admissibility checked");
            for li in 0..ai {
                let (sq, q) = (alphabet.squares()[li], alphabet.quartics()[li]);
                if sq > e || q > f {
                    continue;
                }
                let (e2, f2) = (e - sq, f - q);
                if e2 < r - 1 || f2 < r - 1 {
                    continue;
                }
                rank += self.counts[p + 1]
                    .get(&self.clamp(e2, f2, r - 1))
                    .expect("reachable child has a count");
            }
            let (sq, q) = (alphabet.squares()[ai], alphabet.quartics()[ai]);
            (e, f) = self.clamp(e - sq, f - q, r - 1);
        }
        Ok(rank)
    }

    /// Exact per-level probabilities of the induced amplitude distribution:
    /// occurrences of each level across all admissible sequences and
    /// positions, divided by n * |A|. Computed by a forward-reachability
    /// weight times backward-count product per (position, state, level).
    pub fn induced_pmf(&self) -> Vec<BigRational> {
        let n = self.spec.n();
        let alphabet = self.spec.alphabet();
        let mut occ = vec![BigUint::zero(); alphabet.len()];
        let mut cur: HashMap<State, BigUint> = HashMap::from([(self.root(), BigUint::one())]);
        for p in 0..n {
            let r = (n - p) as u64;
            let mut next: HashMap<State, BigUint> = HashMap::with_capacity(cur.len());
            for ((e, f), w) in &cur {
                for li in 0..alphabet.len() {
                    let (sq, q) = (alphabet.squares()[li], alphabet.quartics()[li]);
                    if sq > *e || q > *f {
                        continue;
                    }
                    let (e2, f2) = (e - sq, f - q);
                    if e2 < r - 1 || f2 < r - 1 {
                        continue;
                    }
                    let child = self.clamp(e2, f2, r - 1);
                    let c = self.counts[p + 1]
                        .get(&child)
                        .expect("reachable child has a count");
                    occ[li] += w * c;
                    *next.entry(child).or_insert_with(BigUint::zero) += w;
                }
            }
            cur = next;
        }
        let denom = BigUint::from(n as u64) * &self.total;
        debug_assert_eq!(
            occ.iter().fold(BigUint::zero(), |acc, o| acc + o),
            denom,
            "occurrences must account for every position of every sequence"
        );
        occ.into_iter()
            .map(|o| BigRational::new(o.into(), denom.clone().into()))
            .collect()
    }

    pub fn induced_pmf_f64(&self) -> Vec<f64> {
        self.induced_pmf()
            .iter()
            .map(|r| r.to_f64().expect("pmf entries are finite"))
            .collect()
    }

    /// Exact per-level pmf over the `limit` lexicographically smallest
    /// sequences only. A k-bit data index addresses ranks [0, 2^k), which is
    /// a strict subset of the set whenever 2^k < |A|, so the transmitted
    /// amplitude distribution differs slightly from `induced_pmf`; this is
    /// the exact reference for it.
    ///
    /// The rank interval decomposes into cones: walking the boundary path of
    /// rank `limit`, every sibling subtree left of the path lies entirely
    /// inside the interval. Each cone contributes its prefix occurrences
    /// directly and its free tail via a forward mass injected at the cone
    /// root, after which tail occurrences accumulate exactly as in
    /// `induced_pmf`.
    pub fn induced_pmf_below_rank(&self, limit: &BigUint) -> Result<Vec<BigRational>> {
        if limit.is_zero() || *limit > self.total {
            return Err(Error::InvalidArgument(format!(
                "rank limit must be in [1, {}], got {}",
                self.total, limit
            )));
        }
        let n = self.spec.n();
        let alphabet = self.spec.alphabet();
        let levels = alphabet.len();
        let mut occ = vec![BigUint::zero(); levels];
        let mut prefix: Vec<usize> = Vec::with_capacity(n);
        let mut injections: Vec<Vec<(State, BigUint)>> = vec![Vec::new(); n + 1];
        let mut idx = limit.clone();
        let (mut e, mut f) = self.root();
        'walk: for p in 0..n {
            let r = (n - p) as u64;
            for li in 0..levels {
                let (sq, q) = (alphabet.squares()[li], alphabet.quartics()[li]);
                if sq > e || q > f {
                    continue;
                }
                let (e2, f2) = (e - sq, f - q);
                if e2 < r - 1 || f2 < r - 1 {
                    continue;
                }
                let child = self.clamp(e2, f2, r - 1);
                let c = self.counts[p + 1]
                    .get(&child)
                    .expect("reachable child has a count");
                if idx < *c {
                    // Boundary descends through this level; the partial cone
                    // is resolved at deeper positions.
                    prefix.push(li);
                    (e, f) = child;
                    continue 'walk;
                }
                // Whole cone included: prefix levels and this level occur in
                // all of its `c` sequences; the tails are counted later from
                // the injected mass.
                for &pl in &prefix {
                    occ[pl] += c;
                }
                occ[li] += c;
                injections[p + 1].push((child, BigUint::one()));
                idx -= c;
                if idx.is_zero() {
                    break 'walk;
                }
            }
        }
        debug_assert!(idx.is_zero(), "rank interval must be fully consumed");

        // Forward propagation of the injected cone masses; identical
        // occurrence accounting to `induced_pmf`.
        let mut cur: HashMap<State, BigUint> = HashMap::new();
        for p in 0..n {
            for (state, w) in injections[p].drain(..) {
                *cur.entry(state).or_insert_with(BigUint::zero) += w;
            }
            let r = (n - p) as u64;
            let mut next: HashMap<State, BigUint> = HashMap::with_capacity(cur.len());
            for ((e, f), w) in &cur {
                for li in 0..levels {
                    let (sq, q) = (alphabet.squares()[li], alphabet.quartics()[li]);
                    if sq > *e || q > *f {
                        continue;
                    }
                    let (e2, f2) = (e - sq, f - q);
                    if e2 < r - 1 || f2 < r - 1 {
                        continue;
                    }
                    let child = self.clamp(e2, f2, r - 1);
                    let c = self.counts[p + 1]
                        .get(&child)
                        .expect("reachable child has a count");
                    occ[li] += w * c;
                    *next.entry(child).or_insert_with(BigUint::zero) += w;
                }
            }
            cur = next;
        }
        let denom = BigUint::from(n as u64) * limit;
        debug_assert_eq!(
            occ.iter().fold(BigUint::zero(), |acc, o| acc + o),
            denom,
            "occurrences must account for every position of every kept sequence"
        );
        Ok(occ
            .into_iter()
            .map(|o| BigRational::new(o.into(), denom.clone().into()))
            .collect())
    }

    /// Test hook: breaks the terminal completion count so round-trip
    /// verification harnesses can prove they detect an inconsistent table.
    #[doc(hidden)]
    pub fn corrupt_terminal_count_for_tests(&mut self) {
        let n = self.spec.n();
        self.counts[n].insert((0, 0), BigUint::from(2u32));
    }
}
