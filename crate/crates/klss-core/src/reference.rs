//! Brute-force reference implementations for cross-checking the trellis
//! algorithms. Everything here is exponential in the blocklength and exists
//! only to verify the fast paths on small cases.

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::shaping::ShapingSpec;

/// Every admissible sequence in lexicographic order (levels ascending,
/// leftmost position most significant), found by filtering the full cube.
pub fn enumerate_admissible(spec: &ShapingSpec) -> Vec<Vec<u64>> {
    let alphabet = spec.alphabet();
    let n = spec.n();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let seq: Vec<u64> = idx.iter().map(|&i| alphabet.levels()[i]).collect();
        if spec.is_admissible(&seq) {
            out.push(seq);
        }
        // Odometer over level indices; advancing the rightmost digit keeps
        // the emission order lexicographic.
        let mut p = n;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            if idx[p] + 1 < alphabet.len() {
                idx[p] += 1;
                break;
            }
            idx[p] = 0;
        }
    }
}

/// Exact induced per-level probabilities by direct counting.
pub fn pmf_by_enumeration(spec: &ShapingSpec, set: &[Vec<u64>]) -> Vec<BigRational> {
    let alphabet = spec.alphabet();
    let mut occ = vec![BigUint::from(0u32); alphabet.len()];
    for seq in set {
        for &a in seq {
            occ[alphabet.level_index(a).expect("admissible level")] += 1u32;
        }
    }
    let slots = BigUint::from(spec.n() as u64) * BigUint::from(set.len() as u64);
    occ.into_iter()
        .map(|o| BigRational::new(o.into(), slots.clone().into()))
        .collect()
}
