//! Moments of the complex channel input induced by an amplitude distribution.
//!
//! The 2D input is X = X_I + j X_Q with independent I/Q, each a uniformly
//! signed amplitude drawn from the pmf. Sign symmetry makes X zero-mean, so
//! the standardized fourth moment reduces to E[|X|^4] / E[|X|^2]^2, which in
//! terms of one real dimension is (E[a^4] + E[a^2]^2) / (2 E[a^2]^2).

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::alphabet::AmplitudeAlphabet;
use crate::error::{Error, Result};

/// Fourth moment of a circularly symmetric Gaussian: E|X|^4 = 2 (E|X|^2)^2.
pub const GAUSSIAN_MU4: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputMoments {
    /// E[a^2] per real amplitude.
    pub mean_energy_per_amplitude: f64,
    /// Standardized fourth moment of the 2D QAM input.
    pub mu4: f64,
    /// E[a^4] / E[a^2]^2 of one real amplitude (diagnostic).
    pub amplitude_kurtosis: f64,
}

pub fn compute_moments(pmf: &[f64], alphabet: &AmplitudeAlphabet) -> Result<InputMoments> {
    if pmf.len() != alphabet.len() {
        return Err(Error::InvalidArgument(format!(
            "pmf has {} entries for {} levels",
            pmf.len(),
            alphabet.len()
        )));
    }
    let sum: f64 = pmf.iter().sum();
    if pmf.iter().any(|p| *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "pmf must be nonnegative and sum to 1 (sum = {sum})"
        )));
    }
    let e2: f64 = pmf
        .iter()
        .zip(alphabet.squares())
        .map(|(p, &s)| p * s as f64)
        .sum();
    let e4: f64 = pmf
        .iter()
        .zip(alphabet.quartics())
        .map(|(p, &q)| p * q as f64)
        .sum();
    Ok(InputMoments {
        mean_energy_per_amplitude: e2,
        mu4: (e4 + e2 * e2) / (2.0 * e2 * e2),
        amplitude_kurtosis: e4 / (e2 * e2),
    })
}

/// Exact-rational variant: returns (E[a^2], mu4).
pub fn compute_moments_exact(
    pmf: &[BigRational],
    alphabet: &AmplitudeAlphabet,
) -> Result<(BigRational, BigRational)> {
    if pmf.len() != alphabet.len() {
        return Err(Error::InvalidArgument(format!(
            "pmf has {} entries for {} levels",
            pmf.len(),
            alphabet.len()
        )));
    }
    let one = BigRational::from_integer(1.into());
    let sum: BigRational = pmf.iter().cloned().sum();
    if sum != one {
        return Err(Error::InvalidArgument("pmf must sum to exactly 1".into()));
    }
    let mut e2 = BigRational::from_integer(0.into());
    let mut e4 = BigRational::from_integer(0.into());
    for (i, p) in pmf.iter().enumerate() {
        e2 += p * BigRational::from_integer(alphabet.squares()[i].into());
        e4 += p * BigRational::from_integer(alphabet.quartics()[i].into());
    }
    let two = BigRational::from_integer(2.into());
    let mu4 = (&e4 + &e2 * &e2) / (two * &e2 * &e2);
    Ok((e2, mu4))
}

pub fn uniform_pmf(alphabet: &AmplitudeAlphabet) -> Vec<f64> {
    vec![1.0 / alphabet.len() as f64; alphabet.len()]
}

/// mu4 of the uniform distribution over the alphabet, computed exactly and
/// rounded once. For 64-QAM (m = 3) this is 29/21 = 1.380952...
pub fn uniform_mu4(alphabet: &AmplitudeAlphabet) -> f64 {
    let n = alphabet.len() as u64;
    let e2 = BigRational::new(alphabet.squares().iter().sum::<u64>().into(), n.into());
    let e4 = BigRational::new(alphabet.quartics().iter().sum::<u64>().into(), n.into());
    let mu4 = (&e4 + &e2 * &e2) / (BigRational::from_integer(2.into()) * &e2 * &e2);
    mu4.to_f64().expect("finite")
}
