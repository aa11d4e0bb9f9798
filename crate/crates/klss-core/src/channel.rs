//! AWGN noise injection and a closed-form surrogate for links whose
//! effective SNR is limited by signal-dependent nonlinear interference.
//!
//! The surrogate treats nonlinear interference as extra noise growing with
//! the cube of launch power, with a coefficient that increases in the
//! transmit distribution's fourth-moment excess over a reference:
//!
//!   SNR_eff(P) = P / (ase_power + eta_eff * P^3),
//!   eta_eff    = eta0 + eta1 * d + eta2 * d^2,   d = mu4 - mu4_ref.
//!
//! This reproduces the qualitative launch-power optimum and the ordering of
//! distributions by fourth moment; it is not a propagation model.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 64-QAM fourth moment, the default reference point at which the
/// kurtosis-sensitive interference terms vanish.
pub const UNIFORM_64QAM_MU4: f64 = 29.0 / 21.0;

fn default_mu4_ref() -> f64 {
    UNIFORM_64QAM_MU4
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateLinkParams {
    /// Additive (amplified-spontaneous-emission-like) noise power, linear.
    pub ase_power: f64,
    /// Kurtosis-independent interference coefficient, 1/power^2.
    pub eta0: f64,
    /// Linear kurtosis sensitivity, 1/power^2.
    pub eta1: f64,
    /// Quadratic kurtosis sensitivity, 1/power^2. Optional in parameter
    /// files; zero recovers the purely linear sensitivity model.
    #[serde(default)]
    pub eta2: f64,
    /// Fourth moment at which eta1/eta2 contribute nothing.
    #[serde(default = "default_mu4_ref")]
    pub mu4_ref: f64,
}

impl SurrogateLinkParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.ase_power, self.eta0, self.eta1, self.eta2, self.mu4_ref];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("link parameters must be finite".into()));
        }
        if self.ase_power <= 0.0 {
            return Err(Error::Config(format!(
                "ase_power must be positive, got {}",
                self.ase_power
            )));
        }
        if self.eta0 <= 0.0 {
            return Err(Error::Config(format!("eta0 must be positive, got {}", self.eta0)));
        }
        if self.eta1 < 0.0 {
            return Err(Error::Config(format!(
                "eta1 must be nonnegative, got {}",
                self.eta1
            )));
        }
        Ok(())
    }

    /// Effective interference coefficient for a distribution with fourth
    /// moment `mu4`.
    pub fn eta_eff(&self, mu4: f64) -> f64 {
        let d = mu4 - self.mu4_ref;
        self.eta0 + self.eta1 * d + self.eta2 * d * d
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("bad link parameter JSON: {e}")))?;
        params.validate()?;
        Ok(params)
    }
}

/// Linear effective SNR at launch power `p_launch` for a transmit
/// distribution with fourth moment `mu4`.
pub fn effective_snr(p_launch: f64, params: &SurrogateLinkParams, mu4: f64) -> Result<f64> {
    params.validate()?;
    if p_launch <= 0.0 || !p_launch.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "launch power must be positive, got {p_launch}"
        )));
    }
    let eta = params.eta_eff(mu4);
    if eta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "effective interference coefficient is {eta} at mu4 = {mu4}; surrogate undefined"
        )));
    }
    Ok(p_launch / (params.ase_power + eta * p_launch.powi(3)))
}

/// Closed-form maximizer of `effective_snr` in P:
/// P* = (ase / (2 eta_eff))^(1/3) with SNR(P*) = P* / (1.5 ase).
pub fn optimal_launch_power_exact(
    params: &SurrogateLinkParams,
    mu4: f64,
) -> Result<(f64, f64)> {
    params.validate()?;
    let eta = params.eta_eff(mu4);
    if eta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "effective interference coefficient is {eta} at mu4 = {mu4}; surrogate undefined"
        )));
    }
    let p_opt = (params.ase_power / (2.0 * eta)).cbrt();
    Ok((p_opt, p_opt / (1.5 * params.ase_power)))
}

/// Grid-search maximizer of `effective_snr`; lands within one grid step of
/// the closed-form optimum when the grid brackets it.
pub fn optimal_launch_power(
    params: &SurrogateLinkParams,
    mu4: f64,
    powers: &[f64],
) -> Result<(f64, f64)> {
    if powers.is_empty() {
        return Err(Error::InvalidArgument("empty launch-power grid".into()));
    }
    let mut best: Option<(f64, f64)> = None;
    for &p in powers {
        let snr = effective_snr(p, params, mu4)?;
        if best.map_or(true, |(_, s)| snr > s) {
            best = Some((p, snr));
        }
    }
    Ok(best.expect("nonempty grid"))
}

/// SNR penalty (dB) of running at the per-distribution optimum launch power
/// with fourth moment `mu4` instead of `mu4_ref`. Under the surrogate this
/// is (10/3) log10(eta_eff(mu4) / eta_eff(mu4_ref)).
pub fn launch_optimized_penalty_db(params: &SurrogateLinkParams, mu4: f64) -> Result<f64> {
    let (_, snr_ref) = optimal_launch_power_exact(params, params.mu4_ref)?;
    let (_, snr) = optimal_launch_power_exact(params, mu4)?;
    Ok(10.0 * (snr_ref / snr).log10())
}

/// Solves for (eta1, eta2) so the surrogate reproduces prescribed
/// launch-optimized SNR penalties at two measured fourth moments. The two
/// penalty targets pin the linear and quadratic sensitivities exactly.
pub fn calibrate_link(
    ase_power: f64,
    eta0: f64,
    mu4_ref: f64,
    anchors: [(f64, f64); 2],
) -> Result<SurrogateLinkParams> {
    let base = SurrogateLinkParams {
        ase_power,
        eta0,
        eta1: 0.0,
        eta2: 0.0,
        mu4_ref,
    };
    base.validate()?;
    let d: Vec<f64> = anchors.iter().map(|(mu4, _)| mu4 - mu4_ref).collect();
    // Penalty target pen_db means eta_eff/eta0 = 10^(3 pen / 10), so each
    // anchor is one linear equation in (eta1/eta0, eta2/eta0).
    let rhs: Vec<f64> = anchors
        .iter()
        .map(|(_, pen_db)| 10f64.powf(0.3 * pen_db) - 1.0)
        .collect();
    let det = d[0] * d[1] * d[1] - d[1] * d[0] * d[0];
    if det.abs() < 1e-15 {
        return Err(Error::InvalidArgument(
            "calibration anchors have degenerate fourth moments".into(),
        ));
    }
    let a = (rhs[0] * d[1] * d[1] - rhs[1] * d[0] * d[0]) / det;
    let b = (d[0] * rhs[1] - d[1] * rhs[0]) / det;
    let params = SurrogateLinkParams {
        ase_power,
        eta0,
        eta1: a * eta0,
        eta2: b * eta0,
        mu4_ref,
    };
    params.validate().map_err(|_| {
        Error::InvalidArgument(format!(
            "calibration produced invalid sensitivities eta1 = {}, eta2 = {}",
            a * eta0,
            b * eta0
        ))
    })?;
    Ok(params)
}

/// Adds circular Gaussian noise at the given SNR (dB) assuming unit average
/// symbol power, with a self-contained deterministic generator.
pub fn awgn_apply(symbols: &[Complex64], snr_db: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    awgn_apply_with_rng(symbols, snr_db, &mut rng)
}

pub fn awgn_apply_with_rng<R: Rng>(
    symbols: &[Complex64],
    snr_db: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    let noise_var = db_to_linear(-snr_db);
    let per_axis = Normal::new(0.0, (noise_var / 2.0).sqrt()).expect("positive sigma");
    symbols
        .iter()
        .map(|s| s + Complex64::new(per_axis.sample(rng), per_axis.sample(rng)))
        .collect()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
