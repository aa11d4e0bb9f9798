//! Energy- and kurtosis-bounded amplitude shaping for probabilistic
//! amplitude shaping (PAS) transceivers.
//!
//! The crate has five layers:
//! - [`shaping`]: bounded-moment amplitude sets, exact enumeration, the
//!   index/sequence bijection, induced distributions, and design sweeps.
//! - [`ldpc`]: the 648-bit quasi-cyclic LDPC codes (rates 2/3 and 5/6) used
//!   to protect sign and amplitude bits.
//! - [`pas`]: the transmit/receive chain tying shaper, code, and QAM mapping
//!   together.
//! - [`channel`]: AWGN and a closed-form surrogate for nonlinearity-limited
//!   links with a launch-power optimum.
//! - [`fer`]: deterministic Monte-Carlo frame-error-rate measurement.

pub mod alphabet;
pub mod channel;
pub mod error;
pub mod fer;
pub mod ldpc;
pub mod pas;
pub mod reference;
pub mod shaping;

pub use error::{Error, Result};
