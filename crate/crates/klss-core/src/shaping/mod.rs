//! Energy- and kurtosis-bounded amplitude shaping: admissible-set
//! definitions, exact enumeration (index <-> sequence), induced
//! distributions, and design-frontier sweeps.

pub mod compositions;
pub mod moments;
pub mod spec;
pub mod sweep;
pub mod trellis;

pub use compositions::{CompRow, CompositionTable, SetAggregates};
pub use moments::{compute_moments, compute_moments_exact, uniform_mu4, uniform_pmf, InputMoments, GAUSSIAN_MU4};
pub use spec::{QuarticBound, ShapingSpec};
pub use sweep::{ess_spec, frontier_from_table, min_emax_for_rate, min_mu4_spec, sweep_frontier, SweepPoint};
pub use trellis::BoundedTrellis;
