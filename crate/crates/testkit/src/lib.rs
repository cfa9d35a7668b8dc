//! Reference oracles for the `jrc-sar` test suites.
//!
//! Everything here is written against elementary arithmetic only: direct
//! summation instead of transforms, exact rationals instead of floating
//! point polynomials, series expansions instead of library special
//! functions. None of it shares numeric kernels with the crate it checks.

pub mod correlation;
pub mod exact;
pub mod numeric;

pub use correlation::{aperiodic_correlation, periodic_correlation, AperiodicCorrelation};
pub use exact::{exact_range_history, exact_sqrt, RangeTerms};
pub use numeric::{erfc, finite_difference, monte_carlo_ber, qfunction, BerEstimate};
