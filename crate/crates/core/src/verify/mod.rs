//! Numerical checks of the decay, summability and multiplier estimates, each producing a
//! [`VerificationReport`] with its fitted constants and pass/fail criteria.

pub mod estimates;
pub mod fit;
pub mod remainder;
pub mod report;
pub mod suite;
pub mod symbol;
pub mod w21q;

pub use fit::{fit_decay_exponent, fit_exponential_rate, DecayFit, RateFit};
pub use report::{Relation, VerificationReport};
pub use suite::{available_checks, run_check, SuiteConfig};
