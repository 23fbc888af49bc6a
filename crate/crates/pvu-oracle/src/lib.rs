//! Exact-arithmetic reference and differential test harness for the posit
//! vector unit.
//!
//! [`exact`] re-implements the codec's value semantics and correct rounding
//! from scratch over arbitrary-precision rationals, sharing no arithmetic
//! code with the unit under test. [`sweep`] drives both implementations over
//! exhaustive or reproducible random input sets and tabulates every
//! disagreement.

pub mod exact;
pub mod sweep;

pub use exact::{exact_dot, exact_scalar, round_to_posit, value_of, ExactValue};
pub use sweep::{
    differential_sweep, random_word, ulp_distance, Mismatch, MismatchReport, SweepMode,
    DEFAULT_SEED,
};
