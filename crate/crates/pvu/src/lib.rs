//! Bit-accurate model of a parameterized Posit⟨N, ES⟩ vector arithmetic unit.
//!
//! The crate is split the same way the hardware is:
//!
//! * [`codec`] — the Posit⟨N, ES⟩ bit-level codec between packed words and the
//!   unpacked intermediate representation ([`codec::Pir`]).
//! * [`datapath`] — word-level models of the arithmetic building blocks:
//!   leading-zero count, barrel shift, radix-4 Booth multiply, carry-save
//!   compressor trees and the Newton–Raphson fixed-point reciprocal.
//! * [`alu`] — the five vector operations (add, sub, mul, div, dot) over
//!   unpacked vectors, plus alignment and normalization.
//! * [`isa`] — encoder/decoder for the custom vector instructions and a small
//!   instruction-set simulator with a vector register file.
//!
//! All operations are pure functions on value types and safe to call
//! concurrently.

pub mod alu;
pub mod codec;
pub mod datapath;
pub mod isa;

use thiserror::Error;

/// Errors raised when constructing a [`PositConfig`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("total width must satisfy 2 < n_bits <= 64, got {0}")]
    BadWidth(u32),
    #[error("exponent width must satisfy es_bits < n_bits - 2, got es={es} for n={n}")]
    BadExponentWidth { n: u32, es: u32 },
    #[error("alignment width must be at least n_bits, got align={align} for n={n}")]
    BadAlignWidth { n: u32, align: u32 },
}

/// Parameterization knobs of the unit: total width, exponent field width and
/// the maximum mantissa alignment shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PositConfig {
    n_bits: u32,
    es_bits: u32,
    align_bits: u32,
}

impl PositConfig {
    /// Builds a configuration, checking `2 < n_bits <= 64`,
    /// `es_bits < n_bits - 2` and `align_bits >= n_bits`.
    pub fn new(n_bits: u32, es_bits: u32, align_bits: u32) -> Result<Self, ConfigError> {
        if n_bits <= 2 || n_bits > 64 {
            return Err(ConfigError::BadWidth(n_bits));
        }
        // The second bound keeps unified exponents (and their sums) inside
        // i32; no practical posit format comes anywhere near it.
        if es_bits >= n_bits - 2 || es_bits > 20 {
            return Err(ConfigError::BadExponentWidth { n: n_bits, es: es_bits });
        }
        if align_bits < n_bits {
            return Err(ConfigError::BadAlignWidth { n: n_bits, align: align_bits });
        }
        Ok(Self { n_bits, es_bits, align_bits })
    }

    /// Configuration with the default alignment width (`align_bits = n_bits`).
    pub fn standard(n_bits: u32, es_bits: u32) -> Result<Self, ConfigError> {
        Self::new(n_bits, es_bits, n_bits)
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn es_bits(&self) -> u32 {
        self.es_bits
    }

    pub fn align_bits(&self) -> u32 {
        self.align_bits
    }

    /// Maximum number of explicit fraction bits a word of this width can hold
    /// (sign + 2-bit regime + exponent field leave `n - 3 - es` bits).
    pub fn frac_bits(&self) -> u32 {
        self.n_bits - 3 - self.es_bits
    }

    /// Width of the unpacked mantissa including the implicit bit.
    pub fn mant_bits(&self) -> u32 {
        self.frac_bits() + 1
    }

    /// Mask selecting the low `n_bits` of a word.
    pub fn word_mask(&self) -> u64 {
        if self.n_bits == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_bits) - 1
        }
    }

    /// The NaR pattern: sign bit set, all other bits clear.
    pub fn nar_pattern(&self) -> u64 {
        1u64 << (self.n_bits - 1)
    }

    /// Largest positive pattern (`0111...1`).
    pub fn max_pos(&self) -> u64 {
        self.nar_pattern() - 1
    }

    /// Smallest positive pattern (`0...01`).
    pub fn min_pos(&self) -> u64 {
        1
    }

    /// Largest representable unified binary exponent, `(n - 2) * 2^es`.
    /// The regime cannot encode anything beyond this.
    pub fn max_exp(&self) -> i32 {
        ((self.n_bits - 2) << self.es_bits) as i32
    }
}

/// One packed posit: an `n_bits`-wide two's-complement bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PositWord {
    bits: u64,
}

impl PositWord {
    /// Wraps a raw pattern, masking it to the configured width.
    pub fn from_bits(bits: u64, cfg: &PositConfig) -> Self {
        Self { bits: bits & cfg.word_mask() }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Two's-complement negation within the configured width. This is posit
    /// negation; zero and NaR are fixed points.
    pub fn negate(&self, cfg: &PositConfig) -> Self {
        Self { bits: self.bits.wrapping_neg() & cfg.word_mask() }
    }

    /// The word reinterpreted as a signed integer (sign-extended), which
    /// orders posits by value.
    pub fn as_signed(&self, cfg: &PositConfig) -> i64 {
        let shift = 64 - cfg.n_bits;
        ((self.bits << shift) as i64) >> shift
    }
}
