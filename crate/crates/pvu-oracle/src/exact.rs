//! Independent exact-arithmetic reference for the posit codec and operations.
//!
//! Everything here is computed over arbitrary-precision rationals with its own
//! bit-string construction, sharing no decode/encode code with the unit under
//! test: words are taken apart by scanning bits, and rounding re-derives the
//! regime/exponent/fraction stream from the rational value digit by digit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pvu::alu::OpKind;
use pvu::{PositConfig, PositWord};

/// A posit's mathematical content: a rational number or NaR.
pub type ExactValue = Option<BigRational>;

/// Exact rational value of a word, or `None` for NaR.
///
/// Fields are read by scanning the body bits directly rather than through the
/// unit's shift/LZC pipeline.
pub fn value_of(w: PositWord, cfg: &PositConfig) -> ExactValue {
    let n = cfg.n_bits();
    let es = cfg.es_bits();
    let bits = w.bits();
    if bits == cfg.nar_pattern() {
        return None;
    }
    if bits == 0 {
        return Some(BigRational::zero());
    }
    let negative = bits >> (n - 1) & 1 == 1;
    let mag = if negative { bits.wrapping_neg() & cfg.word_mask() } else { bits };

    // Walk the body MSB-first: regime run, terminator, exponent, fraction.
    let body: Vec<bool> = (0..n - 1).rev().map(|i| mag >> i & 1 == 1).collect();
    let r0 = body[0];
    let run = body.iter().take_while(|&&b| b == r0).count();
    let regime: i64 = if r0 { run as i64 - 1 } else { -(run as i64) };
    let tail = &body[(run + 1).min(body.len())..];

    let mut e: i64 = 0;
    for i in 0..es as usize {
        e = (e << 1) | tail.get(i).map_or(0, |&b| b as i64);
    }
    let frac_bits = &tail[(es as usize).min(tail.len())..];

    let e_true = regime * (1i64 << es) + e;
    let mut numer = BigInt::one();
    for &b in frac_bits {
        numer = (numer << 1) + b as i64;
    }
    // value = (1.frac) * 2^(e_true - frac_len)
    let shift = e_true - frac_bits.len() as i64;
    let v = if shift >= 0 {
        BigRational::from_integer(numer << shift)
    } else {
        BigRational::new(numer, BigInt::one() << (-shift))
    };
    Some(if negative { -v } else { v })
}

/// Correctly rounds an exact value to the nearest posit word: round to
/// nearest, ties to the even bit pattern, with saturation to maxpos/minpos
/// (never to zero or NaR).
pub fn round_to_posit(x: &ExactValue, cfg: &PositConfig) -> PositWord {
    let Some(x) = x else {
        return PositWord::from_bits(cfg.nar_pattern(), cfg);
    };
    if x.is_zero() {
        return PositWord::from_bits(0, cfg);
    }
    let n = cfg.n_bits();
    let es = cfg.es_bits();
    let negative = x.is_negative();
    let mag = x.abs();

    // Binade of the magnitude: 2^e <= mag < 2^(e+1).
    let mut e = mag.numer().bits() as i64 - mag.denom().bits() as i64;
    if pow2_cmp(&mag, e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    debug_assert!(pow2_cmp(&mag, e) != std::cmp::Ordering::Less);
    debug_assert!(pow2_cmp(&mag, e + 1) == std::cmp::Ordering::Less);

    let max_e = cfg.max_exp() as i64;
    let body_len = (n - 1) as usize;
    let max_body = (1u64 << body_len) - 1;
    if e > max_e {
        return finish(max_body, negative, cfg);
    }
    if e < -max_e {
        return finish(1, negative, cfg);
    }

    let regime = e.div_euclid(1 << es);
    let e_field = e.rem_euclid(1 << es) as u64;

    // Compose the body stream plus one round bit; overflow goes to sticky.
    let mut bits: Vec<bool> = Vec::with_capacity(body_len + 1);
    let mut sticky = false;
    let mut push = |bits: &mut Vec<bool>, b: bool| {
        if bits.len() < body_len + 1 {
            bits.push(b);
        } else {
            sticky |= b;
        }
    };
    if regime >= 0 {
        for _ in 0..=regime {
            push(&mut bits, true);
        }
        push(&mut bits, false);
    } else {
        for _ in 0..-regime {
            push(&mut bits, false);
        }
        push(&mut bits, true);
    }
    for i in (0..es).rev() {
        push(&mut bits, e_field >> i & 1 == 1);
    }

    // Fraction digits of mag / 2^e - 1, extracted by rational doubling.
    let top = if e >= 0 { mag.numer().clone() } else { mag.numer() << (-e) as u64 };
    let bot = if e >= 0 { mag.denom() << e as u64 } else { mag.denom().clone() };
    let mut rem = top - &bot;
    while bits.len() < body_len + 1 && !rem.is_zero() {
        rem <<= 1;
        let one = rem >= bot;
        if one {
            rem -= &bot;
        }
        push(&mut bits, one);
    }
    sticky |= !rem.is_zero();
    while bits.len() < body_len + 1 {
        bits.push(false);
    }

    let kept = bits[..body_len].iter().fold(0u64, |acc, &b| acc << 1 | b as u64);
    let round = bits[body_len];
    let body = kept + (round && (sticky || kept & 1 == 1)) as u64;
    finish(body.clamp(1, max_body), negative, cfg)
}

/// Three-way comparison of `mag` against `2^e`.
fn pow2_cmp(mag: &BigRational, e: i64) -> std::cmp::Ordering {
    if e >= 0 {
        mag.numer().cmp(&(mag.denom() << e as u64))
    } else {
        (mag.numer() << (-e) as u64).cmp(mag.denom())
    }
}

fn finish(body: u64, negative: bool, cfg: &PositConfig) -> PositWord {
    let w = PositWord::from_bits(body, cfg);
    if negative {
        w.negate(cfg)
    } else {
        w
    }
}

/// Exact elementwise reference for one scalar operation. NaR is absorbing;
/// division by zero is NaR.
pub fn exact_scalar(op: OpKind, a: &ExactValue, b: &ExactValue) -> ExactValue {
    let (a, b) = (a.as_ref()?, b.as_ref()?);
    match op {
        OpKind::Add => Some(a + b),
        OpKind::Sub => Some(a - b),
        OpKind::Mul | OpKind::Dot => Some(a * b),
        OpKind::Div => {
            if b.is_zero() {
                None
            } else {
                Some(a / b)
            }
        }
    }
}

/// Exact fused dot product: NaR if any element is NaR.
pub fn exact_dot(a: &[ExactValue], b: &[ExactValue]) -> ExactValue {
    assert_eq!(a.len(), b.len());
    let mut acc = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.as_ref()? * y.as_ref()?;
    }
    Some(acc)
}
