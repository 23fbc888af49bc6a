//! Bit-level codec between packed posit words and the unpacked intermediate
//! representation used by the datapath.
//!
//! Decode follows the hardware flow: sign extraction, two's complement of
//! negative patterns, regime measurement with a leading-zero count, barrel
//! shifts to expose the exponent and fraction fields, and a unified binary
//! exponent `exp = r * 2^es + e`. Encode is the inverse, with round-to-nearest
//! ties-to-even applied once on the composite regime/exponent/fraction bit
//! string and saturation to maxpos/minpos at the ends of the lattice.

use crate::{PositConfig, PositWord};
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Classification of a packed word. Exactly one class holds per pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialClass {
    Normal,
    Zero,
    NaR,
}

/// Unpacked posit: sign, unified binary exponent and explicit mantissa.
///
/// The mantissa `frc` carries the implicit bit explicitly and is interpreted
/// as a fixed-point value with `frac_bits` fraction bits, so the represented
/// magnitude is `frc * 2^(exp - frac_bits)`. Decoded words are normalized
/// (`2^frac_bits <= frc < 2^(frac_bits+1)` with `frac_bits` equal to the
/// configured fraction width); intermediate datapath results may be wider or
/// denormalized, which [`encode`] and [`crate::alu::normalize`] resolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pir {
    pub sign: bool,
    pub exp: i32,
    pub frc: u128,
    pub frac_bits: u32,
    pub class: SpecialClass,
}

impl Pir {
    pub const ZERO: Pir = Pir { sign: false, exp: 0, frc: 0, frac_bits: 0, class: SpecialClass::Zero };
    pub const NAR: Pir = Pir { sign: false, exp: 0, frc: 0, frac_bits: 0, class: SpecialClass::NaR };

    pub fn normal(sign: bool, exp: i32, frc: u128, frac_bits: u32) -> Self {
        Pir { sign, exp, frc, frac_bits, class: SpecialClass::Normal }
    }

    pub fn is_nar(&self) -> bool {
        self.class == SpecialClass::NaR
    }

    pub fn is_zero(&self) -> bool {
        self.class == SpecialClass::Zero
    }

    pub fn is_normal(&self) -> bool {
        self.class == SpecialClass::Normal
    }

    /// Sign flip; zero and NaR are unaffected.
    pub fn negated(mut self) -> Self {
        if self.is_normal() {
            self.sign = !self.sign;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("NaR has no real value")]
pub struct NotARealValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("useed overflows for es_bits = {0}")]
pub struct UseedOverflow(pub u32);

/// `useed = 2^(2^es)`, the per-regime scaling constant.
pub fn useed(cfg: &PositConfig) -> Result<u128, UseedOverflow> {
    if cfg.es_bits() > 6 {
        return Err(UseedOverflow(cfg.es_bits()));
    }
    Ok(1u128 << (1u32 << cfg.es_bits()))
}

/// Classifies a packed word as Zero, NaR or Normal.
pub fn classify(w: PositWord, cfg: &PositConfig) -> SpecialClass {
    let bits = w.bits() & cfg.word_mask();
    if bits == 0 {
        SpecialClass::Zero
    } else if bits == cfg.nar_pattern() {
        SpecialClass::NaR
    } else {
        SpecialClass::Normal
    }
}

/// Unpacks a word into sign / unified exponent / explicit mantissa.
///
/// Short fractions are placed at the top of the configured fraction width and
/// a truncated exponent field reads as zero in its missing low bits, so every
/// Normal result has `frac_bits == cfg.frac_bits()` and the implicit bit set.
pub fn decode(w: PositWord, cfg: &PositConfig) -> Pir {
    match classify(w, cfg) {
        SpecialClass::Zero => return Pir::ZERO,
        SpecialClass::NaR => return Pir::NAR,
        SpecialClass::Normal => {}
    }
    let n = cfg.n_bits();
    let es = cfg.es_bits();
    let m = cfg.frac_bits();

    let sign = w.bits() >> (n - 1) & 1 == 1;
    let mag = if sign { w.bits().wrapping_neg() & cfg.word_mask() } else { w.bits() };

    // Top-align the n-1 body bits so field extraction is plain shifting.
    let body_len = n - 1;
    let body = mag << (64 - body_len);

    // Regime: run of bits equal to the leading bit, terminated by its
    // inverse. Inverting a run of ones turns both cases into an LZC.
    let r0 = body >> 63 == 1;
    let probe = if r0 { !body & (u64::MAX << (64 - body_len)) } else { body };
    let run = probe.leading_zeros().min(body_len);
    let regime = if r0 { run as i32 - 1 } else { -(run as i32) };

    // Skip the run and its terminator (the terminator is absent only when the
    // regime fills the body, in which case there is nothing left anyway).
    let consumed = (run + 1).min(body_len);
    let rest = body << consumed;

    let e = if es > 0 { (rest >> (64 - es)) as u32 } else { 0 };
    let frac_top = if m > 0 { (rest << es) >> (64 - m) } else { 0 };

    let exp = (regime << es) + e as i32;
    let frc = (1u128 << m) | frac_top as u128;
    Pir::normal(sign, exp, frc, m)
}

/// Packs an unpacked posit back into a word.
///
/// Accepts any mantissa width and position (the intermediate results of the
/// vector unit are wider than the storage format): the mantissa is normalized
/// internally, the composite regime/exponent/fraction bit string is cut at
/// the storage width and rounded to nearest, ties to the even bit pattern.
/// Magnitudes beyond the representable range saturate to maxpos/minpos;
/// rounding never produces zero or NaR. Negative results are two's-complement
/// encoded.
pub fn encode(p: Pir, cfg: &PositConfig) -> PositWord {
    match p.class {
        SpecialClass::Zero => return PositWord::from_bits(0, cfg),
        SpecialClass::NaR => return PositWord::from_bits(cfg.nar_pattern(), cfg),
        SpecialClass::Normal => {}
    }
    if p.frc == 0 {
        return PositWord::from_bits(0, cfg);
    }

    let n = cfg.n_bits();
    let es = cfg.es_bits();
    let body_len = n - 1;

    // True binade exponent of the value, independent of where the caller put
    // the binary point.
    let msb = 127 - p.frc.leading_zeros();
    let e_true = p.exp as i64 + msb as i64 - p.frac_bits as i64;

    let max_e = cfg.max_exp() as i64;
    if e_true > max_e {
        return signed_body(cfg.max_pos(), p.sign, cfg);
    }
    if e_true < -max_e {
        return signed_body(cfg.min_pos(), p.sign, cfg);
    }

    let regime = e_true.div_euclid(1 << es);
    let e_field = e_true.rem_euclid(1 << es) as u128;

    // Assemble the first body_len + 1 stream bits (body plus round bit);
    // everything past that folds into the sticky flag.
    let mut wr = StreamWriter::new(body_len + 1);
    if regime >= 0 {
        let k = regime as u32 + 1;
        wr.push((1u128 << k) - 1, k);
        wr.push(0, 1);
    } else {
        wr.push(0, (-regime) as u32);
        wr.push(1, 1);
    }
    wr.push(e_field, es);
    if msb > 0 {
        wr.push(p.frc & ((1u128 << msb) - 1), msb);
    }
    let (prefix, sticky) = wr.finish();

    let kept = (prefix >> 1) as u64;
    let round = prefix & 1 == 1;
    let mut body = kept + (round && (sticky || kept & 1 == 1)) as u64;
    // Saturation of the pattern itself: never round to zero or across maxpos.
    body = body.clamp(1, (1u64 << body_len) - 1);
    signed_body(body, p.sign, cfg)
}

fn signed_body(body: u64, sign: bool, cfg: &PositConfig) -> PositWord {
    let w = PositWord::from_bits(body, cfg);
    if sign {
        w.negate(cfg)
    } else {
        w
    }
}

/// MSB-first bit accumulator with overflow folded into a sticky flag.
struct StreamWriter {
    acc: u128,
    len: u32,
    cap: u32,
    sticky: bool,
}

impl StreamWriter {
    fn new(cap: u32) -> Self {
        StreamWriter { acc: 0, len: 0, cap, sticky: false }
    }

    /// Appends the low `count` bits of `bits`, most significant first.
    fn push(&mut self, bits: u128, count: u32) {
        debug_assert!(count == 128 || bits >> count == 0);
        let take = count.min(self.cap - self.len);
        if take > 0 {
            self.acc = (self.acc << take) | (bits >> (count - take));
            self.len += take;
        }
        let dropped = count - take;
        if dropped > 0 && bits & ((1u128 << dropped) - 1) != 0 {
            self.sticky = true;
        }
    }

    fn finish(self) -> (u128, bool) {
        (self.acc << (self.cap - self.len), self.sticky)
    }
}

/// Exact rational value of a non-NaR word.
pub fn to_real(w: PositWord, cfg: &PositConfig) -> Result<BigRational, NotARealValue> {
    let p = decode(w, cfg);
    match p.class {
        SpecialClass::NaR => Err(NotARealValue),
        SpecialClass::Zero => Ok(BigRational::from_integer(BigInt::from(0))),
        SpecialClass::Normal => {
            let mag = BigInt::from(p.frc);
            let shift = p.exp as i64 - p.frac_bits as i64;
            let value = if shift >= 0 {
                BigRational::from_integer(mag << shift)
            } else {
                BigRational::new(mag, BigInt::from(1) << (-shift))
            };
            Ok(if p.sign { -value } else { value })
        }
    }
}
