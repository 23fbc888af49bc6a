//! The five vector operations — add, sub, mul, div, dot — over unpacked
//! vectors, plus mantissa alignment and normalization.
//!
//! Each lane follows the hardware pipeline: decode, operate at extended
//! width, then a single round-to-nearest when the result is packed. The
//! intermediate [`Pir`] results deliberately stay unrounded so that fused
//! operations (and the final [`crate::codec::encode`]) round exactly once.

use crate::codec::{self, Pir};
use crate::datapath::{booth_multiply, csa_reduce, newton_reciprocal, FixedPoint, MAX_RECIP_FRAC_BITS};
use crate::{PositConfig, PositWord};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// A vector of unpacked posits sharing one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PirVector {
    pub cfg: PositConfig,
    pub elems: Vec<Pir>,
}

impl PirVector {
    pub fn new(cfg: PositConfig, elems: Vec<Pir>) -> Self {
        PirVector { cfg, elems }
    }

    /// Decodes a slice of packed words.
    pub fn from_words(words: &[PositWord], cfg: PositConfig) -> Self {
        let elems = words.iter().map(|w| codec::decode(*w, &cfg)).collect();
        PirVector { cfg, elems }
    }

    /// Packs every element, rounding each once.
    pub fn to_words(&self) -> Vec<PositWord> {
        self.elems.iter().map(|p| codec::encode(*p, &self.cfg)).collect()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("vector length mismatch: {left} vs {right}")]
pub struct VectorShapeError {
    pub left: usize,
    pub right: usize,
}

/// The operations the unit implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Dot,
}

/// Result of [`execute`]: elementwise ops yield a vector, dot a scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AluResult {
    Vector(PirVector),
    Scalar(Pir),
}

fn check_shape(a: &PirVector, b: &PirVector) -> Result<(), VectorShapeError> {
    if a.len() != b.len() {
        return Err(VectorShapeError { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// Largest alignment shift the 128-bit lane arithmetic can absorb for
/// mantissas with `frac_bits` fraction bits.
fn shift_headroom(frac_bits: u32) -> u32 {
    125 - frac_bits
}

/// Brings two Normal operands to a common exponent and mantissa scale.
///
/// Both outputs carry `exp = max(a.exp, b.exp)` and a mantissa widened by the
/// shift distance, so the alignment itself is lossless. The distance is
/// capped at `cfg.align_bits` (and at what 128-bit mantissas can hold); past
/// the cap the smaller operand saturates at the bottom of the window, which
/// leaves any subsequent add correctly rounded because the cap is at least
/// the word width.
pub fn align_pair(a: Pir, b: Pir, cfg: &PositConfig) -> (Pir, Pir) {
    debug_assert!(a.is_normal() && b.is_normal());
    debug_assert_eq!(a.frac_bits, b.frac_bits);
    let (hi, lo) = if a.exp >= b.exp { (a, b) } else { (b, a) };
    let diff = (hi.exp - lo.exp) as u32;
    let d = diff.min(cfg.align_bits()).min(shift_headroom(hi.frac_bits));
    let fb = hi.frac_bits + d;
    let hi2 = Pir::normal(hi.sign, hi.exp, hi.frc << d, fb);
    let lo2 = Pir::normal(lo.sign, hi.exp, lo.frc, fb);
    if a.exp >= b.exp {
        (hi2, lo2)
    } else {
        (lo2, hi2)
    }
}

/// Brings every Normal element of `v` to the vector's maximum exponent, each
/// mantissa widened by its (capped) shift distance. Specials pass through.
pub fn align_many(v: &PirVector) -> PirVector {
    let max_exp = v.elems.iter().filter(|p| p.is_normal()).map(|p| p.exp).max();
    let Some(max_exp) = max_exp else {
        return v.clone();
    };
    let elems = v
        .elems
        .iter()
        .map(|p| {
            if !p.is_normal() {
                return *p;
            }
            let diff = (max_exp - p.exp) as u32;
            let d = diff.min(v.cfg.align_bits()).min(shift_headroom(p.frac_bits));
            Pir::normal(p.sign, max_exp, p.frc, p.frac_bits + d)
        })
        .collect();
    PirVector { cfg: v.cfg, elems }
}

/// Rounds a wide intermediate back to the configured mantissa width
/// (implicit bit plus `cfg.frac_bits()` fraction bits), round to nearest,
/// ties to even. A mantissa that cancelled to zero becomes Zero.
pub fn normalize(p: Pir, cfg: &PositConfig) -> Pir {
    if !p.is_normal() {
        return p;
    }
    if p.frc == 0 {
        return Pir::ZERO;
    }
    let m = cfg.frac_bits();
    let msb = 127 - p.frc.leading_zeros();
    let mut e_true = p.exp + msb as i32 - p.frac_bits as i32;
    let frc = if msb <= m {
        p.frc << (m - msb)
    } else {
        let shift = msb - m;
        let kept = p.frc >> shift;
        let round = p.frc >> (shift - 1) & 1 == 1;
        let sticky = p.frc & ((1u128 << (shift - 1)) - 1) != 0;
        let mut f = kept + (round && (sticky || kept & 1 == 1)) as u128;
        if f == 1 << (m + 1) {
            f >>= 1;
            e_true += 1;
        }
        f
    };
    Pir::normal(p.sign, e_true, frc, m)
}

/// Converts an exact signed integer `acc * 2^lsb_exp` into a PIR. Magnitudes
/// wider than the 128-bit mantissa keep their top 127 bits with the rest
/// folded into a sticky LSB, which leaves the terminal rounding unchanged
/// (the kept width dwarfs any storage format).
fn pir_from_bigint(acc: &BigInt, lsb_exp: i64) -> Pir {
    if acc.is_zero() {
        return Pir::ZERO;
    }
    let sign = acc.is_negative();
    let mag = acc.magnitude();
    let bits = mag.bits() as u32;
    if bits <= 127 {
        let frc = u128::try_from(mag).expect("fits in 127 bits");
        return Pir::normal(sign, lsb_exp as i32, frc, 0);
    }
    let drop = bits - 127;
    let kept = mag >> drop;
    let sticky = *mag != &kept << drop;
    let frc = u128::try_from(&kept).expect("fits in 127 bits") | sticky as u128;
    Pir::normal(sign, (lsb_exp + drop as i64) as i32, frc, 0)
}

/// Adds two unpacked scalars without rounding: the result mantissa is exactly
/// the aligned sum (up to the alignment cap), left for the encoder to round.
///
/// Decoded same-width operands take the hardware path through [`align_pair`];
/// mixed-width or extra-wide intermediates (as produced by fused folds) are
/// summed exactly instead.
fn add_pir(a: Pir, b: Pir, cfg: &PositConfig) -> Pir {
    if a.is_nar() || b.is_nar() {
        return Pir::NAR;
    }
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    let fb = a.frac_bits;
    if b.frac_bits == fb && fb < 120 && (a.frc | b.frc) >> (fb + 1) == 0 {
        let (a2, b2) = align_pair(a, b, cfg);
        let am = if a2.sign { -(a2.frc as i128) } else { a2.frc as i128 };
        let bm = if b2.sign { -(b2.frc as i128) } else { b2.frc as i128 };
        let sum = am + bm;
        if sum == 0 {
            return Pir::ZERO;
        }
        return Pir::normal(sum < 0, a2.exp, sum.unsigned_abs(), a2.frac_bits);
    }
    let la = a.exp as i64 - a.frac_bits as i64;
    let lb = b.exp as i64 - b.frac_bits as i64;
    let t = la.min(lb);
    let signed = |p: &Pir, l: i64| {
        let m = BigInt::from(p.frc) << (l - t);
        if p.sign {
            -m
        } else {
            m
        }
    };
    pir_from_bigint(&(signed(&a, la) + signed(&b, lb)), t)
}

/// Multiplies two unpacked scalars exactly; the product keeps both mantissas'
/// worth of fraction bits.
fn mul_pir(a: Pir, b: Pir) -> Pir {
    if a.is_nar() || b.is_nar() {
        return Pir::NAR;
    }
    if a.is_zero() || b.is_zero() {
        return Pir::ZERO;
    }
    debug_assert_eq!(a.frac_bits, b.frac_bits);
    let width = a.frac_bits + 1;
    let frc = booth_multiply(a.frc as u64, b.frc as u64, width);
    Pir::normal(a.sign != b.sign, a.exp + b.exp, frc, a.frac_bits + b.frac_bits)
}

/// Divides via the Newton–Raphson reciprocal of the divisor mantissa.
///
/// The divisor is scaled into `[1, 2)` fixed point, its reciprocal computed
/// with three iterations, and the quotient formed as one extra multiply. The
/// reciprocal carries at least 16 guard bits over the storage mantissa (more
/// at narrow widths), so the quotient is almost always correctly rounded;
/// the truncated reciprocal can fall on the wrong side of a rounding
/// boundary in rare near-tie cases.
fn div_pir(a: Pir, b: Pir) -> Pir {
    if a.is_nar() || b.is_nar() || b.is_zero() {
        return Pir::NAR;
    }
    if a.is_zero() {
        return Pir::ZERO;
    }
    debug_assert_eq!(a.frac_bits, b.frac_bits);
    let m = b.frac_bits;
    let f = (m + 17).min(MAX_RECIP_FRAC_BITS);
    let b_fixed = if f >= m { b.frc << (f - m) } else { b.frc >> (m - f) };
    let recip = newton_reciprocal(FixedPoint::new(b_fixed, f), 3)
        .expect("normalized divisor mantissa is nonzero");
    let width = (m + 1).max(f + 1);
    let frc = booth_multiply(a.frc as u64, recip.raw as u64, width);
    Pir::normal(a.sign != b.sign, a.exp - b.exp, frc, m + f)
}

pub fn vadd(a: &PirVector, b: &PirVector) -> Result<PirVector, VectorShapeError> {
    check_shape(a, b)?;
    let elems = a
        .elems
        .iter()
        .zip(&b.elems)
        .map(|(x, y)| add_pir(*x, *y, &a.cfg))
        .collect();
    Ok(PirVector { cfg: a.cfg, elems })
}

pub fn vsub(a: &PirVector, b: &PirVector) -> Result<PirVector, VectorShapeError> {
    check_shape(a, b)?;
    let elems = a
        .elems
        .iter()
        .zip(&b.elems)
        .map(|(x, y)| add_pir(*x, y.negated(), &a.cfg))
        .collect();
    Ok(PirVector { cfg: a.cfg, elems })
}

pub fn vmul(a: &PirVector, b: &PirVector) -> Result<PirVector, VectorShapeError> {
    check_shape(a, b)?;
    let elems = a.elems.iter().zip(&b.elems).map(|(x, y)| mul_pir(*x, *y)).collect();
    Ok(PirVector { cfg: a.cfg, elems })
}

pub fn vdiv(a: &PirVector, b: &PirVector) -> Result<PirVector, VectorShapeError> {
    check_shape(a, b)?;
    let elems = a.elems.iter().zip(&b.elems).map(|(x, y)| div_pir(*x, *y)).collect();
    Ok(PirVector { cfg: a.cfg, elems })
}

/// Fused dot product: elementwise exact products, two's-complement
/// accumulation through the carry-save tree, one rounding at the very end.
///
/// When the exponent spread of the products fits the 128-bit accumulator
/// (the overwhelmingly common case), the sum runs through [`csa_reduce`]
/// exactly as the hardware reduction would. A wider spread falls back to an
/// exact big-integer sum whose magnitude is then condensed to the accumulator
/// width with a sticky bit, so the single terminal rounding still sees the
/// mathematically exact value.
pub fn vdot(a: &PirVector, b: &PirVector) -> Result<Pir, VectorShapeError> {
    check_shape(a, b)?;
    if a.elems.iter().chain(&b.elems).any(|p| p.is_nar()) {
        return Ok(Pir::NAR);
    }
    let products: Vec<Pir> = a
        .elems
        .iter()
        .zip(&b.elems)
        .map(|(x, y)| mul_pir(*x, *y))
        .filter(|p| p.is_normal())
        .collect();
    let Some(min_exp) = products.iter().map(|p| p.exp).min() else {
        return Ok(Pir::ZERO);
    };
    let max_exp = products.iter().map(|p| p.exp).max().unwrap();
    let fb = products[0].frac_bits;
    debug_assert!(products.iter().all(|p| p.frac_bits == fb));

    let span = (max_exp - min_exp) as u32;
    let len_bits = usize::BITS - products.len().leading_zeros();
    if span + fb + 2 + len_bits <= 126 {
        // Everything fits: align to the smallest exponent and reduce the
        // two's-complement terms with the compressor tree.
        let terms: Vec<u128> = products
            .iter()
            .map(|p| {
                let t = (p.frc as i128) << (p.exp - min_exp);
                (if p.sign { -t } else { t }) as u128
            })
            .collect();
        let sum = csa_reduce(&terms, 128).resolve(128) as i128;
        if sum == 0 {
            return Ok(Pir::ZERO);
        }
        return Ok(Pir::normal(sum < 0, min_exp, sum.unsigned_abs(), fb));
    }

    let mut acc = BigInt::zero();
    for p in &products {
        let t = BigInt::from(p.frc) << (p.exp - min_exp);
        if p.sign {
            acc -= t;
        } else {
            acc += t;
        }
    }
    Ok(pir_from_bigint(&acc, min_exp as i64 - fb as i64))
}

/// Dispatches one operation over decoded vectors.
pub fn execute(op: OpKind, a: &PirVector, b: &PirVector) -> Result<AluResult, VectorShapeError> {
    Ok(match op {
        OpKind::Add => AluResult::Vector(vadd(a, b)?),
        OpKind::Sub => AluResult::Vector(vsub(a, b)?),
        OpKind::Mul => AluResult::Vector(vmul(a, b)?),
        OpKind::Div => AluResult::Vector(vdiv(a, b)?),
        OpKind::Dot => AluResult::Scalar(vdot(a, b)?),
    })
}

/// Word-in/word-out convenience wrapper: decode, operate, round once, pack.
/// A dot product yields a single-element vector.
pub fn execute_words(
    op: OpKind,
    a: &[PositWord],
    b: &[PositWord],
    cfg: &PositConfig,
) -> Result<Vec<PositWord>, VectorShapeError> {
    let av = PirVector::from_words(a, *cfg);
    let bv = PirVector::from_words(b, *cfg);
    Ok(match execute(op, &av, &bv)? {
        AluResult::Vector(v) => v.to_words(),
        AluResult::Scalar(s) => vec![codec::encode(s, cfg)],
    })
}
