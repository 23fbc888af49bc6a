//! Word-level models of the arithmetic building blocks: leading-zero count,
//! barrel shift, radix-4 Booth partial products, 3:2/4:2 carry-save
//! compressor trees and the Newton–Raphson fixed-point reciprocal.
//!
//! Everything here operates on plain unsigned words with an explicit width,
//! mirroring the datapath cells rather than any particular number format.

use thiserror::Error;

/// Number of leading zeros of `x` within a `width`-bit field, plus an
/// all-zero flag.
pub fn lzc(x: u64, width: u32) -> (u32, bool) {
    assert!(width >= 1 && width <= 64, "lzc width out of range");
    debug_assert!(width == 64 || x >> width == 0);
    if x == 0 {
        return (width, true);
    }
    (x.leading_zeros() - (64 - width), false)
}

/// Logical left shift within a `width`-bit field; shifted-out bits are
/// discarded. `k` must be in `0..width`.
pub fn barrel_shift_left(x: u64, k: u32, width: u32) -> u64 {
    assert!(width >= 1 && width <= 64);
    assert!(k < width, "barrel shift amount {k} out of range for width {width}");
    let shifted = x << k;
    if width == 64 {
        shifted
    } else {
        shifted & ((1u64 << width) - 1)
    }
}

/// One radix-4 Booth digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoothDigit {
    NegTwo,
    NegOne,
    Zero,
    PosOne,
    PosTwo,
}

impl BoothDigit {
    pub fn value(self) -> i32 {
        match self {
            BoothDigit::NegTwo => -2,
            BoothDigit::NegOne => -1,
            BoothDigit::Zero => 0,
            BoothDigit::PosOne => 1,
            BoothDigit::PosTwo => 2,
        }
    }

    /// Recodes one overlapping 3-bit window (`b_{2i+1} b_{2i} b_{2i-1}`).
    fn from_window(w: u32) -> Self {
        match w & 0b111 {
            0b000 | 0b111 => BoothDigit::Zero,
            0b001 | 0b010 => BoothDigit::PosOne,
            0b011 => BoothDigit::PosTwo,
            0b100 => BoothDigit::NegTwo,
            0b101 | 0b110 => BoothDigit::NegOne,
            _ => unreachable!(),
        }
    }
}

/// Radix-4 Booth recoding of a zero-extended `width`-bit multiplier.
///
/// The multiplier is padded with a zero below its LSB and zero-extended above,
/// yielding `ceil((width + 1) / 2)` digits with `sum(d_i * 4^i) = multiplier`.
pub fn booth_encode(multiplier: u64, width: u32) -> Vec<BoothDigit> {
    assert!(width >= 1 && width <= 64);
    debug_assert!(width == 64 || multiplier >> width == 0);
    let digits = (width + 2) / 2;
    (0..digits)
        .map(|i| {
            let lo = if i == 0 { 0 } else { (multiplier >> (2 * i - 1)) as u32 & 1 };
            let mid = bit(multiplier, 2 * i) << 1;
            let hi = bit(multiplier, 2 * i + 1) << 2;
            BoothDigit::from_window(hi | mid | lo)
        })
        .collect()
}

fn bit(x: u64, i: u32) -> u32 {
    if i >= 64 {
        0
    } else {
        (x >> i) as u32 & 1
    }
}

/// Partial products for a Booth-recoded multiply: `d_i * multiplicand * 4^i`,
/// sign-extended to `2 * width` bits (returned as signed values).
pub fn booth_partial_products(multiplicand: u64, codes: &[BoothDigit], width: u32) -> Vec<i128> {
    debug_assert!(width == 64 || multiplicand >> width == 0);
    codes
        .iter()
        .enumerate()
        .map(|(i, d)| (d.value() as i128 * multiplicand as i128) << (2 * i))
        .collect()
}

/// Redundant sum/carry pair: `sum + (carry << 1)` equals the compressed total
/// modulo `2^width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsaPair {
    pub sum: u128,
    pub carry: u128,
}

impl CsaPair {
    /// Resolves the redundant form with a final carry-propagate add.
    pub fn resolve(&self, width: u32) -> u128 {
        mask_to(self.sum.wrapping_add(self.carry << 1), width)
    }
}

fn mask_to(x: u128, width: u32) -> u128 {
    if width >= 128 {
        x
    } else {
        x & ((1u128 << width) - 1)
    }
}

/// One 3:2 compressor over whole words: per-bit sum and majority carry.
fn compress3(a: u128, b: u128, c: u128) -> (u128, u128) {
    (a ^ b ^ c, (a & b) | (b & c) | (a & c))
}

/// Reduces any number of terms to a sum/carry pair using 4:2 and 3:2
/// compressors, recursing until two rows remain. All arithmetic is modulo
/// `2^width`.
pub fn csa_reduce(terms: &[u128], width: u32) -> CsaPair {
    assert!(!terms.is_empty(), "csa_reduce needs at least one term");
    assert!(width >= 1 && width <= 128);
    let mut rows: Vec<u128> = terms.iter().map(|&t| mask_to(t, width)).collect();
    while rows.len() > 2 {
        let mut next = Vec::with_capacity(rows.len() / 2 + 1);
        let mut chunks = rows.chunks_exact(4);
        for four in &mut chunks {
            // 4:2 compressor built from two 3:2 levels.
            let (s1, c1) = compress3(four[0], four[1], four[2]);
            let (s2, c2) = compress3(s1, mask_to(c1 << 1, width), four[3]);
            next.push(s2);
            next.push(mask_to(c2 << 1, width));
        }
        match chunks.remainder() {
            [a, b, c] => {
                let (s, cy) = compress3(*a, *b, *c);
                next.push(s);
                next.push(mask_to(cy << 1, width));
            }
            rest => next.extend_from_slice(rest),
        }
        rows = next;
    }
    match rows.as_slice() {
        [only] => CsaPair { sum: *only, carry: 0 },
        [a, b] => {
            let (s, c) = compress3(*a, *b, 0);
            CsaPair { sum: s, carry: c }
        }
        _ => unreachable!(),
    }
}

/// Exact `width x width -> 2*width` multiply through the Booth/CSA path.
pub fn booth_multiply(a: u64, b: u64, width: u32) -> u128 {
    assert!(width >= 1 && width <= 64);
    debug_assert!(width == 64 || (a >> width == 0 && b >> width == 0));
    let codes = booth_encode(b, width);
    let pps = booth_partial_products(a, &codes, width);
    let wide = 2 * width;
    let terms: Vec<u128> = pps.iter().map(|&p| mask_to(p as u128, wide)).collect();
    csa_reduce(&terms, wide).resolve(wide)
}

/// Unsigned fixed-point value `raw * 2^(-frac_bits)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPoint {
    pub raw: u128,
    pub frac_bits: u32,
}

impl FixedPoint {
    pub fn new(raw: u128, frac_bits: u32) -> Self {
        FixedPoint { raw, frac_bits }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatapathError {
    #[error("reciprocal of zero")]
    DivisionByZero,
}

/// Maximum fraction width [`newton_reciprocal`] supports: intermediates take
/// `3F + 2` bits and must fit in 128.
pub const MAX_RECIP_FRAC_BITS: u32 = 42;

/// Newton–Raphson reciprocal of `num` in `[1, 2)`, returned in `(1/2, 1]`
/// at the same fraction width.
///
/// The seed is the minimax linear approximation `48/17 - 32/17 * d` of `1/d`
/// over `d in [0.5, 1)`, applied here on the halved operand (equivalently
/// `24/17 - 8/17 * num`), so the relative error after each of the
/// `X * (2 - num * X)` steps squares: below `2^-24` after three iterations.
/// Intermediates are truncated back to the working fraction width after every
/// step; the multiplies reuse the Booth/CSA path.
pub fn newton_reciprocal(num: FixedPoint, iters: u32) -> Result<FixedPoint, DatapathError> {
    if num.raw == 0 {
        return Err(DatapathError::DivisionByZero);
    }
    let f = num.frac_bits;
    assert!(f >= 4 && f <= MAX_RECIP_FRAC_BITS, "unsupported fraction width {f}");
    assert!(num.raw >= 1 << f && num.raw < 2 << f, "operand not normalized to [1, 2)");
    assert!(iters >= 1);

    if num.raw == 1 << f {
        // Exact fixed point of the iteration.
        return Ok(num);
    }

    let mul_width = f + 2;
    let mut x: u128 = ((24u128 << f) - 8 * num.raw) / 17;
    for _ in 0..iters {
        // e = 2 - num * x, truncated back to F fraction bits.
        let prod = booth_multiply(num.raw as u64, x as u64, mul_width);
        let e = ((2u128 << (2 * f)) - prod) >> f;
        x = booth_multiply(x as u64, e as u64, mul_width) >> f;
    }
    Ok(FixedPoint::new(x, f))
}
