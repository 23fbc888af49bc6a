//! Algebraic invariants of the vector unit, exhaustive at 8 bits and
//! property-based at wider widths.

use proptest::prelude::*;
use pvu::alu::{self, OpKind, PirVector};
use pvu::codec::{decode, encode};
use pvu::{PositConfig, PositWord};

fn cfg(n: u32, es: u32) -> PositConfig {
    PositConfig::standard(n, es).unwrap()
}

fn op1(op: OpKind, a: u64, b: u64, c: &PositConfig) -> u64 {
    let aw = [PositWord::from_bits(a, c)];
    let bw = [PositWord::from_bits(b, c)];
    alu::execute_words(op, &aw, &bw, c).unwrap()[0].bits()
}

#[test]
fn add_and_mul_commute_exhaustive_8bit() {
    let c = cfg(8, 2);
    for a in 0..=0xFFu64 {
        for b in a..=0xFFu64 {
            assert_eq!(op1(OpKind::Add, a, b, &c), op1(OpKind::Add, b, a, &c), "{a:#x}+{b:#x}");
            assert_eq!(op1(OpKind::Mul, a, b, &c), op1(OpKind::Mul, b, a, &c), "{a:#x}*{b:#x}");
        }
    }
}

#[test]
fn sub_is_add_of_negation_exhaustive_8bit() {
    let c = cfg(8, 0);
    for a in 0..=0xFFu64 {
        for b in 0..=0xFFu64 {
            let neg_b = PositWord::from_bits(b, &c).negate(&c).bits();
            assert_eq!(op1(OpKind::Sub, a, b, &c), op1(OpKind::Add, a, neg_b, &c));
        }
    }
}

#[test]
fn nar_absorbs_everything_exhaustive_8bit() {
    let c = cfg(8, 2);
    let nar = c.nar_pattern();
    for op in [OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div] {
        for x in 0..=0xFFu64 {
            assert_eq!(op1(op, nar, x, &c), nar);
            assert_eq!(op1(op, x, nar, &c), nar);
        }
    }
}

#[test]
fn division_by_zero_is_nar_exhaustive_8bit() {
    let c = cfg(8, 2);
    for x in 0..=0xFFu64 {
        assert_eq!(op1(OpKind::Div, x, 0, &c), c.nar_pattern());
    }
}

#[test]
fn mul_sign_rule_exhaustive_8bit() {
    let c = cfg(8, 2);
    for a in 1..=0xFFu64 {
        for b in 1..=0xFFu64 {
            let aw = PositWord::from_bits(a, &c);
            let bw = PositWord::from_bits(b, &c);
            if a == c.nar_pattern() || b == c.nar_pattern() {
                continue;
            }
            let p = op1(OpKind::Mul, a, b, &c);
            if p == 0 || p == c.nar_pattern() {
                continue;
            }
            let expect_neg = (aw.as_signed(&c) < 0) != (bw.as_signed(&c) < 0);
            assert_eq!(PositWord::from_bits(p, &c).as_signed(&c) < 0, expect_neg);
        }
    }
}

proptest! {
    #[test]
    fn codec_roundtrips_16bit(bits in 0u64..=0xFFFF) {
        let c = cfg(16, 2);
        let w = PositWord::from_bits(bits, &c);
        prop_assert_eq!(encode(decode(w, &c), &c), w);
    }

    #[test]
    fn codec_roundtrips_32bit(bits in 0u64..=0xFFFF_FFFF) {
        let c = cfg(32, 2);
        let w = PositWord::from_bits(bits, &c);
        prop_assert_eq!(encode(decode(w, &c), &c), w);
    }

    #[test]
    fn add_monotone_in_first_operand_16bit(a in 0u64..=0xFFFF, b in 0u64..=0xFFFF, x in 0u64..=0xFFFF) {
        let c = cfg(16, 2);
        let nar = c.nar_pattern();
        prop_assume!(a != nar && b != nar && x != nar);
        let (lo, hi) = if PositWord::from_bits(a, &c).as_signed(&c)
            <= PositWord::from_bits(b, &c).as_signed(&c)
        {
            (a, b)
        } else {
            (b, a)
        };
        let s_lo = op1(OpKind::Add, lo, x, &c);
        let s_hi = op1(OpKind::Add, hi, x, &c);
        prop_assert!(
            PositWord::from_bits(s_lo, &c).as_signed(&c)
                <= PositWord::from_bits(s_hi, &c).as_signed(&c)
        );
    }

    #[test]
    fn dot_matches_singleton_mul_16bit(a in 0u64..=0xFFFF, b in 0u64..=0xFFFF) {
        let c = cfg(16, 2);
        let av = PirVector::from_words(&[PositWord::from_bits(a, &c)], c);
        let bv = PirVector::from_words(&[PositWord::from_bits(b, &c)], c);
        let dot = encode(alu::vdot(&av, &bv).unwrap(), &c).bits();
        prop_assert_eq!(dot, op1(OpKind::Mul, a, b, &c));
    }

    #[test]
    fn isa_instruction_roundtrip(
        op in prop::sample::select(vec![OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div, OpKind::Dot]),
        vd in 0u32..32, vs1 in 0u32..32, vs2 in 0u32..32,
    ) {
        let i = pvu::isa::Instruction::new(op, vd, vs1, vs2).unwrap();
        prop_assert_eq!(pvu::isa::decode_instr(pvu::isa::encode_instr(i)).unwrap(), i);
    }
}
