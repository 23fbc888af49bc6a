//! Differential sweeps: drive the unit under test and the exact reference
//! over the same inputs and tabulate every disagreement.

use crate::exact::{exact_dot, round_to_posit, value_of};
use pvu::alu::{self, OpKind};
use pvu::{PositConfig, PositWord};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;

/// Default seed for reproducible random sweeps.
pub const DEFAULT_SEED: u64 = 0x5EED_0517;

/// How a sweep picks its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Every operand pair in the format (only feasible at small widths).
    Exhaustive,
    /// `count` reproducible pseudo-random trials.
    Random { count: u64, seed: u64 },
}

/// One disagreement between unit and reference, with the inputs to replay it.
#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    /// Operand vectors as hex words.
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub expected: String,
    pub actual: String,
    /// Lattice distance between expected and actual, `None` if exactly one
    /// side is NaR.
    pub ulp_distance: Option<u64>,
}

/// Tally of a differential sweep.
#[derive(Debug, Clone, Serialize)]
pub struct MismatchReport {
    pub n_bits: u32,
    pub es_bits: u32,
    pub op: String,
    pub vector_len: usize,
    pub total: u64,
    pub exact: u64,
    pub within_one_ulp: u64,
    pub worse: u64,
    /// First few disagreements, for reproduction.
    pub samples: Vec<Mismatch>,
}

impl MismatchReport {
    pub fn exact_fraction(&self) -> f64 {
        self.exact as f64 / self.total as f64
    }

    pub fn all_exact(&self) -> bool {
        self.exact == self.total
    }

    pub fn all_within_one_ulp(&self) -> bool {
        self.worse == 0
    }
}

impl fmt::Display for MismatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "op={} posit<{},{}> len={} total={}",
            self.op, self.n_bits, self.es_bits, self.vector_len, self.total
        )?;
        writeln!(
            f,
            "exact={} ({:.4}%) within_1ulp={} worse={}",
            self.exact,
            100.0 * self.exact_fraction(),
            self.within_one_ulp,
            self.worse
        )?;
        for m in &self.samples {
            writeln!(
                f,
                "mismatch a=[{}] b=[{}] expected={} actual={} ulp={}",
                m.a.join(","),
                m.b.join(","),
                m.expected,
                m.actual,
                m.ulp_distance.map_or("NaR".into(), |u| u.to_string()),
            )?;
        }
        Ok(())
    }
}

const MAX_SAMPLES: usize = 32;

fn op_name(op: OpKind) -> &'static str {
    match op {
        OpKind::Add => "add",
        OpKind::Sub => "sub",
        OpKind::Mul => "mul",
        OpKind::Div => "div",
        OpKind::Dot => "dot",
    }
}

/// Lattice distance between two words: the number of representable steps
/// between them, `None` if exactly one is NaR.
pub fn ulp_distance(a: PositWord, b: PositWord, cfg: &PositConfig) -> Option<u64> {
    let nar = cfg.nar_pattern();
    match (a.bits() == nar, b.bits() == nar) {
        (true, true) => Some(0),
        (true, false) | (false, true) => None,
        (false, false) => Some(a.as_signed(cfg).abs_diff(b.as_signed(cfg))),
    }
}

/// Draws one word: half the time a lattice-uniform pattern (which is already
/// log-distributed in value), half the time a pattern confined near ±1 where
/// mantissa interactions are densest.
pub fn random_word(rng: &mut impl Rng, cfg: &PositConfig) -> PositWord {
    let n = cfg.n_bits();
    let raw: u64 = rng.gen::<u64>() & cfg.word_mask();
    if rng.gen::<bool>() {
        return PositWord::from_bits(raw, cfg);
    }
    // Central pattern: body starting 01 (regime 0 or -1 region), random sign.
    let central = (0b01u64 << (n - 2)) | (raw >> 2);
    let w = PositWord::from_bits(central, cfg);
    if rng.gen::<bool>() {
        w.negate(cfg)
    } else {
        w
    }
}

fn compare_once(
    op: OpKind,
    a: &[PositWord],
    b: &[PositWord],
    cfg: &PositConfig,
    report: &mut MismatchReport,
) {
    let actual = alu::execute_words(op, a, b, cfg).expect("matched lengths")[0];
    let expected = if op == OpKind::Dot {
        let av: Vec<_> = a.iter().map(|w| value_of(*w, cfg)).collect();
        let bv: Vec<_> = b.iter().map(|w| value_of(*w, cfg)).collect();
        round_to_posit(&exact_dot(&av, &bv), cfg)
    } else {
        let x = value_of(a[0], cfg);
        let y = value_of(b[0], cfg);
        round_to_posit(&crate::exact::exact_scalar(op, &x, &y), cfg)
    };
    report.total += 1;
    if actual == expected {
        report.exact += 1;
        return;
    }
    let ulp = ulp_distance(actual, expected, cfg);
    match ulp {
        Some(1) => report.within_one_ulp += 1,
        _ => report.worse += 1,
    }
    if report.samples.len() < MAX_SAMPLES {
        let hex = |ws: &[PositWord]| ws.iter().map(|w| format!("{:#x}", w.bits())).collect();
        report.samples.push(Mismatch {
            a: hex(a),
            b: hex(b),
            expected: format!("{:#x}", expected.bits()),
            actual: format!("{:#x}", actual.bits()),
            ulp_distance: ulp,
        });
    }
}

/// Runs a differential sweep of `op` at vector length `len` (must be 1 for
/// the elementwise exhaustive form) and tallies agreements with the exact
/// reference.
pub fn differential_sweep(
    op: OpKind,
    cfg: &PositConfig,
    len: usize,
    mode: SweepMode,
) -> MismatchReport {
    assert!(len >= 1);
    let mut report = MismatchReport {
        n_bits: cfg.n_bits(),
        es_bits: cfg.es_bits(),
        op: op_name(op).to_string(),
        vector_len: len,
        total: 0,
        exact: 0,
        within_one_ulp: 0,
        worse: 0,
        samples: Vec::new(),
    };
    match mode {
        SweepMode::Exhaustive => {
            assert!(len == 1, "exhaustive sweeps are pairwise");
            assert!(cfg.n_bits() <= 16, "exhaustive sweep infeasible at this width");
            let limit = 1u64 << cfg.n_bits();
            for a in 0..limit {
                for b in 0..limit {
                    let aw = [PositWord::from_bits(a, cfg)];
                    let bw = [PositWord::from_bits(b, cfg)];
                    compare_once(op, &aw, &bw, cfg, &mut report);
                }
            }
        }
        SweepMode::Random { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let a: Vec<_> = (0..len).map(|_| random_word(&mut rng, cfg)).collect();
                let b: Vec<_> = (0..len).map(|_| random_word(&mut rng, cfg)).collect();
                compare_once(op, &a, &b, cfg, &mut report);
            }
        }
    }
    report
}
