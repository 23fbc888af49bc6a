//! Encoder/decoder for the custom posit vector instructions and a small
//! instruction-set simulator with a 32-entry vector register file.
//!
//! The instructions live in the vector opcode space (`0x57`) under a
//! dedicated funct6 (`0b001101`), vector-vector form with masking disabled:
//!
//! ```text
//!  31      26  25  24  20  19  15  14  12  11   7  6      0
//! [ funct6  ][ vm][ vs2 ][ vs1 ][funct3][  vd  ][ opcode ]
//! ```
//!
//! funct3 selects the operation; the dot product writes its scalar into
//! element 0 of `vd` and zeroes the remaining elements.

use crate::alu::{self, OpKind};
use crate::{PositConfig, PositWord};
use thiserror::Error;

pub const VECTOR_OPCODE: u32 = 0x57;
pub const POSIT_FUNCT6: u32 = 0b001101;

/// funct3 values of the five operations.
pub const FUNCT3_ADD: u32 = 0b000;
pub const FUNCT3_SUB: u32 = 0b001;
pub const FUNCT3_MUL: u32 = 0b010;
pub const FUNCT3_DIV: u32 = 0b011;
pub const FUNCT3_DOT: u32 = 0b100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum IsaError {
    #[error("register index {0} out of range (0..32)")]
    RegisterOutOfRange(u32),
    #[error("word {word:#010x} is not a posit vector instruction")]
    NotPositInstruction { word: u32 },
}

/// One decoded instruction: an operation over `vs1`/`vs2` into `vd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instruction {
    pub op: OpKind,
    pub vd: u32,
    pub vs1: u32,
    pub vs2: u32,
}

impl Instruction {
    pub fn new(op: OpKind, vd: u32, vs1: u32, vs2: u32) -> Result<Self, IsaError> {
        for r in [vd, vs1, vs2] {
            if r >= 32 {
                return Err(IsaError::RegisterOutOfRange(r));
            }
        }
        Ok(Instruction { op, vd, vs1, vs2 })
    }
}

fn funct3_of(op: OpKind) -> u32 {
    match op {
        OpKind::Add => FUNCT3_ADD,
        OpKind::Sub => FUNCT3_SUB,
        OpKind::Mul => FUNCT3_MUL,
        OpKind::Div => FUNCT3_DIV,
        OpKind::Dot => FUNCT3_DOT,
    }
}

fn op_of(funct3: u32) -> Option<OpKind> {
    match funct3 {
        FUNCT3_ADD => Some(OpKind::Add),
        FUNCT3_SUB => Some(OpKind::Sub),
        FUNCT3_MUL => Some(OpKind::Mul),
        FUNCT3_DIV => Some(OpKind::Div),
        FUNCT3_DOT => Some(OpKind::Dot),
        _ => None,
    }
}

/// Packs an instruction into its 32-bit encoding.
pub fn encode_instr(instr: Instruction) -> u32 {
    (POSIT_FUNCT6 << 26)
        | (1 << 25) // vm = 1: unmasked
        | (instr.vs2 << 20)
        | (instr.vs1 << 15)
        | (funct3_of(instr.op) << 12)
        | (instr.vd << 7)
        | VECTOR_OPCODE
}

/// Unpacks a 32-bit word, rejecting anything outside the posit vector space.
pub fn decode_instr(word: u32) -> Result<Instruction, IsaError> {
    let opcode = word & 0x7F;
    let funct6 = word >> 26;
    let vm = word >> 25 & 1;
    let funct3 = word >> 12 & 0b111;
    let op = op_of(funct3);
    if opcode != VECTOR_OPCODE || funct6 != POSIT_FUNCT6 || vm != 1 || op.is_none() {
        return Err(IsaError::NotPositInstruction { word });
    }
    Ok(Instruction {
        op: op.unwrap(),
        vd: word >> 7 & 0x1F,
        vs1: word >> 15 & 0x1F,
        vs2: word >> 20 & 0x1F,
    })
}

/// Errors from running a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("at word {index}: {source}")]
    BadInstruction { index: usize, source: IsaError },
}

/// The architectural state: 32 vector registers of `vl` posit words each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorRegFile {
    cfg: PositConfig,
    vl: usize,
    regs: Vec<Vec<PositWord>>,
}

/// Default vector length.
pub const DEFAULT_VL: usize = 4;

impl VectorRegFile {
    /// All registers zeroed.
    pub fn new(cfg: PositConfig, vl: usize) -> Self {
        assert!(vl >= 1);
        VectorRegFile { cfg, vl, regs: vec![vec![PositWord::default(); vl]; 32] }
    }

    pub fn cfg(&self) -> &PositConfig {
        &self.cfg
    }

    pub fn vl(&self) -> usize {
        self.vl
    }

    pub fn read(&self, r: u32) -> &[PositWord] {
        &self.regs[r as usize]
    }

    /// Overwrites register `r`; the value is truncated or zero-padded to `vl`.
    pub fn write(&mut self, r: u32, words: &[PositWord]) {
        let reg = &mut self.regs[r as usize];
        for (i, slot) in reg.iter_mut().enumerate() {
            *slot = words.get(i).copied().unwrap_or_default();
        }
    }
}

/// Executes one instruction against the register file.
pub fn step(rf: &mut VectorRegFile, instr: Instruction) {
    let cfg = rf.cfg;
    let a = rf.read(instr.vs1).to_vec();
    let b = rf.read(instr.vs2).to_vec();
    let out = alu::execute_words(instr.op, &a, &b, &cfg)
        .expect("register operands always share vl");
    // Elementwise ops fill vd; the dot product's scalar lands in element 0
    // with the rest zeroed (`write` pads).
    rf.write(instr.vd, &out);
}

/// Runs a program of raw 32-bit words, reporting the index of any word that
/// does not decode.
pub fn run(rf: &mut VectorRegFile, program: &[u32]) -> Result<(), ExecError> {
    for (index, &word) in program.iter().enumerate() {
        let instr =
            decode_instr(word).map_err(|source| ExecError::BadInstruction { index, source })?;
        step(rf, instr);
    }
    Ok(())
}
