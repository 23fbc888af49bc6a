//! `pvu` — command-line front end for the posit vector unit model.
//!
//! Subcommands: `op` (single operation or test-vector batch), `sweep`
//! (differential sweep against the exact oracle), `run` (execute a binary
//! instruction program against a register file) and `decode` (field echo of
//! one word). All posit words are hexadecimal everywhere.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pvu::alu::OpKind;
use pvu::codec::{self, to_real};
use pvu::isa::{self, VectorRegFile, DEFAULT_VL};
use pvu::{PositConfig, PositWord};
use pvu_oracle::{differential_sweep, SweepMode, DEFAULT_SEED};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "pvu", about = "Bit-accurate posit vector unit model", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply one operation to operand vectors, or batch-run a test-vector file.
    Op(OpArgs),
    /// Differential sweep of an operation against the exact-rational oracle.
    Sweep(SweepArgs),
    /// Run a binary instruction program against a register file and dump it.
    Run(RunArgs),
    /// Echo the decoded fields and exact value of one word.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct FormatArgs {
    /// Total posit width in bits.
    #[arg(long, default_value_t = 16)]
    nbits: u32,
    /// Exponent field width in bits.
    #[arg(long, default_value_t = 2)]
    es: u32,
    /// Maximum mantissa alignment shift (defaults to nbits).
    #[arg(long)]
    align: Option<u32>,
}

impl FormatArgs {
    fn cfg(&self) -> Result<PositConfig> {
        let align = self.align.unwrap_or(self.nbits);
        PositConfig::new(self.nbits, self.es, align).map_err(Into::into)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpName {
    Add,
    Sub,
    Mul,
    Div,
    Dot,
}

impl From<OpName> for OpKind {
    fn from(o: OpName) -> OpKind {
        match o {
            OpName::Add => OpKind::Add,
            OpName::Sub => OpKind::Sub,
            OpName::Mul => OpKind::Mul,
            OpName::Div => OpKind::Div,
            OpName::Dot => OpKind::Dot,
        }
    }
}

fn op_from_name(s: &str) -> Result<OpKind> {
    OpName::from_str(s, true).map(Into::into).map_err(|_| anyhow!("unknown op {s:?}"))
}

#[derive(Args)]
struct OpArgs {
    #[command(flatten)]
    fmt: FormatArgs,
    /// Operation to apply (required unless --in is given).
    #[arg(long, value_enum)]
    op: Option<OpName>,
    /// Comma-separated hex words of operand A.
    #[arg(long, value_delimiter = ',')]
    a: Vec<String>,
    /// Comma-separated hex words of operand B.
    #[arg(long, value_delimiter = ',')]
    b: Vec<String>,
    /// Test-vector file to batch-run instead of --op/--a/--b.
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["op", "a", "b"])]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    fmt: FormatArgs,
    #[arg(long, value_enum)]
    op: OpName,
    /// `exhaustive` or `random:N`.
    #[arg(long, default_value = "random:10000")]
    mode: String,
    /// RNG seed for random mode.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Vector length per trial (dot products only make sense above 1).
    #[arg(long, default_value_t = 1)]
    len: usize,
    /// Write the full machine-readable report (JSON) here.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    fmt: FormatArgs,
    /// Program file: little-endian 32-bit instruction words.
    #[arg(long, value_name = "FILE")]
    program: PathBuf,
    /// Register file: lines of `v<N> <hex> <hex> ...`.
    #[arg(long, value_name = "FILE")]
    regs: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    fmt: FormatArgs,
    /// Hex word to decode.
    word: String,
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Op(a) => cmd_op(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Run(a) => cmd_run(a),
        Cmd::Decode(a) => cmd_decode(a),
    }
}

fn hex_width(cfg: &PositConfig) -> usize {
    cfg.n_bits().div_ceil(4) as usize
}

fn parse_word(s: &str, cfg: &PositConfig) -> Result<PositWord> {
    let t = s.trim();
    if t.is_empty() || t.len() > hex_width(cfg) {
        bail!("word {t:?} does not fit {} hex digits", hex_width(cfg));
    }
    let bits = u64::from_str_radix(t, 16).with_context(|| format!("bad hex word {t:?}"))?;
    Ok(PositWord::from_bits(bits, cfg))
}

fn show_value(w: PositWord, cfg: &PositConfig) -> String {
    match to_real(w, cfg) {
        Ok(v) => v.to_string(),
        Err(_) => "NaR".to_string(),
    }
}

fn print_results(words: &[PositWord], cfg: &PositConfig) {
    let hw = hex_width(cfg);
    for (i, w) in words.iter().enumerate() {
        println!("{i}: {:0hw$x}  value={}", w.bits(), show_value(*w, cfg));
    }
}

fn cmd_op(args: OpArgs) -> Result<()> {
    if let Some(path) = &args.input {
        return run_vector_file(path);
    }
    let cfg = args.fmt.cfg()?;
    let op: OpKind = args.op.ok_or_else(|| anyhow!("--op is required without --in"))?.into();
    if args.a.is_empty() || args.a.len() != args.b.len() {
        bail!("--a and --b need equal non-zero lengths, got {} and {}", args.a.len(), args.b.len());
    }
    let a = parse_words(&args.a, &cfg)?;
    let b = parse_words(&args.b, &cfg)?;
    let out = pvu::alu::execute_words(op, &a, &b, &cfg)?;
    print_results(&out, &cfg);
    Ok(())
}

fn parse_words(list: &[String], cfg: &PositConfig) -> Result<Vec<PositWord>> {
    list.iter().map(|s| parse_word(s, cfg)).collect()
}

/// Test-vector file: a header line
/// `posit <nbits> <es> <align> <op> <count>` followed by `count` rows of
/// `A B [expected]` hex words. `#` starts a comment.
fn run_vector_file(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| anyhow!("empty test-vector file"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    let parse_field = |i: usize, what: &str| -> Result<u32> {
        tok.get(i)
            .ok_or_else(|| anyhow!("line {hline}: header missing {what}"))?
            .parse()
            .with_context(|| format!("line {hline}: bad {what}"))
    };
    if tok.first() != Some(&"posit") {
        bail!("line {hline}: header must start with 'posit'");
    }
    let cfg = PositConfig::new(parse_field(1, "nbits")?, parse_field(2, "es")?, parse_field(3, "align")?)?;
    let op = op_from_name(tok.get(4).ok_or_else(|| anyhow!("line {hline}: header missing op"))?)?;
    let count = parse_field(5, "count")? as usize;

    let mut rows = Vec::with_capacity(count);
    for (lno, line) in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 2 && words.len() != 3 {
            bail!("line {lno}: expected 'A B [expected]'");
        }
        let a = parse_word(words[0], &cfg).with_context(|| format!("line {lno}"))?;
        let b = parse_word(words[1], &cfg).with_context(|| format!("line {lno}"))?;
        let expect = words
            .get(2)
            .map(|w| parse_word(w, &cfg).with_context(|| format!("line {lno}")))
            .transpose()?;
        rows.push((a, b, expect));
    }
    if rows.len() != count {
        bail!("header declares {count} rows, file has {}", rows.len());
    }

    let hw = hex_width(&cfg);
    let mut mismatches = 0u64;
    if op == OpKind::Dot {
        let a: Vec<_> = rows.iter().map(|r| r.0).collect();
        let b: Vec<_> = rows.iter().map(|r| r.1).collect();
        let out = pvu::alu::execute_words(op, &a, &b, &cfg)?[0];
        println!("dot: {:0hw$x}  value={}", out.bits(), show_value(out, &cfg));
    } else {
        for (i, (a, b, expect)) in rows.iter().enumerate() {
            let out = pvu::alu::execute_words(op, &[*a], &[*b], &cfg)?[0];
            let mut line = format!("{i}: {:0hw$x}  value={}", out.bits(), show_value(out, &cfg));
            if let Some(e) = expect {
                if e != &out {
                    mismatches += 1;
                    write!(line, "  MISMATCH expected {:0hw$x}", e.bits()).unwrap();
                }
            }
            println!("{line}");
        }
    }
    if mismatches > 0 {
        bail!("{mismatches} rows mismatched their expected results");
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = args.fmt.cfg()?;
    let mode = match args.mode.as_str() {
        "exhaustive" => SweepMode::Exhaustive,
        m => match m.strip_prefix("random:").and_then(|n| n.parse().ok()) {
            Some(count) => SweepMode::Random { count, seed: args.seed },
            None => bail!("--mode must be 'exhaustive' or 'random:N', got {m:?}"),
        },
    };
    let report = differential_sweep(args.op.into(), &cfg, args.len, mode);
    print!("{report}");
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Register file format: lines of `v<N> <hex> ...` (or `v<N>: <hex> ...`),
/// one per register; unlisted registers are zero. All listed registers must
/// agree on the vector length.
fn parse_regfile(path: &Path, cfg: &PositConfig) -> Result<VectorRegFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut entries: Vec<(usize, u32, Vec<PositWord>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let name = parts.next().unwrap().trim_end_matches(':');
        let idx: u32 = name
            .strip_prefix('v')
            .and_then(|r| r.parse().ok())
            .filter(|r| *r < 32)
            .ok_or_else(|| anyhow!("line {lno}: expected register name v0..v31, got {name:?}"))?;
        let words: Vec<PositWord> = parts
            .map(|w| parse_word(w, cfg).with_context(|| format!("line {lno}")))
            .collect::<Result<_>>()?;
        if words.is_empty() {
            bail!("line {lno}: register v{idx} has no words");
        }
        entries.push((lno, idx, words));
    }
    let vl = entries.first().map_or(DEFAULT_VL, |(_, _, w)| w.len());
    let mut rf = VectorRegFile::new(*cfg, vl);
    for (lno, idx, words) in entries {
        if words.len() != vl {
            bail!("line {lno}: register v{idx} has {} words, expected {vl}", words.len());
        }
        rf.write(idx, &words);
    }
    Ok(rf)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = args.fmt.cfg()?;
    let bytes = std::fs::read(&args.program)
        .with_context(|| format!("reading {}", args.program.display()))?;
    if bytes.len() % 4 != 0 {
        bail!("program length {} is not a multiple of 4 bytes", bytes.len());
    }
    let program: Vec<u32> = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut rf = parse_regfile(&args.regs, &cfg)?;
    isa::run(&mut rf, &program)?;
    let hw = hex_width(&cfg);
    for r in 0..32 {
        let words: Vec<String> =
            rf.read(r).iter().map(|w| format!("{:0hw$x}", w.bits())).collect();
        println!("v{r}: {}", words.join(" "));
    }
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<()> {
    let cfg = args.fmt.cfg()?;
    let w = parse_word(&args.word, &cfg)?;
    let p = codec::decode(w, &cfg);
    match p.class {
        codec::SpecialClass::Zero => println!("zero"),
        codec::SpecialClass::NaR => println!("NaR"),
        codec::SpecialClass::Normal => {
            let es = cfg.es_bits();
            let regime = p.exp >> es;
            let e = p.exp - (regime << es);
            let m = cfg.frac_bits();
            let frac_num = p.frc - (1 << m);
            // Reduced fraction field value in [0, 1).
            let mut num = frac_num;
            let mut den = 1u128 << m;
            while num != 0 && num % 2 == 0 && den % 2 == 0 {
                num /= 2;
                den /= 2;
            }
            println!(
                "sign={} regime={regime} exponent={e} fraction={num}/{den} value={}",
                p.sign as u32,
                show_value(w, &cfg)
            );
        }
    }
    Ok(())
}
