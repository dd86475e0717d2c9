//! The `frakpascal` command line: truncated operators, transforms, norms,
//! verification suites and dual-condition reports.
//!
//! Exit codes: `0` success, `1` a verification check failed, `2` bad
//! arguments, order or input, `3` a horizon beyond the exact range in exact
//! mode, `4` non-finite values.
//!
//! Numbers are written as shortest round-trip decimals with `-0` folded to
//! `0`, identically in CSV and JSON.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::coeffs::{FracOrder, EXACT_PASCAL_MAX_N};
use crate::duals::{dual_membership_report_with, SetReport};
use crate::exact::{self, ExactTransform, ExactVector};
use crate::operator::{self, DenseTriangle, TriangularOperator};
use crate::spaces::{self, p_norm, PExponent};
use crate::transform::{FiniteSequence, PhatTransform};

pub const MAX_N_VAR: &str = "FRAKPASCAL_MAX_N";
pub const DEFAULT_MAX_N: usize = 4096;

/// Largest horizon whose Pascal rows all fit the exact integer range.
pub const EXACT_MAX_HORIZON: usize = EXACT_PASCAL_MAX_N + 1;

const DEFAULT_TAU: &str = "0.5";
const DEFAULT_P: &str = "2";
const RANDOM_TRIALS: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "frakpascal", version, about = "Fractional-order Pascal difference operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Order τ: a decimal such as 0.5 or a ratio such as 1/3 [default: 0.5]
    #[arg(long, global = true, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Horizon N
    #[arg(long = "n", global = true, default_value_t = 32)]
    n: usize,
    /// Exponent p ≥ 1, or inf [default: 2]
    #[arg(long, global = true)]
    p: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Sequence file; standard input when absent or `-`
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Precision::Float)]
    precision: Precision,
    /// Seed for the random inputs of the verification suites
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit an N×N truncation, lower triangle only, row-major
    Matrix {
        #[arg(long, value_enum)]
        which: MatrixKind,
    },
    /// Apply P̂ or its inverse to the N-prefix of a sequence
    Transform {
        #[arg(long, value_enum, default_value_t = Direction::Forward)]
        direction: Direction,
    },
    /// ‖P̂x‖_p over the horizon
    Norm,
    /// The basis vector b^(k), i.e. column k of the inverse
    Basis {
        #[arg(long)]
        k: usize,
    },
    /// Run a verification suite; exits 1 if any check fails
    Verify {
        #[arg(value_enum)]
        suite: Option<Suite>,
        #[arg(long = "suite", value_enum)]
        suite_flag: Option<Suite>,
        /// Also compare the printed entries of P̂ against the defining sum
        #[arg(long)]
        report_star: bool,
    },
    /// Dual-condition statistics for the multiplier sequence a
    Dual {
        #[arg(long, value_enum)]
        which: DualKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    Float,
    #[value(name = "exact-where-possible", alias = "exact")]
    ExactWherePossible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Phat,
    PhatInv,
    Pascal,
    PascalInv,
    Delta,
    DeltaInv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identity,
    Roundtrip,
    Parallelogram,
    Schauder,
    Inclusion,
    Absoluteness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualKind {
    Alpha,
    Beta,
    Gamma,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid tau {0:?}: {1}")]
    InvalidTau(String, String),
    #[error("{0}")]
    Config(String),
    #[error("cannot parse input: {0}")]
    Parse(String),
    #[error("N = {0} is beyond the exact range (N ≤ {max})", max = EXACT_MAX_HORIZON)]
    ExactRange(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidTau(..) | CliError::Config(_) | CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::ExactRange(_) => 3,
            CliError::NonFinite(_) => 4,
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("frakpascal: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let input = match cli.command {
        Command::Transform { .. } | Command::Norm | Command::Dual { .. } => {
            Some(read_sequence(cli.common.input.as_deref())?)
        }
        _ => None,
    };
    let config = RunConfig::resolve(&cli.common, input.as_ref().map(|f| &f.meta))?;
    let (text, code) = match &cli.command {
        Command::Matrix { which } => (cmd_matrix(&config, *which)?, 0),
        Command::Transform { direction } => (cmd_transform(&config, input.as_ref().expect("read above"), *direction)?, 0),
        Command::Norm => (cmd_norm(&config, input.as_ref().expect("read above"))?, 0),
        Command::Basis { k } => (cmd_basis(&config, *k)?, 0),
        Command::Verify {
            suite,
            suite_flag,
            report_star,
        } => {
            let suite = match (suite, suite_flag) {
                (Some(a), Some(b)) if a != b => {
                    return Err(CliError::Config("two different suites given".into()));
                }
                (Some(s), _) | (None, Some(s)) => *s,
                (None, None) => return Err(CliError::Config("no suite given".into())),
            };
            let outcome = cmd_verify(&config, suite, *report_star)?;
            (outcome.text, if outcome.passed { 0 } else { 1 })
        }
        Command::Dual { which } => (cmd_dual(&config, input.as_ref().expect("read above"), *which)?, 0),
    };
    match &cli.common.output {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(code)
}

/// An order as typed, its exact rational value and the nearest float.
#[derive(Debug, Clone)]
pub struct Order {
    text: String,
    exact: BigRational,
    tau: FracOrder,
}

impl Order {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        let invalid = |why: &str| CliError::InvalidTau(text.to_string(), why.to_string());
        let exact = parse_rational(text).ok_or_else(|| invalid("expected a decimal or a ratio a/b"))?;
        let tau = if exact.is_zero() {
            FracOrder::integer(0)
        } else {
            let v = exact.to_f64().unwrap_or(f64::NAN);
            if v == 0.0 {
                return Err(invalid("underflows to zero"));
            }
            FracOrder::new(v).map_err(|e| invalid(&e.to_string()))?
        };
        Ok(Order {
            text: text.to_string(),
            exact,
            tau,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn tau(&self) -> FracOrder {
        self.tau
    }

    /// `Some(m)` for a nonnegative integer order.
    pub fn integer(&self) -> Option<u32> {
        if self.exact.is_integer() && !self.exact.is_negative() {
            self.exact.to_integer().to_u32()
        } else {
            None
        }
    }
}

/// Parses `"0.5"`, `"-1.25e-3"`, `"1/3"` or `"0.5/3"` exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    match text.trim().split_once('/') {
        Some((num, den)) => {
            let den = parse_decimal(den)?;
            if den.is_zero() {
                return None;
            }
            Some(parse_decimal(num)? / den)
        }
        None => parse_decimal(text),
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (negative, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().ok()?),
        None => (t, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let shift = exponent.checked_sub(frac.len() as i64)?;
    if shift.unsigned_abs() > 1000 {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let power = BigRational::from_integer(num_traits::pow(BigInt::from(10), shift.unsigned_abs() as usize));
    let mut r = BigRational::from_integer(digits);
    if shift >= 0 {
        r *= power;
    } else {
        r /= power;
    }
    Some(if negative { -r } else { r })
}

/// Everything a command needs besides its own flags and input.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub order: Order,
    pub horizon: usize,
    pub p: PExponent,
    pub precision: Precision,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    /// Defaults: τ = 0.5, N = 32, p = 2, float precision, CSV.
    pub fn new(tau: &str, horizon: usize) -> Result<Self, CliError> {
        let config = RunConfig {
            order: Order::parse(tau)?,
            horizon,
            p: parse_exponent(DEFAULT_P)?,
            precision: Precision::Float,
            format: Format::Csv,
            seed: 1,
        };
        config.validate()?;
        Ok(config)
    }

    fn resolve(args: &CommonArgs, meta: Option<&SequenceMeta>) -> Result<Self, CliError> {
        let from_meta = |f: fn(&SequenceMeta) -> Option<&Scalar>| meta.and_then(f).map(Scalar::text);
        let tau = args
            .tau
            .clone()
            .or_else(|| from_meta(|m| m.tau.as_ref()))
            .unwrap_or_else(|| DEFAULT_TAU.to_string());
        let p = args
            .p
            .clone()
            .or_else(|| from_meta(|m| m.p.as_ref()))
            .unwrap_or_else(|| DEFAULT_P.to_string());
        let config = RunConfig {
            order: Order::parse(&tau)?,
            horizon: args.n,
            p: parse_exponent(&p)?,
            precision: args.precision,
            format: args.format,
            seed: args.seed,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let cap = max_horizon()?;
        if self.horizon == 0 || self.horizon > cap {
            return Err(CliError::Config(format!("N must lie in 1..={cap}, got {}", self.horizon)));
        }
        if self.precision == Precision::ExactWherePossible && self.horizon > EXACT_MAX_HORIZON {
            return Err(CliError::ExactRange(self.horizon));
        }
        Ok(())
    }

    fn exact(&self) -> bool {
        self.precision == Precision::ExactWherePossible
    }

    fn exact_transform(&self) -> ExactTransform {
        ExactTransform::new(self.order.exact(), self.horizon)
    }
}

fn max_horizon() -> Result<usize, CliError> {
    match std::env::var(MAX_N_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{MAX_N_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn parse_exponent(text: &str) -> Result<PExponent, CliError> {
    text.parse()
        .map_err(|_| CliError::Config(format!("p must be a number ≥ 1 or inf, got {text:?}")))
}

/// A sequence document: `{"values": [...], "meta": {...}}` or bare
/// whitespace-separated decimals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub values: Vec<f64>,
    #[serde(default)]
    pub meta: SequenceMeta,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Number(v) => fmt_num(*v),
            Scalar::Text(s) => s.clone(),
        }
    }
}

pub fn parse_sequence(text: &str) -> Result<SequenceFile, CliError> {
    let file = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?
    } else {
        let values = text
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|_| CliError::Parse(format!("not a number: {tok:?}"))))
            .collect::<Result<_, _>>()?;
        SequenceFile {
            values,
            meta: SequenceMeta::default(),
        }
    };
    if file.values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::NonFinite("input"));
    }
    Ok(file)
}

fn read_sequence(path: Option<&Path>) -> Result<SequenceFile, CliError> {
    let text = match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    parse_sequence(&text)
}

/// Shortest round-trip decimal, `-0` written as `0`, exponent form outside
/// `[1e-5, 1e16)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// A float serialized with [`fmt_num`].
#[derive(Debug, Clone, Copy, PartialEq)]
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        raw(fmt_num(self.0)).serialize(s)
    }
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("numeric literal is valid JSON")
}

fn nums(values: &[f64]) -> Vec<Num> {
    values.iter().map(|&v| Num(v)).collect()
}

/// `p` as a number, or the string `"inf"`.
struct PText(PExponent);

impl Serialize for PText {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            Num(self.0.p()).serialize(s)
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report serializes");
    s.push('\n');
    s
}

fn ensure_finite(values: &[f64]) -> Result<(), CliError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::NonFinite("output"))
    }
}

enum Cell {
    Float(f64),
    Int(BigInt),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
        }
    }
}

fn float_rows(t: &DenseTriangle) -> Vec<Vec<Cell>> {
    t.rows().map(|r| r.iter().map(|&v| Cell::Float(v)).collect()).collect()
}

fn int_rows(t: &exact::ExactTriangle) -> Vec<Vec<Cell>> {
    (0..t.size())
        .map(|n| t.row(n).iter().map(|v| Cell::Int(v.clone())).collect())
        .collect()
}

pub fn cmd_matrix(config: &RunConfig, which: MatrixKind) -> Result<String, CliError> {
    let n = config.horizon;
    let tau = config.order.tau();
    let rows = if config.exact() {
        match (which, config.order.integer()) {
            (MatrixKind::Pascal, _) => int_rows(&exact::pascal(n)),
            (MatrixKind::PascalInv, _) => int_rows(&exact::pascal_inverse(n)),
            (MatrixKind::Phat, Some(m)) => int_rows(&exact::phat(m, n)),
            (MatrixKind::PhatInv, Some(m)) => int_rows(&exact::phat_inverse(m, n)),
            (MatrixKind::Delta, Some(m)) => int_rows(&exact::difference(i64::from(m), n)),
            (MatrixKind::DeltaInv, Some(m)) => int_rows(&exact::difference(-i64::from(m), n)),
            (kind, None) => {
                let t = config.exact_transform();
                float_rows(&match kind {
                    MatrixKind::Phat => t.forward_triangle(),
                    MatrixKind::PhatInv => t.inverse_triangle(),
                    MatrixKind::Delta => t.difference_triangle(false),
                    _ => t.difference_triangle(true),
                })
            }
        }
    } else {
        let op = match which {
            MatrixKind::Phat => TriangularOperator::phat(tau),
            MatrixKind::PhatInv => TriangularOperator::phat_inverse(tau),
            MatrixKind::Pascal => TriangularOperator::pascal(),
            MatrixKind::PascalInv => TriangularOperator::pascal_inverse(),
            MatrixKind::Delta => TriangularOperator::delta(tau),
            MatrixKind::DeltaInv => TriangularOperator::delta_inverse(tau),
        };
        float_rows(&op.truncate(n))
    };
    if rows.iter().flatten().any(|c| matches!(c, Cell::Float(v) if !v.is_finite())) {
        return Err(CliError::NonFinite("output"));
    }
    let text_rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
    Ok(match config.format {
        Format::Csv => text_rows.iter().map(|r| r.join(",") + "\n").collect(),
        Format::Json => {
            #[derive(Serialize)]
            struct MatrixOut<'a> {
                which: MatrixKind,
                tau: &'a str,
                horizon: usize,
                precision: Precision,
                rows: Vec<Vec<Box<RawValue>>>,
            }
            json_line(&MatrixOut {
                which,
                tau: config.order.text(),
                horizon: n,
                precision: config.precision,
                rows: text_rows.into_iter().map(|r| r.into_iter().map(raw).collect()).collect(),
            })
        }
    })
}

fn prefix(values: &[f64], len: usize) -> Vec<f64> {
    let mut out: Vec<f64> = values.iter().copied().take(len).collect();
    out.resize(len, 0.0);
    out
}

#[derive(Serialize)]
struct SequenceMetaOut<'a> {
    tau: &'a str,
    horizon: usize,
    precision: Precision,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<Direction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
}

fn render_sequence(config: &RunConfig, values: &[f64], meta: SequenceMetaOut<'_>) -> Result<String, CliError> {
    ensure_finite(values)?;
    Ok(match config.format {
        Format::Csv => {
            let mut s = String::from("index,value\n");
            for (i, v) in values.iter().enumerate() {
                s += &format!("{i},{}\n", fmt_num(*v));
            }
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct SequenceOut<'a> {
                values: Vec<Num>,
                meta: SequenceMetaOut<'a>,
            }
            json_line(&SequenceOut {
                values: nums(values),
                meta,
            })
        }
    })
}

pub fn cmd_transform(config: &RunConfig, input: &SequenceFile, direction: Direction) -> Result<String, CliError> {
    let n = config.horizon;
    let x = prefix(&input.values, n);
    let values = if config.exact() {
        let t = config.exact_transform();
        let v = ExactVector::from_f64(&x).ok_or(CliError::NonFinite("input"))?;
        match direction {
            Direction::Forward => t.apply(&v),
            Direction::Inverse => t.inverse_apply(&v),
        }
        .to_f64()
    } else {
        let tau = config.order.tau();
        let op = match direction {
            Direction::Forward => TriangularOperator::phat(tau),
            Direction::Inverse => TriangularOperator::phat_inverse(tau),
        };
        op.truncate(n).mul_vec(&x)
    };
    render_sequence(
        config,
        &values,
        SequenceMetaOut {
            tau: config.order.text(),
            horizon: n,
            precision: config.precision,
            direction: Some(direction),
            k: None,
        },
    )
}

pub fn cmd_basis(config: &RunConfig, k: usize) -> Result<String, CliError> {
    let n = config.horizon;
    if k >= n {
        return Err(CliError::Config(format!("k = {k} must be below N = {n}")));
    }
    let values = if config.exact() {
        config.exact_transform().inverse_apply(&ExactVector::unit(k, n)).to_f64()
    } else {
        PhatTransform::new(config.order.tau(), n)
            .basis_vector(k)
            .map_err(|e| CliError::Config(e.to_string()))?
            .values
    };
    render_sequence(
        config,
        &values,
        SequenceMetaOut {
            tau: config.order.text(),
            horizon: n,
            precision: config.precision,
            direction: None,
            k: Some(k),
        },
    )
}

fn forward_f64(config: &RunConfig, x: &[f64]) -> Vec<f64> {
    if config.exact() {
        config.exact_transform().apply_f64(x).expect("finite input")
    } else {
        TriangularOperator::phat(config.order.tau()).truncate(config.horizon).mul_vec(x)
    }
}

pub fn cmd_norm(config: &RunConfig, input: &SequenceFile) -> Result<String, CliError> {
    let x = prefix(&input.values, config.horizon);
    let value = p_norm(&forward_f64(config, &x), config.p);
    ensure_finite(&[value])?;
    Ok(match config.format {
        Format::Csv => format!("p,horizon,value\n{},{},{}\n", config.p, config.horizon, fmt_num(value)),
        Format::Json => {
            #[derive(Serialize)]
            struct NormOut<'a> {
                tau: &'a str,
                p: PText,
                horizon: usize,
                value: Num,
            }
            json_line(&NormOut {
                tau: config.order.text(),
                p: PText(config.p),
                horizon: config.horizon,
                value: Num(value),
            })
        }
    })
}

pub fn cmd_dual(config: &RunConfig, input: &SequenceFile, which: DualKind) -> Result<String, CliError> {
    let n = config.horizon;
    let a = FiniteSequence::from_values(&prefix(&input.values, n));
    let inverse = if config.exact() {
        config.exact_transform().inverse_triangle()
    } else {
        TriangularOperator::phat_inverse(config.order.tau()).truncate(n)
    };
    let report = dual_membership_report_with(&inverse, config.order.tau(), &a, config.p);
    let sets = match which {
        DualKind::Alpha => report.alpha_sets(),
        DualKind::Beta => report.beta_sets(),
        DualKind::Gamma => report.gamma_sets(),
    };
    for s in &sets {
        ensure_finite(&s.report.values)?;
    }
    Ok(render_dual(config, &sets))
}

fn render_dual(config: &RunConfig, sets: &[SetReport]) -> String {
    match config.format {
        Format::Csv => {
            let mut s = String::from("set,statistic,verdict_hint,informational,n,value\n");
            for set in sets {
                let stat = serde_json::to_value(set.report.statistic).expect("label");
                let hint = serde_json::to_value(set.report.verdict_hint).expect("label");
                for (i, v) in set.report.values.iter().enumerate() {
                    s += &format!(
                        "{},{},{},{},{},{}\n",
                        set.set,
                        stat.as_str().unwrap_or_default(),
                        hint.as_str().unwrap_or_default(),
                        set.informational,
                        i + 1,
                        fmt_num(*v)
                    );
                }
            }
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct SetOut<'a> {
                set: &'a str,
                condition: &'a str,
                informational: bool,
                statistic: crate::duals::Statistic,
                verdict_hint: crate::duals::VerdictHint,
                values: Vec<Num>,
            }
            #[derive(Serialize)]
            struct DualOut<'a> {
                tau: &'a str,
                p: PText,
                q: PText,
                horizon: usize,
                precision: Precision,
                sets: Vec<SetOut<'a>>,
            }
            json_line(&DualOut {
                tau: config.order.text(),
                p: PText(config.p),
                q: PText(config.p.conjugate()),
                horizon: config.horizon,
                precision: config.precision,
                sets: sets
                    .iter()
                    .map(|s| SetOut {
                        set: s.set,
                        condition: s.condition,
                        informational: s.informational,
                        statistic: s.report.statistic,
                        verdict_hint: s.report.verdict_hint,
                        values: nums(&s.report.values),
                    })
                    .collect(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "==")]
    Equal,
    #[serde(rename = "info")]
    Info,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
            Relation::Equal => "==",
            Relation::Info => "info",
        }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub relation: Relation,
    pub bound: Option<f64>,
}

impl Check {
    fn new(name: &'static str, value: f64, relation: Relation, bound: f64) -> Self {
        Check {
            name,
            value,
            relation,
            bound: Some(bound),
        }
    }

    fn info(name: &'static str, value: f64) -> Self {
        Check {
            name,
            value,
            relation: Relation::Info,
            bound: None,
        }
    }

    /// `None` for informational lines. NaN never passes.
    pub fn passed(&self) -> Option<bool> {
        let b = self.bound?;
        let v = self.value;
        Some(match self.relation {
            Relation::AtMost => v <= b,
            Relation::AtLeast => v >= b,
            Relation::Above => v > b,
            Relation::Equal => v == b,
            Relation::Info => return None,
        })
    }

    fn status(&self) -> &'static str {
        match self.passed() {
            None => "info",
            Some(true) => "pass",
            Some(false) => "fail",
        }
    }
}

/// Entry `(n, k)` of `P̂` from the defining sum and from the printed display.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarEntry {
    pub n: usize,
    pub k: usize,
    pub defining_sum: f64,
    pub star_display: f64,
}

/// The three low entries whose printed values disagree with the defining
/// sum `Σ_i binom(n, i)·(−1)^{i−k}·C(τ, i−k)`.
pub fn star_entries(tau: FracOrder) -> [StarEntry; 3] {
    let t = tau.value();
    let entry = |n, k, star_display| StarEntry {
        n,
        k,
        defining_sum: operator::phat_entry(tau, n, k),
        star_display,
    };
    [
        entry(1, 0, 2.0 - t),
        entry(2, 0, 3.0 - 3.0 * t + t * (t - 1.0) / 2.0),
        entry(2, 1, 3.0 - t),
    ]
}

/// `max |A·P̂^{-1} − I|` on the 3×3 block, with `A` the defining-sum `P̂`
/// or, when `star` is set, the same triangle with the printed entries.
pub fn star_block_residual(tau: FracOrder, star: bool) -> f64 {
    let mut a = TriangularOperator::phat(tau).truncate(3);
    if star {
        for e in star_entries(tau) {
            a.set(e.n, e.k, e.star_display);
        }
    }
    let r = a.matmul(&TriangularOperator::phat_inverse(tau).truncate(3));
    let mut worst: f64 = 0.0;
    for n in 0..3 {
        for k in 0..=n {
            let target = if n == k { 1.0 } else { 0.0 };
            worst = worst.max((r.get(n, k) - target).abs());
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub suite: Suite,
    pub arithmetic: &'static str,
    pub checks: Vec<Check>,
    pub star: Option<[StarEntry; 3]>,
    pub passed: bool,
    pub text: String,
}

pub fn cmd_verify(config: &RunConfig, suite: Suite, report_star: bool) -> Result<VerifyOutcome, CliError> {
    let (arithmetic, mut checks) = match suite {
        Suite::Identity => verify_identity(config),
        Suite::Roundtrip => verify_roundtrip(config),
        Suite::Parallelogram => verify_parallelogram(config)?,
        Suite::Schauder => verify_schauder(config),
        Suite::Inclusion => verify_inclusion(config),
        Suite::Absoluteness => verify_absoluteness(config)?,
    };
    let star = report_star.then(|| star_entries(config.order.tau()));
    if report_star {
        let tau = config.order.tau();
        checks.push(Check::new("defining_sum_block_residual", star_block_residual(tau, false), Relation::AtMost, 1e-10));
        checks.push(Check::new("star_display_block_residual", star_block_residual(tau, true), Relation::AtLeast, 0.5));
    }
    let passed = checks.iter().all(|c| c.passed() != Some(false));
    let text = render_verify(config, suite, arithmetic, &checks, star.as_ref(), passed);
    Ok(VerifyOutcome {
        suite,
        arithmetic,
        checks,
        star,
        passed,
        text,
    })
}

fn render_verify(
    config: &RunConfig,
    suite: Suite,
    arithmetic: &str,
    checks: &[Check],
    star: Option<&[StarEntry; 3]>,
    passed: bool,
) -> String {
    match config.format {
        Format::Csv => {
            let mut s = String::from("check,value,relation,bound,status\n");
            for c in checks {
                let bound = c.bound.map(fmt_num).unwrap_or_default();
                s += &format!("{},{},{},{},{}\n", c.name, fmt_num(c.value), c.relation.symbol(), bound, c.status());
            }
            if let Some(entries) = star {
                s += "\nn,k,defining_sum,star_display\n";
                for e in entries {
                    s += &format!("{},{},{},{}\n", e.n, e.k, fmt_num(e.defining_sum), fmt_num(e.star_display));
                }
            }
            s
        }
        Format::Json => {
            #[derive(Serialize)]
            struct CheckOut {
                name: &'static str,
                value: Num,
                relation: Relation,
                bound: Option<Num>,
                status: &'static str,
            }
            #[derive(Serialize)]
            struct StarOut {
                n: usize,
                k: usize,
                defining_sum: Num,
                star_display: Num,
            }
            #[derive(Serialize)]
            struct VerifyOut<'a> {
                suite: Suite,
                tau: &'a str,
                p: PText,
                horizon: usize,
                precision: Precision,
                arithmetic: &'a str,
                checks: Vec<CheckOut>,
                #[serde(skip_serializing_if = "Option::is_none")]
                star: Option<Vec<StarOut>>,
                passed: bool,
            }
            json_line(&VerifyOut {
                suite,
                tau: config.order.text(),
                p: PText(config.p),
                horizon: config.horizon,
                precision: config.precision,
                arithmetic,
                checks: checks
                    .iter()
                    .map(|c| CheckOut {
                        name: c.name,
                        value: Num(c.value),
                        relation: c.relation,
                        bound: c.bound.map(Num),
                        status: c.status(),
                    })
                    .collect(),
                star: star.map(|entries| {
                    entries
                        .iter()
                        .map(|e| StarOut {
                            n: e.n,
                            k: e.k,
                            defining_sum: Num(e.defining_sum),
                            star_display: Num(e.star_display),
                        })
                        .collect()
                }),
                passed,
            })
        }
    }
}

fn verify_identity(config: &RunConfig) -> (&'static str, Vec<Check>) {
    let residual = operator::identity_residual(config.order.tau(), config.horizon);
    let mut checks = vec![Check::new("identity_residual", residual, Relation::AtMost, 1e-8)];
    if let (true, Some(m)) = (config.exact(), config.order.integer()) {
        let dev = exact::identity_residual(m, config.horizon);
        checks.push(Check::new("exact_identity_deviation", dev.to_f64().unwrap_or(f64::INFINITY), Relation::Equal, 0.0));
        return ("float+exact", checks);
    }
    ("float", checks)
}

fn random_sequence(rng: &mut ChaCha8Rng, max_support: usize, len: usize) -> Vec<f64> {
    let support = rng.gen_range(1..=max_support);
    let mut x: Vec<f64> = (0..support).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    x.resize(len, 0.0);
    x
}

fn sup_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// The round trip amplifies float rounding by roughly `4^N`, so it runs in
/// exact arithmetic whenever the horizon allows and reports the float error
/// alongside.
fn verify_roundtrip(config: &RunConfig) -> (&'static str, Vec<Check>) {
    let n = config.horizon;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let float = PhatTransform::new(config.order.tau(), n);
    let exact = (n <= EXACT_MAX_HORIZON).then(|| config.exact_transform());
    let (mut worst, mut worst_float) = (0.0f64, 0.0f64);
    for _ in 0..RANDOM_TRIALS {
        let x = random_sequence(&mut rng, n, n);
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let via_float = float.inverse_apply_prefix(&float.apply_prefix(&x));
        worst_float = worst_float.max(sup_error(&via_float, &x) / scale);
        if let Some(t) = &exact {
            let v = ExactVector::from_f64(&x).expect("finite");
            let back = t.inverse_apply(&t.apply(&v)).to_f64();
            worst = worst.max(sup_error(&back, &x) / scale);
        }
    }
    if exact.is_some() {
        let checks = vec![
            Check::new("roundtrip_error", worst, Relation::AtMost, 1e-8),
            Check::info("float_roundtrip_error", worst_float),
        ];
        ("exact", checks)
    } else {
        ("float", vec![Check::new("roundtrip_error", worst_float, Relation::AtMost, 1e-8)])
    }
}

fn verify_parallelogram(config: &RunConfig) -> Result<(&'static str, Vec<Check>), CliError> {
    let n = config.horizon;
    let p = config.p;
    let (arithmetic, sides) = if n <= EXACT_MAX_HORIZON {
        ("exact", spaces::parallelogram_gap_exact(config.order.exact(), p, n))
    } else {
        ("float", spaces::parallelogram_gap(config.order.tau(), p, n))
    };
    let sides = sides.map_err(|e| CliError::Config(e.to_string()))?;
    let formula = if p.is_infinite() { 4.0 } else { 4.0 * 2f64.powf(2.0 / p.p()) };
    let mut checks = vec![
        Check::new("lhs", sides.lhs, Relation::Equal, 8.0),
        Check::info("rhs", sides.rhs),
        Check::new("rhs_formula_rel_error", (sides.rhs - formula).abs() / formula, Relation::AtMost, 1e-12),
    ];
    if p.p() == 2.0 {
        checks.push(Check::new("gap", sides.gap(), Relation::AtMost, 1e-12));
    } else {
        checks.push(Check::new("gap", sides.gap(), Relation::Above, 1e-12));
    }
    Ok((arithmetic, checks))
}

fn verify_schauder(config: &RunConfig) -> (&'static str, Vec<Check>) {
    let n = config.horizon;
    let terms = 16.min(n - 1);
    let ks = [0usize, 3, 7, 15].into_iter().filter(|&k| k < n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut basis, mut recon) = (0.0f64, 0.0f64);
    if config.exact() {
        let t = config.exact_transform();
        for k in ks {
            let e = ExactVector::unit(k, n);
            let image = t.apply(&t.inverse_apply(&e)).to_f64();
            basis = basis.max(sup_error(&image, &e.to_f64()));
        }
        for _ in 0..RANDOM_TRIALS / 5 {
            let x = random_sequence(&mut rng, terms + 1, n);
            let r = t.reconstruct(&ExactVector::from_f64(&x).expect("finite"), terms).to_f64();
            recon = recon.max(sup_error(&r[..=terms], &x[..=terms]));
        }
    } else {
        let t = PhatTransform::new(config.order.tau(), n);
        for k in ks {
            basis = basis.max(t.schauder_residual(k).expect("k < N"));
        }
        for _ in 0..RANDOM_TRIALS / 5 {
            let x = random_sequence(&mut rng, terms + 1, n);
            let r = t.reconstruct(&FiniteSequence::from_values(&x), terms).expect("terms < N");
            recon = recon.max(sup_error(&r[..=terms], &x[..=terms]));
        }
    }
    let arithmetic = if config.exact() { "exact" } else { "float" };
    let checks = vec![
        Check::new("basis_image_residual", basis, Relation::AtMost, 1e-9),
        Check::new("reconstruction_error", recon, Relation::AtMost, 1e-8),
    ];
    (arithmetic, checks)
}

fn verify_inclusion(config: &RunConfig) -> (&'static str, Vec<Check>) {
    let n = config.horizon;
    let bound = spaces::inclusion_bound(config.order.tau(), config.p, n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_TRIALS {
        let x = random_sequence(&mut rng, n, n);
        let ratio = p_norm(&forward_f64(config, &x), config.p) / (bound * p_norm(&x, config.p));
        worst = worst.max(ratio);
    }
    let pascal = spaces::inclusion_bound(FracOrder::integer(0), PExponent::infinity(), n);
    let checks = vec![
        Check::info("bound", bound),
        Check::new("norm_ratio", worst, Relation::AtMost, 1.0),
        Check::new("pascal_bound_vs_2_pow_n_minus_1", pascal, Relation::Equal, 2f64.powi(n as i32 - 1)),
    ];
    (if config.exact() { "exact" } else { "float" }, checks)
}

fn verify_absoluteness(config: &RunConfig) -> Result<(&'static str, Vec<Check>), CliError> {
    let n = config.horizon;
    if n < 2 {
        return Err(CliError::Config("the absoluteness witness needs N ≥ 2".into()));
    }
    let norm = |x: &[f64]| p_norm(&forward_f64(config, &prefix(x, n)), config.p);
    let (w, w_abs) = (norm(&[1.0, -1.0]), norm(&[1.0, 1.0]));
    let checks = vec![
        Check::info("norm_w", w),
        Check::info("norm_abs_w", w_abs),
        Check::new("gap", (w - w_abs).abs(), Relation::Above, 0.1),
        // (1, 1) is its own absolute value.
        Check::info("nonnegative_witness_gap", 0.0),
    ];
    Ok((if config.exact() { "exact" } else { "float" }, checks))
}
