//! `bcmm` command-line harness.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O or
//! file-format error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use bcmm_core::bcmm::{recall_with, RecallMode};
use bcmm_core::experiment::{self, ExperimentConfig, ExperimentKind, ReportFormat};
use bcmm_core::oracle::{self, NaiveVector};
use bcmm_core::patio;
use bcmm_core::{
    orthonormalize, pairwise_ands, train, verify_orthonormal, BinaryVector, OrthonormalityReport,
    PatternSet, SplitMix64,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

pub const SEED_ENV: &str = "BCMM_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "bcmm",
    version,
    about = "Boolean correlation matrix memory toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orthonormalize a key set (a seeded random 7x6 demo set without --input).
    Bop(BopArgs),
    /// Build a memory file from key and value pattern files.
    Train(TrainArgs),
    /// Recall one key (bit string) or every key of a pattern file.
    Recall(RecallArgs),
    /// Run a seeded Monte Carlo experiment.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Args)]
pub struct BopArgs {
    /// Pattern file to orthonormalize.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Where to write the basis; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Check the output for orthonormality and print the report to stderr.
    #[arg(long)]
    pub verify: bool,
    /// Recompute with the element-wise reference and fail on any mismatch.
    #[arg(long)]
    pub oracle: bool,
    /// Demo set dimension.
    #[arg(long, default_value_t = 7)]
    pub p: usize,
    /// Demo set size.
    #[arg(long, default_value_t = 6)]
    pub q: usize,
    /// Demo set seed (overridden by BCMM_SEED).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Demo set bit density.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Also write the generated demo input here.
    #[arg(long)]
    pub save_input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub keys: PathBuf,
    #[arg(long)]
    pub values: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Orthonormalize the keys before association.
    #[arg(long)]
    pub preprocess: bool,
    /// Recompute the matrix element-wise and fail on any mismatch.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Raw,
    Preprocessed,
}

#[derive(Debug, Args)]
pub struct RecallArgs {
    #[arg(long)]
    pub memory: PathBuf,
    /// A bit string such as 0110, or a pattern file of probes.
    #[arg(long)]
    pub key: String,
    /// Defaults to the mode the memory was trained in.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Expected responses (bit string or pattern file); exit 1 on mismatch.
    #[arg(long)]
    pub expect: Option<String>,
    /// Recompute each response element-wise and fail on any mismatch.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Recall counts against surviving basis vectors.
    Capacity(ExperimentArgs),
    /// Raw versus orthonormalized recall bit errors.
    Crosstalk(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Text,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Text => ReportFormat::Text,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 7)]
    pub p: usize,
    #[arg(long, default_value_t = 6)]
    pub q: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Base seed (overridden by BCMM_SEED).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability that a key bit is 1.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Use the first q standard basis vectors as keys.
    #[arg(long)]
    pub identity_keys: bool,
    #[arg(long)]
    pub oracle: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Verify(String),
    Usage(String),
    Core(bcmm_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use bcmm_core::Error as E;
        match self {
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(E::Io(_) | E::Parse { .. } | E::Format(_)) => EXIT_IO,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<bcmm_core::Error> for CliError {
    fn from(e: bcmm_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Seed from `BCMM_SEED` when set, else `flag`.
pub fn effective_seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| {
            CliError::Usage(format!("{SEED_ENV}={s:?} is not a 64-bit unsigned integer"))
        }),
        Err(_) => Ok(flag),
    }
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Bop(a) => cmd_bop(&a, out, err),
        Command::Train(a) => cmd_train(&a, out, err),
        Command::Recall(a) => cmd_recall(&a, out, err),
        Command::Experiment(ExperimentCommand::Capacity(a)) => {
            cmd_experiment(ExperimentKind::Capacity, &a, out)
        }
        Command::Experiment(ExperimentCommand::Crosstalk(a)) => {
            cmd_experiment(ExperimentKind::Crosstalk, &a, out)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// The default demo key set: `q` vectors of `p` Bernoulli(`density`) bits
/// drawn in order from a generator seeded with `seed`.
pub fn demo_keys(p: usize, q: usize, seed: u64, density: f64) -> CliResult<PatternSet> {
    if p == 0 || q == 0 {
        return Err(CliError::Usage("p and q must both be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(CliError::Usage(format!(
            "density {density} is outside [0, 1]"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let vs = (0..q)
        .map(|_| rng.binary_vector(p, density))
        .collect::<bcmm_core::Result<Vec<_>>>()?;
    Ok(PatternSet::new(vs)?)
}

pub fn format_report(set: &PatternSet, report: &OrthonormalityReport) -> String {
    let q = set.len();
    let list = |v: &[String]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.join(" ")
        }
    };
    let pairs: Vec<String> = report
        .violating_pairs
        .iter()
        .map(|(k, j)| format!("({k},{j})"))
        .collect();
    let zeros: Vec<String> = report.zero_vectors.iter().map(|k| k.to_string()).collect();
    let nonzero_y = pairwise_ands(set).iter().filter(|y| !y.is_zero()).count();
    let yes = |b: bool| if b { "yes" } else { "no" };
    format!(
        "orthonormality report: p={} q={q}\n  \
         pairs checked:      {}\n  \
         nonzero AND pairs:  {nonzero_y}\n  \
         violating pairs:    {}\n  \
         zero vectors:       {}\n  \
         orthogonal:         {}\n  \
         orthonormal:        {}\n",
        set.dimension(),
        q * (q - 1) / 2,
        list(&pairs),
        list(&zeros),
        yes(report.is_orthogonal),
        yes(report.is_orthonormal),
    )
}

fn naive(set: &PatternSet) -> Vec<NaiveVector> {
    set.iter().map(NaiveVector::from).collect()
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_bop(a: &BopArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let keys = match &a.input {
        Some(path) => patio::read_pattern_set(path)?,
        None => {
            let keys = demo_keys(a.p, a.q, effective_seed(a.seed)?, a.density)?;
            if let Some(path) = &a.save_input {
                patio::write_pattern_set(&keys, path)?;
            }
            keys
        }
    };
    let basis = orthonormalize(&keys);
    write_or_print(
        a.output.as_deref(),
        &patio::format_pattern_set(&basis.basis),
        out,
    )?;

    if a.oracle && naive_bop_mismatch(&keys, &basis.basis)? {
        return Err(CliError::Verify(
            "packed basis differs from the element-wise reference".into(),
        ));
    }
    if a.verify {
        let report = verify_orthonormal(&basis.basis);
        err.write_all(format_report(&basis.basis, &report).as_bytes())?;
        if !report.is_orthogonal {
            return Err(CliError::Verify(format!(
                "basis is not orthogonal: {:?}",
                report.violating_pairs
            )));
        }
    }
    Ok(())
}

fn naive_bop_mismatch(keys: &PatternSet, basis: &PatternSet) -> CliResult<bool> {
    Ok(oracle::naive_bop(&naive(keys))? != naive(basis))
}

pub fn cmd_train(a: &TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let keys = patio::read_pattern_set(&a.keys)?;
    let values = patio::read_pattern_set(&a.values)?;
    let mem = train(&keys, &values, a.preprocess)?;

    if a.oracle {
        let effective = match mem.basis() {
            Some(b) => naive(&b.basis),
            None => naive(&keys),
        };
        if a.preprocess && naive_bop_mismatch(&keys, &mem.basis().unwrap().basis)? {
            return Err(CliError::Verify(
                "basis differs from the element-wise reference".into(),
            ));
        }
        let m = oracle::naive_train(&effective, &naive(&values))?;
        if m != oracle::naive_matrix(mem.matrix()) {
            return Err(CliError::Verify(
                "matrix differs from the element-wise reference".into(),
            ));
        }
    }

    patio::write_memory(&mem, &a.out)?;
    for w in mem.warnings() {
        writeln!(err, "warning: {w:?}")?;
    }
    writeln!(
        out,
        "trained p={} q={} preprocessed={} set_bits={}",
        mem.dimension(),
        mem.len(),
        mem.preprocessed(),
        mem.matrix().support_count()
    )?;
    Ok(())
}

/// A bit string, or failing that, a pattern file path.
fn probes(arg: &str) -> CliResult<Vec<BinaryVector>> {
    if !arg.is_empty() && arg.bytes().all(|b| b == b'0' || b == b'1') {
        return Ok(vec![BinaryVector::parse(arg)?]);
    }
    Ok(patio::read_pattern_set(arg)?.into_vec())
}

pub fn cmd_recall(a: &RecallArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mem = patio::read_memory(&a.memory)?;
    let keys = probes(&a.key)?;
    let expected = a.expect.as_deref().map(probes).transpose()?;
    if let Some(e) = &expected {
        if e.len() != keys.len() {
            return Err(CliError::Usage(format!(
                "{} probes but {} expected responses",
                keys.len(),
                e.len()
            )));
        }
    }
    let mode = match a.mode {
        Some(ModeArg::Raw) => RecallMode::Raw,
        Some(ModeArg::Preprocessed) => RecallMode::Preprocessed,
        None if mem.preprocessed() => RecallMode::Preprocessed,
        None => RecallMode::Raw,
    };
    let naive_m = a.oracle.then(|| oracle::naive_matrix(mem.matrix()));

    let mut mismatches = Vec::new();
    for (i, key) in keys.iter().enumerate() {
        let mut r = recall_with(&mem, key, mode)?;
        if let Some(e) = &expected {
            r = r.with_expected(&e[i]);
        }
        let matched = r
            .matched_index
            .map_or_else(|| "-".to_string(), |k| k.to_string());
        writeln!(out, "{} {matched}", r.response)?;
        if r.zero_basis {
            writeln!(
                err,
                "warning: probe {i} resolves to a zero basis vector; nothing is recallable there"
            )?;
        }
        if r.exact == Some(false) {
            mismatches.push(i);
        }
        if let Some(m) = &naive_m {
            let stimulus = match (r.matched_index, mem.basis()) {
                (Some(k), Some(b)) if mode == RecallMode::Preprocessed => b.basis[k].clone(),
                _ if mode == RecallMode::Preprocessed => BinaryVector::zeros(mem.dimension())?,
                _ => key.clone(),
            };
            let want = oracle::naive_recall(m, &(&stimulus).into())?;
            if want != NaiveVector::from(&r.response) {
                return Err(CliError::Verify(format!(
                    "probe {i}: response differs from the element-wise reference"
                )));
            }
        }
    }
    if !mismatches.is_empty() {
        return Err(CliError::Verify(format!(
            "responses differ from expected for probes {mismatches:?}"
        )));
    }
    Ok(())
}

pub fn cmd_experiment(kind: ExperimentKind, a: &ExperimentArgs, out: &mut dyn Write) -> CliResult {
    let config = ExperimentConfig {
        p: a.p,
        q: a.q,
        trials: a.trials,
        seed: effective_seed(a.seed)?,
        key_density: a.density,
        identity_keys: a.identity_keys,
        oracle: a.oracle,
        report_format: a.format.into(),
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let report = experiment::run(kind, &config)?;
    let text = patio::render_report(&report, config.report_format)?;
    write_or_print(a.output.as_deref(), &text, out)?;
    if report.summary.oracle_mismatches > 0 {
        return Err(CliError::Verify(format!(
            "{} oracle mismatches",
            report.summary.oracle_mismatches
        )));
    }
    if !report.passed() {
        return Err(CliError::Verify(format!(
            "{} of {} trials failed",
            report.summary.trials - report.summary.passed_trials,
            report.summary.trials
        )));
    }
    Ok(())
}
