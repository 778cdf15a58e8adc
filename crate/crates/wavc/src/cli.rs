//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wavc_core::capacity::{oblivious_capacity, windowed_capacity_verdict, VerdictOptions};
use wavc_core::symmetrize::{ecn_symmetrizable, SymmetrizabilityResult};
use wavc_core::window::{verify_windows, RangeMode};
use wavc_core::{Distribution, Symbol};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::harness::run_trials;
use crate::output::{dist6, opt6, sig6, sink, write_csv, write_json, Format};
use crate::selftest;
use crate::sweep::{sweep, HEADER};

#[derive(Debug, Parser)]
#[command(name = "wavc", version, about = "Windowed AVC capacity, codes and jamming experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Write results here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SequenceKind {
    /// Check against the input constraint and `w_x`.
    Input,
    /// Check against the state constraint and `w_s`.
    State,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List capacity, oblivious capacity and the windowed-capacity verdict.
    Capacity(Common),
    /// Symmetrizability of an input distribution (or a grid over the input set).
    Symmetrize {
        #[command(flatten)]
        common: Common,
        /// Input distribution as comma-separated probabilities; defaults to `code.p_x` or a grid.
        #[arg(long, value_delimiter = ',')]
        p_x: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        resolution: usize,
    },
    /// Verify every sliding window of a symbol sequence.
    CheckWindows {
        #[command(flatten)]
        common: Common,
        /// File of symbols separated by whitespace or commas, or a string of digits.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SequenceKind::Input)]
        sequence: SequenceKind,
    },
    /// Monte Carlo decoding error against the configured jammers.
    Simulate(Common),
    /// Capacity predictions and simulations over a parameter grid.
    Sweep(Common),
    /// Run the built-in invariant checks.
    Selftest {
        #[command(flatten)]
        output: Output,
    },
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wavc: {e}");
            e.exit_code()
        }
    }
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(s) = common.output.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn threads(output: &Output) -> Result<()> {
    if let Some(n) = output.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn emit<T: Serialize>(output: &Output, header: &[&str], rows: &[Vec<String>], json: &T) -> Result<()> {
    let mut out = sink(output.out.as_deref())?;
    match output.format {
        Format::Csv => write_csv(&mut *out, header, rows)?,
        Format::Json => write_json(&mut *out, json)?,
    }
    out.flush()?;
    Ok(())
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Capacity(c) => capacity(&c),
        Command::Symmetrize { common, p_x, resolution } => symmetrize(&common, p_x, resolution),
        Command::CheckWindows { common, input, sequence } => check_windows(&common, &input, sequence),
        Command::Simulate(c) => simulate(&c),
        Command::Sweep(c) => run_sweep(&c),
        Command::Selftest { output } => {
            threads(&output)?;
            let results = selftest::run_all();
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| vec![r.name.to_string(), if r.passed { "pass" } else { "fail" }.into(), r.detail.clone()])
                .collect();
            emit(&output, &["check", "result", "detail"], &rows, &results)?;
            Ok(if results.iter().all(|r| r.passed) { 0 } else { 3 })
        }
    }
}

#[derive(Serialize)]
struct CapacityReport {
    c_list: f64,
    c_list_lower: f64,
    c_list_upper: f64,
    c_obl: f64,
    all_symmetrizable: bool,
    verdict: &'static str,
    evidence: String,
    regime_flags: Vec<String>,
    argmax_p: Vec<f64>,
    argmin_q: Vec<f64>,
}

fn capacity(c: &Common) -> Result<i32> {
    let cfg = load(c)?;
    threads(&c.output)?;
    let spec = cfg.spec()?;
    let opts = VerdictOptions::default();
    let verdict = windowed_capacity_verdict(&spec, &opts)?;
    let list = wavc_core::capacity::list_capacity(&spec.channel, &spec.gamma, &spec.lambda, &opts.capacity);
    let (argmax_p, argmin_q) = match list {
        Ok(r) => (r.argmax_p.probs().to_vec(), r.argmin_q.probs().to_vec()),
        Err(wavc_core::Error::NotConverged { .. }) => (Vec::new(), Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let obl = oblivious_capacity(&spec.channel, &spec.gamma, &spec.lambda, &opts.capacity)?;
    let report = CapacityReport {
        c_list: verdict.c_list,
        c_list_lower: verdict.c_list_lower,
        c_list_upper: verdict.c_list_upper,
        c_obl: obl.value,
        all_symmetrizable: obl.all_symmetrizable,
        verdict: verdict.status.label(),
        evidence: verdict.hypothesis_evidence.clone(),
        regime_flags: verdict
            .regime_flags
            .iter()
            .map(|f| format!("{}={} outside ({:.1}, {:.1})", f.window, f.length, f.lower, f.upper))
            .collect(),
        argmax_p,
        argmin_q,
    };
    let row = vec![
        sig6(report.c_list),
        sig6(report.c_list_lower),
        sig6(report.c_list_upper),
        sig6(report.c_obl),
        report.verdict.into(),
        dist6(&report.argmax_p),
        dist6(&report.argmin_q),
        report.regime_flags.join("; "),
    ];
    let header = ["c_list", "c_list_lower", "c_list_upper", "c_obl", "verdict", "argmax_p", "argmin_q", "regime_flags"];
    emit(&c.output, &header, &[row], &report)?;
    Ok(0)
}

#[derive(Serialize)]
struct SymmetrizeRow {
    p_x: Vec<f64>,
    symmetrizable: bool,
    residual: f64,
    marginal: Option<Vec<f64>>,
    witness: Option<Vec<Vec<f64>>>,
}

impl SymmetrizeRow {
    fn new(p: &Distribution, r: SymmetrizabilityResult) -> Self {
        SymmetrizeRow {
            p_x: p.probs().to_vec(),
            symmetrizable: r.symmetrizable,
            residual: r.residual,
            marginal: r.marginal.map(|m| m.probs().to_vec()),
            witness: r.witness.map(|u| u.iter().map(|d| d.probs().to_vec()).collect()),
        }
    }
}

fn symmetrize(c: &Common, p_x: Option<Vec<f64>>, resolution: usize) -> Result<i32> {
    let cfg = load(c)?;
    let spec = cfg.spec()?;
    let given = p_x.or_else(|| cfg.code.as_ref().and_then(|code| code.p_x.clone()));
    let points = match given {
        Some(v) => vec![Distribution::new(v).map_err(|e| Error::Config(format!("p_x: {e}")))?],
        None => spec.gamma.grid_points(resolution.max(1)),
    };
    let mut rows = Vec::with_capacity(points.len());
    for p in &points {
        if p.dim() != spec.channel.nx() {
            return Err(Error::Config(format!("p_x has {} entries, expected {}", p.dim(), spec.channel.nx())));
        }
        rows.push(SymmetrizeRow::new(p, ecn_symmetrizable(p, &spec.channel, &spec.lambda)?));
    }
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                dist6(&r.p_x),
                r.symmetrizable.to_string(),
                sig6(r.residual),
                r.marginal.as_deref().map(dist6).unwrap_or_default(),
                r.witness.as_ref().map(|u| u.iter().map(|d| dist6(d)).collect::<Vec<_>>().join("|")).unwrap_or_default(),
            ]
        })
        .collect();
    emit(&c.output, &["p_x", "symmetrizable", "residual", "state_marginal", "witness"], &records, &rows)?;
    Ok(0)
}

/// Symbols from whitespace/comma separated tokens; a token of several digits is split per digit.
pub fn parse_symbols(text: &str) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        if tok.len() > 1 && tok.chars().all(|c| c.is_ascii_digit()) {
            out.extend(tok.chars().map(|c| c.to_digit(10).unwrap() as Symbol));
        } else {
            out.push(tok.parse().map_err(|_| Error::Config(format!("bad symbol `{tok}`")))?);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct WindowSummary {
    valid: bool,
    length: usize,
    window: usize,
    windows_checked: usize,
    violations: usize,
    first_violation: Option<usize>,
}

fn check_windows(c: &Common, input: &Path, kind: SequenceKind) -> Result<i32> {
    let cfg = load(c)?;
    let spec = cfg.spec()?;
    let text = fs::read_to_string(input).map_err(|e| Error::Config(format!("cannot read {}: {e}", input.display())))?;
    let seq = parse_symbols(&text)?;
    let (w, cs) = match kind {
        SequenceKind::Input => (spec.w_x, &spec.gamma),
        SequenceKind::State => (spec.w_s, &spec.lambda),
    };
    if seq.iter().any(|&s| s as usize >= cs.dim()) {
        return Err(Error::Config(format!("sequence has symbols outside an alphabet of size {}", cs.dim())));
    }
    let report = verify_windows(&seq, w, cs, RangeMode::Inclusive)?;
    let s = WindowSummary {
        valid: report.valid,
        length: seq.len(),
        window: w,
        windows_checked: report.windows_checked,
        violations: report.violations.len(),
        first_violation: report.violations.first().map(|v| v.start),
    };
    let row = vec![
        s.valid.to_string(),
        s.length.to_string(),
        s.window.to_string(),
        s.windows_checked.to_string(),
        s.violations.to_string(),
        s.first_violation.map(|v| v.to_string()).unwrap_or_default(),
    ];
    emit(&c.output, &["valid", "length", "window", "windows_checked", "violations", "first_violation"], &[row], &s)?;
    Ok(0)
}

fn simulate(c: &Common) -> Result<i32> {
    let cfg = load(c)?;
    threads(&c.output)?;
    let report = run_trials(&cfg)?;
    let mut rows: Vec<Vec<String>> = report
        .per_strategy
        .iter()
        .map(|s| {
            vec![
                s.jammer.clone(),
                s.trials.to_string(),
                s.outcomes.correct.to_string(),
                s.outcomes.list_failure.to_string(),
                s.outcomes.disambiguation_failure.to_string(),
                s.outcomes.ambiguity.to_string(),
                s.outcomes.wrong_message.to_string(),
                s.generation_failures.to_string(),
                sig6(s.err_avg),
                opt6(s.err_max_est),
                sig6(s.ci_lo),
                sig6(s.ci_hi),
                s.message_set.as_ref().map(|m| m.label()).unwrap_or_default(),
            ]
        })
        .collect();
    if let Some(m) = &report.max_over_strategies {
        let mut row = vec![String::new(); 13];
        row[0] = format!("max over strategies ({})", m.label);
        row[8] = sig6(m.err);
        row[12] = m.jammer.clone();
        rows.push(row);
    }
    let header = [
        "jammer",
        "trials",
        "correct",
        "list_failure",
        "disambiguation_failure",
        "ambiguity",
        "wrong_message",
        "generation_failures",
        "err_avg",
        "err_max_est",
        "ci_lo",
        "ci_hi",
        "note",
    ];
    emit(&c.output, &header, &rows, &report)?;
    Ok(0)
}

fn run_sweep(c: &Common) -> Result<i32> {
    let cfg = load(c)?;
    threads(&c.output)?;
    let rows = sweep(&cfg)?;
    let records: Vec<Vec<String>> = rows.iter().map(|r| r.record()).collect();
    emit(&c.output, &HEADER, &records, &rows)?;
    Ok(0)
}
