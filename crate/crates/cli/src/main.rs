mod input;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use oamlab::builders::verify::{self, Report};
use oamlab::builders::{self as b, BuildError, Parity, SuperpositionTarget};
use oamlab::measurement::Distribution;
use oamlab::netlist::{emit, parse, ErrorKind, NetlistError};
use oamlab::oracle::{check_isometry, detector_projectors};
use oamlab::qkd::{detect_eavesdropper, EveKind, Protocol, ProtocolConfig, QkdError};
use oamlab::sequence::SequenceSpec;
use oamlab::state::inner;
use oamlab::walk::{to_csv, WalkConfig};
use oamlab::{Circuit, Mode, PathId};
use serde_json::{json, Value};
use thiserror::Error;

use report::{check, Oracle, OracleCheck, RunReport, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Semantic(String),
    #[error("{0}")]
    Build(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse(_) => 2,
            CliError::Semantic(_) => 3,
            CliError::Build(_) => 4,
            CliError::Config(_) => 5,
        }
    }

    fn netlist(path: &Path, e: NetlistError) -> Self {
        let msg = format!("{}:{}:{}: {} error: {}", path.display(), e.line, e.column, e.kind, e.message);
        match e.kind {
            ErrorKind::Syntax => CliError::Parse(msg),
            ErrorKind::Semantic => CliError::Semantic(msg),
        }
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        CliError::Build(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Simulator for interferometric OAM apparatuses.
///
/// Exit codes: 0 success, 1 I/O error, 2 parse error (netlist, input or
/// command line), 3 semantic error, 4 builder or verification failure,
/// 5 invalid configuration.
#[derive(Debug, Parser)]
#[command(name = "oamlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a netlist on an input state and print detector probabilities.
    Simulate(SimulateArgs),
    /// Build an apparatus, write its netlist and check it against the oracle.
    Build(BuildArgs),
    /// Run the key-distribution protocol.
    Qkd(QkdArgs),
    /// Run the quantum walk and print per-step position distributions as CSV.
    Walk(WalkArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeqKind {
    Fibonacci,
    Lucas,
    Tribonacci,
    Custom,
}

#[derive(Debug, Args)]
struct SeqArgs {
    /// Recurrence used for named states and builders.
    #[arg(long, value_enum, default_value = "fibonacci")]
    sequence: SeqKind,
    /// Smallest value kept.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    min: i64,
    /// Largest value kept.
    #[arg(long, default_value_t = 100, allow_hyphen_values = true)]
    max: i64,
    /// Initial terms of a custom recurrence.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    initial: Vec<i64>,
    /// Coefficients of a custom recurrence, most recent term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    recurrence: Vec<i64>,
    /// Largest admissible |label| during generation.
    #[arg(long)]
    label_bound: Option<i64>,
}

impl SeqArgs {
    fn spec(&self) -> Result<SequenceSpec, CliError> {
        let s = match self.sequence {
            SeqKind::Fibonacci => SequenceSpec::fibonacci(self.min, self.max),
            SeqKind::Lucas => SequenceSpec::lucas(self.min, self.max),
            SeqKind::Tribonacci => SequenceSpec::tribonacci(self.min, self.max),
            SeqKind::Custom => {
                if self.initial.is_empty() || self.initial.len() != self.recurrence.len() {
                    return Err(CliError::Config(
                        "custom sequence needs --initial and --recurrence of equal, non-zero length".into(),
                    ));
                }
                SequenceSpec::custom(self.initial.clone(), self.recurrence.clone(), self.min, self.max)
            }
        };
        let bound = self.label_bound.unwrap_or_else(|| s.label_bound.max(self.max.abs()).max(self.min.abs()));
        Ok(s.with_label_bound(bound))
    }

    fn echo(&self) -> Value {
        json!({
            "sequence": format!("{:?}", self.sequence).to_lowercase(),
            "min": self.min,
            "max": self.max,
            "initial": self.initial,
            "recurrence": self.recurrence,
        })
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Netlist file (.onl).
    netlist: PathBuf,
    /// Input state: FAMILY:n with FAMILY one of F, S, C, D, or `label=amp,...`.
    #[arg(long)]
    input: String,
    /// Source port receiving the input; needed when the circuit has several.
    #[arg(long)]
    source: Option<String>,
    #[command(flatten)]
    seq: SeqArgs,
    /// Print the run report as JSON.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Print `outcome,probability` rows.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Apparatus {
    CdTree,
    Sgdt,
    Synthesizer,
    Tribonacci,
    Jump,
    Mub4,
    RsgCell,
    Rsg,
    Polarization,
    PolarizationPair,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
    Both,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
            ParityArg::Both => Parity::Both,
        }
    }
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(value_enum)]
    apparatus: Apparatus,
    #[command(flatten)]
    seq: SeqArgs,
    /// Index parity covered by a C/D tree.
    #[arg(long, value_enum, default_value = "both")]
    parity: ParityArg,
    /// Target coefficients, e.g. `1,-0.5,0.3+0.2i`.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// OAM values; defaults to the first values of the sequence.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<i64>,
    /// Number of generator cells.
    #[arg(long, default_value_t = 2)]
    cells: usize,
    /// Netlist output file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EveArg {
    None,
    #[value(name = "intercept-resend-l", alias = "intercept_resend_l", alias = "intercept_resend_L")]
    InterceptResendL,
    #[value(name = "intercept-resend-d", alias = "intercept_resend_d", alias = "intercept_resend_D")]
    InterceptResendD,
    #[value(name = "intercept-resend-random", alias = "intercept_resend_random")]
    InterceptResendRandom,
}

impl From<EveArg> for EveKind {
    fn from(e: EveArg) -> Self {
        match e {
            EveArg::None => EveKind::None,
            EveArg::InterceptResendL => EveKind::InterceptResendL,
            EveArg::InterceptResendD => EveKind::InterceptResendD,
            EveArg::InterceptResendRandom => EveKind::InterceptResendRandom,
        }
    }
}

#[derive(Debug, Args)]
struct QkdArgs {
    /// Protocol configuration (JSON); defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "OAMLAB_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    eve: Option<EveArg>,
    /// Interception probability.
    #[arg(long)]
    eve_probability: Option<f64>,
    /// Significance level of the chi-square test.
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    /// JSON-lines transcript destination.
    #[arg(long, default_value = "transcript.jsonl")]
    transcript: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct WalkArgs {
    /// Walk configuration (JSON); defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    steps: Option<usize>,
    /// Coherent evolution.
    #[arg(long, conflicts_with = "measured")]
    coherent: bool,
    /// Measure the walker after every step.
    #[arg(long)]
    measured: bool,
    /// Starting value on the chain.
    #[arg(long, allow_hyphen_values = true)]
    start: Option<i64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Output {
    report: RunReport,
    text: String,
}

fn command_echo() -> Vec<String> {
    std::env::args().collect()
}

fn finish(config: Value, results: Value, oracle: Option<Oracle>, start: Instant, text: String) -> Output {
    Output {
        report: RunReport {
            schema: SCHEMA_VERSION,
            command: command_echo(),
            config,
            results,
            oracle,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        text,
    }
}

fn load_netlist(path: &Path) -> Result<Circuit, CliError> {
    parse(&read(path)?).map_err(|e| CliError::netlist(path, e))
}

fn simulate(args: &SimulateArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    let circuit = load_netlist(&args.netlist)?;
    let source = match &args.source {
        Some(s) => {
            if !circuit.sources().contains(&PathId::from(s.as_str())) {
                return Err(CliError::Semantic(format!("`{s}` is not a source of the circuit")));
            }
            s.clone()
        }
        None => match circuit.sources() {
            [only] => only.to_string(),
            many => {
                return Err(CliError::Semantic(format!(
                    "circuit has {} sources; choose one with --source",
                    many.len()
                )))
            }
        },
    };
    let seq = args.seq.spec()?;
    let psi = input::parse_input(&args.input, &seq, &source)?;
    let dist = oamlab::measurement::probabilities(&circuit, &psi).map_err(|e| CliError::Semantic(e.to_string()))?;

    let basis: Vec<Mode> = psi.modes().cloned().collect();
    let projectors = detector_projectors(&circuit, &basis).map_err(|e| CliError::Semantic(e.to_string()))?;
    let checks: Vec<OracleCheck> = projectors
        .iter()
        .map(|(name, p)| check(name.clone(), (p.probability(&psi) - dist.get(name)).abs()))
        .collect();
    let oracle = Oracle::new(checks, 1e-10);

    let text = if args.csv {
        let mut s = String::from("outcome,probability\n");
        for (k, p) in dist.outcomes() {
            s.push_str(&format!("{k},{p:?}\n"));
        }
        s
    } else {
        distribution_text(&dist)
    };
    let config = json!({ "netlist": args.netlist.display().to_string(), "input": args.input, "source": source, "sequence": args.seq.echo() });
    Ok(finish(config, json!({ "distribution": dist }), Some(oracle), start, text))
}

fn distribution_text(d: &Distribution) -> String {
    let width = d.outcomes().map(|(k, _)| k.len()).max().unwrap_or(0);
    d.outcomes().map(|(k, p)| format!("{k:<width$}  {p:.12}\n")).collect()
}

fn report_checks(r: &Report) -> Vec<OracleCheck> {
    r.checks.iter().map(|c| check(c.name.clone(), c.deviation)).collect()
}

fn default_values(seq: &SequenceSpec, n: usize) -> Result<Vec<i64>, CliError> {
    let v = seq.generate().map_err(|e| CliError::Build(e.to_string()))?;
    if v.len() < n {
        return Err(CliError::Build(format!("sequence has {} values in range, need {n}", v.len())));
    }
    Ok(v[..n].to_vec())
}

fn target(args: &BuildArgs, seq: &SequenceSpec) -> Result<SuperpositionTarget, CliError> {
    let text = args.coeffs.as_deref().ok_or_else(|| CliError::Build("--coeffs is required".into()))?;
    let coefficients: Vec<Complex64> = text
        .split(',')
        .map(|c| c.trim().parse().map_err(|_| CliError::Parse(format!("bad coefficient `{c}`"))))
        .collect::<Result<_, _>>()?;
    let values = if args.values.is_empty() { default_values(seq, coefficients.len())? } else { args.values.clone() };
    Ok(SuperpositionTarget::new(coefficients, values))
}

fn round_trip(c: &Circuit) -> OracleCheck {
    let same = parse(&emit(c)).map(|back| &back == c).unwrap_or(false);
    check("netlist round trip", if same { 0.0 } else { f64::INFINITY })
}

fn polarization_expectation(pair: bool) -> BTreeMap<&'static str, BTreeMap<&'static str, f64>> {
    let m = |items: &[(&'static str, f64)]| items.iter().copied().collect::<BTreeMap<_, _>>();
    if pair {
        let even = m(&[("C_ne", 0.25), ("D_ne", 0.25), ("C_nw", 0.25), ("D_nw", 0.25)]);
        BTreeMap::from([
            ("H", even.clone()),
            ("V", even),
            ("+45", m(&[("C_ne", 0.5), ("D_ne", 0.0), ("C_nw", 0.0), ("D_nw", 0.5)])),
        ])
    } else {
        BTreeMap::from([
            ("H", m(&[("C", 0.5), ("D", 0.5)])),
            ("V", m(&[("C", 0.5), ("D", 0.5)])),
            ("+45", m(&[("C", 1.0), ("D", 0.0)])),
            ("-45", m(&[("C", 0.0), ("D", 1.0)])),
        ])
    }
}

fn mub_overlaps(l: &Circuit, m: &Circuit, values: [i64; 4]) -> Result<Vec<OracleCheck>, CliError> {
    let basis: Vec<Mode> = values.iter().map(|&v| Mode::oam("in", v)).collect();
    let pl = detector_projectors(l, &basis).map_err(|e| CliError::Build(e.to_string()))?;
    let pm = detector_projectors(m, &basis).map_err(|e| CliError::Build(e.to_string()))?;
    let mut out = Vec::new();
    for (a, pa) in &pl {
        for (bn, pb) in &pm {
            let dev = match (pa.single(), pb.single()) {
                (Some(x), Some(y)) => (inner(x, y).norm_sqr() - 0.25).abs(),
                _ => f64::INFINITY,
            };
            out.push(check(format!("|<{a}|{bn}>|^2 = 1/4"), dev));
        }
    }
    Ok(out)
}

fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{tag}{ext}"))
}

fn build(args: &BuildArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    let seq = args.seq.spec()?;
    let mut circuits: Vec<(&str, Circuit)> = Vec::new();
    let mut checks: Vec<OracleCheck> = Vec::new();
    match args.apparatus {
        Apparatus::CdTree => {
            let c = b::build_cd_tree(&seq, args.parity.into())?;
            checks.extend(report_checks(&verify::verify_cd_tree(&c, &seq, args.parity.into())?));
            circuits.push(("", c));
        }
        Apparatus::Tribonacci => {
            let c = b::build_tribonacci_tree(&seq)?;
            checks.extend(report_checks(&verify::verify_tribonacci_tree(&c, &seq)?));
            circuits.push(("", c));
        }
        Apparatus::Jump => {
            let c = b::build_jump_tree(&seq)?;
            checks.extend(report_checks(&verify::verify_jump_tree(&c, &seq)?));
            circuits.push(("", c));
        }
        Apparatus::Sgdt => {
            let t = target(args, &seq)?;
            let c = b::build_sgdt(&t)?;
            checks.extend(report_checks(&verify::verify_sgdt(&c, &t)?));
            circuits.push(("", c));
        }
        Apparatus::Synthesizer => {
            let t = target(args, &seq)?;
            let c = b::build_synthesizer(&t)?;
            checks.extend(report_checks(&verify::verify_synthesizer(&c, &t)?));
            circuits.push(("", c));
        }
        Apparatus::Mub4 => {
            let v = if args.values.is_empty() { default_values(&seq, 4)? } else { args.values.clone() };
            let values: [i64; 4] =
                v.try_into().map_err(|v: Vec<i64>| CliError::Build(format!("mub4 needs 4 values, got {}", v.len())))?;
            let (l, m) = b::build_mub4(values)?;
            checks.extend(report_checks(&verify::verify_mub4(&l, &m, values)?));
            checks.extend(mub_overlaps(&l, &m, values)?);
            circuits.push(("L", l));
            circuits.push(("M", m));
        }
        Apparatus::RsgCell => {
            let c = b::build_rsg_cell()?;
            let basis: Vec<Mode> = ["in1", "in2"].iter().map(|p| Mode::oam(*p, 0)).collect();
            let defect = check_isometry(&c, &basis).map_err(|e| CliError::Build(e.to_string()))?;
            checks.push(check("isometry", defect));
            circuits.push(("", c));
        }
        Apparatus::Rsg => {
            let c = b::build_rsg(args.cells, &seq)?;
            checks.extend(report_checks(&verify::verify_rsg(&c, args.cells, &seq)?));
            circuits.push(("", c));
        }
        Apparatus::Polarization | Apparatus::PolarizationPair => {
            let pair = matches!(args.apparatus, Apparatus::PolarizationPair);
            let c = if pair { b::build_polarization_pair()? } else { b::build_polarization_analyzer()? };
            checks.extend(report_checks(&verify::verify_polarization(&c, &polarization_expectation(pair))?));
            circuits.push(("", c));
        }
    }
    for (_, c) in &circuits {
        checks.push(round_trip(c));
    }
    let oracle = Oracle::new(checks, verify::TOLERANCE);

    let mut written = Vec::new();
    let mut text = String::new();
    for (tag, c) in &circuits {
        let netlist = emit(c);
        match &args.out {
            Some(path) => {
                let path = if tag.is_empty() { path.clone() } else { suffixed(path, tag) };
                write(&path, &netlist)?;
                written.push(path.display().to_string());
            }
            None => {
                if !tag.is_empty() {
                    text.push_str(&format!("# {tag}\n"));
                }
                text.push_str(&netlist);
            }
        }
    }
    let mut summary = String::new();
    for c in &oracle.checks {
        summary.push_str(&format!("{:<40} {:.3e}\n", c.name, c.deviation));
    }
    summary.push_str(&format!(
        "max deviation {:.3e} (tolerance {:.0e}): {}\n",
        oracle.max_deviation,
        oracle.tolerance,
        if oracle.passed { "ok" } else { "FAILED" }
    ));
    let results = json!({
        "apparatus": format!("{:?}", args.apparatus),
        "circuits": circuits.iter().map(|(tag, c)| json!({
            "tag": tag,
            "elements": c.elements().len(),
            "detectors": c.detectors().keys().collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "netlists": written,
    });
    let config = json!({
        "sequence": args.seq.echo(),
        "parity": format!("{:?}", args.parity).to_lowercase(),
        "coeffs": args.coeffs,
        "values": args.values,
        "cells": args.cells,
    });
    let passed = oracle.passed;
    let worst = oracle.checks.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation)).cloned();
    let out = finish(config, results, Some(oracle), start, text);
    if !passed {
        let w = worst.map(|c| format!("{} deviates by {:e}", c.name, c.deviation)).unwrap_or_default();
        return Err(CliError::Build(format!("verification failed: {w}\n{summary}")));
    }
    Ok(Output { text: if args.out.is_some() { summary } else { out.text.clone() + &summary_comment(&summary) }, ..out })
}

fn summary_comment(summary: &str) -> String {
    summary.lines().map(|l| format!("# {l}\n")).collect()
}

fn qkd_config(args: &QkdArgs) -> Result<ProtocolConfig, CliError> {
    let mut cfg: ProtocolConfig = match &args.config {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => ProtocolConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(e) = args.eve {
        cfg.eve.kind = e.into();
    }
    if let Some(p) = args.eve_probability {
        cfg.eve.probability = p;
    }
    if !(0.0..=1.0).contains(&args.alpha) {
        return Err(CliError::Config(format!("alpha {} outside [0, 1]", args.alpha)));
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn qkd(args: &QkdArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    let cfg = qkd_config(args)?;
    let protocol = Protocol::new(cfg.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    let run = protocol.run();

    let mut lines = String::new();
    for r in &run.transcript {
        lines.push_str(&serde_json::to_string(r).map_err(|e| CliError::Config(e.to_string()))?);
        lines.push('\n');
    }
    write(&args.transcript, &lines)?;

    let verdict = match detect_eavesdropper(&run.statistics, &protocol.expected, args.alpha) {
        Ok(v) => Some(v),
        Err(QkdError::InsufficientCounts) => None,
        Err(e) => return Err(CliError::Config(e.to_string())),
    };
    let retention = protocol.source_retention().map_err(|e| CliError::Config(e.to_string()))?;
    let mut text = format!(
        "trials {}\nsifted {}\nagreement {}\nkey symbols {}\n",
        cfg.trials,
        run.sifted,
        run.agreement_rate().map_or("n/a".to_string(), |r| format!("{:.6}", r)),
        run.alice_symbols.len()
    );
    text.push_str(&match &verdict {
        Some(v) => format!("verdict {} (alpha {})\n", if v.tampered { "tampered" } else { "clean" }, v.alpha),
        None => "verdict none (not enough counts)\n".to_string(),
    });
    text.push_str(&format!("transcript {}\n", args.transcript.display()));
    let results = json!({
        "trials": cfg.trials,
        "sifted": run.sifted,
        "agreeing": run.agreeing,
        "agreement_rate": run.agreement_rate(),
        "key_symbols": run.alice_symbols.len(),
        "key_bits": run.alice_bits.as_ref().map(Vec::len),
        "source_retention": retention,
        "statistics": run.statistics,
        "verdict": verdict,
        "transcript": args.transcript.display().to_string(),
    });
    let config = serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(finish(config, results, None, start, text))
}

fn walk(args: &WalkArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut cfg: WalkConfig = match &args.config {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => WalkConfig::default(),
    };
    if let Some(s) = args.steps {
        cfg.steps = s;
    }
    if args.coherent {
        cfg.measure_each = false;
    }
    if args.measured {
        cfg.measure_each = true;
    }
    if args.start.is_some() {
        cfg.start = args.start;
    }
    let dists = cfg.run().map_err(|e| CliError::Config(e.to_string()))?;
    let csv = to_csv(&dists);
    let text = match &args.out {
        Some(p) => {
            write(p, &csv)?;
            String::new()
        }
        None => csv,
    };
    let results = json!({
        "variance": dists.iter().map(|d| d.variance()).collect::<Vec<_>>(),
    });
    let config = serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(finish(config, results, None, start, text))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (out, json_out) = match &cli.command {
        Command::Simulate(a) => (simulate(a)?, a.json),
        Command::Build(a) => (build(a)?, a.json),
        Command::Qkd(a) => (qkd(a)?, a.json),
        Command::Walk(a) => (walk(a)?, false),
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let printed = if json_out {
        let s = serde_json::to_string_pretty(&out.report).map_err(|e| CliError::Config(e.to_string()))?;
        writeln!(lock, "{s}")
    } else {
        write!(lock, "{}", out.text)
    };
    printed.map_err(|source| CliError::Io { path: "stdout".into(), source })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
