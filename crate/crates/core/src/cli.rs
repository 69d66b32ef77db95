//! Command-line front end.
//!
//! Every subcommand writes one artifact (JSON, CSV or text) to stdout or to
//! `--out`, prints a one-line diagnostic on failure and exits with a code
//! that identifies the failing check; see [`CliError::exit_code`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::allocator::{
    dyadic_grid, lower_bound_sequence, plan, upper_bound_sequence, AllocError, BlockModel, Strategy, WidthSequence,
};
use crate::exponents::{compare_widths, exponent, ClassifierVariant, ExponentError, WidthKind};
use crate::finwidths::{coordinate_oracle, model_width, FiniteWidthQuery, FinwidthError, ModelVariant};
use crate::params::{EmbeddingParams, ExtReal, ParseError};
use crate::verify::{self, fit_slope, SlopeReport, VerifyError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("InvalidParams: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Finwidth(#[from] FinwidthError),
    #[error(transparent)]
    Alloc(#[from] AllocError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("ScanViolations: {0} violation(s)")]
    ScanViolations(usize),
    #[error("SlopeOutOfTolerance: {0}")]
    SlopeOutOfTolerance(String),
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
    #[error("Format: {0}")]
    Format(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

fn exponent_code(e: &ExponentError) -> i32 {
    match e {
        ExponentError::InvalidParams(_) => 3,
        ExponentError::NotCompact { .. } => 10,
        ExponentError::LimitingCase => 11,
        ExponentError::HypothesisFailure { .. } => 12,
        ExponentError::BoundaryCase { .. } => 13,
    }
}

fn finwidth_code(e: &FinwidthError) -> i32 {
    match e {
        FinwidthError::UnsupportedRegion { .. } => 20,
        FinwidthError::OracleTooLarge(_) => 21,
        FinwidthError::InvalidQuery(_) => 23,
    }
}

fn alloc_code(e: &AllocError) -> i32 {
    match e {
        AllocError::Exponent(e) => exponent_code(e),
        AllocError::Model(e) => finwidth_code(e),
        AllocError::RegimeMismatch(_) => 30,
        AllocError::InfeasibleConstraints(_) => 31,
        AllocError::InvalidBudget(_) => 32,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Exponent(e) => exponent_code(e),
            CliError::Finwidth(e) => finwidth_code(e),
            CliError::Alloc(e) => alloc_code(e),
            CliError::Verify(e) => match e {
                VerifyError::InsufficientPoints { .. } => 40,
                VerifyError::NonPositiveValue { .. } => 41,
                VerifyError::InvalidWindow(..) => 42,
                VerifyError::Alloc(a) => alloc_code(a),
            },
            CliError::ScanViolations(_) => 50,
            CliError::SlopeOutOfTolerance(_) => 51,
            CliError::Io(_) => 60,
            CliError::Format(_) => 61,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "nwidths", version, about = "Kolmogorov and Gelfand width exponents of weighted Sobolev embeddings")]
pub struct Cli {
    /// JSON run configuration; its `command` key selects the subcommand and
    /// the remaining keys become flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exponent case, κ and width comparisons for one parameter set or a grid.
    Classify(ClassifyArgs),
    /// Finite-dimensional width model of id: ℓ_{p1}^N → ℓ_{p2}^N.
    FiniteWidth(FiniteWidthArgs),
    /// Upper and/or lower bound sequences as CSV or JSON.
    Bound(BoundArgs),
    /// One allocation plan as JSON.
    Plan(PlanArgs),
    /// Fit slopes against -κ, from a fresh pipeline run or a `bound` CSV.
    SlopeCheck(SlopeArgs),
    /// Exponent-table scan and finite-width axiom suite.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(alias = "k", alias = "d")]
    Kolmogorov,
    #[value(alias = "g", alias = "c")]
    Gelfand,
    Both,
}

impl KindArg {
    fn kinds(self) -> Vec<WidthKind> {
        match self {
            KindArg::Kolmogorov => vec![WidthKind::Kolmogorov],
            KindArg::Gelfand => vec![WidthKind::Gelfand],
            KindArg::Both => vec![WidthKind::Kolmogorov, WidthKind::Gelfand],
        }
    }

    fn single(self) -> Result<WidthKind, CliError> {
        match self {
            KindArg::Kolmogorov => Ok(WidthKind::Kolmogorov),
            KindArg::Gelfand => Ok(WidthKind::Gelfand),
            KindArg::Both => Err(CliError::Usage("this command needs --kind kolmogorov or gelfand".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Fixed diagonal plan, step-4 or step-3 form by regime.
    Paper,
    Greedy,
    PaperStep3,
    PaperStep4,
}

impl StrategyArg {
    fn resolve(self, model: &BlockModel) -> Result<Strategy, CliError> {
        Ok(match self {
            StrategyArg::Paper => model.paper_strategy()?,
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::PaperStep3 => Strategy::PaperStep3,
            StrategyArg::PaperStep4 => Strategy::PaperStep4,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SequenceArg {
    Upper,
    Lower,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table,
    Axioms,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct ParamsArg {
    /// `key=value` list or JSON object; `@path` reads it from a file.
    #[arg(long)]
    pub params: Option<String>,
}

impl ParamsArg {
    fn load(&self) -> Result<EmbeddingParams, CliError> {
        let raw = self.params.as_deref().ok_or_else(|| CliError::Usage("--params is required".into()))?;
        Ok(EmbeddingParams::parse(&read_inline(raw)?)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    #[arg(long, default_value_t = verify::DEFAULT_WINDOW.0)]
    pub n_min: u64,
    #[arg(long, default_value_t = verify::DEFAULT_WINDOW.1)]
    pub n_max: u64,
    #[arg(long, default_value_t = 4)]
    pub per_octave: u32,
}

impl WindowArgs {
    fn window(&self) -> Result<(u64, u64), CliError> {
        verify::check_window((self.n_min, self.n_max))?;
        Ok((self.n_min, self.n_max))
    }
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub params: ParamsArg,
    /// File with a JSON array of parameter objects or one `key=value` set
    /// per line.
    #[arg(long, conflicts_with = "params")]
    pub grid: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct FiniteWidthArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub p1: ExtReal,
    #[arg(long)]
    pub p2: ExtReal,
    /// Ambient dimension N.
    #[arg(long = "big-n")]
    pub big_n: u64,
    /// Width index; all of 1..=N+1 when omitted.
    #[arg(long)]
    pub n: Option<u64>,
    /// Also evaluate the coordinate-subspace oracle (p2 < p1, N ≤ 12).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub params: ParamsArg,
    #[arg(long, value_enum, default_value = "kolmogorov")]
    pub kind: KindArg,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, value_enum, default_value = "greedy")]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "both")]
    pub sequence: SequenceArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[command(flatten)]
    pub params: ParamsArg,
    #[arg(long, value_enum, default_value = "kolmogorov")]
    pub kind: KindArg,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "paper")]
    pub strategy: StrategyArg,
    #[arg(long)]
    pub max_diagonal: Option<u32>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SlopeArgs {
    #[command(flatten)]
    pub params: ParamsArg,
    #[arg(long, value_enum, default_value = "kolmogorov")]
    pub kind: KindArg,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, value_enum, default_value = "greedy")]
    pub strategy: StrategyArg,
    /// CSV written by `bound`; fits every sequence in it.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = verify::SLOPE_TOLERANCE)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Run against deliberately broken models; violations are expected.
    #[arg(long)]
    pub mutant: bool,
    /// Keep at most this many violations in the report.
    #[arg(long)]
    pub max_violations: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

fn read_inline(raw: &str) -> Result<String, CliError> {
    match raw.strip_prefix('@') {
        Some(path) => Ok(std::fs::read_to_string(path)?),
        None => Ok(raw.to_string()),
    }
}

/// Turn a JSON run configuration into command-line arguments.
pub fn config_to_args(config: &Value) -> Result<Vec<OsString>, CliError> {
    let obj = config
        .as_object()
        .ok_or_else(|| CliError::Usage("config must be a JSON object".into()))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Usage("config needs a string `command`".into()))?;
    let mut args: Vec<OsString> = vec!["nwidths".into(), command.into()];
    for (key, value) in obj {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => args.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => args.extend([flag.into(), s.into()]),
            Value::Number(n) => args.extend([flag.into(), n.to_string().into()]),
            Value::Object(_) => args.extend([flag.into(), value.to_string().into()]),
            Value::Array(_) => {
                return Err(CliError::Usage(format!("config key `{key}` cannot be an array")));
            }
        }
    }
    Ok(args)
}

fn emit(out: &OutArgs, body: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Twelve significant digits.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.11e}")
    }
}

fn error_json(e: &dyn std::fmt::Display, name: &str) -> Value {
    json!({ "error": name, "message": e.to_string() })
}

/// The JSON record and, when every requested kind failed, the first error.
fn classify_one(p: &EmbeddingParams, kinds: &[WidthKind]) -> (Value, Option<ExponentError>) {
    let mut first_err = None;
    let mut any_ok = false;
    let mut obj = serde_json::Map::new();
    obj.insert("params".into(), serde_json::to_value(p).unwrap_or(Value::Null));
    obj.insert("derived".into(), serde_json::to_value(p.derive()).unwrap_or(Value::Null));
    for &kind in kinds {
        let v = match exponent(kind, p) {
            Ok(d) => {
                any_ok = true;
                serde_json::to_value(d).unwrap_or(Value::Null)
            }
            Err(e) => {
                let v = error_json(&e, e.name());
                first_err.get_or_insert(e);
                v
            }
        };
        obj.insert(kind.to_string(), v);
    }
    obj.insert("comparison".into(), serde_json::to_value(compare_widths(p)).unwrap_or(Value::Null));
    (Value::Object(obj), if any_ok { None } else { first_err })
}

fn classify_text(v: &Value, kinds: &[WidthKind]) -> String {
    let mut s = String::new();
    for kind in kinds {
        let k = &v[kind.to_string()];
        match k.get("case_id") {
            Some(case) => s.push_str(&format!(
                "{kind}: case {} kappa {}\n",
                case.as_str().unwrap_or("?"),
                k["kappa"].as_str().unwrap_or("?")
            )),
            None => s.push_str(&format!("{kind}: {}\n", k["message"].as_str().unwrap_or("?"))),
        }
    }
    s
}

fn load_grid(path: &PathBuf) -> Result<Vec<EmbeddingParams>, CliError> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('[') {
        let items: Vec<Value> = serde_json::from_str(&text)?;
        return items.iter().map(|v| Ok(EmbeddingParams::from_json_value(v)?)).collect();
    }
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| Ok(EmbeddingParams::parse(l)?))
        .collect()
}

fn cmd_classify(a: &ClassifyArgs) -> Result<(), CliError> {
    let kinds = a.kind.kinds();
    if let Some(path) = &a.grid {
        let grid = load_grid(path)?;
        let rows: Vec<Value> = grid.iter().map(|p| classify_one(p, &kinds).0).collect();
        let body = match a.format {
            Format::Text => rows.iter().map(|r| classify_text(r, &kinds)).collect::<Vec<_>>().join("\n"),
            _ => to_json(&rows)?,
        };
        return emit(&a.out, &body);
    }
    let p = a.params.load()?;
    let (v, err) = classify_one(&p, &kinds);
    let body = match a.format {
        Format::Text => classify_text(&v, &kinds),
        _ => to_json(&v)?,
    };
    emit(&a.out, &body)?;
    match err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn cmd_finite_width(a: &FiniteWidthArgs) -> Result<(), CliError> {
    let kind = a.kind.single()?;
    let ns: Vec<u64> = match a.n {
        Some(n) => vec![n],
        None => (1..=a.big_n + 1).collect(),
    };
    let mut rows = Vec::new();
    for &n in &ns {
        let q = FiniteWidthQuery::new(kind, a.p1, a.p2, a.big_n, n);
        let w = model_width(&q)?;
        let oracle = if a.oracle { Some(coordinate_oracle(a.p1, a.p2, a.big_n, n)?) } else { None };
        rows.push((q, w, oracle));
    }
    let body = match a.format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["N", "n", "value", "formula_tag", "fidelity", "extended", "oracle"])?;
            for (q, w, o) in &rows {
                wtr.write_record([
                    q.big_n.to_string(),
                    q.n.to_string(),
                    format_value(w.value),
                    w.formula_tag.to_string(),
                    format!("{:?}", w.fidelity),
                    w.extended.to_string(),
                    o.map(format_value).unwrap_or_default(),
                ])?;
            }
            String::from_utf8(wtr.into_inner().map_err(|e| CliError::Format(e.to_string()))?)
                .map_err(|e| CliError::Format(e.to_string()))?
        }
        _ => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(q, w, o)| json!({ "query": q, "width": w, "oracle": o }))
                .collect();
            if items.len() == 1 {
                to_json(&items[0])?
            } else {
                to_json(&items)?
            }
        }
    };
    emit(&a.out, &body)
}

fn sequences(
    p: &EmbeddingParams,
    kind: WidthKind,
    window: &WindowArgs,
    strategy: StrategyArg,
    which: SequenceArg,
) -> Result<(BlockModel, Vec<WidthSequence>), CliError> {
    let (lo, hi) = window.window()?;
    let model = BlockModel::new(p, kind)?;
    let grid = dyadic_grid(lo, hi, window.per_octave);
    let mut out = Vec::new();
    if which != SequenceArg::Lower {
        let s = strategy.resolve(&model)?;
        out.push(upper_bound_sequence(&model, &grid, s)?);
    }
    if which != SequenceArg::Upper {
        out.push(lower_bound_sequence(&model, &grid)?);
    }
    Ok((model, out))
}

pub fn sequences_csv(seqs: &[WidthSequence]) -> Result<String, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["n", "value", "kind", "strategy"])?;
    for s in seqs {
        for &(n, v) in &s.points {
            wtr.write_record([n.to_string(), format_value(v), s.kind.as_str().into(), s.strategy_label().into()])?;
        }
    }
    String::from_utf8(wtr.into_inner().map_err(|e| CliError::Format(e.to_string()))?)
        .map_err(|e| CliError::Format(e.to_string()))
}

fn cmd_bound(a: &BoundArgs) -> Result<(), CliError> {
    let p = a.params.load()?;
    let (model, seqs) = sequences(&p, a.kind.single()?, &a.window, a.strategy, a.sequence)?;
    let body = match a.format {
        Format::Json => to_json(&json!({
            "params": p,
            "decision": model.decision,
            "sequences": seqs,
        }))?,
        _ => sequences_csv(&seqs)?,
    };
    emit(&a.out, &body)
}

fn cmd_plan(a: &PlanArgs) -> Result<(), CliError> {
    let p = a.params.load()?;
    let model = BlockModel::new(&p, a.kind.single()?)?;
    let s = a.strategy.resolve(&model)?;
    let pl = plan(a.n, &model, s, a.max_diagonal)?;
    emit(&a.out, &to_json(&pl)?)
}

#[derive(Debug, serde::Deserialize)]
struct CsvRow {
    n: u64,
    value: f64,
    kind: String,
    strategy: String,
}

/// Sequences from a `bound` CSV, grouped by `(kind, strategy)` in file order.
pub fn read_sequences_csv(path: &PathBuf) -> Result<Vec<(String, String, Vec<(u64, f64)>)>, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut groups: Vec<(String, String, Vec<(u64, f64)>)> = Vec::new();
    for row in rdr.deserialize() {
        let row: CsvRow = row?;
        match groups.iter_mut().find(|g| g.0 == row.kind && g.1 == row.strategy) {
            Some(g) => g.2.push((row.n, row.value)),
            None => groups.push((row.kind, row.strategy, vec![(row.n, row.value)])),
        }
    }
    Ok(groups)
}

fn cmd_slope(a: &SlopeArgs) -> Result<(), CliError> {
    let kind = a.kind.single()?;
    let window = a.window.window()?;
    let Some(path) = &a.input else {
        let p = a.params.load()?;
        let model = BlockModel::new(&p, kind)?;
        let s = a.strategy.resolve(&model)?;
        let check = verify::slope_check(&p, kind, window, s, a.window.per_octave)?;
        emit(&a.out, &to_json(&check)?)?;
        let ok = check.upper.within(a.tolerance) && check.lower.within(a.tolerance) && check.lower_le_upper;
        return if ok {
            Ok(())
        } else {
            Err(CliError::SlopeOutOfTolerance(format!(
                "upper {:+.4}, lower {:+.4} off -kappa = {:.4} (tolerance {})",
                check.upper.deviation().unwrap_or(f64::NAN),
                check.lower.deviation().unwrap_or(f64::NAN),
                -check.decision.kappa_f64(),
                a.tolerance
            )))
        };
    };
    let target = match &a.params.params {
        Some(_) => Some(-exponent(kind, &a.params.load()?)?.kappa_f64()),
        None => None,
    };
    let mut reports: Vec<Value> = Vec::new();
    let mut failed = Vec::new();
    for (k, strategy, points) in read_sequences_csv(path)? {
        let seq = WidthSequence {
            points,
            kind: if k == "lower" {
                crate::allocator::SequenceKind::LowerBound
            } else {
                crate::allocator::SequenceKind::UpperBound
            },
            strategy: None,
        };
        let r: SlopeReport = fit_slope(&seq, window, target)?;
        if target.is_some() && !r.within(a.tolerance) {
            failed.push(format!("{k} {:+.4}", r.deviation().unwrap_or(f64::NAN)));
        }
        reports.push(json!({ "kind": k, "strategy": strategy, "report": r }));
    }
    emit(&a.out, &to_json(&reports)?)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SlopeOutOfTolerance(failed.join(", ")))
    }
}

fn cmd_scan(a: &ScanArgs) -> Result<(), CliError> {
    let mut body = serde_json::Map::new();
    let mut violations = 0;
    let mut trim = |mut r: verify::GridScanReport| {
        violations += r.violations.len();
        if let Some(k) = a.max_violations {
            r.violations.truncate(k);
        }
        r
    };
    if a.suite != Suite::Axioms {
        let v = if a.mutant { ClassifierVariant::InvertedTheta } else { ClassifierVariant::Faithful };
        body.insert("table".into(), serde_json::to_value(trim(verify::table_scan(v)))?);
    }
    if a.suite != Suite::Table {
        let v = if a.mutant { ModelVariant::InvertedTheta } else { ModelVariant::Faithful };
        body.insert("axioms".into(), serde_json::to_value(trim(verify::axiom_suite(v)))?);
    }
    body.insert("mutant".into(), Value::Bool(a.mutant));
    emit(&a.out, &to_json(&body)?)?;
    if violations > 0 {
        Err(CliError::ScanViolations(violations))
    } else {
        Ok(())
    }
}

fn dispatch(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Classify(a) => cmd_classify(a),
        Command::FiniteWidth(a) => cmd_finite_width(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Plan(a) => cmd_plan(a),
        Command::SlopeCheck(a) => cmd_slope(a),
        Command::Scan(a) => cmd_scan(a),
    }
}

fn parse_args<I, T>(args: I) -> Result<Command, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Usage(e.to_string().lines().next().unwrap_or("").to_string()),
    })?;
    match (cli.config, cli.command) {
        (Some(path), None) => {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let argv = config_to_args(&v)?;
            let inner = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
            inner.command.ok_or_else(|| CliError::Usage("config names no command".into()))
        }
        (None, Some(cmd)) => Ok(cmd),
        (Some(_), Some(_)) => Err(CliError::Usage("give either a subcommand or --config, not both".into())),
        (None, None) => Err(CliError::Usage("a subcommand or --config is required (see --help)".into())),
    }
}

/// Run the CLI on `args` and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let wants_help = args.iter().skip(1).any(|a| a == "--help" || a == "-h" || a == "--version" || a == "-V");
    let result = parse_args(args).and_then(|cmd| dispatch(&cmd));
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) if wants_help => {
            print!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_becomes_flags() {
        let v = json!({"command": "plan", "params": {"p1": "1"}, "n": 4096, "strategy": "paper", "max_diagonal": 30, "mutant": false});
        let args: Vec<String> = config_to_args(&v).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(args[..2], ["nwidths", "plan"]);
        assert!(args.windows(2).any(|w| w == ["--max-diagonal", "30"]));
        assert!(args.windows(2).any(|w| w == ["--params", "{\"p1\":\"1\"}"]));
        assert!(!args.iter().any(|a| a == "--mutant"));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(format_value(0.0), "0");
    }

    #[test]
    fn exit_codes_are_distinct() {
        let errs: Vec<CliError> = vec![
            CliError::Usage(String::new()),
            ExponentError::NotCompact { mu: "0".into(), threshold: "0".into() }.into(),
            ExponentError::LimitingCase.into(),
            ExponentError::BoundaryCase { detail: String::new() }.into(),
            FinwidthError::OracleTooLarge(13).into(),
            AllocError::RegimeMismatch(String::new()).into(),
            VerifyError::InvalidWindow(1, 1).into(),
            CliError::ScanViolations(1),
            CliError::Io(std::io::Error::other("x")),
        ];
        let mut codes: Vec<i32> = errs.iter().map(CliError::exit_code).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), errs.len());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["nwidths"]), 2);
        assert_eq!(run(["nwidths", "classify", "--kind", "sideways"]), 2);
        assert_eq!(run(["nwidths", "plan", "--n", "8"]), 2);
    }
}
