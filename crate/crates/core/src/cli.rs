//! Command-line front end: dataset evaluation, envelope tables, oracle
//! certification and the two-scale COMPAS report.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::envelopes::{self, ClassRatio, PpvBound};
use crate::ingest::{self, BucketRate, DecileReport, LoadOptions, LoadSummary, Scale};
use crate::metrics::{confusion_at_cut, ConfusionCounts, MetricError};
use crate::oracle::{self, OracleError, MAX_INSTANCE};
use crate::ppv::ppv_base_rate;
use crate::ranking::Ranking;
use crate::roc::{auc_pairwise, auc_trapezoid, roc_curve};

/// Slack for the self-checks on floating-point AUC values.
const CHECK_TOLERANCE: f64 = 1e-12;
/// Allowed disagreement between the pairwise and trapezoidal AUC.
const ROUTE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] crate::Error),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Consistency(_) => 2,
            _ => 1,
        }
    }
}

impl<E: Into<crate::Error>> From<E> for Box<CliError> {
    fn from(e: E) -> Self {
        Box::new(CliError::Data(e.into()))
    }
}

type CliResult<T> = Result<T, Box<CliError>>;

#[derive(Debug, Parser)]
#[command(
    name = "aucgap",
    version,
    about = "AUC versus PPV at the base-rate cut"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// AUC, PPV_k, envelopes and metrics for one scored dataset.
    Evaluate(EvaluateArgs),
    /// Tabulate the AUC or PPV_k envelope for a class ratio.
    Envelope(EnvelopeArgs),
    /// Certify the closed-form envelopes against exhaustive enumeration.
    Verify(VerifyArgs),
    /// Compare the general and violent recidivism scales.
    ReportCompas(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    General,
    Violent,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Scale {
        match s {
            ScaleArg::General => Scale::GeneralRecidivism,
            ScaleArg::Violent => Scale::ViolentRecidivism,
        }
    }
}

/// Loading switches shared by the dataset commands.
#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Single-byte field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Fail on repeated ids instead of keeping the first row.
    #[arg(long)]
    pub no_dedupe: bool,
    /// Fail on blank or NA cells instead of dropping the row.
    #[arg(long)]
    pub strict: bool,
    /// Keep only rows whose COLUMN equals VALUE.
    #[arg(long = "where", value_name = "COLUMN=VALUE")]
    pub filter: Option<String>,
}

impl FilterArgs {
    fn options(&self, scale: Scale) -> CliResult<LoadOptions> {
        if !self.delimiter.is_ascii() {
            return Err(usage(format!(
                "delimiter {:?} is not ASCII",
                self.delimiter
            )));
        }
        let delimiter = self.delimiter as u8;
        let filter = match &self.filter {
            None => None,
            Some(spec) => {
                let (col, value) = spec
                    .split_once('=')
                    .ok_or_else(|| usage(format!("--where expects COLUMN=VALUE, got {spec:?}")))?;
                Some((col.trim().to_string(), value.to_string()))
            }
        };
        let mut options = LoadOptions::for_scale(scale);
        options.delimiter = delimiter;
        options.dedupe = !self.no_dedupe;
        options.drop_missing = !self.strict;
        options.filter = filter;
        Ok(options)
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Picks the default column names.
    #[arg(long, value_enum, default_value_t = ScaleArg::General)]
    pub scale: ScaleArg,
    #[arg(long)]
    pub id_col: Option<String>,
    #[arg(long)]
    pub score_col: Option<String>,
    #[arg(long)]
    pub decile_col: Option<String>,
    #[arg(long)]
    pub outcome_col: Option<String>,
    #[command(flatten)]
    pub filters: FilterArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnvelopeMode {
    /// One row per feasible a = i / k1: a, auc_min, auc_max.
    AucGivenPpv,
    /// One row per AUC grid value b: b, ppv_min, ppv_max.
    PpvGivenAuc,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    #[arg(long)]
    pub k1: u64,
    #[arg(long)]
    pub k2: u64,
    #[arg(long, value_enum, default_value_t = EnvelopeMode::AucGivenPpv)]
    pub mode: EnvelopeMode,
    /// AUC grid step for `ppv-given-auc`.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest k1 + k2 to enumerate.
    #[arg(long, default_value_t = 12)]
    pub limit: u64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub general: PathBuf,
    #[arg(long)]
    pub violent: PathBuf,
    #[command(flatten)]
    pub filters: FilterArgs,
}

fn usage(msg: impl Into<String>) -> Box<CliError> {
    Box::new(CliError::Usage(msg.into()))
}

fn consistency(msg: impl Into<String>) -> Box<CliError> {
    Box::new(CliError::Consistency(msg.into()))
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (text, failure) = match execute(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = emit(&text, cli.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Output {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs the command and renders its output.
///
/// A failed certification still renders the per-ratio results; the failure
/// is returned alongside so the caller can print both.
pub fn execute(cli: &Cli) -> Result<(String, Option<CliError>), Box<CliError>> {
    match &cli.command {
        Command::Evaluate(args) => {
            let report = cmd_evaluate(args)?;
            Ok((render_evaluation(&report, cli.format)?, None))
        }
        Command::Envelope(args) => {
            let table = cmd_envelope(args)?;
            Ok((render_rows(&table, cli.format)?, None))
        }
        Command::Verify(args) => {
            let summary = cmd_verify(args)?;
            let failure = summary.failure.clone().map(CliError::Consistency);
            Ok((render_rows(&summary.table, cli.format)?, failure))
        }
        Command::ReportCompas(args) => {
            let report = cmd_report_compas(args)?;
            Ok((render_compas(&report, cli.format)?, None))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PpvInterval {
    pub ppv_min: f64,
    pub ppv_max: f64,
    pub ppv_min_hits: u64,
    pub ppv_max_hits: u64,
    /// Closed-form inversion of the envelopes, rounded outward to the hit grid.
    pub closed_form_min: f64,
    pub closed_form_max: f64,
}

impl PpvInterval {
    fn new(lo: PpvBound, hi: PpvBound) -> Self {
        PpvInterval {
            ppv_min: lo.value,
            ppv_max: hi.value,
            ppv_min_hits: lo.hits,
            ppv_max_hits: hi.hits,
            closed_form_min: lo.continuous_on_grid,
            closed_form_max: hi.continuous_on_grid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AucInterval {
    pub auc_min: f64,
    pub auc_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTable {
    pub cut: u64,
    pub counts: ConfusionCounts,
    pub accuracy: Option<f64>,
    pub error_rate: Option<f64>,
    pub prevalence: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub false_positive_rate: Option<f64>,
    pub precision: Option<f64>,
    pub f1_score: Option<f64>,
}

fn defined(r: Result<f64, MetricError>) -> Option<f64> {
    r.ok()
}

impl MetricTable {
    fn at(r: &Ranking, cut: usize) -> CliResult<MetricTable> {
        let c = confusion_at_cut(r, cut)?;
        Ok(MetricTable {
            cut: cut as u64,
            accuracy: defined(c.accuracy()),
            error_rate: defined(c.error_rate()),
            prevalence: defined(c.prevalence()),
            sensitivity: defined(c.sensitivity()),
            specificity: defined(c.specificity()),
            false_positive_rate: defined(c.false_positive_rate()),
            precision: defined(c.precision()),
            f1_score: defined(c.f1_score()),
            counts: c,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub scale: Scale,
    pub filters: LoadSummary,
    pub n: u64,
    pub k1: u64,
    pub k2: u64,
    pub base_rate: f64,
    /// Pairwise AUC, tied scores credited one half.
    pub auc: f64,
    /// AUC of the tie-broken order used for PPV_k; equals `auc` without
    /// cross-class ties.
    pub auc_ordered: f64,
    pub ppv_k: f64,
    pub hits: u64,
    pub envelope_at_auc: PpvInterval,
    pub envelope_at_ppv: AucInterval,
    pub decile_report: Option<DecileReport>,
    pub metric_table: MetricTable,
}

/// Evaluates a ranking and enforces the sandwich self-check.
pub fn evaluate_ranking(
    ranking: &Ranking,
    scale: Scale,
    filters: LoadSummary,
    decile_report: Option<DecileReport>,
) -> CliResult<EvaluationReport> {
    let ratio = ClassRatio::new(ranking.k1() as u64, ranking.k2() as u64)?;
    let auc = auc_pairwise(ranking)?;
    let trapezoid = auc_trapezoid(&roc_curve(ranking)?);
    if (auc.value - trapezoid).abs() > ROUTE_TOLERANCE {
        return Err(consistency(format!(
            "pairwise AUC {} disagrees with trapezoidal AUC {}",
            auc.value, trapezoid
        )));
    }
    // the envelopes bound strict orders, so the checks use the tie-broken one
    let ordered = auc_pairwise(&Ranking::from_labels(
        &ranking.labels().collect::<Vec<_>>(),
    )?)?;
    let ppv = ppv_base_rate(ranking)?;
    let a = ppv.value;
    let envelope_at_ppv = AucInterval {
        auc_min: envelopes::auc_min_given_ppvk(a, ratio)?,
        auc_max: envelopes::auc_max_given_ppvk(a, ratio)?,
    };
    let envelope_at_auc = PpvInterval::new(
        envelopes::ppvk_min_given_auc(auc.value, ratio)?,
        envelopes::ppvk_max_given_auc(auc.value, ratio)?,
    );
    let lo = envelopes::ppvk_min_given_auc(ordered.value, ratio)?;
    let hi = envelopes::ppvk_max_given_auc(ordered.value, ratio)?;
    let sandwich = envelope_at_ppv.auc_min <= ordered.value + CHECK_TOLERANCE
        && ordered.value <= envelope_at_ppv.auc_max + CHECK_TOLERANCE
        && lo.hits <= ppv.hits as u64
        && ppv.hits as u64 <= hi.hits;
    if !sandwich {
        return Err(consistency(format!(
            "sandwich violated: PPV_k = {a}, AUC = {}, AUC envelope [{}, {}], PPV_k envelope [{}, {}]",
            ordered.value, envelope_at_ppv.auc_min, envelope_at_ppv.auc_max, lo.value, hi.value
        )));
    }
    Ok(EvaluationReport {
        scale,
        filters,
        n: ranking.len() as u64,
        k1: ratio.k1(),
        k2: ratio.k2(),
        base_rate: ratio.k1() as f64 / ratio.n() as f64,
        auc: auc.value,
        auc_ordered: ordered.value,
        ppv_k: a,
        hits: ppv.hits as u64,
        envelope_at_auc,
        envelope_at_ppv,
        decile_report,
        metric_table: MetricTable::at(ranking, ranking.k1())?,
    })
}

fn load_and_evaluate(
    path: &Path,
    options: &LoadOptions,
    scale: Scale,
) -> CliResult<EvaluationReport> {
    let loaded = ingest::load_csv(path, options, scale)?;
    let ranking = ingest::to_ranking(&loaded.rows)?;
    let deciles = ingest::decile_report(&loaded.rows);
    evaluate_ranking(&ranking, scale, loaded.summary, Some(deciles))
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<EvaluationReport> {
    let scale = Scale::from(args.scale);
    let mut options = args.filters.options(scale)?;
    let cols = &mut options.columns;
    for (slot, flag) in [
        (&mut cols.id, &args.id_col),
        (&mut cols.score, &args.score_col),
        (&mut cols.decile, &args.decile_col),
        (&mut cols.outcome, &args.outcome_col),
    ] {
        if let Some(name) = flag {
            *slot = name.clone();
        }
    }
    load_and_evaluate(&args.input, &options, scale)
}

/// Columns plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rows {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn cmd_envelope(args: &EnvelopeArgs) -> CliResult<Rows> {
    let ratio = ClassRatio::new(args.k1, args.k2).map_err(|e| usage(e.to_string()))?;
    let (columns, rows) = match args.mode {
        EnvelopeMode::AucGivenPpv => (
            ["a", "auc_min", "auc_max"],
            envelopes::envelope_curve(ratio)
                .samples
                .iter()
                .map(|s| vec![fmt_num(s.a), fmt_num(s.auc_min), fmt_num(s.auc_max)])
                .collect(),
        ),
        EnvelopeMode::PpvGivenAuc => (
            ["b", "ppv_min", "ppv_max"],
            envelopes::ppv_envelope_grid(ratio, args.step)
                .map_err(|e| usage(e.to_string()))?
                .iter()
                .map(|r| vec![fmt_num(r.b), fmt_num(r.ppv_min), fmt_num(r.ppv_max)])
                .collect(),
        ),
    };
    Ok(Rows {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifySummary {
    pub table: Rows,
    /// Detail of the first failing ratio; later ratios are not run.
    pub failure: Option<String>,
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<VerifySummary> {
    if args.limit > MAX_INSTANCE {
        return Err(usage(
            OracleError::InstanceTooLarge {
                n: args.limit,
                limit: MAX_INSTANCE,
            }
            .to_string(),
        ));
    }
    if args.limit < 2 {
        return Err(usage(format!(
            "limit {} admits no ratio with k1, k2 >= 1",
            args.limit
        )));
    }
    let mut rows = Vec::new();
    let mut failure = None;
    for ratio in oracle::ratios_up_to(args.limit) {
        let cert = oracle::compare_envelopes(ratio, args.limit)?;
        let passed = cert.levels.iter().filter(|l| l.passed()).count();
        let ok = passed == cert.levels.len();
        rows.push(vec![
            ratio.k1().to_string(),
            ratio.k2().to_string(),
            cert.arrangements.to_string(),
            format!("{passed}/{}", cert.levels.len()),
            if ok { "PASS" } else { "FAIL" }.to_string(),
        ]);
        if !ok {
            failure = Some(
                match oracle::certify_envelopes_with_limit(ratio, args.limit) {
                    Err(e) => e.to_string(),
                    Ok(_) => format!("ratio {}:{} failed", ratio.k1(), ratio.k2()),
                },
            );
            break;
        }
    }
    Ok(VerifySummary {
        table: Rows {
            columns: ["k1", "k2", "arrangements", "levels", "result"]
                .iter()
                .map(|c| c.to_string())
                .collect(),
            rows,
        },
        failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleSummary {
    pub scale: Scale,
    pub n: u64,
    pub k1: u64,
    pub base_rate: f64,
    pub auc: f64,
    pub ppv_k: f64,
    pub gap: f64,
    pub envelope: PpvInterval,
    pub low: Option<BucketRate>,
    pub medium: Option<BucketRate>,
    pub high: Option<BucketRate>,
    pub filters: LoadSummary,
}

impl From<&EvaluationReport> for ScaleSummary {
    fn from(r: &EvaluationReport) -> Self {
        let deciles = r.decile_report.as_ref();
        ScaleSummary {
            scale: r.scale,
            n: r.n,
            k1: r.k1,
            base_rate: r.base_rate,
            auc: r.auc,
            ppv_k: r.ppv_k,
            gap: r.auc - r.ppv_k,
            envelope: r.envelope_at_auc.clone(),
            low: deciles.and_then(|d| d.low),
            medium: deciles.and_then(|d| d.medium),
            high: deciles.and_then(|d| d.high),
            filters: r.filters.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompasReport {
    pub scales: Vec<ScaleSummary>,
}

pub fn cmd_report_compas(args: &ReportArgs) -> CliResult<CompasReport> {
    let mut scales = Vec::new();
    for (path, scale) in [
        (&args.general, Scale::GeneralRecidivism),
        (&args.violent, Scale::ViolentRecidivism),
    ] {
        let options = args.filters.options(scale)?;
        scales.push(ScaleSummary::from(&load_and_evaluate(
            path, &options, scale,
        )?));
    }
    Ok(CompasReport { scales })
}

/// Rounds to 10 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().expect("formatted float parses")
}

/// Formats with at most 10 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".to_string();
    }
    let exponent = r.abs().log10().floor() as i32;
    let decimals = (9 - exponent).max(0) as usize;
    let s = format!("{r:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), fmt_num)
}

fn fmt_bucket(b: Option<BucketRate>) -> String {
    b.map_or_else(
        || "empty".to_string(),
        |b| format!("{} ({}/{})", fmt_num(b.rate), b.positives, b.total),
    )
}

fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            if let Some(rounded) = serde_json::Number::from_f64(x) {
                *n = rounded;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn render_rows(table: &Rows, format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Json => {
            let records: Vec<serde_json::Map<String, serde_json::Value>> = table
                .rows
                .iter()
                .map(|row| {
                    table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, cell)| {
                            // cells were formatted from numbers; keep them numeric
                            let value = cell
                                .parse::<serde_json::Number>()
                                .map(serde_json::Value::Number)
                                .unwrap_or_else(|_| serde_json::Value::String(cell.clone()));
                            (c.clone(), value)
                        })
                        .collect()
                })
                .collect();
            to_json(&records)
        }
        Format::Tsv => {
            let mut out = table.columns.join("\t");
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
            out
        }
        Format::Table => aligned(&table.columns, &table.rows),
    })
}

fn aligned(columns: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..columns.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([columns[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(columns);
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

fn filter_fields(s: &LoadSummary) -> Vec<(String, String)> {
    [
        ("rows_read", s.rows_read),
        ("dropped_by_filter", s.dropped_by_filter),
        ("dropped_missing_score", s.dropped_missing_score),
        ("dropped_missing_decile", s.dropped_missing_decile),
        ("dropped_missing_outcome", s.dropped_missing_outcome),
        ("dropped_duplicate_id", s.dropped_duplicate_id),
        ("retained", s.retained),
    ]
    .into_iter()
    .map(|(k, v)| (format!("filters.{k}"), v.to_string()))
    .collect()
}

fn evaluation_fields(r: &EvaluationReport) -> Vec<(String, String)> {
    let mut f: Vec<(String, String)> = vec![("scale".into(), r.scale.to_string())];
    f.extend(filter_fields(&r.filters));
    let e = &r.envelope_at_auc;
    let m = &r.metric_table;
    f.extend(
        [
            ("n", r.n.to_string()),
            ("k1", r.k1.to_string()),
            ("k2", r.k2.to_string()),
            ("base_rate", fmt_num(r.base_rate)),
            ("auc", fmt_num(r.auc)),
            ("auc_ordered", fmt_num(r.auc_ordered)),
            ("ppv_k", fmt_num(r.ppv_k)),
            ("hits", r.hits.to_string()),
            ("envelope_at_auc.ppv_min", fmt_num(e.ppv_min)),
            ("envelope_at_auc.ppv_max", fmt_num(e.ppv_max)),
            (
                "envelope_at_auc.closed_form_min",
                fmt_num(e.closed_form_min),
            ),
            (
                "envelope_at_auc.closed_form_max",
                fmt_num(e.closed_form_max),
            ),
            (
                "envelope_at_ppv.auc_min",
                fmt_num(r.envelope_at_ppv.auc_min),
            ),
            (
                "envelope_at_ppv.auc_max",
                fmt_num(r.envelope_at_ppv.auc_max),
            ),
            ("metrics.cut", m.cut.to_string()),
            ("metrics.tp", m.counts.tp.to_string()),
            ("metrics.fp", m.counts.fp.to_string()),
            ("metrics.fn", m.counts.fn_.to_string()),
            ("metrics.tn", m.counts.tn.to_string()),
            ("metrics.accuracy", fmt_opt(m.accuracy)),
            ("metrics.error_rate", fmt_opt(m.error_rate)),
            ("metrics.prevalence", fmt_opt(m.prevalence)),
            ("metrics.sensitivity", fmt_opt(m.sensitivity)),
            ("metrics.specificity", fmt_opt(m.specificity)),
            (
                "metrics.false_positive_rate",
                fmt_opt(m.false_positive_rate),
            ),
            ("metrics.precision", fmt_opt(m.precision)),
            ("metrics.f1_score", fmt_opt(m.f1_score)),
        ]
        .map(|(k, v)| (k.to_string(), v)),
    );
    if let Some(d) = &r.decile_report {
        for (i, c) in d.per_decile.iter().enumerate() {
            f.push((
                format!("decile.{}", i + 1),
                format!("{}/{}", c.positives, c.total),
            ));
        }
        f.push(("bucket.low".into(), fmt_bucket(d.low)));
        f.push(("bucket.medium".into(), fmt_bucket(d.medium)));
        f.push(("bucket.high".into(), fmt_bucket(d.high)));
    }
    f
}

fn render_fields(fields: Vec<(String, String)>, format: Format) -> String {
    let columns = vec!["field".to_string(), "value".to_string()];
    let rows: Vec<Vec<String>> = fields.into_iter().map(|(k, v)| vec![k, v]).collect();
    match format {
        Format::Tsv => {
            let mut out = String::new();
            for row in &rows {
                let _ = writeln!(out, "{}\t{}", row[0], row[1]);
            }
            out
        }
        _ => aligned(&columns, &rows),
    }
}

fn render_evaluation(r: &EvaluationReport, format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Json => to_json(r),
        _ => render_fields(evaluation_fields(r), format),
    })
}

fn render_compas(r: &CompasReport, format: Format) -> CliResult<String> {
    if format == Format::Json {
        return Ok(to_json(r));
    }
    let columns: Vec<String> = [
        "scale",
        "n",
        "k1",
        "base_rate",
        "auc",
        "ppv_k",
        "gap",
        "ppv_min",
        "ppv_max",
        "closed_form_min",
        "closed_form_max",
        "low_rate",
        "medium_rate",
        "high_rate",
        "retained",
        "dropped",
    ]
    .iter()
    .map(|c| c.to_string())
    .collect();
    let rows = r
        .scales
        .iter()
        .map(|s| {
            let f = &s.filters;
            vec![
                s.scale.to_string(),
                s.n.to_string(),
                s.k1.to_string(),
                fmt_num(s.base_rate),
                fmt_num(s.auc),
                fmt_num(s.ppv_k),
                fmt_num(s.gap),
                fmt_num(s.envelope.ppv_min),
                fmt_num(s.envelope.ppv_max),
                fmt_num(s.envelope.closed_form_min),
                fmt_num(s.envelope.closed_form_max),
                fmt_opt(s.low.map(|b| b.rate)),
                fmt_opt(s.medium.map(|b| b.rate)),
                fmt_opt(s.high.map(|b| b.rate)),
                f.retained.to_string(),
                (f.rows_read - f.retained).to_string(),
            ]
        })
        .collect::<Vec<_>>();
    Ok(match format {
        Format::Tsv => render_rows(&Rows { columns, rows }, Format::Tsv)?,
        _ => {
            // one block per scale reads better than a 16-column table
            let mut out = String::new();
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let fields = columns.iter().cloned().zip(row.iter().cloned()).collect();
                out.push_str(&render_fields(fields, Format::Table));
            }
            out
        }
    })
}
