use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tanglebound::bounds::{
    full_report, BoundReport, CONC_UPPER, CONC_UPPER_SURROGATE, CONC_WINDOW_LOWER, CONC_WINDOW_UPPER,
    TAU_PRIME_UPPER, TAU_WINDOW_LOWER, TAU_WINDOW_UPPER,
};
use tanglebound::io::{to_json_string, write_json, Counterexample, ReportDocument, ReportMeta};
use tanglebound::verify::{
    replay, run_monte_carlo, search_extremal_with, write_outputs, SearchConfig, StateSource, TrialConfig,
    ViolationClass,
};

use crate::spec::{channel_from_params, parse_channel, parse_range, parse_state};
use crate::{CliError, Outcome};

pub const EVAL_CSV_HEADER: [&str; 10] =
    ["name", "kind", "applicable", "satisfied", "trivial", "evidence", "lhs", "rhs", "slack", "note"];

pub const SWEEP_CSV_HEADER: [&str; 16] = [
    "param",
    "d",
    "C_psi",
    "tau_J",
    "tau_prime_J",
    "C_J_source",
    "lower_disp1",
    "tau_out",
    "upper_disp1",
    "lower_disp2",
    "C_out",
    "upper_disp2",
    "rhs_disp3",
    "rhs_disp4",
    "tau_prime_out",
    "min_slack",
];

fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Input(format!("stdout: {e}")))
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    emit(&to_json_string(value)?)
}

/// Shortest round-trip form, switching to exponent notation for very small
/// and very large magnitudes.
fn real(x: f64) -> String {
    format!("{x:?}")
}

fn num(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// The serde name of a unit enum variant.
fn label<T: Serialize>(v: T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>, header: &[&str]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn eval(dim: usize, channel: &str, state: &str, format: Format) -> Result<Outcome, CliError> {
    let e = parse_channel(channel, dim)?;
    let psi = parse_state(state, dim)?;
    let meta = ReportMeta {
        d: dim,
        source: "eval".into(),
        ..ReportMeta::default()
    };
    let doc = ReportDocument::evaluate(meta, &e, &psi)?;
    match format {
        Format::Json => emit_json(&doc)?,
        Format::Csv => {
            let rows = doc.entries.iter().map(|en| {
                vec![
                    en.name.clone(),
                    label(en.kind),
                    en.applicable.to_string(),
                    en.satisfied.to_string(),
                    en.trivial.to_string(),
                    label(en.evidence),
                    num(en.lhs),
                    num(en.rhs),
                    num(en.slack),
                    en.note.clone(),
                ]
            });
            emit(&csv_string(rows, &EVAL_CSV_HEADER)?)?;
        }
    }
    Ok(Outcome::Success)
}

fn rhs(report: &BoundReport, name: &str) -> Option<f64> {
    report.entry(name).filter(|e| e.applicable).and_then(|e| e.rhs)
}

fn sweep_row(param: f64, report: &BoundReport) -> Vec<String> {
    let q = &report.quantities;
    let disp3 = rhs(report, CONC_UPPER).or_else(|| rhs(report, CONC_UPPER_SURROGATE));
    vec![
        real(param),
        q.d.to_string(),
        real(q.c_psi),
        real(q.tau_choi),
        real(q.tau_prime_choi),
        q.c_choi_source.as_str().to_string(),
        num(rhs(report, TAU_WINDOW_LOWER)),
        real(q.tau_out),
        num(rhs(report, TAU_WINDOW_UPPER)),
        num(rhs(report, CONC_WINDOW_LOWER)),
        num(q.c_out_exact),
        num(rhs(report, CONC_WINDOW_UPPER)),
        num(disp3),
        num(rhs(report, TAU_PRIME_UPPER)),
        real(q.tau_prime_out),
        num(report.min_slack()),
    ]
}

/// The swept value is the first channel parameter, followed by any fixed
/// parameters given after the family name.
pub fn sweep(dim: usize, channel: &str, param: &str, state: &str) -> Result<Outcome, CliError> {
    let (name, fixed) = channel.split_once(':').unwrap_or((channel, ""));
    let fixed: Vec<f64> = if fixed.is_empty() {
        Vec::new()
    } else {
        fixed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("--channel: cannot parse '{p}'")))
            })
            .collect::<Result<_, _>>()?
    };
    let values = parse_range(param)?;
    let psi = parse_state(state, dim)?;
    let mut rows = Vec::with_capacity(values.len());
    for v in values {
        let mut params = vec![v];
        params.extend_from_slice(&fixed);
        let e = channel_from_params(name, &params, dim)?;
        rows.push(sweep_row(v, &full_report(&e, &psi)?));
    }
    emit(&csv_string(rows, &SWEEP_CSV_HEADER)?)?;
    Ok(Outcome::Success)
}

pub struct VerifyArgs {
    pub dims: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub kraus_range: Option<(usize, usize)>,
    pub state_source: StateSource,
    pub out_dir: PathBuf,
}

pub fn verify(args: VerifyArgs) -> Result<Outcome, CliError> {
    let mut cfg = TrialConfig::new(args.dims, args.trials, args.seed);
    cfg.tolerance = args.tolerance;
    cfg.kraus_range = args.kraus_range;
    cfg.state_source = args.state_source;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let outcome = run_monte_carlo(&cfg)?;
    write_outputs(&outcome, &args.out_dir).map_err(|e| CliError::Input(format!("{}: {e}", args.out_dir.display())))?;
    let c = &outcome.summary.counts;
    eprintln!(
        "{} trials in {:.3} s ({:.1}/s, {} threads); findings {} (oracle-backed {}, reconstruction {}), noise {}, unconfirmed {}; wrote {}",
        outcome.summary.trials,
        outcome.wall.elapsed_secs,
        outcome.wall.trials_per_sec,
        outcome.wall.threads,
        c.findings,
        c.oracle_backed_findings,
        c.reconstruction_findings,
        c.numerical_noise,
        c.unconfirmed,
        args.out_dir.display()
    );
    emit_json(&outcome.summary)?;
    Ok(if outcome.summary.has_oracle_backed_findings() {
        Outcome::Finding
    } else {
        Outcome::Success
    })
}

pub fn search(cfg: SearchConfig, out_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let outcome = search_extremal_with(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(dir) = out_dir {
        let io_err = |e: tanglebound::Error| CliError::Input(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        write_json(&dir.join("search.json"), &outcome).map_err(io_err)?;
        if matches!(outcome.class, Some(ViolationClass::Finding | ViolationClass::Unconfirmed)) {
            let fp = tanglebound::io::fingerprint(&cfg)?;
            let cx = Counterexample::new(
                outcome.document.clone(),
                &cfg.entry_name,
                outcome.best_slack,
                outcome.class.map(ViolationClass::as_str).unwrap_or_default(),
                &fp,
            );
            write_json(&dir.join("cx_000.json"), &cx).map_err(io_err)?;
        }
    }
    emit_json(&outcome)?;
    Ok(if outcome.is_oracle_backed_finding() {
        Outcome::Finding
    } else {
        Outcome::Success
    })
}

#[derive(Serialize)]
struct ReplayPrintout<'a> {
    file: String,
    entry_name: Option<&'a str>,
    stored_slack: Option<f64>,
    recomputed_slack: Option<f64>,
    max_drift: f64,
    entries: &'a [tanglebound::BoundEntry],
}

pub fn replay_file(path: &Path) -> Result<Outcome, CliError> {
    let out = replay(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    emit_json(&ReplayPrintout {
        file: path.display().to_string(),
        entry_name: out.entry_name.as_deref(),
        stored_slack: out.stored_slack,
        recomputed_slack: out.recomputed_slack,
        max_drift: out.max_drift,
        entries: &out.report.entries,
    })?;
    Ok(Outcome::Success)
}
