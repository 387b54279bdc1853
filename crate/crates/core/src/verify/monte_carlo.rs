use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::oracle_slack_two_qubit;
use super::{
    derive_seed, ChannelDescriptor, EntryStats, StateDescriptor, StateSource, TrialConfig, TrialRecord, TrialRef,
    VerificationSummary, Violation, ViolationClass, ViolationCounts,
};
use crate::bounds::{full_report, ENTRY_NAMES};
use crate::channels::{random_channel_with, QuantumChannel};
use crate::error::{Error, Result};
use crate::io::{fingerprint, write_json, write_json_compact, Counterexample, ReportDocument, ReportMeta};
use crate::states::{random_pure_with, random_simplex_weights, state_from_schmidt_weights, BipartitePureState};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "TANGLEBOUND_THREADS";

pub const SUMMARY_CSV_HEADER: &str =
    "entry_name,count_applicable,min_slack,argmin_trial,numerical_noise,findings,unconfirmed,oracle_backed";

/// Timing of a run, kept out of the summary so summaries stay byte-stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WallStats {
    pub elapsed_secs: f64,
    pub trials_per_sec: f64,
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct MonteCarloOutcome {
    pub summary: VerificationSummary,
    /// `(file name, document)` for every violation below tolerance, in trial
    /// order.
    pub counterexamples: Vec<(String, Counterexample)>,
    pub wall: WallStats,
}

pub(crate) fn sample_trial(
    cfg: &TrialConfig,
    d: usize,
    index: u64,
) -> Result<(u64, QuantumChannel<f64>, BipartitePureState<f64>)> {
    let derived = derive_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(derived);
    let (lo, hi) = cfg.kraus_bounds(d);
    let k = rng.random_range(lo..=hi);
    let e = random_channel_with(&mut rng, d, k)?;
    let psi = match cfg.state_source {
        StateSource::Haar => random_pure_with(&mut rng, d, d)?,
        StateSource::SchmidtSimplex => state_from_schmidt_weights(&random_simplex_weights(&mut rng, d), d)?,
    };
    Ok((derived, e, psi))
}

/// Partial aggregate over a set of trials.
#[derive(Default)]
struct Aggregate {
    trials: u64,
    max_sandwich_gap: Option<f64>,
    entries: BTreeMap<String, EntryStats>,
    /// Keyed by `(trial_index, entry position)`.
    counterexamples: BTreeMap<(u64, usize), Counterexample>,
    error: Option<(u64, String)>,
}

impl Aggregate {
    fn merge(mut self, other: Aggregate) -> Aggregate {
        self.trials += other.trials;
        self.max_sandwich_gap = match (self.max_sandwich_gap, other.max_sandwich_gap) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        for (name, stats) in other.entries {
            let merged = match self.entries.remove(&name) {
                Some(mine) => mine.merge(stats),
                None => stats,
            };
            self.entries.insert(name, merged);
        }
        self.counterexamples.extend(other.counterexamples);
        self.error = match (self.error, other.error) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// A violation with its entry position and, below tolerance, its
/// counterexample document.
type TrialViolation = (usize, Violation, Option<Counterexample>);

/// Evaluates one trial; also returns its record for callers that want it.
pub(crate) fn evaluate_trial(
    cfg: &TrialConfig,
    fingerprint: &str,
    d: usize,
    index: u64,
) -> Result<(TrialRecord, Vec<TrialViolation>)> {
    let (derived, e, psi) = sample_trial(cfg, d, index)?;
    let report = full_report(&e, &psi)?;
    let q = &report.quantities;
    let record = TrialRecord {
        trial_index: index,
        derived_seed: derived,
        d,
        channel: ChannelDescriptor {
            kraus_count: e.kraus().len(),
        },
        state: StateDescriptor {
            source: match cfg.state_source {
                StateSource::Haar => "haar".into(),
                StateSource::SchmidtSimplex => "schmidt_simplex".into(),
            },
            schmidt_weights: q.schmidt_weights.clone(),
        },
        tau_out: q.tau_out,
        tau_prime_out: q.tau_prime_out,
        slacks: report
            .entries
            .iter()
            .filter_map(|en| en.applicable_slack().map(|s| (en.name.clone(), s)))
            .collect(),
    };

    let mut violations = Vec::new();
    for (pos, entry) in report.entries.iter().enumerate() {
        let Some(slack) = entry.applicable_slack() else {
            continue;
        };
        if slack >= 0.0 {
            continue;
        }
        let mut oracle_slack = None;
        let class = if slack >= cfg.tolerance {
            ViolationClass::NumericalNoise
        } else if d == 2 && entry.evidence.is_oracle_backed() {
            oracle_slack = oracle_slack_two_qubit(entry, &e, &psi)?;
            match oracle_slack {
                Some(s) if s >= cfg.tolerance => ViolationClass::Unconfirmed,
                _ => ViolationClass::Finding,
            }
        } else {
            ViolationClass::Finding
        };
        let cx = (class != ViolationClass::NumericalNoise).then(|| {
            let meta = ReportMeta {
                d,
                source: "monte_carlo".into(),
                seed: Some(cfg.seed),
                trial_index: Some(index),
                derived_seed: Some(derived),
            };
            let doc = ReportDocument::new(meta, &e, &psi, report.clone());
            Counterexample::new(doc, &entry.name, slack, class.as_str(), fingerprint)
        });
        violations.push((
            pos,
            Violation {
                trial_index: index,
                d,
                slack,
                class,
                evidence: entry.evidence,
                oracle_slack,
                counterexample: None,
            },
            cx,
        ));
    }
    Ok((record, violations))
}

fn single_trial(cfg: &TrialConfig, fingerprint: &str, d: usize, index: u64) -> Aggregate {
    let mut agg = Aggregate {
        trials: 1,
        ..Aggregate::default()
    };
    let (record, violations) = match evaluate_trial(cfg, fingerprint, d, index) {
        Ok(v) => v,
        Err(err) => {
            agg.error = Some((index, err.to_string()));
            return agg;
        }
    };
    agg.max_sandwich_gap = Some(record.tau_out - record.tau_prime_out);
    let trial_ref = TrialRef {
        trial_index: index,
        derived_seed: record.derived_seed,
        d,
    };
    for (name, &slack) in &record.slacks {
        agg.entries.insert(
            name.clone(),
            EntryStats {
                count_applicable: 1,
                min_slack: Some(slack),
                argmin: Some(trial_ref),
                violations: vec![],
            },
        );
    }
    for (pos, violation, cx) in violations {
        let name = ENTRY_NAMES[pos];
        if let Some(cx) = cx {
            agg.counterexamples.insert((index, pos), cx);
        }
        agg.entries.entry(name.to_string()).or_default().violations.push(violation);
    }
    agg
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::BadParameter(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs every trial of `cfg` in parallel and aggregates the results. The
/// summary and counterexamples do not depend on the thread count.
pub fn run_monte_carlo(cfg: &TrialConfig) -> Result<MonteCarloOutcome> {
    cfg.validate()?;
    let fp = fingerprint(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::BadParameter(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let per_dim = cfg.trials_per_dim;
    let agg = pool.install(|| {
        (0..cfg.total_trials())
            .into_par_iter()
            .map(|index| {
                let d = cfg.dims[(index / per_dim) as usize];
                single_trial(cfg, &fp, d, index)
            })
            .reduce(Aggregate::default, Aggregate::merge)
    });
    let elapsed = start.elapsed().as_secs_f64();
    if let Some((index, msg)) = agg.error {
        return Err(Error::InvariantViolation(format!("trial {index}: {msg}")));
    }

    let mut entries = agg.entries;
    for name in ENTRY_NAMES {
        entries.entry(name.to_string()).or_default();
    }
    let mut counterexamples = Vec::with_capacity(agg.counterexamples.len());
    for (n, ((index, pos), cx)) in agg.counterexamples.into_iter().enumerate() {
        let file = format!("cx_{n:03}.json");
        let stats = entries.get_mut(ENTRY_NAMES[pos]).expect("entry present");
        if let Some(v) = stats.violations.iter_mut().find(|v| v.trial_index == index) {
            v.counterexample = Some(file.clone());
        }
        counterexamples.push((file, cx));
    }

    let mut summary = VerificationSummary {
        config: cfg.clone(),
        config_fingerprint: fp,
        trials: agg.trials,
        max_sandwich_gap: agg.max_sandwich_gap,
        counts: ViolationCounts::default(),
        entries,
    };
    summary.recount();
    Ok(MonteCarloOutcome {
        summary,
        counterexamples,
        wall: WallStats {
            elapsed_secs: elapsed,
            trials_per_sec: agg.trials as f64 / elapsed.max(1e-9),
            threads: pool.current_num_threads(),
        },
    })
}

fn summary_csv(summary: &VerificationSummary) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SUMMARY_CSV_HEADER.split(','))
        .map_err(|e| Error::Parse(e.to_string()))?;
    for (name, s) in &summary.entries {
        let count = |c: ViolationClass| s.violations.iter().filter(|v| v.class == c).count().to_string();
        let oracle_backed = s.violations.iter().filter(|v| v.is_oracle_backed_finding()).count();
        w.write_record([
            name.clone(),
            s.count_applicable.to_string(),
            s.min_slack.map(|x| format!("{x:?}")).unwrap_or_default(),
            s.argmin.map(|r| r.trial_index.to_string()).unwrap_or_default(),
            count(ViolationClass::NumericalNoise),
            count(ViolationClass::Finding),
            count(ViolationClass::Unconfirmed),
            oracle_backed.to_string(),
        ])
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes `summary.json`, `summary.csv` and the counterexample files into
/// `dir`, creating it if needed.
pub fn write_outputs(outcome: &MonteCarloOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("summary.json"), &outcome.summary)?;
    fs::write(dir.join("summary.csv"), summary_csv(&outcome.summary)?)?;
    for (file, cx) in &outcome.counterexamples {
        write_json_compact(&dir.join(file), cx)?;
    }
    Ok(())
}
