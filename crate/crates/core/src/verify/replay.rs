use std::path::Path;

use crate::bounds::{full_report, BoundReport};
use crate::error::{Error, Result};
use crate::io::{read_json, StoredReport};

/// Largest allowed drift between stored and recomputed slacks.
pub const REPLAY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ReplayOutcome {
    pub report: BoundReport,
    pub entry_name: Option<String>,
    pub stored_slack: Option<f64>,
    pub recomputed_slack: Option<f64>,
    /// Largest `|stored − recomputed|` over all applicable entries.
    pub max_drift: f64,
}

fn invalid(e: Error) -> Error {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::InvariantViolation(_) => e,
        other => Error::InvariantViolation(other.to_string()),
    }
}

/// Re-evaluates a stored report or counterexample from its serialized
/// channel and state alone.
pub fn replay(path: &Path) -> Result<ReplayOutcome> {
    let stored: StoredReport = read_json(path)?;
    replay_stored(&stored)
}

pub fn replay_stored(stored: &StoredReport) -> Result<ReplayOutcome> {
    let e = stored.channel.to_channel().map_err(invalid)?;
    let psi = stored.state.to_state().map_err(invalid)?;
    let report = full_report(&e, &psi).map_err(invalid)?;

    let mut max_drift = 0.0f64;
    for old in &stored.entries {
        let new = report
            .entry(&old.name)
            .ok_or_else(|| Error::Parse(format!("unknown entry {}", old.name)))?;
        if old.applicable != new.applicable {
            return Err(Error::InvariantViolation(format!("applicability of {} changed on replay", old.name)));
        }
        if let (Some(a), Some(b)) = (old.slack, new.slack) {
            max_drift = max_drift.max((a - b).abs());
        }
    }
    if max_drift > REPLAY_TOLERANCE {
        return Err(Error::InvariantViolation(format!(
            "replayed slacks drift by {max_drift:e}"
        )));
    }

    let recomputed_slack = match &stored.entry_name {
        Some(name) => {
            let entry = report
                .entry(name)
                .ok_or_else(|| Error::Parse(format!("unknown entry {name}")))?;
            entry.slack
        }
        None => None,
    };
    if let (Some(a), Some(b)) = (stored.slack, recomputed_slack) {
        if (a - b).abs() > REPLAY_TOLERANCE {
            return Err(Error::InvariantViolation(format!("stored slack {a} replays to {b}")));
        }
    }
    Ok(ReplayOutcome {
        report,
        entry_name: stored.entry_name.clone(),
        stored_slack: stored.slack,
        recomputed_slack,
        max_drift,
    })
}
