//! Seeded Monte Carlo verification, extremal-slack search, and
//! counterexample persistence and replay.
//!
//! # Per-trial seeds
//!
//! Trial `index` of a run with seed `seed` draws from
//! `ChaCha8Rng::seed_from_u64(derive_seed(seed, index))` where
//!
//! ```text
//! splitmix64(z):
//!     z += 0x9E3779B97F4A7C15
//!     z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//! derive_seed(seed, index) = splitmix64(seed ^ splitmix64(index))
//! ```
//!
//! with wrapping 64-bit arithmetic. Trial indices run over the dimensions in
//! configuration order: trial `t` of the `p`-th dimension has index
//! `p * trials_per_dim + t`.

mod monte_carlo;
mod oracle;
mod replay;
mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{Evidence, SLACK_TOLERANCE};
use crate::error::{Error, Result};

pub use monte_carlo::{run_monte_carlo, write_outputs, MonteCarloOutcome, WallStats, SUMMARY_CSV_HEADER};
pub use oracle::{oracle_slack_two_qubit, wootters_by_root_eigenvalues};
pub use replay::{replay, replay_stored, ReplayOutcome, REPLAY_TOLERANCE};
pub use search::{search_extremal, search_extremal_with, SearchConfig, SearchOutcome};

pub fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSource {
    /// Normalized complex Gaussian amplitudes.
    Haar,
    /// Schmidt-form state with flat-Dirichlet weights.
    SchmidtSimplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub dims: Vec<usize>,
    pub trials_per_dim: u64,
    pub seed: u64,
    /// Inclusive Kraus-count range, clamped to `d²` per dimension. `None`
    /// means `1..=d²`.
    pub kraus_range: Option<(usize, usize)>,
    pub state_source: StateSource,
    pub tolerance: f64,
}

impl TrialConfig {
    pub fn new(dims: Vec<usize>, trials_per_dim: u64, seed: u64) -> Self {
        Self {
            dims,
            trials_per_dim,
            seed,
            kraus_range: None,
            state_source: StateSource::Haar,
            tolerance: SLACK_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::BadParameter("dims must be nonempty".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::UnsupportedDimension(d));
        }
        if self.trials_per_dim == 0 {
            return Err(Error::BadParameter("trials_per_dim must be >= 1".into()));
        }
        if let Some((lo, hi)) = self.kraus_range {
            if lo == 0 || lo > hi {
                return Err(Error::BadParameter(format!("bad Kraus range {lo}..={hi}")));
            }
            if let Some(&d) = self.dims.iter().find(|&&d| lo > d * d) {
                return Err(Error::BadParameter(format!("Kraus range starts above d² for d = {d}")));
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance <= 0.0) {
            return Err(Error::BadParameter("tolerance must be finite and <= 0".into()));
        }
        Ok(())
    }

    pub(crate) fn kraus_bounds(&self, d: usize) -> (usize, usize) {
        let (lo, hi) = self.kraus_range.unwrap_or((1, d * d));
        (lo, hi.min(d * d))
    }

    pub fn total_trials(&self) -> u64 {
        self.dims.len() as u64 * self.trials_per_dim
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDescriptor {
    pub kraus_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDescriptor {
    pub source: String,
    pub schmidt_weights: Vec<f64>,
}

/// One evaluated `(channel, state)` pair, reduced to its slacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub derived_seed: u64,
    pub d: usize,
    pub channel: ChannelDescriptor,
    pub state: StateDescriptor,
    pub tau_out: f64,
    pub tau_prime_out: f64,
    /// Slack of every applicable entry.
    pub slacks: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationClass {
    /// Slack in `[tolerance, 0)`.
    NumericalNoise,
    /// Slack below tolerance, confirmed where an independent oracle exists.
    Finding,
    /// Slack below tolerance that the independent oracle did not reproduce.
    Unconfirmed,
}

impl ViolationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationClass::NumericalNoise => "numerical_noise",
            ViolationClass::Finding => "finding",
            ViolationClass::Unconfirmed => "unconfirmed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial_index: u64,
    pub d: usize,
    pub slack: f64,
    pub class: ViolationClass,
    pub evidence: Evidence,
    /// Slack recomputed by the independent two-qubit oracle.
    pub oracle_slack: Option<f64>,
    /// File name of the serialized counterexample.
    pub counterexample: Option<String>,
}

impl Violation {
    /// A finding whose entry is backed by exact or certified concurrences.
    pub fn is_oracle_backed_finding(&self) -> bool {
        self.class == ViolationClass::Finding && self.evidence.is_oracle_backed()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRef {
    pub trial_index: u64,
    pub derived_seed: u64,
    pub d: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntryStats {
    pub count_applicable: u64,
    pub min_slack: Option<f64>,
    pub argmin: Option<TrialRef>,
    pub violations: Vec<Violation>,
}

impl EntryStats {
    /// Commutative, associative merge. Ties in the minimum go to the lower
    /// trial index.
    pub fn merge(mut self, other: EntryStats) -> EntryStats {
        self.count_applicable += other.count_applicable;
        let take_other = match (self.min_slack, self.argmin, other.min_slack, other.argmin) {
            (_, _, None, _) => false,
            (None, _, Some(_), _) => true,
            (Some(a), Some(ra), Some(b), Some(rb)) => b < a || (b == a && rb.trial_index < ra.trial_index),
            _ => false,
        };
        if take_other {
            self.min_slack = other.min_slack;
            self.argmin = other.argmin;
        }
        self.violations.extend(other.violations);
        self.violations.sort_by_key(|v| v.trial_index);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ViolationCounts {
    pub numerical_noise: u64,
    pub findings: u64,
    pub oracle_backed_findings: u64,
    pub reconstruction_findings: u64,
    pub unconfirmed: u64,
}

/// Aggregate result of a run; a pure function of its [`TrialConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub config: TrialConfig,
    pub config_fingerprint: String,
    pub trials: u64,
    /// Largest `τ(out) − τ′(out)` over all trials; nonpositive when the
    /// sandwich ordering holds.
    pub max_sandwich_gap: Option<f64>,
    pub counts: ViolationCounts,
    pub entries: BTreeMap<String, EntryStats>,
}

impl VerificationSummary {
    pub fn has_oracle_backed_findings(&self) -> bool {
        self.counts.oracle_backed_findings > 0
    }

    pub fn violations(&self) -> impl Iterator<Item = (&str, &Violation)> {
        self.entries
            .iter()
            .flat_map(|(name, s)| s.violations.iter().map(move |v| (name.as_str(), v)))
    }

    pub(crate) fn recount(&mut self) {
        let mut c = ViolationCounts::default();
        for (_, v) in self.violations() {
            match v.class {
                ViolationClass::NumericalNoise => c.numerical_noise += 1,
                ViolationClass::Unconfirmed => c.unconfirmed += 1,
                ViolationClass::Finding => {
                    c.findings += 1;
                    if v.evidence.is_oracle_backed() {
                        c.oracle_backed_findings += 1;
                    } else {
                        c.reconstruction_findings += 1;
                    }
                }
            }
        }
        self.counts = c;
    }
}
