//! JSON documents for states, channels, reports and counterexamples.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major. Floats
//! are written in shortest round-trip form, so a value read back is
//! bit-identical to the value written. Structs serialize fields in
//! declaration order, which keeps the output byte-stable.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{full_report, BoundEntry, BoundReport, Quantities};
use crate::channels::QuantumChannel;
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::states::{BipartitePureState, DensityMatrix};

pub type ComplexPair = [f64; 2];

fn pairs(values: &[Complex<f64>]) -> Vec<ComplexPair> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(values: &[ComplexPair]) -> Vec<Complex<f64>> {
    values.iter().map(|&[re, im]| Complex::new(re, im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim_a: usize,
    pub dim_b: usize,
    pub amplitudes: Vec<ComplexPair>,
}

impl From<&BipartitePureState<f64>> for StateJson {
    fn from(psi: &BipartitePureState<f64>) -> Self {
        Self {
            dim_a: psi.dim_a(),
            dim_b: psi.dim_b(),
            amplitudes: pairs(psi.amplitudes()),
        }
    }
}

impl StateJson {
    pub fn to_state(&self) -> Result<BipartitePureState<f64>> {
        BipartitePureState::new(self.dim_a, self.dim_b, complexes(&self.amplitudes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim: usize,
    pub kraus: Vec<Vec<ComplexPair>>,
}

impl From<&QuantumChannel<f64>> for ChannelJson {
    fn from(e: &QuantumChannel<f64>) -> Self {
        Self {
            dim: e.dim(),
            kraus: e.kraus().iter().map(|k| pairs(k.data())).collect(),
        }
    }
}

impl ChannelJson {
    /// Rebuilds the channel, rejecting non-CPTP Kraus sets with
    /// [`Error::InvariantViolation`].
    pub fn to_channel(&self) -> Result<QuantumChannel<f64>> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| ComplexMatrix::new(self.dim, self.dim, complexes(k)))
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(self.dim, kraus)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: Vec<ComplexPair>,
}

impl From<&DensityMatrix<f64>> for DensityJson {
    fn from(rho: &DensityMatrix<f64>) -> Self {
        Self {
            dim_a: rho.dim_a(),
            dim_b: rho.dim_b(),
            matrix: pairs(rho.matrix().data()),
        }
    }
}

impl DensityJson {
    pub fn to_density(&self) -> Result<DensityMatrix<f64>> {
        let n = self.dim_a * self.dim_b;
        DensityMatrix::new(self.dim_a, self.dim_b, ComplexMatrix::new(n, n, complexes(&self.matrix))?)
    }
}

/// Provenance of a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub d: usize,
    pub source: String,
    pub seed: Option<u64>,
    pub trial_index: Option<u64>,
    pub derived_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub meta: ReportMeta,
    pub channel: ChannelJson,
    pub state: StateJson,
    pub quantities: Quantities,
    pub entries: Vec<BoundEntry>,
}

impl ReportDocument {
    pub fn new(
        meta: ReportMeta,
        e: &QuantumChannel<f64>,
        psi: &BipartitePureState<f64>,
        report: BoundReport,
    ) -> Self {
        Self {
            meta,
            channel: e.into(),
            state: psi.into(),
            quantities: report.quantities,
            entries: report.entries,
        }
    }

    pub fn evaluate(meta: ReportMeta, e: &QuantumChannel<f64>, psi: &BipartitePureState<f64>) -> Result<Self> {
        let report = full_report(e, psi)?;
        Ok(Self::new(meta, e, psi, report))
    }

    pub fn report(&self) -> BoundReport {
        BoundReport {
            quantities: self.quantities.clone(),
            entries: self.entries.clone(),
        }
    }
}

/// A report singled out because one entry's slack fell below tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub entry_name: String,
    pub slack: f64,
    pub classification: String,
    pub config_fingerprint: String,
    pub meta: ReportMeta,
    pub channel: ChannelJson,
    pub state: StateJson,
    pub quantities: Quantities,
    pub entries: Vec<BoundEntry>,
}

impl Counterexample {
    pub fn new(doc: ReportDocument, entry_name: &str, slack: f64, classification: &str, fingerprint: &str) -> Self {
        Self {
            entry_name: entry_name.to_string(),
            slack,
            classification: classification.to_string(),
            config_fingerprint: fingerprint.to_string(),
            meta: doc.meta,
            channel: doc.channel,
            state: doc.state,
            quantities: doc.quantities,
            entries: doc.entries,
        }
    }
}

/// The fields replay needs from either a [`ReportDocument`] or a
/// [`Counterexample`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StoredReport {
    #[serde(default)]
    pub entry_name: Option<String>,
    #[serde(default)]
    pub slack: Option<f64>,
    pub channel: ChannelJson,
    pub state: StateJson,
    pub entries: Vec<BoundEntry>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

/// Single-line JSON with a trailing newline.
pub fn write_json_compact<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// First 16 hex digits of the SHA-256 of the compact JSON encoding.
pub fn fingerprint<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    let digest = Sha256::digest(&bytes);
    Ok(hex::encode(digest)[..16].to_string())
}

/// Parses a JSON state file into a pure state.
pub fn read_state(path: &Path) -> Result<BipartitePureState<f64>> {
    read_json::<StateJson>(path)?.to_state()
}
