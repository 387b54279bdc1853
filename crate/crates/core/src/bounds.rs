//! Every inequality on the output tangle and concurrence, evaluated as a
//! slack-valued predicate on a `(channel, input state)` pair.
//!
//! Notation: `J = (1 ⊗ E)|φ⁺⟩⟨φ⁺|` is the Choi state, `out = (1 ⊗ E)|ψ⟩⟨ψ|`,
//! `ω` the Schmidt weights of `ψ`, and `η_min`, `η_max` the normalized pair
//! products from [`eta_factors`]. The entries are:
//!
//! | name | inequality |
//! |------|------------|
//! | `legacy_lower_tangle` | `τ(out) >= (d²/4)(2dη/(d−1)) τ(J) C²(ψ)` |
//! | `legacy_lower_concurrence` | `C(out) >= (d/2)√(2dη/(d−1)) C(J) C(ψ)`, pure `J` |
//! | `tau_window_lower` | `τ(out) >= (d²/4) η_min τ(J) C²(ψ)` |
//! | `tau_window_upper` | `τ(out) <= (d²/4) η_max τ(J) C²(ψ)` |
//! | `conc_window_lower` | `C(out) >= (d/2)√η_min C(J) C(ψ)`, pure `J` |
//! | `conc_window_upper` | `C(out) <= (d/2)√η_max C(J) C(ψ)`, pure `J` |
//! | `conc_upper` | `C(out) <= (d/2)√η_max C(J) C(ψ)`, any `J` with exact `C(J)` |
//! | `conc_upper_surrogate` | as `conc_upper` with `√τ′(J) >= C(J)` in place of `C(J)` |
//! | `tau_prime_upper` | `τ′(out) <= (d²/4) η_max τ′(J) C²(ψ)` |
//!
//! Slack is `lhs − rhs` for lower bounds and `rhs − lhs` for upper bounds, so
//! a nonnegative slack always means the inequality holds.

use serde::{Deserialize, Serialize};

use crate::channels::{choi_is_pure, QuantumChannel};
use crate::error::{Error, Result};
use crate::measures::{
    concurrence_pure, eta_factors, pair_products, tau_lower, tau_upper, wootters_concurrence, EtaFactors,
};
use crate::states::{schmidt_decompose, BipartitePureState, DensityMatrix};

/// An entry is satisfied when its slack is at least this.
pub const SLACK_TOLERANCE: f64 = -1e-8;
/// Purity threshold for treating Choi and output states as pure.
pub const PURITY_TOLERANCE: f64 = 1e-9;

pub const LEGACY_LOWER_TANGLE: &str = "legacy_lower_tangle";
pub const LEGACY_LOWER_CONCURRENCE: &str = "legacy_lower_concurrence";
pub const TAU_WINDOW_LOWER: &str = "tau_window_lower";
pub const TAU_WINDOW_UPPER: &str = "tau_window_upper";
pub const CONC_WINDOW_LOWER: &str = "conc_window_lower";
pub const CONC_WINDOW_UPPER: &str = "conc_window_upper";
pub const CONC_UPPER: &str = "conc_upper";
pub const CONC_UPPER_SURROGATE: &str = "conc_upper_surrogate";
pub const TAU_PRIME_UPPER: &str = "tau_prime_upper";

/// Entry names in report order.
pub const ENTRY_NAMES: [&str; 9] = [
    LEGACY_LOWER_TANGLE,
    LEGACY_LOWER_CONCURRENCE,
    TAU_WINDOW_LOWER,
    TAU_WINDOW_UPPER,
    CONC_WINDOW_LOWER,
    CONC_WINDOW_UPPER,
    CONC_UPPER,
    CONC_UPPER_SURROGATE,
    TAU_PRIME_UPPER,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// What stands behind the two sides of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    /// Both sides use exact concurrences.
    Exact,
    /// The left side is a certified lower bound on `C(out)` or the right
    /// side a certified over-estimate, so a violation still implies a
    /// violation of the exact inequality.
    CertifiedWeak,
    /// Both sides use the computable `τ`/`τ′` tangles.
    Reconstruction,
}

impl Evidence {
    /// Violations of this entry are genuine counterexamples to the exact
    /// inequality, independent of how `τ`/`τ′` are defined.
    pub fn is_oracle_backed(self) -> bool {
        matches!(self, Evidence::Exact | Evidence::CertifiedWeak)
    }
}

/// How `C(J)` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcurrenceSource {
    PureState,
    Wootters,
    TauPrimeSurrogate,
}

impl ConcurrenceSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ConcurrenceSource::PureState => "pure_state",
            ConcurrenceSource::Wootters => "wootters",
            ConcurrenceSource::TauPrimeSurrogate => "tau_prime_surrogate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub kind: BoundKind,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub slack: Option<f64>,
    pub satisfied: bool,
    pub applicable: bool,
    /// The right side is the trivial bound 0 because some Schmidt weight
    /// vanishes.
    pub trivial: bool,
    pub evidence: Evidence,
    pub note: String,
}

impl BoundEntry {
    fn evaluated(name: &str, kind: BoundKind, lhs: f64, rhs: f64, evidence: Evidence, note: String) -> Self {
        let slack = match kind {
            BoundKind::Lower => lhs - rhs,
            BoundKind::Upper => rhs - lhs,
        };
        Self {
            name: name.to_string(),
            kind,
            lhs: Some(lhs),
            rhs: Some(rhs),
            slack: Some(slack),
            satisfied: slack >= SLACK_TOLERANCE,
            applicable: true,
            trivial: false,
            evidence,
            note,
        }
    }

    fn inapplicable(name: &str, kind: BoundKind, evidence: Evidence, note: &str) -> Self {
        Self {
            name: name.to_string(),
            kind,
            lhs: None,
            rhs: None,
            slack: None,
            satisfied: true,
            applicable: false,
            trivial: false,
            evidence,
            note: note.to_string(),
        }
    }

    /// `rhs − lhs` for upper bounds; `None` for lower bounds or inapplicable
    /// entries.
    pub fn applicable_slack(&self) -> Option<f64> {
        if self.applicable {
            self.slack
        } else {
            None
        }
    }
}

/// Scalar quantities shared by all entries of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantities {
    pub d: usize,
    pub schmidt_weights: Vec<f64>,
    pub c_psi: f64,
    pub choi_purity: f64,
    pub choi_is_pure: bool,
    pub tau_choi: f64,
    pub tau_choi_clamped: f64,
    pub tau_prime_choi: f64,
    pub c_choi_exact: Option<f64>,
    /// Source of the `C(J)` value used in `conc_upper`; the surrogate when no
    /// exact value exists.
    pub c_choi_source: ConcurrenceSource,
    pub output_purity: f64,
    pub tau_out: f64,
    pub tau_out_clamped: f64,
    pub tau_prime_out: f64,
    pub c_out_exact: Option<f64>,
    pub c_out_source: Option<ConcurrenceSource>,
    /// Smallest pair product over all `d` weights, zeros included.
    pub eta_all_pairs: f64,
    pub eta: Option<EtaFactors<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantities: Quantities,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Smallest slack over applicable entries.
    pub fn min_slack(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter_map(BoundEntry::applicable_slack)
            .fold(None, |acc, s| Some(acc.map_or(s, |a: f64| a.min(s))))
    }

    /// Margins by which each η-window lower bound dominates its legacy
    /// counterpart, as `(name, window_rhs − legacy_rhs)`.
    ///
    /// Tangle bounds are compared through their nonnegative parts
    /// `max(0, rhs)`: when `τ(J) < 0` both are vacuous as bounds on a tangle,
    /// and the raw values reverse order because the window coefficient is
    /// the larger one.
    pub fn nesting_margins(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        let pairs = [
            (TAU_WINDOW_LOWER, LEGACY_LOWER_TANGLE, true),
            (CONC_WINDOW_LOWER, LEGACY_LOWER_CONCURRENCE, false),
        ];
        for (window, legacy, clamp) in pairs {
            let (Some(w), Some(l)) = (self.entry(window), self.entry(legacy)) else {
                continue;
            };
            let (Some(wr), Some(lr)) = (w.rhs, l.rhs) else {
                continue;
            };
            let margin = if clamp { wr.max(0.0) - lr.max(0.0) } else { wr - lr };
            out.push((window, margin));
        }
        out
    }
}

/// Everything the entries need, computed once per input pair.
struct Context {
    q: Quantities,
    /// `C(J)` used by `conc_upper` when exact.
    c_choi: Option<f64>,
}

impl Context {
    fn new(e: &QuantumChannel<f64>, psi: &BipartitePureState<f64>) -> Result<Self> {
        let d = e.dim();
        if psi.dim_a() != d || psi.dim_b() != d {
            return Err(Error::DimensionMismatch(format!(
                "channel of dimension {d} with a {}x{} input",
                psi.dim_a(),
                psi.dim_b()
            )));
        }
        let weights = schmidt_decompose(psi)?.weights;
        let c_psi = concurrence_pure(psi)?;
        let choi = e.choi();
        let choi_state = choi.state();
        let choi_purity = choi.purity();
        let pure_choi = choi_is_pure(&choi, PURITY_TOLERANCE);
        let tau_choi = tau_lower(choi_state);
        let tau_prime_choi = tau_upper(choi_state);

        let (c_choi, c_choi_source) = match exact_concurrence(choi_state, pure_choi)? {
            Some((c, src)) => (Some(c), src),
            None => (None, ConcurrenceSource::TauPrimeSurrogate),
        };

        let out = e.apply_to_pure(psi)?;
        let output_purity = out.purity();
        let pure_out = output_purity >= 1.0 - PURITY_TOLERANCE;
        let tau_out = tau_lower(&out);
        let tau_prime_out = tau_upper(&out);
        let c_out = exact_concurrence(&out, pure_out)?;

        let (eta_all_pairs, _, _) = pair_products(&weights);
        let eta = match eta_factors(&weights) {
            Ok(f) => Some(f),
            Err(Error::ProductState) => None,
            Err(other) => return Err(other),
        };

        Ok(Self {
            q: Quantities {
                d,
                schmidt_weights: weights,
                c_psi,
                choi_purity,
                choi_is_pure: pure_choi,
                tau_choi,
                tau_choi_clamped: tau_choi.max(0.0),
                tau_prime_choi,
                c_choi_exact: c_choi,
                c_choi_source,
                output_purity,
                tau_out,
                tau_out_clamped: tau_out.max(0.0),
                tau_prime_out,
                c_out_exact: c_out.map(|(c, _)| c),
                c_out_source: c_out.map(|(_, s)| s),
                eta_all_pairs,
                eta,
            },
            c_choi,
        })
    }

    fn d(&self) -> f64 {
        self.q.d as f64
    }

    fn c_psi_sq(&self) -> f64 {
        self.q.c_psi * self.q.c_psi
    }

    /// `2dη/(d−1)` with η over all pairs.
    fn legacy_factor(&self) -> f64 {
        2.0 * self.d() * self.q.eta_all_pairs / (self.d() - 1.0)
    }

    fn legacy_trivial(&self) -> bool {
        self.q.eta_all_pairs == 0.0
    }

    fn legacy_tangle(&self) -> BoundEntry {
        let lhs = self.q.tau_out;
        if self.legacy_trivial() {
            let mut entry = BoundEntry::evaluated(
                LEGACY_LOWER_TANGLE,
                BoundKind::Lower,
                lhs,
                0.0,
                Evidence::Reconstruction,
                "eta = 0: some Schmidt weight vanishes, bound is trivial".into(),
            );
            entry.trivial = true;
            return entry;
        }
        let d = self.d();
        let rhs = d * d / 4.0 * self.legacy_factor() * self.q.tau_choi * self.c_psi_sq();
        BoundEntry::evaluated(
            LEGACY_LOWER_TANGLE,
            BoundKind::Lower,
            lhs,
            rhs,
            Evidence::Reconstruction,
            String::new(),
        )
    }

    fn legacy_concurrence(&self) -> BoundEntry {
        let Some((c_out, c_choi)) = self.pure_choi_values() else {
            return BoundEntry::inapplicable(
                LEGACY_LOWER_CONCURRENCE,
                BoundKind::Lower,
                Evidence::Exact,
                "Choi state is mixed",
            );
        };
        if self.legacy_trivial() {
            let mut entry = BoundEntry::evaluated(
                LEGACY_LOWER_CONCURRENCE,
                BoundKind::Lower,
                c_out,
                0.0,
                Evidence::Exact,
                "eta = 0: some Schmidt weight vanishes, bound is trivial".into(),
            );
            entry.trivial = true;
            return entry;
        }
        let rhs = self.d() / 2.0 * self.legacy_factor().sqrt() * c_choi * self.q.c_psi;
        BoundEntry::evaluated(
            LEGACY_LOWER_CONCURRENCE,
            BoundKind::Lower,
            c_out,
            rhs,
            Evidence::Exact,
            String::new(),
        )
    }

    /// Exact `(C(out), C(J))` when the Choi state is pure.
    fn pure_choi_values(&self) -> Option<(f64, f64)> {
        if !self.q.choi_is_pure {
            return None;
        }
        Some((self.q.c_out_exact?, self.c_choi?))
    }

    fn tau_window(&self) -> (BoundEntry, BoundEntry) {
        let Some(eta) = self.q.eta else {
            let note = "product input: eta_min/eta_max undefined";
            return (
                BoundEntry::inapplicable(TAU_WINDOW_LOWER, BoundKind::Lower, Evidence::Reconstruction, note),
                BoundEntry::inapplicable(TAU_WINDOW_UPPER, BoundKind::Upper, Evidence::Reconstruction, note),
            );
        };
        let d = self.d();
        let base = d * d / 4.0 * self.q.tau_choi * self.c_psi_sq();
        let lhs = self.q.tau_out;
        (
            BoundEntry::evaluated(
                TAU_WINDOW_LOWER,
                BoundKind::Lower,
                lhs,
                base * eta.eta_min,
                Evidence::Reconstruction,
                String::new(),
            ),
            BoundEntry::evaluated(
                TAU_WINDOW_UPPER,
                BoundKind::Upper,
                lhs,
                base * eta.eta_max,
                Evidence::Reconstruction,
                String::new(),
            ),
        )
    }

    fn conc_window(&self) -> (BoundEntry, BoundEntry) {
        let inapplicable = |note: &str| {
            (
                BoundEntry::inapplicable(CONC_WINDOW_LOWER, BoundKind::Lower, Evidence::Exact, note),
                BoundEntry::inapplicable(CONC_WINDOW_UPPER, BoundKind::Upper, Evidence::Exact, note),
            )
        };
        let Some(eta) = self.q.eta else {
            return inapplicable("product input: eta_min/eta_max undefined");
        };
        let Some((c_out, c_choi)) = self.pure_choi_values() else {
            return inapplicable("Choi state is mixed");
        };
        let base = self.d() / 2.0 * c_choi * self.q.c_psi;
        (
            BoundEntry::evaluated(
                CONC_WINDOW_LOWER,
                BoundKind::Lower,
                c_out,
                base * eta.eta_min.sqrt(),
                Evidence::Exact,
                String::new(),
            ),
            BoundEntry::evaluated(
                CONC_WINDOW_UPPER,
                BoundKind::Upper,
                c_out,
                base * eta.eta_max.sqrt(),
                Evidence::Exact,
                String::new(),
            ),
        )
    }

    /// Exact `C(out)` when available, else the certified lower bound
    /// `√max(0, τ(out))`.
    fn c_out_or_certified(&self) -> (f64, bool, String) {
        match (self.q.c_out_exact, self.q.c_out_source) {
            (Some(c), Some(src)) => (c, true, format!("C(out) from {}", src.as_str())),
            _ => (
                self.q.tau_out_clamped.sqrt(),
                false,
                "certified-weak: lhs is sqrt(max(0, tau(out))) <= C(out)".into(),
            ),
        }
    }

    fn conc_upper(&self) -> BoundEntry {
        let Some(eta) = self.q.eta else {
            return BoundEntry::inapplicable(
                CONC_UPPER,
                BoundKind::Upper,
                Evidence::Exact,
                "product input: eta_max undefined",
            );
        };
        let Some(c_choi) = self.c_choi else {
            return BoundEntry::inapplicable(
                CONC_UPPER,
                BoundKind::Upper,
                Evidence::Exact,
                "no exact C(J); see conc_upper_surrogate",
            );
        };
        let (lhs, exact, lhs_note) = self.c_out_or_certified();
        let rhs = self.d() / 2.0 * eta.eta_max.sqrt() * c_choi * self.q.c_psi;
        let evidence = if exact { Evidence::Exact } else { Evidence::CertifiedWeak };
        BoundEntry::evaluated(
            CONC_UPPER,
            BoundKind::Upper,
            lhs,
            rhs,
            evidence,
            format!("C(J) from {}; {lhs_note}", self.q.c_choi_source.as_str()),
        )
    }

    fn conc_upper_surrogate(&self) -> BoundEntry {
        let Some(eta) = self.q.eta else {
            return BoundEntry::inapplicable(
                CONC_UPPER_SURROGATE,
                BoundKind::Upper,
                Evidence::CertifiedWeak,
                "product input: eta_max undefined",
            );
        };
        let (lhs, _, lhs_note) = self.c_out_or_certified();
        let rhs = self.d() / 2.0 * eta.eta_max.sqrt() * self.q.tau_prime_choi.sqrt() * self.q.c_psi;
        BoundEntry::evaluated(
            CONC_UPPER_SURROGATE,
            BoundKind::Upper,
            lhs,
            rhs,
            Evidence::CertifiedWeak,
            format!("C(J) replaced by sqrt(tau'(J)); {lhs_note}"),
        )
    }

    fn tau_prime_upper(&self) -> BoundEntry {
        let Some(eta) = self.q.eta else {
            return BoundEntry::inapplicable(
                TAU_PRIME_UPPER,
                BoundKind::Upper,
                Evidence::Reconstruction,
                "product input: eta_max undefined",
            );
        };
        let d = self.d();
        let rhs = d * d / 4.0 * eta.eta_max * self.q.tau_prime_choi * self.c_psi_sq();
        BoundEntry::evaluated(
            TAU_PRIME_UPPER,
            BoundKind::Upper,
            self.q.tau_prime_out,
            rhs,
            Evidence::Reconstruction,
            String::new(),
        )
    }
}

/// Exact concurrence of a state: from its dominant eigenvector when pure,
/// else by Wootters' formula for two qubits.
fn exact_concurrence(rho: &DensityMatrix<f64>, pure: bool) -> Result<Option<(f64, ConcurrenceSource)>> {
    if pure {
        let c = concurrence_pure(&rho.dominant_state()?)?;
        return Ok(Some((c, ConcurrenceSource::PureState)));
    }
    if rho.dim_a() == 2 && rho.dim_b() == 2 {
        return Ok(Some((wootters_concurrence(rho)?, ConcurrenceSource::Wootters)));
    }
    Ok(None)
}

/// Legacy lower bound, tangle form first and concurrence form second.
pub fn eval_legacy_lower(e: &QuantumChannel<f64>, psi: &BipartitePureState<f64>) -> Result<(BoundEntry, BoundEntry)> {
    let ctx = Context::new(e, psi)?;
    Ok((ctx.legacy_tangle(), ctx.legacy_concurrence()))
}

pub fn eval_tau_window(e: &QuantumChannel<f64>, psi: &BipartitePureState<f64>) -> Result<(BoundEntry, BoundEntry)> {
    Ok(Context::new(e, psi)?.tau_window())
}

pub fn eval_conc_window_pure_choi(
    e: &QuantumChannel<f64>,
    psi: &BipartitePureState<f64>,
) -> Result<(BoundEntry, BoundEntry)> {
    Ok(Context::new(e, psi)?.conc_window())
}

/// The exact-`C(J)` entry and its `√τ′(J)` surrogate.
pub fn eval_conc_upper(e: &QuantumChannel<f64>, psi: &BipartitePureState<f64>) -> Result<(BoundEntry, BoundEntry)> {
    let ctx = Context::new(e, psi)?;
    Ok((ctx.conc_upper(), ctx.conc_upper_surrogate()))
}

pub fn eval_tau_prime_upper(e: &QuantumChannel<f64>, psi: &BipartitePureState<f64>) -> Result<BoundEntry> {
    Ok(Context::new(e, psi)?.tau_prime_upper())
}

/// All entries, in [`ENTRY_NAMES`] order.
pub fn full_report(e: &QuantumChannel<f64>, psi: &BipartitePureState<f64>) -> Result<BoundReport> {
    let ctx = Context::new(e, psi)?;
    let (tw_lo, tw_hi) = ctx.tau_window();
    let (cw_lo, cw_hi) = ctx.conc_window();
    let entries = vec![
        ctx.legacy_tangle(),
        ctx.legacy_concurrence(),
        tw_lo,
        tw_hi,
        cw_lo,
        cw_hi,
        ctx.conc_upper(),
        ctx.conc_upper_surrogate(),
        ctx.tau_prime_upper(),
    ];
    Ok(BoundReport {
        quantities: ctx.q,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_standard, random_channel, ChannelFamily};
    use crate::states::{random_pure, state_from_schmidt_weights};

    type Ch = QuantumChannel<f64>;

    fn schmidt(w: &[f64], d: usize) -> BipartitePureState<f64> {
        state_from_schmidt_weights(w, d).unwrap()
    }

    #[test]
    fn legacy_trivial_when_a_weight_vanishes() {
        for e in [Ch::identity(3).unwrap(), random_channel(3, 4, 1).unwrap()] {
            let (t, c) = eval_legacy_lower(&e, &schmidt(&[0.5, 0.5, 0.0], 3)).unwrap();
            assert!(t.trivial);
            assert_eq!(t.rhs, Some(0.0));
            if c.applicable {
                assert!(c.trivial);
                assert_eq!(c.rhs, Some(0.0));
            }
        }
    }

    #[test]
    fn legacy_concurrence_qubit_identity() {
        let (_, c) = eval_legacy_lower(&Ch::identity(2).unwrap(), &schmidt(&[0.8, 0.2], 2)).unwrap();
        // √(4·0.16)·1·0.8 = 0.64 and C(out) = C(ψ) = 0.8
        assert!((c.rhs.unwrap() - 0.64).abs() < 1e-12);
        assert!((c.lhs.unwrap() - 0.8).abs() < 1e-12);
        assert!(c.satisfied);
    }

    #[test]
    fn legacy_concurrence_equality_at_phi_plus() {
        let (_, c) = eval_legacy_lower(&Ch::identity(3).unwrap(), &BipartitePureState::phi_plus(3).unwrap()).unwrap();
        let expected = 2.0 / 3.0f64.sqrt();
        assert!((c.rhs.unwrap() - expected).abs() < 1e-12);
        assert!(c.slack.unwrap().abs() <= 1e-9);
    }

    #[test]
    fn tau_window_worked_example() {
        let (lo, hi) = eval_tau_window(&Ch::identity(3).unwrap(), &schmidt(&[0.5, 0.3, 0.2], 3)).unwrap();
        // 2d(d−1) × smallest / largest pair product, times τ(J)C²(ψ)/(C²(ψ)·...) reduces to 9·p·4/3
        assert!((lo.rhs.unwrap() - 9.0 * 0.06 * 4.0 / 3.0).abs() < 1e-12);
        assert!((hi.rhs.unwrap() - 9.0 * 0.15 * 4.0 / 3.0).abs() < 1e-12);
        assert!((lo.rhs.unwrap() - 0.72).abs() < 1e-6);
        assert!((hi.rhs.unwrap() - 1.80).abs() < 1e-6);
        assert!((lo.lhs.unwrap() - 1.24).abs() < 1e-12);
        assert!(lo.satisfied && hi.satisfied);
    }

    #[test]
    fn tau_window_collapses_at_phi_plus() {
        for d in 2..=4 {
            let phi = BipartitePureState::phi_plus(d).unwrap();
            let e = random_channel(d, d, 5).unwrap();
            let (lo, hi) = eval_tau_window(&e, &phi).unwrap();
            assert!((hi.rhs.unwrap() - lo.rhs.unwrap()).abs() <= 1e-9);
            assert!(lo.slack.unwrap().abs() <= 1e-9 && hi.slack.unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn conc_window_for_unitary_channels() {
        let u = make_standard(ChannelFamily::Unitary, 3, &[0.1, 0.4, -0.3, 0.2, -0.7, 0.5, 0.9, 0.3, 0.0]).unwrap();
        let (lo, hi) = eval_conc_window_pure_choi(&u, &schmidt(&[0.5, 0.3, 0.2], 3)).unwrap();
        // C(J)²C²(ψ) = (4/3)(1.24) and pair_sum = 0.31, so the endpoints are
        // (3/2)√(16η/3) with η = 0.06 and 0.15
        assert!((lo.rhs.unwrap() - 1.5 * 0.32f64.sqrt()).abs() < 1e-12);
        assert!((hi.rhs.unwrap() - 1.5 * 0.8f64.sqrt()).abs() < 1e-12);
        assert!((lo.rhs.unwrap() - 0.848528).abs() < 1e-6);
        assert!((hi.rhs.unwrap() - 1.341641).abs() < 1e-6);
        assert!((lo.lhs.unwrap() - 1.113553).abs() < 1e-6);
        let (up, _) = eval_conc_upper(&u, &schmidt(&[0.5, 0.3, 0.2], 3)).unwrap();
        assert!((up.rhs.unwrap() - hi.rhs.unwrap()).abs() <= 1e-12);
        assert_eq!(up.evidence, Evidence::Exact);
    }

    #[test]
    fn conc_window_inapplicable_for_mixed_choi() {
        let e = make_standard(ChannelFamily::Depolarizing, 2, &[0.5]).unwrap();
        let (lo, hi) = eval_conc_window_pure_choi(&e, &schmidt(&[0.7, 0.3], 2)).unwrap();
        assert!(!lo.applicable && !hi.applicable);
    }

    #[test]
    fn amplitude_damping_factorization() {
        let e = make_standard(ChannelFamily::AmplitudeDamping, 2, &[0.5]).unwrap();
        let (up, _) = eval_conc_upper(&e, &schmidt(&[0.8, 0.2], 2)).unwrap();
        assert!((up.lhs.unwrap() - 0.565685).abs() < 1e-6);
        assert!((up.rhs.unwrap() - 0.5f64.sqrt() * 0.8).abs() < 1e-12);
        assert!(up.slack.unwrap().abs() <= 1e-8);
    }

    #[test]
    fn depolarizing_conc_upper_over_random_inputs() {
        let e = make_standard(ChannelFamily::Depolarizing, 2, &[0.2]).unwrap();
        for seed in 0..1000 {
            let psi = random_pure(2, 2, seed).unwrap();
            let r = full_report(&e, &psi).unwrap();
            assert!((r.quantities.c_choi_exact.unwrap() - 0.7).abs() < 1e-12);
            let up = r.entry(CONC_UPPER).unwrap();
            assert!((up.rhs.unwrap() - 0.7 * r.quantities.c_psi).abs() < 1e-12);
            assert!(up.slack.unwrap() >= -1e-8, "seed {seed}");
        }
    }

    #[test]
    fn tau_prime_examples() {
        let e = Ch::identity(3).unwrap();
        let t = eval_tau_prime_upper(&e, &schmidt(&[0.5, 0.3, 0.2], 3)).unwrap();
        assert!((t.lhs.unwrap() - 1.24).abs() < 1e-12);
        assert!((t.rhs.unwrap() - 1.8).abs() < 1e-12);
        let deph = make_standard(ChannelFamily::Dephasing, 2, &[1.0]).unwrap();
        let t = eval_tau_prime_upper(&deph, &schmidt(&[0.5, 0.5], 2)).unwrap();
        assert!((t.lhs.unwrap() - 1.0).abs() < 1e-12);
        assert!(t.slack.unwrap().abs() < 1e-12);
    }

    #[test]
    fn product_inputs_short_circuit() {
        let e = random_channel(3, 2, 9).unwrap();
        let r = full_report(&e, &schmidt(&[1.0], 3)).unwrap();
        assert!(r.quantities.eta.is_none());
        for name in [TAU_WINDOW_LOWER, TAU_WINDOW_UPPER, CONC_UPPER, CONC_UPPER_SURROGATE, TAU_PRIME_UPPER] {
            assert!(!r.entry(name).unwrap().applicable, "{name}");
        }
        assert!(r.entry(LEGACY_LOWER_TANGLE).unwrap().trivial);
    }

    #[test]
    fn identity_bell_report_is_all_equalities() {
        let r = full_report(&Ch::identity(2).unwrap(), &BipartitePureState::phi_plus(2).unwrap()).unwrap();
        for entry in r.entries.iter().filter(|e| e.applicable) {
            assert!(entry.slack.unwrap().abs() <= 1e-9, "{}", entry.name);
        }
        assert_eq!(r.entries.len(), ENTRY_NAMES.len());
    }

    #[test]
    fn mismatched_dimensions_error() {
        let e = Ch::identity(2).unwrap();
        assert!(matches!(
            full_report(&e, &random_pure(3, 3, 0).unwrap()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mixed_choi_at_d3_uses_surrogate() {
        let e = make_standard(ChannelFamily::Depolarizing, 3, &[0.3]).unwrap();
        let r = full_report(&e, &schmidt(&[0.5, 0.3, 0.2], 3)).unwrap();
        assert!(!r.entry(CONC_UPPER).unwrap().applicable);
        let s = r.entry(CONC_UPPER_SURROGATE).unwrap();
        assert!(s.applicable);
        assert_eq!(r.quantities.c_choi_source, ConcurrenceSource::TauPrimeSurrogate);
        assert!(s.note.contains("certified-weak"));
    }
}
