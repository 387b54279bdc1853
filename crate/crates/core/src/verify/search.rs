//! Random-restart Nelder–Mead minimization of an entry's slack.
//!
//! The parameter vector is laid out as
//!
//! * `(dk)²` reals for a Hermitian `H` on `C^(dk)`; the Stinespring
//!   isometry is the first `d` columns of `exp(iH)`;
//! * `d` logits whose softmax gives the Schmidt weights;
//! * `d²` + `d²` reals for local unitaries `exp(iH_A)`, `exp(iH_B)`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::oracle::oracle_slack_two_qubit;
use super::{derive_seed, ChannelDescriptor, StateDescriptor, TrialRecord, ViolationClass};
use crate::bounds::{
    full_report, Evidence, CONC_UPPER, CONC_WINDOW_LOWER, CONC_WINDOW_UPPER, ENTRY_NAMES, LEGACY_LOWER_CONCURRENCE,
    SLACK_TOLERANCE,
};
use crate::channels::{hermitian_from_params, QuantumChannel};
use crate::error::{Error, Result};
use crate::io::{ReportDocument, ReportMeta};
use crate::linalg::{expm_i_hermitian, ComplexMatrix};
use crate::states::{state_from_schmidt_weights, BipartitePureState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub entry_name: String,
    pub d: usize,
    /// Total objective evaluations across all restarts.
    pub budget: usize,
    pub seed: u64,
    /// Kraus count of the parametrized channel; `None` picks 1 for entries
    /// that need a pure Choi state and 2 otherwise.
    pub kraus_count: Option<usize>,
    pub steps_per_restart: usize,
    pub initial_step: f64,
    pub tolerance: f64,
}

impl SearchConfig {
    pub fn new(entry_name: &str, d: usize, budget: usize, seed: u64) -> Self {
        Self {
            entry_name: entry_name.to_string(),
            d,
            budget,
            seed,
            kraus_count: None,
            steps_per_restart: 50,
            initial_step: 0.5,
            tolerance: SLACK_TOLERANCE,
        }
    }

    fn validate(&self) -> Result<()> {
        if !ENTRY_NAMES.contains(&self.entry_name.as_str()) {
            return Err(Error::BadParameter(format!("unknown entry {}", self.entry_name)));
        }
        if self.d < 2 {
            return Err(Error::BadParameter(format!("dimension {} < 2", self.d)));
        }
        if self.budget == 0 {
            return Err(Error::BadParameter("budget must be >= 1".into()));
        }
        if let Some(k) = self.kraus_count {
            if k == 0 || k > self.d * self.d {
                return Err(Error::BadParameter(format!("Kraus count {k} outside 1..=d²")));
            }
        }
        if self.steps_per_restart == 0 || !self.initial_step.is_finite() || self.initial_step <= 0.0 {
            return Err(Error::BadParameter("steps_per_restart and initial_step must be positive".into()));
        }
        Ok(())
    }

    fn effective_kraus_count(&self) -> usize {
        self.kraus_count.unwrap_or_else(|| {
            let pure_choi = matches!(
                self.entry_name.as_str(),
                LEGACY_LOWER_CONCURRENCE | CONC_WINDOW_LOWER | CONC_WINDOW_UPPER
            ) || (self.entry_name == CONC_UPPER && self.d >= 3);
            if pure_choi {
                1
            } else {
                2
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    pub kraus_count: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub best_slack: f64,
    pub evidence: Evidence,
    /// `None` when the best slack is nonnegative.
    pub class: Option<ViolationClass>,
    pub oracle_slack: Option<f64>,
    pub record: TrialRecord,
    pub document: ReportDocument,
}

impl SearchOutcome {
    pub fn is_oracle_backed_finding(&self) -> bool {
        self.class == Some(ViolationClass::Finding) && self.evidence.is_oracle_backed()
    }
}

struct Layout {
    d: usize,
    k: usize,
}

impl Layout {
    fn len(&self) -> usize {
        let dk = self.d * self.k;
        dk * dk + self.d + 2 * self.d * self.d
    }

    fn decode(&self, x: &[f64]) -> Result<(QuantumChannel<f64>, BipartitePureState<f64>)> {
        let (d, dk) = (self.d, self.d * self.k);
        let (gen, rest) = x.split_at(dk * dk);
        let (logits, rest) = rest.split_at(d);
        let (ha, hb) = rest.split_at(d * d);

        let u = expm_i_hermitian(&hermitian_from_params(dk, gen)?)?;
        let iso = ComplexMatrix::from_fn(dk, d, |i, j| u[(i, j)]);
        let e = QuantumChannel::from_stinespring(d, &iso)?;

        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
        let total: f64 = exps.iter().sum();
        let weights: Vec<f64> = exps.iter().map(|w| w / total).collect();
        let ua = expm_i_hermitian(&hermitian_from_params(d, ha)?)?;
        let ub = expm_i_hermitian(&hermitian_from_params(d, hb)?)?;
        let psi = state_from_schmidt_weights(&weights, d)?.apply_local(&ua, &ub)?;
        Ok((e, psi))
    }
}

fn slack_at(layout: &Layout, name: &str, x: &[f64]) -> f64 {
    let Ok((e, psi)) = layout.decode(x) else {
        return f64::INFINITY;
    };
    match full_report(&e, &psi) {
        Ok(r) => r
            .entry(name)
            .and_then(|en| en.applicable_slack())
            .filter(|s| s.is_finite())
            .unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

/// Evaluation counter shared by all restarts.
struct Budget {
    left: usize,
    used: usize,
}

impl Budget {
    fn eval(&mut self, f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> Option<f64> {
        if self.left == 0 {
            return None;
        }
        self.left -= 1;
        self.used += 1;
        Some(f(x))
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
}

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction ½, shrink ½)
/// from an axis-aligned initial simplex. Returns the best vertex.
fn nelder_mead(
    f: &impl Fn(&[f64]) -> f64,
    x0: Vec<f64>,
    step: f64,
    max_iter: usize,
    budget: &mut Budget,
) -> Option<(Vec<f64>, f64)> {
    let n = x0.len();
    let f0 = budget.eval(f, &x0)?;
    let mut simplex = vec![(x0.clone(), f0)];
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += step;
        match budget.eval(f, &x) {
            Some(fx) => simplex.push((x, fx)),
            None => break,
        }
    }
    let best = |s: &[(Vec<f64>, f64)]| s.iter().min_by(|a, b| a.1.total_cmp(&b.1)).cloned();
    if simplex.len() < n + 1 {
        return best(&simplex);
    }

    'outer: for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        let xr = lerp(&centroid, &worst, -1.0);
        let Some(fr) = budget.eval(f, &xr) else { break };
        if fr < f_best {
            let xe = lerp(&centroid, &worst, -2.0);
            let Some(fe) = budget.eval(f, &xe) else {
                simplex[n] = (xr, fr);
                break;
            };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let xc = if fr < f_worst {
            lerp(&centroid, &xr, 0.5)
        } else {
            lerp(&centroid, &worst, 0.5)
        };
        let Some(fc) = budget.eval(f, &xc) else { break };
        if fc < fr.min(f_worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&anchor, &vertex.0, 0.5);
            let Some(fx) = budget.eval(f, &x) else { break 'outer };
            *vertex = (x, fx);
        }
    }
    best(&simplex)
}

pub fn search_extremal(entry_name: &str, d: usize, budget: usize, seed: u64) -> Result<SearchOutcome> {
    search_extremal_with(&SearchConfig::new(entry_name, d, budget, seed))
}

/// Minimizes the slack of `cfg.entry_name` with random restarts until the
/// evaluation budget is spent. Deterministic per configuration.
pub fn search_extremal_with(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let k = cfg.effective_kraus_count();
    let layout = Layout { d: cfg.d, k };
    let objective = |x: &[f64]| slack_at(&layout, &cfg.entry_name, x);
    let mut budget = Budget {
        left: cfg.budget,
        used: 0,
    };

    let mut best: Option<(Vec<f64>, f64, u64)> = None;
    let mut restarts = 0u64;
    while budget.left > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, restarts));
        let x0: Vec<f64> = (0..layout.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some((x, fx)) = nelder_mead(&objective, x0, cfg.initial_step, cfg.steps_per_restart, &mut budget) {
            if best.as_ref().is_none_or(|b| fx < b.1) {
                best = Some((x, fx, restarts));
            }
        }
        restarts += 1;
    }
    let (x, _, restart) = best.expect("budget >= 1 evaluates at least one point");

    let (e, psi) = layout.decode(&x)?;
    let report = full_report(&e, &psi)?;
    let entry = report.entry(&cfg.entry_name).expect("validated entry name").clone();
    let best_slack = entry.applicable_slack().unwrap_or(f64::INFINITY);
    let derived = derive_seed(cfg.seed, restart);

    let mut oracle_slack = None;
    let class = if best_slack >= 0.0 {
        None
    } else if best_slack >= cfg.tolerance {
        Some(ViolationClass::NumericalNoise)
    } else if cfg.d == 2 && entry.evidence.is_oracle_backed() {
        oracle_slack = oracle_slack_two_qubit(&entry, &e, &psi)?;
        match oracle_slack {
            Some(s) if s >= cfg.tolerance => Some(ViolationClass::Unconfirmed),
            _ => Some(ViolationClass::Finding),
        }
    } else {
        Some(ViolationClass::Finding)
    };

    let record = TrialRecord {
        trial_index: restart,
        derived_seed: derived,
        d: cfg.d,
        channel: ChannelDescriptor { kraus_count: k },
        state: StateDescriptor {
            source: "search".into(),
            schmidt_weights: report.quantities.schmidt_weights.clone(),
        },
        tau_out: report.quantities.tau_out,
        tau_prime_out: report.quantities.tau_prime_out,
        slacks: report
            .entries
            .iter()
            .filter_map(|en| en.applicable_slack().map(|s| (en.name.clone(), s)))
            .collect::<BTreeMap<_, _>>(),
    };
    let meta = ReportMeta {
        d: cfg.d,
        source: "search".into(),
        seed: Some(cfg.seed),
        trial_index: Some(restart),
        derived_seed: Some(derived),
    };
    Ok(SearchOutcome {
        config: cfg.clone(),
        kraus_count: k,
        evaluations: budget.used,
        restarts: restarts as usize,
        best_slack,
        evidence: entry.evidence,
        class,
        oracle_slack,
        record,
        document: ReportDocument::new(meta, &e, &psi, report),
    })
}
