//! Acceptance criteria 1 through 8. Runs without the libtest harness so that
//! every criterion prints one PASS/FAIL line; the process fails if any does.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tanglebound::bounds::{
    BoundKind, Evidence, CONC_UPPER, CONC_WINDOW_LOWER, CONC_WINDOW_UPPER, LEGACY_LOWER_CONCURRENCE,
    LEGACY_LOWER_TANGLE, TAU_PRIME_UPPER, TAU_WINDOW_LOWER, TAU_WINDOW_UPPER,
};
use tanglebound::channels::{choi_of, kraus_from_choi, make_standard, random_channel, random_channel_with, ChannelFamily};
use tanglebound::io::to_json_string;
use tanglebound::measures::{concurrence_pure, tau_lower, tau_upper, wootters_concurrence};
use tanglebound::states::{
    random_local_unitaries, random_mixed, random_pure, random_pure_with, schmidt_decompose, state_from_schmidt_weights,
};
use tanglebound::verify::{derive_seed, replay, run_monte_carlo, write_outputs, wootters_by_root_eigenvalues, TrialConfig};
use tanglebound::{full_report, BoundReport, Channel, PureState};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Agreement required between the two Wootters routes. The eigenvalue route
/// takes square roots of eigenvalues near zero, so it resolves concurrence
/// only to about √ε.
const ROUTE_AGREEMENT: f64 = 1e-7;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn slack(r: &BoundReport, name: &str) -> Option<f64> {
    r.entry(name).and_then(|e| e.applicable_slack())
}

fn rhs(r: &BoundReport, name: &str) -> Option<f64> {
    r.entry(name).filter(|e| e.applicable).and_then(|e| e.rhs)
}

fn report(e: &Channel, psi: &PureState) -> Result<BoundReport, String> {
    full_report(e, psi).map_err(|err| err.to_string())
}

/// `2|a₀₀a₁₁ − a₀₁a₁₀|` for two qubits.
fn qubit_concurrence(psi: &PureState) -> f64 {
    let a = psi.amplitudes();
    2.0 * (a[0] * a[3] - a[1] * a[2]).norm()
}

/// `2(1 − Tr ρ_A²)` straight from the coefficient matrix, `ρ_A = A A†`.
fn pure_tangle(psi: &PureState) -> f64 {
    let (da, db) = (psi.dim_a(), psi.dim_b());
    let a = psi.amplitudes();
    let mut purity = 0.0;
    for i in 0..da {
        for k in 0..da {
            let rho_ik: Complex<f64> = (0..db).map(|j| a[i * db + j] * a[k * db + j].conj()).sum();
            purity += rho_ik.norm_sqr();
        }
    }
    2.0 * (1.0 - purity)
}

fn zoo(d: usize) -> Vec<(String, Channel)> {
    let mut out = vec![("identity".to_string(), make_standard(ChannelFamily::Identity, d, &[]).unwrap())];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..3 {
        let h: Vec<f64> = (0..d * d).map(|_| rng.random_range(-2.0..2.0)).collect();
        out.push((format!("unitary#{i}"), make_standard(ChannelFamily::Unitary, d, &h).unwrap()));
    }
    for p in [0.1, 0.5, 1.0] {
        out.push((format!("depolarizing:{p}"), make_standard(ChannelFamily::Depolarizing, d, &[p]).unwrap()));
        out.push((format!("dephasing:{p}"), make_standard(ChannelFamily::Dephasing, d, &[p]).unwrap()));
    }
    if d == 2 {
        for g in [0.3, 0.5, 1.0] {
            out.push((format!("amplitude_damping:{g}"), make_standard(ChannelFamily::AmplitudeDamping, 2, &[g]).unwrap()));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    let mut worst = 0.0f64;
    for d in 2..=4 {
        let phi = PureState::phi_plus(d).unwrap();
        let flat = 2.0 / (d * (d - 1)) as f64;
        let mut channels = zoo(d);
        for s in 0..1000u64 {
            let k = 1 + (s as usize % (d * d));
            channels.push((format!("random:{k},{s}"), random_channel(d, k, 1000 * d as u64 + s).unwrap()));
        }
        for (label, e) in &channels {
            let r = report(e, &phi)?;
            let eta = r.quantities.eta.ok_or("phi+ has no eta factors")?;
            ensure((eta.eta_min - flat).abs() <= 1e-12 && (eta.eta_max - flat).abs() <= 1e-12, || {
                format!("d={d} {label}: eta_min {} eta_max {}", eta.eta_min, eta.eta_max)
            })?;
            for name in [TAU_WINDOW_LOWER, TAU_WINDOW_UPPER, TAU_PRIME_UPPER] {
                let s = slack(&r, name).ok_or_else(|| format!("d={d} {label}: {name} not applicable"))?;
                worst = worst.max(s.abs());
                ensure(s.abs() <= 1e-9, || format!("d={d} {label}: {name} slack {s:e}"))?;
            }
            let width = rhs(&r, TAU_WINDOW_UPPER).unwrap() - rhs(&r, TAU_WINDOW_LOWER).unwrap();
            ensure(width.abs() <= 1e-9, || format!("d={d} {label}: tau window width {width:e}"))?;
            if let (Some(lo), Some(hi)) = (rhs(&r, CONC_WINDOW_LOWER), rhs(&r, CONC_WINDOW_UPPER)) {
                ensure((hi - lo).abs() <= 1e-9, || format!("d={d} {label}: concurrence window width {:e}", hi - lo))?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} channels at d=2..4, max |slack| {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let mut min_slack = f64::INFINITY;
    let mut unitary_checked = 0;
    let mut worst_unitary = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let k = rng.random_range(1..=4);
        let e = random_channel_with::<f64, _>(&mut rng, 2, k).map_err(|e| e.to_string())?;
        let psi = random_pure_with::<f64, _>(&mut rng, 2, 2).map_err(|e| e.to_string())?;
        let r = report(&e, &psi)?;
        let entry = r.entry(CONC_UPPER).unwrap();
        ensure(entry.applicable && entry.evidence == Evidence::Exact, || "conc_upper not exact at d=2".into())?;
        let s = entry.slack.unwrap();
        min_slack = min_slack.min(s);
        ensure(s >= -1e-8, || format!("conc_upper slack {s:e} with {k} Kraus operators"))?;

        let c_out = wootters_by_root_eigenvalues(e.apply_to_pure(&psi).unwrap().matrix()).map_err(|e| e.to_string())?;
        let c_choi = wootters_by_root_eigenvalues(e.choi().state().matrix()).map_err(|e| e.to_string())?;
        let c_psi = qubit_concurrence(&psi);
        let oracle_slack = c_choi * c_psi - c_out;
        ensure((oracle_slack - s).abs() <= ROUTE_AGREEMENT, || format!("oracle {oracle_slack:e} vs report {s:e}"))?;
        if k == 1 {
            let gap = (r.quantities.c_out_exact.unwrap() - r.quantities.c_choi_exact.unwrap() * c_psi).abs();
            worst_unitary = worst_unitary.max(gap);
            ensure(gap <= 1e-8, || format!("unitary factorization gap {gap:e}"))?;
            unitary_checked += 1;
        }
    }

    let ad = make_standard(ChannelFamily::AmplitudeDamping, 2, &[0.5]).unwrap();
    let psi = state_from_schmidt_weights(&[0.8, 0.2], 2).unwrap();
    let r = report(&ad, &psi)?;
    let c_out = r.quantities.c_out_exact.ok_or("no exact C(out)")?;
    ensure((c_out - 0.565685).abs() <= 1e-6, || format!("amplitude damping C(out) = {c_out}"))?;
    let oracle = wootters_by_root_eigenvalues(ad.apply_to_pure(&psi).unwrap().matrix()).unwrap();
    ensure((oracle - 0.565685).abs() <= 1e-6, || format!("oracle C(out) = {oracle}"))?;

    Ok(format!(
        "10^4 pairs, min conc_upper slack {min_slack:.2e}; {unitary_checked} unitary pairs, max gap {worst_unitary:.1e}; AD C(out) {c_out:.6}"
    ))
}

fn criterion_3() -> Outcome {
    let mut worst_order = f64::NEG_INFINITY;
    for s in 0..10_000u64 {
        let rank = 1 + (s as usize % 4);
        let rho = random_mixed::<f64>(2, 2, rank, s).map_err(|e| e.to_string())?;
        let c = wootters_concurrence(&rho).map_err(|e| e.to_string())?;
        let oracle = wootters_by_root_eigenvalues(rho.matrix()).map_err(|e| e.to_string())?;
        ensure((c - oracle).abs() <= ROUTE_AGREEMENT, || format!("seed {s}: Wootters routes differ, {c} vs {oracle}"))?;
        let (lo, hi) = (tau_lower(&rho), tau_upper(&rho));
        worst_order = worst_order.max(lo - c * c).max(c * c - hi);
        ensure(lo <= c * c + 1e-8 && c * c <= hi + 1e-8, || {
            format!("seed {s}: tau {lo} C^2 {} tau' {hi}", c * c)
        })?;
    }
    let mut worst_pure = 0.0f64;
    for d in 2..=4 {
        for s in 0..1000u64 {
            let psi = random_pure::<f64>(d, d, 50_000 + s).unwrap();
            let c2 = pure_tangle(&psi);
            let rho = psi.density();
            let c = concurrence_pure(&psi).unwrap();
            for (what, v) in [("tau", tau_lower(&rho)), ("tau'", tau_upper(&rho)), ("C^2", c * c)] {
                worst_pure = worst_pure.max((v - c2).abs());
                ensure((v - c2).abs() <= 1e-9, || format!("d={d} seed {s}: {what} {v} vs {c2}"))?;
            }
        }
    }
    Ok(format!(
        "10^4 mixed 2x2 states, max ordering gap {worst_order:.1e}; 3x10^3 pure states, max deviation {worst_pure:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut min_margin = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in [2, 3] {
        for _ in 0..1000 {
            let k = rng.random_range(1..=d * d);
            let e = random_channel_with::<f64, _>(&mut rng, d, k).unwrap();
            let psi = random_pure_with::<f64, _>(&mut rng, d, d).unwrap();
            let r = report(&e, &psi)?;
            let margins = r.nesting_margins();
            ensure(!margins.is_empty(), || "no nesting margins".into())?;
            for (name, m) in margins {
                min_margin = min_margin.min(m);
                ensure(m >= -1e-10, || format!("d={d}: {name} below legacy by {m:e}"))?;
            }
        }
    }
    let mut trivial = 0;
    for d in [3, 4] {
        for s in 0..200u64 {
            let mut w: Vec<f64> = (0..d - 1).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            w.insert((s as usize) % d, 0.0);
            let psi = state_from_schmidt_weights(&w, d).unwrap();
            let e = random_channel(d, 1 + (s as usize % (d * d)), s).unwrap();
            let r = report(&e, &psi)?;
            for name in [LEGACY_LOWER_TANGLE, LEGACY_LOWER_CONCURRENCE] {
                let Some(entry) = r.entry(name).filter(|e| e.applicable) else {
                    continue;
                };
                ensure(entry.rhs == Some(0.0) && entry.trivial, || {
                    format!("d={d} weights {w:?}: {name} rhs {:?}", entry.rhs)
                })?;
                trivial += 1;
            }
        }
    }
    Ok(format!("min nesting margin {min_margin:.2e} over 2x10^3 inputs; {trivial} trivial legacy bounds exactly 0"))
}

fn compare_reports(a: &BoundReport, b: &BoundReport) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for (x, y) in a.entries.iter().zip(&b.entries) {
        ensure(x.name == y.name && x.applicable == y.applicable, || format!("{} applicability differs", x.name))?;
        for (u, v) in [(x.lhs, y.lhs), (x.rhs, y.rhs), (x.slack, y.slack)] {
            if let (Some(u), Some(v)) = (u, v) {
                worst = worst.max((u - v).abs());
                ensure((u - v).abs() <= 1e-9, || format!("{}: {u} vs {v}", x.name))?;
            }
        }
    }
    Ok(worst)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = 2 + i % 3;
        let k = rng.random_range(1..=d * d);
        let e = random_channel_with::<f64, _>(&mut rng, d, k).unwrap();
        let base = random_pure_with::<f64, _>(&mut rng, d, d).unwrap();
        let (u, v) = random_local_unitaries::<f64, _>(&mut rng, d, d);
        let psi = base.apply_local(&u, &v).unwrap();

        let form = schmidt_decompose(&psi).unwrap();
        let schmidt = state_from_schmidt_weights(&form.weights, d).unwrap();
        // the B-side Schmidt basis change is absorbed into the channel input
        let kraus = e.kraus().iter().map(|k| k * &form.v_local).collect();
        let e_schmidt = Channel::new(d, kraus).unwrap();

        let general = report(&e, &psi)?;
        let canonical = report(&e_schmidt, &schmidt)?;
        worst = worst.max(compare_reports(&general, &canonical).map_err(|m| format!("triple {i}: {m}"))?);
    }
    Ok(format!("10^3 triples at d=2..4, max entry difference {worst:.1e}"))
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = 2 + i % 3;
        let k = rng.random_range(1..=d * d);
        let e = random_channel_with::<f64, _>(&mut rng, d, k).unwrap();
        let j = choi_of(&e);
        let back = kraus_from_choi(&j).map_err(|e| e.to_string())?;
        let residual = choi_of(&back).state().matrix().max_abs_diff(j.state().matrix());
        worst = worst.max(residual);
        ensure(residual <= 1e-8, || format!("channel {i}: Choi residual {residual:e}"))?;
    }

    let tmp = tempfile::tempdir().unwrap();
    let cfg = TrialConfig::new(vec![2, 3], 500, 2026);
    let mut dirs = Vec::new();
    for run in ["a", "b"] {
        let outcome = run_monte_carlo(&cfg).map_err(|e| e.to_string())?;
        let dir = tmp.path().join(run);
        write_outputs(&outcome, &dir).map_err(|e| e.to_string())?;
        dirs.push((dir, to_json_string(&outcome.summary).unwrap()));
    }
    ensure(dirs[0].1 == dirs[1].1, || "summaries differ between runs".into())?;
    let names = files_in(&dirs[0].0);
    ensure(names == files_in(&dirs[1].0), || "output file sets differ".into())?;
    for name in &names {
        let (a, b) = (std::fs::read(dirs[0].0.join(name)).unwrap(), std::fs::read(dirs[1].0.join(name)).unwrap());
        ensure(a == b, || format!("{name} differs between runs"))?;
    }

    let mut replayed = 0;
    for name in names.iter().filter(|n| n.starts_with("cx_")) {
        let out = replay(&dirs[0].0.join(name)).map_err(|e| format!("{name}: {e}"))?;
        let (s, r) = (out.stored_slack.unwrap(), out.recomputed_slack.unwrap());
        ensure((s - r).abs() <= 1e-10 && out.max_drift <= 1e-10, || format!("{name}: {s} vs {r}"))?;
        replayed += 1;
    }
    Ok(format!(
        "max Choi residual {worst:.1e}; {} identical output files; {replayed} counterexamples replayed",
        names.len()
    ))
}

fn criterion_7() -> Outcome {
    let w = [0.5, 0.3, 0.2];
    // pair enumeration by hand: 0.15, 0.10, 0.06
    let pairs = [w[0] * w[1], w[0] * w[2], w[1] * w[2]];
    let pair_sum: f64 = pairs.iter().sum();
    let eta_oracle = pairs.iter().copied().fold(f64::INFINITY, f64::min);
    let eta_max_oracle = pairs.iter().copied().fold(0.0, f64::max) / pair_sum;
    let c_oracle = (2.0 * (1.0 - w.iter().map(|x| x * x).sum::<f64>())).sqrt();

    let e = make_standard(ChannelFamily::Identity, 3, &[]).unwrap();
    let psi = state_from_schmidt_weights(&w, 3).unwrap();
    let r = report(&e, &psi)?;
    let q = &r.quantities;
    let eta = q.eta.ok_or("no eta factors")?;
    let lower = r.entry(TAU_WINDOW_LOWER).unwrap();
    let upper = r.entry(TAU_WINDOW_UPPER).unwrap();
    let checks = [
        ("C(psi)", q.c_psi, 1.113553, 1e-6),
        ("C(psi) oracle", q.c_psi, c_oracle, 1e-12),
        ("eta", eta.eta, 0.06, 1e-12),
        ("eta oracle", eta.eta, eta_oracle, 1e-15),
        ("eta_min", eta.eta_min, 0.193548, 1e-6),
        ("eta_min oracle", eta.eta_min, eta_oracle / pair_sum, 1e-12),
        ("eta_max", eta.eta_max, 0.483871, 1e-6),
        ("eta_max oracle", eta.eta_max, eta_max_oracle, 1e-12),
        ("window lower", lower.rhs.unwrap(), 0.72, 1e-6),
        ("window upper", upper.rhs.unwrap(), 1.80, 1e-6),
        ("tau(out)", q.tau_out, 1.24, 1e-12),
    ];
    for (what, got, want, tol) in checks {
        ensure((got - want).abs() <= tol, || format!("{what} = {got}, expected {want}"))?;
    }
    ensure(lower.kind == BoundKind::Lower && lower.satisfied && upper.satisfied, || {
        "tau(out) not inside the window".into()
    })?;
    Ok(format!(
        "C(psi) {:.6}, eta {}, eta_min {:.6}, eta_max {:.6}, window [{}, {}] contains {}",
        q.c_psi,
        eta.eta,
        eta.eta_min,
        eta.eta_max,
        lower.rhs.unwrap(),
        upper.rhs.unwrap(),
        q.tau_out
    ))
}

fn criterion_8() -> Outcome {
    let (trials, seed) = (1000u64, 8u64);
    let cfg = TrialConfig::new(vec![3], trials, seed);
    let outcome = run_monte_carlo(&cfg).map_err(|e| e.to_string())?;

    // independent enumeration of every slack below tolerance
    let mut expected = BTreeSet::new();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t));
        let k = rng.random_range(1..=9);
        let e = random_channel_with::<f64, _>(&mut rng, 3, k).unwrap();
        let psi = random_pure_with::<f64, _>(&mut rng, 3, 3).unwrap();
        for entry in &report(&e, &psi)?.entries {
            if entry.applicable_slack().is_some_and(|s| s < -1e-8) {
                expected.insert((t, entry.name.clone()));
            }
        }
    }

    let serialized: BTreeSet<(u64, String)> = outcome
        .counterexamples
        .iter()
        .map(|(_, cx)| (cx.meta.trial_index.unwrap(), cx.entry_name.clone()))
        .collect();
    ensure(serialized == expected, || {
        format!("{} events expected, {} serialized", expected.len(), serialized.len())
    })?;
    for (name, v) in outcome.summary.violations() {
        if v.slack < -1e-8 {
            ensure(v.class.as_str() == "finding" && v.counterexample.is_some(), || {
                format!("trial {} {name} labeled {} without a file", v.trial_index, v.class.as_str())
            })?;
        }
    }

    let tmp = tempfile::tempdir().unwrap();
    write_outputs(&outcome, tmp.path()).map_err(|e| e.to_string())?;
    for (file, cx) in &outcome.counterexamples {
        ensure(cx.classification == "finding", || format!("{file} labeled {}", cx.classification))?;
        let out = replay(&tmp.path().join(file)).map_err(|e| format!("{file}: {e}"))?;
        let drift = (out.recomputed_slack.unwrap() - cx.slack).abs();
        ensure(drift <= 1e-10, || format!("{file}: replay drift {drift:e}"))?;
    }
    let entries: BTreeSet<&str> = expected.iter().map(|(_, n)| n.as_str()).collect();
    Ok(format!(
        "{} findings in {trials} d=3 trials, all serialized, labeled and replayed ({})",
        expected.len(),
        entries.into_iter().collect::<Vec<_>>().join(", ")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("equality collapse at maximal entanglement", criterion_1),
        ("two-qubit factorization law", criterion_2),
        ("sandwich and pure-state consistency", criterion_3),
        ("tighter-than-legacy nesting", criterion_4),
        ("Schmidt vs general form invariance", criterion_5),
        ("round trips and determinism", criterion_6),
        ("fixed-point worked example", criterion_7),
        ("findings protocol at d=3", criterion_8),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} ({title}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({title}): FAIL [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
