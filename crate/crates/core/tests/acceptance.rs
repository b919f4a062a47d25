//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::Instant;

use orthoqkd::analysis::{
    build_grid, duality_suite, heisenberg_check, monogamy_suite, ng_oracle_report, threshold_variants,
    tolerable_error, Interpretation, ThresholdResult,
};
use orthoqkd::attacks::{pairing_exact_n2, pairing_trial_n2};
use orthoqkd::protocols::{run, ProtocolConfig, ProtocolId};
use orthoqkd::rng::{self, Stream};
use orthoqkd::scenario::{execute, parse_config, ScenarioConfig};

const RESOLUTION: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn threshold(p: ProtocolId, interp: Interpretation) -> ThresholdResult {
    let grid = build_grid(p, RESOLUTION, interp).expect("grid");
    tolerable_error(&grid).expect("threshold")
}

fn pct(x: f64) -> f64 {
    100.0 * x
}

fn threshold_reproduction() -> Outcome {
    let start = Instant::now();
    let interp = Interpretation::default();
    let gv = [ProtocolId::PpGv, ProtocolId::ClGv, ProtocolId::DllGv];
    let results: Vec<(ProtocolId, f64)> = gv.iter().map(|&p| (p, pct(threshold(p, interp).e0))).collect();
    let elapsed = start.elapsed().as_secs_f64();
    // every documented reading of the representative CL^GV variant
    let variants = threshold_variants(ProtocolId::ClGv, RESOLUTION).expect("variants");
    let closest = variants
        .iter()
        .filter_map(|v| v.result.as_ref().map(|r| (v.label.clone(), pct(r.e0))))
        .chain(results.iter().map(|(p, e)| (format!("{p} default"), *e)))
        .min_by(|a, b| (a.1 - 26.7).abs().total_cmp(&(b.1 - 26.7).abs()))
        .expect("some variant");
    let all_within = results.iter().all(|(_, e)| (e - 26.7).abs() <= 1.0);
    let pass = all_within && (closest.1 - 26.7).abs() <= 0.5 && elapsed < 300.0;
    let listed: Vec<String> = results.iter().map(|(p, e)| format!("{p} {e:.3}%")).collect();
    outcome(
        pass,
        format!(
            "{} under {}; closest variant {} at {:.3}%; {elapsed:.1}s for three {RESOLUTION}x{RESOLUTION} grids",
            listed.join(", "),
            interp.label(),
            closest.0,
            closest.1
        ),
    )
}

fn companion_thresholds() -> Outcome {
    let interp = Interpretation::default();
    let targets = [
        (ProtocolId::Pp, 25.0),
        (ProtocolId::Cl, 25.0),
        (ProtocolId::Dll, 26.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, want) in targets {
        let e = pct(threshold(p, interp).e0);
        let ok = (e - want).abs() <= 1.0;
        pass &= ok;
        parts.push(format!(
            "{p} {e:.3}% (target {want}%, {})",
            if ok { "ok" } else { "off" }
        ));
    }
    outcome(pass, format!("{} under {}", parts.join(", "), interp.label()))
}

fn duality() -> Outcome {
    let mut r = rng::stream(1, Stream::Suite);
    let d = duality_suite(1000, &mut r).expect("suite");
    let pass = d.pure_max_violation < 1e-10 && d.mixed_max_excess <= 1e-10 && d.mixed_violations == 0;
    outcome(
        pass,
        format!(
            "1000 pure: max |P+C-1| = {:.2e}; 1000 mixed: max P+C-1 = {:.2e}",
            d.pure_max_violation, d.mixed_max_excess
        ),
    )
}

fn duality_monogamy_bound() -> Outcome {
    let (max, argmax) = orthoqkd::analysis::duality_entropy_max().expect("max");
    let pass = (1.620..=1.625).contains(&max) && (argmax - 0.5).abs() <= 1e-3;
    outcome(pass, format!("max {max:.6} at P = {argmax:.6}"))
}

fn monogamy() -> Outcome {
    let mut r = rng::stream(2, Stream::Suite);
    let m = monogamy_suite(1000, &mut r).expect("suite");
    let pass = m.violations == 0 && (m.ghz_tau - 1.0).abs() <= 1e-8 && m.w_tau.abs() <= 1e-8;
    outcome(
        pass,
        format!(
            "{} violations in {} Haar states (min slack {:.3e}); tau(GHZ) = {:.10}, tau(W) = {:.2e}",
            m.violations, m.samples, m.min_slack, m.ghz_tau, m.w_tau
        ),
    )
}

fn heisenberg() -> Outcome {
    let h = heisenberg_check().expect("check");
    let pass = h.r_error.abs() <= 1e-12 && h.deviation <= 1e-12;
    outcome(
        pass,
        format!(
            "R error {:.1e}, H(D) = {:.13}, max deviation {:.1e}",
            h.r_error, h.h_d, h.deviation
        ),
    )
}

fn oracle() -> Outcome {
    let r = ng_oracle_report(50).expect("oracle");
    let documented = r.discrepancy_note.contains("trace 2");
    let traces = r.points.iter().all(|p| (p.printed_trace - 2.0).abs() < 1e-12);
    let pass = r.points.len() == 50 && r.max_abs_diff <= 1e-12 && documented && traces;
    outcome(
        pass,
        format!(
            "50 angles, max |oracle - analytic| = {:.2e}; printed matrix trace 2 documented: {documented}",
            r.max_abs_diff
        ),
    )
}

fn protocol_correctness() -> Outcome {
    let mut failures = Vec::new();
    let mut runs = 0;
    for p in ProtocolId::ALL {
        for n in [8usize, 16, 64] {
            for i in 0..100u64 {
                let seed = rng::child_seed(1000 + n as u64, i);
                runs += 1;
                let t = match run(&ProtocolConfig::new(p, n, seed)) {
                    Ok(t) => t,
                    Err(e) => {
                        failures.push(format!("{p} n={n} seed={seed}: {e}"));
                        continue;
                    }
                };
                let c = &t.counts;
                let counts_ok = if p == ProtocolId::Gv {
                    c.transmitted_leg1 == n && c.checked_leg1 == n / 2
                } else if p.is_gv_variant() {
                    c.transmitted_leg1 == 3 * n / 2 && c.checked_leg1 == n && c.encoded == n / 4
                } else {
                    c.transmitted_leg1 == n && c.checked_leg1 == n / 2 && c.encoded == n / 4
                };
                if t.aborted || t.decoded_bits != t.sent_bits || !counts_ok || t.validate().is_err() {
                    failures.push(format!(
                        "{p} n={n} seed={seed}: counts {c:?}, aborted {}",
                        t.aborted
                    ));
                }
            }
        }
    }
    let detail = match failures.first() {
        None => format!("{runs} honest runs decoded exactly with correct counts"),
        Some(f) => format!("{} of {runs} runs failed, first: {f}", failures.len()),
    };
    outcome(failures.is_empty(), detail)
}

fn pairing_guess() -> Outcome {
    let trials = 100_000usize;
    let exact = pairing_exact_n2().expect("enumeration");
    let mut r = rng::stream(3, Stream::Eve);
    let (mut correct, mut detected) = (0usize, 0usize);
    for _ in 0..trials {
        let t = pairing_trial_n2(&mut r).expect("trial");
        correct += usize::from(t.correct);
        detected += usize::from(t.detected);
    }
    let within = |k: usize, p: f64| {
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        ((k as f64 / trials as f64) - p).abs() <= 3.0 * sigma
    };
    let exact_ok = (exact.p_correct - 1.0 / 3.0).abs() <= 1e-12 && (exact.p_detected - 0.5).abs() <= 1e-12;
    let pass = exact_ok && within(correct, exact.p_correct) && within(detected, exact.p_detected);
    outcome(
        pass,
        format!(
            "exact success {:.12}, detection {:.12}; simulated {:.5} / {:.5} over {trials} trials",
            exact.p_correct,
            exact.p_detected,
            correct as f64 / trials as f64,
            detected as f64 / trials as f64
        ),
    )
}

fn determinism() -> Outcome {
    let configs = [
        r#"{"command":"run","protocol":"DLL_GV","n":64,"seed":5,"runs":3,
            "attack":{"kind":"symmetric_ng","theta":0.7,"lambda":0.4}}"#,
        r#"{"command":"run","protocol":"GV","n":16,"seed":6,
            "attack":{"kind":"generic_probe","probe_overlap":0.3}}"#,
        r#"{"command":"sweep","protocol":"PP_GV","resolution":60}"#,
        r#"{"command":"threshold","protocol":"CL","resolution":60}"#,
        r#"{"command":"suites","seed":8,"samples":100}"#,
    ];
    let dirs = [
        tempfile::tempdir().expect("tmp"),
        tempfile::tempdir().expect("tmp"),
    ];
    let mut files = 0;
    let mut mismatches = Vec::new();
    for text in configs {
        let mut outputs = Vec::new();
        for d in &dirs {
            let mut c: ScenarioConfig = parse_config(text).expect("config");
            c.out = d.path().to_path_buf();
            let o = execute(&c).expect("execute");
            let bytes: Vec<Vec<u8>> = o
                .artifacts
                .iter()
                .map(|a| std::fs::read(&a.path).expect("read"))
                .collect();
            outputs.push(bytes);
        }
        files += outputs[0].len();
        if outputs[0] != outputs[1] {
            mismatches.push(text.split_whitespace().next().unwrap_or_default().to_string());
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{files} CSV/JSON files compared byte for byte across two runs; mismatches: {mismatches:?}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("threshold reproduction", threshold_reproduction),
        ("companion thresholds", companion_thresholds),
        ("duality", duality),
        ("duality-as-monogamy bound", duality_monogamy_bound),
        ("monogamy", monogamy),
        ("heisenberg bound", heisenberg),
        ("oracle equivalence", oracle),
        ("protocol correctness", protocol_correctness),
        ("pairing-guess attack", pairing_guess),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
