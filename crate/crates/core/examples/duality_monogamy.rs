//! Duality and monogamy checks over seeded random attacks.
//!
//! cargo run --release --example duality_monogamy -- [samples]

use orthoqkd::analysis::{duality_suite, heisenberg_check, monogamy_suite};
use orthoqkd::rng::{self, Stream};

fn main() -> orthoqkd::Result<()> {
    let samples: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000);
    let mut r = rng::stream(7, Stream::Suite);

    let d = duality_suite(samples, &mut r)?;
    println!("pure probes:  max |P + C - 1| = {:.2e}", d.pure_max_violation);
    println!(
        "mixed probes: max (P + C - 1) = {:.2e}, {} violations",
        d.mixed_max_excess, d.mixed_violations
    );
    println!(
        "max H(P/2) + H((1-P)/2) = {:.5} at P = {:.5}",
        d.entropy_max, d.entropy_argmax
    );

    let m = monogamy_suite(samples, &mut r)?;
    println!(
        "CKW violations {} / {}, min slack {:.3e}",
        m.violations, m.samples, m.min_slack
    );
    println!("tau(GHZ) = {:.10}, tau(W) = {:.2e}", m.ghz_tau, m.w_tau);
    for p in &m.family {
        println!(
            "  <eps0|eps1> = {:.2}: probe entropy {:.4}, Bell fidelity {:.4}",
            p.eps_overlap, p.probe_entropy, p.bell_fidelity
        );
    }

    let h = heisenberg_check()?;
    println!(
        "theta = 0, orthogonal probes: R error {:.1e}, H(D) = {:.12}",
        h.r_error, h.h_d
    );
    Ok(())
}
