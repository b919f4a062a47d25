//! Timing attacks on the two-packet GV scheme.
//!
//! * delaying the first packet fails the arrival-time test;
//! * holding both packets and forwarding a dummy reads every bit (so GV is
//!   no good for direct communication) but disagrees on half the disclosed
//!   rounds;
//! * dummies injected on the nominal schedule are caught once Alice jitters
//!   her send times.
//!
//! cargo run --release --example gv_timing_attacks

use orthoqkd::attacks::{jitter_detection_exact, AttackParams, DummyStrategy};
use orthoqkd::protocols::{run, Mode, ProtocolConfig, ProtocolId};

fn main() -> orthoqkd::Result<()> {
    let base = |seed| ProtocolConfig::new(ProtocolId::Gv, 64, seed);

    let t = run(&base(1).with_attack(AttackParams::timing_delay(2, DummyStrategy::None)))?;
    println!(
        "delay 2 slots: timing error {}, aborted {}",
        t.error_rates["gv_timing"], t.aborted
    );

    let mut c = base(2).with_attack(AttackParams::timing_delay(0, DummyStrategy::HoldBoth));
    c.mode = Mode::Qsdc;
    c.bb84_threshold = 1.0;
    let t = run(&c)?;
    let eve = t
        .attack
        .as_ref()
        .and_then(|a| a.eve_bits.clone())
        .unwrap_or_default();
    let read = eve.iter().zip(&t.sent_bits).filter(|(a, b)| a == b).count();
    println!(
        "hold both: Eve reads {read}/{} bits, disclosed disagreement {:.3}",
        t.sent_bits.len(),
        t.error_rates["gv_sample"]
    );

    let jitter = 4;
    let trials = 2000;
    let caught = (0..trials)
        .filter(|&s| {
            let mut c = ProtocolConfig::new(ProtocolId::Gv, 4, s)
                .with_attack(AttackParams::timing_delay(0, DummyStrategy::Scheduled));
            c.gv.jitter_slots = jitter;
            run(&c).map(|t| t.aborted).unwrap_or(false)
        })
        .count();
    println!(
        "scheduled dummies, 4 rounds, jitter {jitter}: caught {:.4} (exact {:.4})",
        caught as f64 / trials as f64,
        jitter_detection_exact(4, jitter)
    );
    Ok(())
}
