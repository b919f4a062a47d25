//! Eve tries to undo the secret reordering of two |Ψ+⟩ pairs by guessing
//! which particles belong together and Bell-measuring her guess.
//!
//! cargo run --release --example pairing_guess -- [trials]

use orthoqkd::attacks::{pairing_exact_n2, pairing_trial_n2};
use orthoqkd::rng;

fn main() -> orthoqkd::Result<()> {
    let trials: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let mut r = rng::seeded(2024);
    let (mut correct, mut detected) = (0usize, 0usize);
    for _ in 0..trials {
        let t = pairing_trial_n2(&mut r)?;
        correct += usize::from(t.correct);
        detected += usize::from(t.detected);
    }
    let exact = pairing_exact_n2()?;
    let f = |k: usize| k as f64 / trials as f64;
    println!("guess correct: {:.5} (exact {:.5})", f(correct), exact.p_correct);
    println!(
        "detected:      {:.5} (exact {:.5})",
        f(detected),
        exact.p_detected
    );
    println!(
        "detected when the guess is wrong: {:.5}",
        exact.p_detected_given_wrong
    );
    Ok(())
}
