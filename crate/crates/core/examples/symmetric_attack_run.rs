//! The symmetric probe attack inside live protocol runs, against the
//! error rate the analytic model predicts for the same θ and λ. PP^GV
//! decodes only the Z correlation, so some Bell errors never reach its
//! message.
//!
//! cargo run --release --example symmetric_attack_run

use orthoqkd::analysis::AttackedModel;
use orthoqkd::attacks::{AttackParams, Legs};
use orthoqkd::protocols::{run, ProtocolConfig, ProtocolId};

fn main() -> orthoqkd::Result<()> {
    // live runs attack each crossing independently with probability λ, the
    // model mixes whole pairs; the two agree at λ = 1
    let (theta, lambda) = (1.0, 1.0);
    for p in [ProtocolId::PpGv, ProtocolId::ClGv, ProtocolId::DllGv] {
        let mut c = ProtocolConfig::new(p, 4000, 5).with_attack(AttackParams::symmetric_ng(theta, lambda));
        c.bell_threshold = Some(1.0);
        let t = run(&c)?;
        let model = AttackedModel::new(p, theta, Legs::Both)?;
        let k = p.bits_per_symbol();
        let symbols = t.sent_bits.len() / k;
        let wrong = t
            .sent_bits
            .chunks(k)
            .zip(t.decoded_bits.chunks(k))
            .filter(|(a, b)| a != b)
            .count();
        println!(
            "{:7} symbol error {:.4} over {symbols} symbols, Bell error predicted {:.4}",
            p.name(),
            wrong as f64 / symbols as f64,
            model.error_rate(lambda)
        );
    }
    Ok(())
}
