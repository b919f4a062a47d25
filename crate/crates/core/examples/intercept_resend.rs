//! Intercept-resend in Z against a conjugate-coding protocol and its
//! orthogonal-state counterpart. The BB84 check sees 25%; the Bell check
//! of the GV variant sees 50%.
//!
//! cargo run --release --example intercept_resend

use orthoqkd::attacks::{AttackParams, Legs, ResendBasis};
use orthoqkd::protocols::{run, ProtocolConfig, ProtocolId};

fn main() -> orthoqkd::Result<()> {
    let attack = AttackParams::intercept_resend(ResendBasis::Z).with_legs(Legs::First);
    for p in [ProtocolId::Pp, ProtocolId::PpGv, ProtocolId::Cl, ProtocolId::ClGv] {
        let mut c = ProtocolConfig::new(p, 2000, 11).with_attack(attack.clone());
        // keep going past the checks so the rates are visible
        c.bb84_threshold = 1.0;
        c.bell_threshold = Some(1.0);
        let t = run(&c)?;
        let leg1 = t
            .error_rates
            .iter()
            .find(|(k, _)| k.starts_with("leg1"))
            .map(|(k, v)| format!("{k} = {v:.4}"))
            .unwrap_or_default();
        println!("{:6} {leg1}", p.name());
    }
    Ok(())
}
