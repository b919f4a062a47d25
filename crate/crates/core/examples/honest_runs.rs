//! One honest run of every protocol, with the counting invariants.
//!
//! cargo run --example honest_runs -- [n] [seed]

use orthoqkd::protocols::{run, ProtocolConfig, ProtocolId};

fn main() -> orthoqkd::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(16);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    println!("protocol  bits  errors  sent-1  checked  sent-2  verified  encoded  aborted");
    for p in ProtocolId::ALL {
        let t = run(&ProtocolConfig::new(p, n, seed))?;
        t.validate()?;
        let c = &t.counts;
        println!(
            "{:8} {:5} {:7} {:7} {:8} {:7} {:9} {:8}  {}",
            p.name(),
            t.sent_bits.len(),
            t.bit_errors(),
            c.transmitted_leg1,
            c.checked_leg1,
            c.transmitted_leg2,
            c.verified_leg2,
            c.encoded,
            t.aborted
        );
    }
    Ok(())
}
