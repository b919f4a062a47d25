//! Print the event log of a small CL^GV run as JSON lines.
//!
//! cargo run --example transcript_log

use orthoqkd::protocols::{run, ProtocolConfig, ProtocolId};

fn main() -> orthoqkd::Result<()> {
    let t = run(&ProtocolConfig::new(ProtocolId::ClGv, 4, 9).with_message(vec![1, 0]))?;
    for e in &t.events {
        println!("{}", serde_json::to_string(e).expect("event serializes"));
    }
    println!(
        "sent {:?}, decoded {:?}, rates {:?}",
        t.sent_bits, t.decoded_bits, t.error_rates
    );
    Ok(())
}
