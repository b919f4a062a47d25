//! Tolerable error rate e0 of every pair protocol under each reading of
//! Bob's and Eve's information.
//!
//! cargo run --release --example threshold_variants -- [resolution]

use orthoqkd::analysis::{threshold_variants, PAIR_PROTOCOLS};

fn main() -> orthoqkd::Result<()> {
    let resolution = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    for p in PAIR_PROTOCOLS {
        for v in threshold_variants(p, resolution)? {
            match v.result {
                Some(t) => println!(
                    "{:7} {:70} e0 = {:6.3}%  at theta = {:.4}, lambda = {:.4}",
                    p.name(),
                    v.label,
                    100.0 * t.e0,
                    t.theta_star,
                    t.lambda_star
                ),
                None => println!("{:7} {:70} no finite threshold", p.name(), v.label),
            }
        }
    }
    Ok(())
}
