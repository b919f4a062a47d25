//! Write the (θ, λ) grid of one protocol as CSV and report its threshold.
//!
//! cargo run --release --example security_grid -- [protocol] [resolution] > grid.csv

use orthoqkd::analysis::{build_grid, tolerable_error, Interpretation};
use orthoqkd::protocols::ProtocolId;

fn main() -> orthoqkd::Result<()> {
    let mut args = std::env::args().skip(1);
    let p: ProtocolId = args.next().unwrap_or_else(|| "PP_GV".into()).parse()?;
    let res: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let grid = build_grid(p, res, Interpretation::default())?;
    print!("{}", grid.to_csv(&[])?);
    let t = tolerable_error(&grid)?;
    eprintln!(
        "{p}: e0 = {:.4} at theta = {:.4}, lambda = {:.4}; {} boundary edges, {} non-monotone rows",
        t.e0, t.theta_star, t.lambda_star, t.boundary_edges, t.monotonicity_violations
    );
    Ok(())
}
