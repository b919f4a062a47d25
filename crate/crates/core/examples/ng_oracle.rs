//! Brute-force evolution of |Φ+⟩ under the symmetric single-qubit attack
//! against the closed form ¼(1 + cos²θ)², and the trace of the matrix as
//! it is usually printed.
//!
//! cargo run --example ng_oracle

use orthoqkd::analysis::ng_oracle_report;

fn main() -> orthoqkd::Result<()> {
    let r = ng_oracle_report(11)?;
    println!("theta    oracle     analytic   printed tr  printed F");
    for p in &r.points {
        println!(
            "{:.4}  {:.8}  {:.8}  {:.6}    {:.6}",
            p.theta, p.oracle_fidelity, p.analytic_fidelity, p.printed_trace, p.printed_fidelity
        );
    }
    println!("max |oracle - analytic| = {:.2e}", r.max_abs_diff);
    println!("{}", r.discrepancy_note);
    Ok(())
}
