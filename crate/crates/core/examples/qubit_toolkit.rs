//! The small-register toolkit on its own: Bell states, partial traces,
//! entanglement measures and a Holevo bound.
//!
//! cargo run --example qubit_toolkit

use orthoqkd::analysis::{ghz, w_state};
use orthoqkd::info::{
    concurrence, entanglement_of_formation, holevo_bound, three_tangle, von_neumann_entropy,
};
use orthoqkd::qstate::gates::{self, BellState};

fn main() -> orthoqkd::Result<()> {
    for b in BellState::ALL {
        let rho = b.state().to_density();
        let half = rho.partial_trace(&[0])?;
        println!(
            "{:4} C = {:.3}  S(A) = {:.3}",
            b.label(),
            concurrence(&rho)?,
            von_neumann_entropy(&half)
        );
    }

    // dense coding: the four Paulis on one half of |Φ+⟩ give orthogonal states
    let phi = BellState::PhiPlus.state();
    for (s, op) in gates::dense_coding_ops().iter().enumerate() {
        let out = phi.apply_unitary(op, &[0])?;
        let hit = BellState::ALL
            .iter()
            .find(|b| out.overlap(&b.state()).norm_sqr() > 0.5)
            .expect("a Bell state");
        println!("symbol {s} -> {}", hit.label());
    }

    let bb84 = [gates::ket(0), gates::ket(1), gates::psi_j(0), gates::psi_j(1)];
    let ensemble: Vec<_> = bb84.iter().map(|k| (0.25, k.to_density())).collect();
    println!(
        "Holevo bound of the BB84 ensemble: {:.4}",
        holevo_bound(&ensemble)?
    );

    let c = 0.5;
    println!("E_F(C = {c}) = {:.4}", entanglement_of_formation(c)?);
    println!(
        "tau(GHZ) = {:.4}, tau(W) = {:.4}",
        three_tangle(&ghz())?,
        three_tangle(&w_state())?
    );
    Ok(())
}
