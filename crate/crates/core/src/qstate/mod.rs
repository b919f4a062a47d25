//! Dense complex linear algebra for small multi-qubit registers.
//!
//! Qubit index convention: index 0 is the leftmost tensor factor, i.e. the
//! most significant bit of a computational basis index. For an `n`-qubit
//! register, qubit `q` is bit `n - 1 - q` of the basis index, so
//! `|q0 q1 … q(n-1)⟩` has index `q0·2^(n-1) + … + q(n-1)`.
//!
//! Registers are capped at [`MAX_QUBITS`] qubits: a Bell pair plus one
//! two-qubit probe per member is the largest system any computation here
//! needs.

mod density;
pub mod gates;
mod matrix;
mod measure;
mod permutation;
mod povm;
mod vector;

pub use density::DensityMatrix;
pub use matrix::{
    c, embed_operator, hermitian_eigen, is_hermitian, is_unitary, kron, matrix_sqrt_psd, CMatrix, CVector,
};
pub use measure::{measure_projective, measure_projective_mixed, Basis};
pub use permutation::{permute_particles, PermutationMap};
pub use povm::{measure_povm, Povm};
pub use vector::StateVector;

use crate::{Error, Result};

pub const MAX_QUBITS: usize = 6;

/// Norm, trace and Hermiticity tolerance.
pub const TOL: f64 = 1e-12;
/// Slack for positive-semidefiniteness and POVM completeness checks.
pub const PSD_TOL: f64 = 1e-10;

/// Either kind of quantum state, for operations that accept both.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn num_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.num_qubits(),
            QuantumState::Mixed(r) => r.num_qubits(),
        }
    }

    /// Kronecker product; both operands must be the same kind.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        match (self, other) {
            (QuantumState::Pure(a), QuantumState::Pure(b)) => Ok(QuantumState::Pure(a.tensor(b)?)),
            (QuantumState::Mixed(a), QuantumState::Mixed(b)) => Ok(QuantumState::Mixed(a.tensor(b)?)),
            _ => Err(Error::MixedKinds),
        }
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<QuantumState> {
        match self {
            QuantumState::Pure(s) => Ok(QuantumState::Pure(s.apply_unitary(u, targets)?)),
            QuantumState::Mixed(r) => Ok(QuantumState::Mixed(r.apply_unitary(u, targets)?)),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(s) => s.to_density(),
            QuantumState::Mixed(r) => r.clone(),
        }
    }
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(n)
}

pub(crate) fn check_targets(targets: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::IndexOutOfRange { index: t, num_qubits });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}
