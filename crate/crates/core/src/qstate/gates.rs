//! Standard gates and named states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{c, CMatrix};
use super::{Basis, StateVector};

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

pub fn identity(num_qubits: usize) -> CMatrix {
    CMatrix::identity(1 << num_qubits, 1 << num_qubits)
}

pub fn pauli_x() -> CMatrix {
    m2(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

pub fn pauli_y() -> CMatrix {
    m2(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

pub fn pauli_z() -> CMatrix {
    m2(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

/// `iY = [[0, 1], [-1, 0]]`, the real dense-coding operation.
pub fn i_y() -> CMatrix {
    m2(c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.))
}

pub fn hadamard() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    m2(c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.))
}

/// Real rotation `exp(-i angle Y / 2)`.
pub fn ry(angle: f64) -> CMatrix {
    let (s, co) = (angle / 2.0).sin_cos();
    m2(c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.))
}

pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(1., 0.);
    m[(1, 1)] = c(1., 0.);
    m[(2, 3)] = c(1., 0.);
    m[(3, 2)] = c(1., 0.);
    m
}

/// Dense-coding operations in symbol order `00, 01, 10, 11`.
pub fn dense_coding_ops() -> [CMatrix; 4] {
    [identity(1), pauli_x(), i_y(), pauli_z()]
}

/// `|j⟩` for a single qubit.
pub fn ket(j: usize) -> StateVector {
    StateVector::basis_state(1, j).expect("single-qubit basis state")
}

/// GV coding state `|ψ_j⟩ = H|j⟩ = (|0⟩ + (-1)^j |1⟩)/√2`.
pub fn psi_j(j: usize) -> StateVector {
    ket(j)
        .apply_unitary(&hadamard(), &[0])
        .expect("hadamard on one qubit")
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellState {
    #[serde(rename = "Phi+")]
    PhiPlus,
    #[serde(rename = "Phi-")]
    PhiMinus,
    #[serde(rename = "Psi+")]
    PsiPlus,
    #[serde(rename = "Psi-")]
    PsiMinus,
}

impl BellState {
    /// Ordering `Φ0 = Φ+, Φ1 = Φ−, Φ2 = Ψ+, Φ3 = Ψ−`.
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<BellState> {
        Self::ALL.get(i).copied()
    }

    pub fn state(self) -> StateVector {
        let h = FRAC_1_SQRT_2;
        let amps = match self {
            BellState::PhiPlus => [h, 0., 0., h],
            BellState::PhiMinus => [h, 0., 0., -h],
            BellState::PsiPlus => [0., h, h, 0.],
            BellState::PsiMinus => [0., h, -h, 0.],
        };
        StateVector::new(amps.iter().map(|&a| c(a, 0.)).collect()).expect("normalized Bell state")
    }

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
        }
    }

    /// Outcomes of the same-basis comparison of the two halves:
    /// `(z_anticorrelated, x_anticorrelated)`.
    pub fn correlations(self) -> (bool, bool) {
        match self {
            BellState::PhiPlus => (false, false),
            BellState::PhiMinus => (false, true),
            BellState::PsiPlus => (true, false),
            BellState::PsiMinus => (true, true),
        }
    }

    /// Bell state reached from `self` by applying the dense-coding
    /// operation for `symbol` to the first qubit, up to global phase.
    pub fn after_pauli(self, symbol: usize) -> BellState {
        let (z_anti, x_anti) = self.correlations();
        // X flips Z-correlation, Z flips X-correlation, iY flips both.
        let (fz, fx) = match symbol {
            0 => (false, false),
            1 => (true, false),
            2 => (true, true),
            3 => (false, true),
            _ => panic!("dense-coding symbol out of range"),
        };
        BellState::from_correlations(z_anti ^ fz, x_anti ^ fx)
    }

    pub fn from_correlations(z_anti: bool, x_anti: bool) -> BellState {
        match (z_anti, x_anti) {
            (false, false) => BellState::PhiPlus,
            (false, true) => BellState::PhiMinus,
            (true, false) => BellState::PsiPlus,
            (true, true) => BellState::PsiMinus,
        }
    }
}

pub fn bell_basis() -> Basis {
    Basis::new(BellState::ALL.iter().map(|b| b.state()).collect()).expect("Bell basis")
}

pub fn z_basis() -> Basis {
    Basis::new(vec![ket(0), ket(1)]).expect("computational basis")
}

pub fn x_basis() -> Basis {
    Basis::new(vec![psi_j(0), psi_j(1)]).expect("diagonal basis")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{is_unitary, kron};

    #[test]
    fn gates_are_unitary() {
        for g in [
            pauli_x(),
            pauli_y(),
            pauli_z(),
            i_y(),
            hadamard(),
            ry(0.3),
            cnot(),
        ] {
            assert!(is_unitary(&g, 1e-14));
        }
    }

    #[test]
    fn pauli_map_on_bell_states_matches_explicit_algebra() {
        for b in BellState::ALL {
            for (k, op) in dense_coding_ops().iter().enumerate() {
                let full = kron(op, &identity(1));
                let out = b.state().apply_unitary(&full, &[0, 1]).unwrap();
                let target = b.after_pauli(k).state();
                assert!((out.overlap(&target).norm() - 1.0).abs() < 1e-12, "{b:?} {k}");
            }
        }
    }

    #[test]
    fn iy_maps_psi_plus_to_phi_minus() {
        assert_eq!(BellState::PsiPlus.after_pauli(2), BellState::PhiMinus);
        assert_eq!(BellState::PsiPlus.after_pauli(1), BellState::PhiPlus);
        assert_eq!(BellState::PsiPlus.after_pauli(3), BellState::PsiMinus);
    }
}
