use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{check_targets, TOL};
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let prod = u.adjoint() * u;
    let id = CMatrix::identity(u.nrows(), u.ncols());
    (prod - id).iter().all(|z| z.norm() <= tol)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues ascend.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    // symmetrize away rounding noise first
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Principal square root of a positive-semidefinite Hermitian matrix;
/// negative rounding noise in the spectrum is clamped to zero.
pub fn matrix_sqrt_psd(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| Complex64::from(v.max(0.0).sqrt())),
    );
    &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
}

/// Lift a `k`-qubit operator acting on `targets` (in operator bit order,
/// `targets[0]` most significant) to the full `num_qubits` register.
pub fn embed_operator(op: &CMatrix, targets: &[usize], num_qubits: usize) -> Result<CMatrix> {
    check_targets(targets, num_qubits)?;
    let k = targets.len();
    let sub = 1usize << k;
    if op.nrows() != sub || op.ncols() != sub {
        return Err(Error::DimensionMismatch {
            expected: sub,
            found: op.nrows(),
        });
    }
    let dim = 1usize << num_qubits;
    let shifts: Vec<usize> = targets.iter().map(|&t| num_qubits - 1 - t).collect();
    let target_mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let sub_index = |full: usize| -> usize {
        shifts
            .iter()
            .fold(0usize, |acc, &s| (acc << 1) | ((full >> s) & 1))
    };
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        for col in 0..dim {
            if row & !target_mask != col & !target_mask {
                continue;
            }
            out[(row, col)] = op[(sub_index(row), sub_index(col))];
        }
    }
    Ok(out)
}

pub(crate) fn require_unitary(u: &CMatrix) -> Result<()> {
    if is_unitary(u, TOL * (u.nrows() as f64).max(1.0)) {
        Ok(())
    } else {
        Err(Error::NotUnitary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::gates;

    #[test]
    fn embed_single_qubit_gate_on_second_qubit() {
        let x = gates::pauli_x();
        let full = embed_operator(&x, &[1], 2).unwrap();
        assert_eq!(full, kron(&gates::identity(1), &x));
    }

    #[test]
    fn embed_respects_target_order() {
        let cnot = gates::cnot();
        // control on qubit 1, target on qubit 0
        let full = embed_operator(&cnot, &[1, 0], 2).unwrap();
        // |01> -> |11>
        assert_eq!(full[(3, 1)], c(1.0, 0.0));
        assert_eq!(full[(2, 2)], c(1.0, 0.0));
        assert_eq!(full[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn sqrt_squares_back() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.75, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.25, 0.0)]);
        let s = matrix_sqrt_psd(&m);
        assert!((&s * &s - &m).iter().all(|z| z.norm() < 1e-12));
    }
}
