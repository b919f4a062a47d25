use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{embed_operator, require_unitary, CMatrix, CVector};
use super::{qubits_for_dim, DensityMatrix, TOL};
use crate::{Error, Result};

/// Normalized pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
    num_qubits: usize,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        let amps = CVector::from_vec(amplitudes);
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(StateVector { amps, num_qubits })
    }

    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn from_unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        let amps = CVector::from_vec(amplitudes);
        let norm = amps.norm();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(StateVector {
            amps: amps.unscale(norm),
            num_qubits,
        })
    }

    pub(crate) fn from_cvector(amps: CVector) -> Result<Self> {
        Self::from_unnormalized(amps.iter().copied().collect())
    }

    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        qubits_for_dim(dim)?;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, num_qubits });
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps, num_qubits })
    }

    /// Haar-random pure state: a normalized vector of independent standard
    /// complex Gaussians.
    pub fn random_haar<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        let dim = 1usize << num_qubits;
        qubits_for_dim(dim)?;
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_unnormalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let num_qubits = self.num_qubits + other.num_qubits;
        qubits_for_dim(1usize << num_qubits)?;
        Ok(StateVector {
            amps: self.amps.kronecker(&other.amps),
            num_qubits,
        })
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<StateVector> {
        require_unitary(u)?;
        let full = embed_operator(u, targets, self.num_qubits)?;
        Ok(StateVector {
            amps: full * &self.amps,
            num_qubits: self.num_qubits,
        })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(&self.amps * self.amps.adjoint(), self.num_qubits)
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.to_density().partial_trace(keep)
    }

    /// Reorder qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<StateVector> {
        let n = self.num_qubits;
        check_order(order, n)?;
        let mut amps = CVector::zeros(self.dim());
        for old in 0..self.dim() {
            amps[permuted_index(old, order, n)] = self.amps[old];
        }
        Ok(StateVector { amps, num_qubits: n })
    }
}

pub(crate) fn check_order(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: order.len(),
        });
    }
    super::check_targets(order, n)
}

/// Basis index after moving old qubit `order[i]` into position `i`.
pub(crate) fn permuted_index(old: usize, order: &[usize], n: usize) -> usize {
    order.iter().enumerate().fold(0usize, |acc, (i, &q)| {
        let bit = (old >> (n - 1 - q)) & 1;
        acc | (bit << (n - 1 - i))
    })
}
