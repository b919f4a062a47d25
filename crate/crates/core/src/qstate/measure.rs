use rand::Rng;

use super::matrix::{embed_operator, CMatrix};
use super::{DensityMatrix, StateVector, PSD_TOL};
use crate::{Error, Result};

/// Complete orthonormal basis of a `k`-qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    vectors: Vec<StateVector>,
}

impl Basis {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        let first = vectors.first().ok_or(Error::NotOrthonormal)?;
        let dim = first.dim();
        if vectors.len() != dim || vectors.iter().any(|v| v.dim() != dim) {
            return Err(Error::NotOrthonormal);
        }
        for (i, a) in vectors.iter().enumerate() {
            for b in &vectors[i + 1..] {
                if a.overlap(b).norm() > PSD_TOL {
                    return Err(Error::NotOrthonormal);
                }
            }
        }
        Ok(Basis { vectors })
    }

    pub fn num_qubits(&self) -> usize {
        self.vectors[0].num_qubits()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn projector(&self, k: usize) -> CMatrix {
        let v = self.vectors[k].amplitudes();
        v * v.adjoint()
    }

    fn full_projectors(&self, targets: &[usize], num_qubits: usize) -> Result<Vec<CMatrix>> {
        if targets.len() != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                found: targets.len(),
            });
        }
        (0..self.len())
            .map(|k| embed_operator(&self.projector(k), targets, num_qubits))
            .collect()
    }

    /// Born probabilities for measuring `targets` of a pure state.
    pub fn probabilities(&self, state: &StateVector, targets: &[usize]) -> Result<Vec<f64>> {
        let ps = self.full_projectors(targets, state.num_qubits())?;
        Ok(ps
            .iter()
            .map(|p| (p * state.amplitudes()).norm_squared())
            .collect())
    }

    /// Born probabilities for measuring `targets` of a mixed state.
    pub fn probabilities_mixed(&self, rho: &DensityMatrix, targets: &[usize]) -> Result<Vec<f64>> {
        let ps = self.full_projectors(targets, rho.num_qubits())?;
        Ok(ps.iter().map(|p| rho.expectation(p).max(0.0)).collect())
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding gap above the last cumulative sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Measure `targets` of a pure state in `basis`, returning the outcome and
/// the normalized post-measurement state.
pub fn measure_projective<R: Rng + ?Sized>(
    state: &StateVector,
    basis: &Basis,
    targets: &[usize],
    rng: &mut R,
) -> Result<(usize, StateVector)> {
    let ps = basis.full_projectors(targets, state.num_qubits())?;
    let projected: Vec<_> = ps.iter().map(|p| p * state.amplitudes()).collect();
    let probs: Vec<f64> = projected.iter().map(|v| v.norm_squared()).collect();
    let k = sample_index(&probs, rng);
    let post = StateVector::from_cvector(projected[k].clone())?;
    Ok((k, post))
}

/// Mixed-state counterpart of [`measure_projective`].
pub fn measure_projective_mixed<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    basis: &Basis,
    targets: &[usize],
    rng: &mut R,
) -> Result<(usize, DensityMatrix)> {
    let ps = basis.full_projectors(targets, rho.num_qubits())?;
    let probs: Vec<f64> = ps.iter().map(|p| rho.expectation(p).max(0.0)).collect();
    let k = sample_index(&probs, rng);
    let p = &ps[k];
    let post = (p * rho.matrix() * p).unscale(probs[k]);
    Ok((k, DensityMatrix::from_matrix_unchecked(post, rho.num_qubits())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::gates::{self, BellState};
    use crate::rng::seeded;

    #[test]
    fn bell_state_measured_in_bell_basis_is_certain() {
        let mut rng = seeded(1);
        let psi = BellState::PsiPlus.state();
        let basis = gates::bell_basis();
        let probs = basis.probabilities(&psi, &[0, 1]).unwrap();
        assert!((probs[BellState::PsiPlus.index()] - 1.0).abs() < 1e-14);
        for _ in 0..20 {
            let (k, post) = measure_projective(&psi, &basis, &[0, 1], &mut rng).unwrap();
            assert_eq!(k, BellState::PsiPlus.index());
            assert!((post.overlap(&psi).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn psi0_in_z_basis_is_fair() {
        let probs = gates::z_basis().probabilities(&gates::psi_j(0), &[0]).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-15 && (probs[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ket00_in_bell_basis_splits_between_phi_states() {
        // |00> = (Φ+ + Φ-)/√2
        let s = StateVector::basis_state(2, 0).unwrap();
        let probs = gates::bell_basis().probabilities(&s, &[0, 1]).unwrap();
        let expected = [0.5, 0.5, 0.0, 0.0];
        for (p, e) in probs.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        assert_eq!(
            Basis::new(vec![gates::ket(0), gates::psi_j(0)]),
            Err(Error::NotOrthonormal)
        );
        assert_eq!(Basis::new(vec![gates::ket(0)]), Err(Error::NotOrthonormal));
    }

    #[test]
    fn partial_measurement_collapses_partner() {
        let mut rng = seeded(3);
        let psi = BellState::PsiPlus.state();
        let (k, post) = measure_projective(&psi, &gates::z_basis(), &[0], &mut rng).unwrap();
        let partner = post.reduced(&[1]).unwrap();
        assert!((partner.entry(1 - k, 1 - k).re - 1.0).abs() < 1e-14);
    }
}
