use rand::Rng;

use super::matrix::{hermitian_eigen, is_hermitian, CMatrix};
use super::measure::sample_index;
use super::{DensityMatrix, StateVector, PSD_TOL};
use crate::{Error, Result};

/// Positive operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let dim = first.nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for (k, m) in elements.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidPovm(format!("element {k} has the wrong shape")));
            }
            if !is_hermitian(m, PSD_TOL) {
                return Err(Error::InvalidPovm(format!("element {k} is not Hermitian")));
            }
            if hermitian_eigen(m).0[0] < -PSD_TOL {
                return Err(Error::InvalidPovm(format!("element {k} is not PSD")));
            }
            sum += m;
        }
        if (sum - CMatrix::identity(dim, dim))
            .iter()
            .any(|z| z.norm() > PSD_TOL)
        {
            return Err(Error::InvalidPovm("elements do not sum to identity".into()));
        }
        Ok(Povm { elements })
    }

    /// Optimal unambiguous discrimination of two pure probe states:
    /// `M_a = (𝟙 − |d⟩⟨d|)/(1 + |⟨u|d⟩|)` identifies `u`,
    /// `M_b = (𝟙 − |u⟩⟨u|)/(1 + |⟨u|d⟩|)` identifies `d`, and `M_0` is the
    /// inconclusive remainder. `𝟙` is the projector onto `span{u, d}`; the
    /// rest of the space goes to `M_0`.
    pub fn unambiguous(u: &StateVector, d: &StateVector) -> Result<Self> {
        if u.dim() != d.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: d.dim(),
            });
        }
        let ua = u.amplitudes();
        let da = d.amplitudes();
        let overlap = ua.dotc(da);
        let s = overlap.norm();
        let mut span = ua * ua.adjoint();
        let residual = da - ua * overlap;
        if residual.norm() > 1e-12 {
            let e2 = residual.unscale(residual.norm());
            span += &e2 * e2.adjoint();
        }
        let m_a = (&span - da * da.adjoint()).unscale(1.0 + s);
        let m_b = (&span - ua * ua.adjoint()).unscale(1.0 + s);
        let dim = u.dim();
        let m_0 = CMatrix::identity(dim, dim) - &m_a - &m_b;
        Povm::new(vec![m_a, m_b, m_0])
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    /// Outcome probabilities `Tr(M_k ρ)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(self
            .elements
            .iter()
            .map(|m| rho.expectation(m).max(0.0))
            .collect())
    }
}

pub fn measure_povm<R: Rng + ?Sized>(rho: &DensityMatrix, povm: &Povm, rng: &mut R) -> Result<usize> {
    let probs = povm.probabilities(rho)?;
    Ok(sample_index(&probs, rng))
}
