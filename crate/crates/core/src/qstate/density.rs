use num_complex::Complex64;

use super::matrix::{embed_operator, hermitian_eigen, is_hermitian, require_unitary, CMatrix};
use super::vector::{check_order, permuted_index};
use super::{check_targets, qubits_for_dim, StateVector, PSD_TOL, TOL};
use crate::{Error, Result};

/// Density operator of `n` qubits: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
    num_qubits: usize,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDensity("matrix is not square".into()));
        }
        let num_qubits = qubits_for_dim(m.nrows())?;
        if !is_hermitian(&m, TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let (vals, _) = hermitian_eigen(&m);
        if vals[0] < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "smallest eigenvalue {} is negative",
                vals[0]
            )));
        }
        Ok(DensityMatrix { m, num_qubits })
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix, num_qubits: usize) -> Self {
        DensityMatrix { m, num_qubits }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        qubits_for_dim(dim)?;
        Ok(DensityMatrix {
            m: CMatrix::identity(dim, dim).unscale(dim as f64),
            num_qubits,
        })
    }

    /// Mixture `Σ w_i ρ_i`; weights must form a distribution.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidDistribution("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidDistribution(format!("negative weight {w}")));
            }
            total += w;
            m += rho.m.scale(*w);
        }
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(DensityMatrix {
            m,
            num_qubits: first.1.num_qubits,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).0
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// `Tr(op ρ)`, real part.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        (op * &self.m).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let a = psi.amplitudes();
        Ok((a.adjoint() * &self.m * a)[(0, 0)].re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let num_qubits = self.num_qubits + other.num_qubits;
        qubits_for_dim(1usize << num_qubits)?;
        Ok(DensityMatrix {
            m: self.m.kronecker(&other.m),
            num_qubits,
        })
    }

    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        require_unitary(u)?;
        let full = embed_operator(u, targets, self.num_qubits)?;
        Ok(DensityMatrix {
            m: &full * &self.m * full.adjoint(),
            num_qubits: self.num_qubits,
        })
    }

    /// Apply the channel `ρ ↦ Σ K ρ K†` on `targets`. The Kraus operators
    /// must satisfy `Σ K†K = I`.
    pub fn apply_kraus(&self, kraus: &[CMatrix], targets: &[usize]) -> Result<DensityMatrix> {
        let sub = 1usize << targets.len();
        let mut completeness = CMatrix::zeros(sub, sub);
        for k in kraus {
            completeness += k.adjoint() * k;
        }
        if (completeness - CMatrix::identity(sub, sub))
            .iter()
            .any(|z| z.norm() > 1e-10)
        {
            return Err(Error::InvalidPovm(
                "Kraus operators are not trace preserving".into(),
            ));
        }
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            let full = embed_operator(k, targets, self.num_qubits)?;
            m += &full * &self.m * full.adjoint();
        }
        Ok(DensityMatrix {
            m,
            num_qubits: self.num_qubits,
        })
    }

    /// Reduced state on `keep`, whose order fixes the output qubit order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let n = self.num_qubits;
        check_targets(keep, n)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let t = traced.len();
        let compose = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut full = 0usize;
            for (i, &q) in keep.iter().enumerate() {
                full |= ((kept_bits >> (k - 1 - i)) & 1) << (n - 1 - q);
            }
            for (i, &q) in traced.iter().enumerate() {
                full |= ((traced_bits >> (t - 1 - i)) & 1) << (n - 1 - q);
            }
            full
        };
        let kd = 1usize << k;
        let mut out = CMatrix::zeros(kd, kd);
        for r in 0..kd {
            for cc in 0..kd {
                let mut acc = Complex64::new(0.0, 0.0);
                for e in 0..(1usize << t) {
                    acc += self.m[(compose(r, e), compose(cc, e))];
                }
                out[(r, cc)] = acc;
            }
        }
        Ok(DensityMatrix {
            m: out,
            num_qubits: k,
        })
    }

    /// Reorder qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<DensityMatrix> {
        let n = self.num_qubits;
        check_order(order, n)?;
        let dim = self.dim();
        let map: Vec<usize> = (0..dim).map(|i| permuted_index(i, order, n)).collect();
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for cc in 0..dim {
                m[(map[r], map[cc])] = self.m[(r, cc)];
            }
        }
        Ok(DensityMatrix { m, num_qubits: n })
    }

    /// Check all invariants (used after long chains of unchecked updates).
    pub fn validate(&self) -> Result<()> {
        DensityMatrix::new(self.m.clone()).map(|_| ())
    }
}
