//! Classical and quantum information measures. Logarithms are base 2
//! throughout, so every entropy and information quantity is in bits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qstate::{
    c, gates, hermitian_eigen, kron, matrix_sqrt_psd, CMatrix, DensityMatrix, StateVector, PSD_TOL, TOL,
};
use crate::{Error, Result};

/// A probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {p} is negative")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(ProbDist(probabilities))
    }

    /// Normalize nonnegative weights.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        ProbDist::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(d: usize) -> Self {
        ProbDist(vec![1.0 / d as f64; d])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// `H₂(p) = −p log p − (1−p) log(1−p)`; `p` is clamped to `[0, 1]`.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    -(plogp(p) + plogp(1.0 - p))
}

pub fn shannon_entropy(p: &ProbDist) -> f64 {
    -p.0.iter().map(|&x| plogp(x)).sum::<f64>()
}

/// Relative entropy of `p` with respect to the uniform distribution,
/// `log₂ d − H(p)`.
pub fn entropic_knowledge(p: &ProbDist) -> f64 {
    (p.len() as f64).log2() - shannon_entropy(p)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    -eigenvalues
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| plogp(l))
        .sum::<f64>()
}

/// `χ = S(Σ p_i ρ_i) − Σ p_i S(ρ_i)`.
pub fn holevo_bound(ensemble: &[(f64, DensityMatrix)]) -> Result<f64> {
    let dist = ProbDist::new(ensemble.iter().map(|(p, _)| *p).collect())?;
    let parts: Vec<(f64, &DensityMatrix)> = ensemble.iter().map(|(p, r)| (*p, r)).collect();
    let average = DensityMatrix::mixture(&parts)?;
    let conditional: f64 = dist
        .probabilities()
        .iter()
        .zip(ensemble)
        .map(|(p, (_, r))| p * von_neumann_entropy(r))
        .sum();
    Ok((von_neumann_entropy(&average) - conditional).max(0.0))
}

/// Capacity `1 − H₂(e)` of a binary symmetric channel with error rate `e`.
pub fn mutual_information_binary(e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::out_of_range("error rate", e, 0.0, 1.0));
    }
    Ok(1.0 - binary_entropy(e))
}

/// Mutual information of a joint distribution `joint[x][y]`.
pub fn mutual_information(joint: &[Vec<f64>]) -> Result<f64> {
    let cols = joint.first().map_or(0, |r| r.len());
    if cols == 0 || joint.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidDistribution("ragged joint table".into()));
    }
    let flat = ProbDist::new(joint.iter().flatten().copied().collect())?;
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..cols).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
    let h = |v: &[f64]| -v.iter().map(|&x| plogp(x)).sum::<f64>();
    Ok((h(&px) + h(&py) - shannon_entropy(&flat)).max(0.0))
}

/// Which-path distinguishability `P` and coherence `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityPair {
    pub distinguishability: f64,
    pub coherence: f64,
}

impl DualityPair {
    pub fn sum(&self) -> f64 {
        self.distinguishability + self.coherence
    }
}

/// Duality quantities for pure probe states `u = C₀|R⟩`, `d = C₁|R⟩`:
/// `P = 1 − |⟨u|d⟩|`, `C = |⟨u|d⟩|`.
pub fn duality_quantities(u: &StateVector, d: &StateVector) -> Result<DualityPair> {
    if u.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: d.dim(),
        });
    }
    for s in [u, d] {
        if (s.norm_squared() - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(s.norm_squared()));
        }
    }
    let s = u.overlap(d).norm().min(1.0);
    Ok(DualityPair {
        distinguishability: 1.0 - s,
        coherence: s,
    })
}

/// Root fidelity `Tr √(√ρ σ √ρ)`.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let s = matrix_sqrt_psd(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let (vals, _) = hermitian_eigen(&inner);
    Ok(vals.iter().map(|v| v.max(0.0).sqrt()).sum::<f64>().min(1.0))
}

/// Duality quantities for a probe that starts in the mixed state
/// `probe_ready` and evolves by `C₀` or `C₁` depending on the path.
///
/// `P = 1 − F(C₀ρC₀†, C₁ρC₁†)` bounds unambiguous path discrimination and
/// `C = |Tr(C₀ ρ C₁†)|` is the off-diagonal magnitude of the particle's
/// path state. Both reduce to the pure-probe values.
pub fn duality_quantities_mixed(
    c0: &CMatrix,
    c1: &CMatrix,
    probe_ready: &DensityMatrix,
) -> Result<DualityPair> {
    let r = probe_ready.matrix();
    if c0.nrows() != r.nrows() || c1.nrows() != r.nrows() {
        return Err(Error::DimensionMismatch {
            expected: r.nrows(),
            found: c0.nrows(),
        });
    }
    let rho_u = conjugated(c0, r)?;
    let rho_d = conjugated(c1, r)?;
    let f = root_fidelity(&rho_u, &rho_d)?;
    let coherence = (c0 * r * c1.adjoint()).trace().norm().min(1.0);
    Ok(DualityPair {
        distinguishability: 1.0 - f,
        coherence,
    })
}

fn conjugated(u: &CMatrix, r: &CMatrix) -> Result<DensityMatrix> {
    let m = u * r * u.adjoint();
    DensityMatrix::new((&m + m.adjoint()).scale(0.5))
}

/// Bell basis with the phases that make `|Σ α_j²|` the concurrence:
/// `Φ+, iΦ−, iΨ+, Ψ−`.
pub fn magic_basis() -> [StateVector; 4] {
    let phase = |s: StateVector, z: Complex64| {
        StateVector::new(s.amplitudes().iter().map(|a| a * z).collect()).expect("unit phase")
    };
    [
        gates::BellState::PhiPlus.state(),
        phase(gates::BellState::PhiMinus.state(), c(0., 1.)),
        phase(gates::BellState::PsiPlus.state(), c(0., 1.)),
        gates::BellState::PsiMinus.state(),
    ]
}

/// Concurrence of a pure two-qubit state from its Bell-basis expansion
/// `|ψ⟩ = Σ α_j |Φ_j⟩`, `c = |Σ α_j²|`.
pub fn concurrence_pure(psi: &StateVector) -> Result<f64> {
    if psi.num_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: psi.dim(),
        });
    }
    let sum: Complex64 = magic_basis()
        .iter()
        .map(|b| {
            let a = b.overlap(psi);
            a * a
        })
        .sum();
    Ok(sum.norm().min(1.0))
}

/// Wootters concurrence of a (possibly mixed) two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let yy = kron(&gates::pauli_y(), &gates::pauli_y());
    let r = rho.matrix();
    let flipped = &yy * r.conjugate() * &yy;
    let s = matrix_sqrt_psd(r);
    let (vals, _) = hermitian_eigen(&(&s * flipped * &s));
    let mut l: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Squared concurrence.
pub fn tangle(rho: &DensityMatrix) -> Result<f64> {
    concurrence(rho).map(|c| c * c)
}

pub fn entanglement_of_formation(concurrence: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&concurrence) {
        return Err(Error::out_of_range("concurrence", concurrence, 0.0, 1.0));
    }
    Ok(binary_entropy(
        0.5 + 0.5 * (1.0 - concurrence * concurrence).sqrt(),
    ))
}

/// Tangles of qubit A of a pure three-qubit state `A⊗B⊗E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonogamyTriple {
    pub e_ab: f64,
    pub e_ae: f64,
    pub e_abe: f64,
}

impl MonogamyTriple {
    pub fn from_state(psi: &StateVector) -> Result<Self> {
        if psi.num_qubits() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 8,
                found: psi.dim(),
            });
        }
        let rho = psi.to_density();
        let rho_a = rho.partial_trace(&[0])?;
        let det = (rho_a.entry(0, 0) * rho_a.entry(1, 1) - rho_a.entry(0, 1) * rho_a.entry(1, 0)).re;
        Ok(MonogamyTriple {
            e_ab: tangle(&rho.partial_trace(&[0, 1])?)?,
            e_ae: tangle(&rho.partial_trace(&[0, 2])?)?,
            e_abe: (4.0 * det).clamp(0.0, 1.0),
        })
    }

    /// Residual three-way entanglement `τ = ℰ(A|BE) − ℰ(A|B) − ℰ(A|E)`.
    pub fn three_tangle(&self) -> f64 {
        self.e_abe - self.e_ab - self.e_ae
    }

    /// Slack in `ℰ(A|B) + ℰ(A|E) ≤ ℰ(A|BE)`; negative means violation.
    pub fn slack(&self) -> f64 {
        self.three_tangle()
    }
}

pub fn three_tangle(psi: &StateVector) -> Result<f64> {
    MonogamyTriple::from_state(psi).map(|m| m.three_tangle())
}

/// `(Tr ρ², 1 − Tr ρ²)`.
pub fn purity_measures(rho: &DensityMatrix) -> (f64, f64) {
    let p = rho.purity();
    (p, 1.0 - p)
}

/// Entropic reading of the duality-as-monogamy relation for a pure
/// system-probe state: `H₂(P/2) + H₂((1−P)/2)`.
pub fn duality_monogamy_lhs(distinguishability: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&distinguishability) {
        return Err(Error::out_of_range(
            "distinguishability",
            distinguishability,
            0.0,
            1.0,
        ));
    }
    let p = distinguishability;
    Ok(binary_entropy(p / 2.0) + binary_entropy((1.0 - p) / 2.0))
}

/// True if `rho` is PSD up to the shared slack.
pub fn is_physical(rho: &CMatrix) -> bool {
    hermitian_eigen(rho).0.first().is_some_and(|&v| v >= -PSD_TOL)
}
