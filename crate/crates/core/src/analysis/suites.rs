//! Numerical checks of the duality, monogamy and uncertainty relations and
//! of the symmetric attack's closed form.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::attacks::{gv_probe_state, ng_unitary, symmetric_attack, AttackParams};
use crate::info::{
    binary_entropy, duality_monogamy_lhs, duality_quantities_mixed, shannon_entropy, von_neumann_entropy,
    MonogamyTriple, ProbDist,
};
use crate::qstate::gates::{self, BellState};
use crate::qstate::{c, CMatrix, DensityMatrix, Povm, StateVector};
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 100;

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::Config(format!(
            "suite needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    Ok(())
}

/// Haar-distributed unitary on `num_qubits` qubits (QR of a Ginibre matrix
/// with the phases of `R`'s diagonal divided out).
pub fn random_unitary<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> CMatrix {
    let d = 1usize << num_qubits;
    let g = CMatrix::from_fn(d, d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) };
        for row in 0..d {
            q[(row, k)] *= phase;
        }
    }
    q
}

fn random_mixed<R: Rng + ?Sized>(num_qubits: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let states = (0..rank)
        .map(|_| StateVector::random_haar(num_qubits, rng).map(|s| s.to_density()))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<(f64, &DensityMatrix)> = weights.iter().map(|w| w / total).zip(&states).collect();
    DensityMatrix::mixture(&parts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub samples: usize,
    /// `max |P + C − 1|` with `P` from the optimal unambiguous POVM and `C`
    /// from the off-diagonal of Bob's path state.
    pub pure_max_violation: f64,
    /// `max (P + C − 1)` over mixed probe initializations.
    pub mixed_max_excess: f64,
    pub mixed_violations: usize,
    pub entropy_max: f64,
    pub entropy_argmax: f64,
}

/// Maximise `H(P/2) + H((1−P)/2)` over `P ∈ [0, 1]` by golden-section search.
pub fn duality_entropy_max() -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |p: f64| duality_monogamy_lhs(p);
    let (mut a, mut b) = (0.0, 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        }
    }
    let p = 0.5 * (a + b);
    Ok((f(p)?, p))
}

pub fn duality_suite<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> Result<DualityReport> {
    check_samples(samples)?;
    let mut pure_max: f64 = 0.0;
    let mut mixed_max = f64::NEG_INFINITY;
    let mut mixed_violations = 0;
    let ready = gates::ket(0);
    for _ in 0..samples {
        let c0 = random_unitary(1, rng);
        let c1 = random_unitary(1, rng);
        let u = ready.apply_unitary(&c0, &[0])?;
        let d = ready.apply_unitary(&c1, &[0])?;
        // P: conclusive probability of the optimal unambiguous measurement
        let povm = Povm::unambiguous(&u, &d)?;
        let pu = povm.probabilities(&u.to_density())?;
        let pd = povm.probabilities(&d.to_density())?;
        let p = 0.5 * (pu[0] + pd[1]);
        // C: coherence between Bob's recombined |ψ₀⟩ and |ψ₁⟩ branches
        let joint = gv_probe_state(0, &c0, &c1, &ready)?.apply_unitary(&gates::hadamard(), &[0])?;
        let coherence = 2.0 * joint.reduced(&[0])?.entry(0, 1).norm();
        pure_max = pure_max.max((p + coherence - 1.0).abs());

        let rho = random_mixed(2, 1 + rng.random_range(1..4usize), rng)?;
        let m = duality_quantities_mixed(&random_unitary(2, rng), &random_unitary(2, rng), &rho)?;
        let excess = m.sum() - 1.0;
        mixed_max = mixed_max.max(excess);
        if excess > 1e-10 {
            mixed_violations += 1;
        }
    }
    let (entropy_max, entropy_argmax) = duality_entropy_max()?;
    Ok(DualityReport {
        samples,
        pure_max_violation: pure_max,
        mixed_max_excess: mixed_max,
        mixed_violations,
        entropy_max,
        entropy_argmax,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub eps_overlap: f64,
    pub probe_entropy: f64,
    pub bell_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyReport {
    pub samples: usize,
    pub violations: usize,
    pub min_slack: f64,
    pub ghz_tau: f64,
    pub ghz_pairwise_max: f64,
    pub w_tau: f64,
    pub family: Vec<FamilyPoint>,
    /// Bell fidelity falls strictly as probe entanglement grows.
    pub family_strictly_decreasing: bool,
}

pub fn ghz() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = vec![c(0.0, 0.0); 8];
    a[0] = c(h, 0.0);
    a[7] = c(h, 0.0);
    StateVector::new(a).expect("normalized")
}

pub fn w_state() -> StateVector {
    let s = 1.0 / 3f64.sqrt();
    let mut a = vec![c(0.0, 0.0); 8];
    for i in [1, 2, 4] {
        a[i] = c(s, 0.0);
    }
    StateVector::new(a).expect("normalized")
}

pub fn monogamy_suite<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> Result<MonogamyReport> {
    check_samples(samples)?;
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..samples {
        let psi = StateVector::random_haar(3, rng)?;
        let slack = MonogamyTriple::from_state(&psi)?.slack();
        min_slack = min_slack.min(slack);
        if slack < -1e-9 {
            violations += 1;
        }
    }
    let g = MonogamyTriple::from_state(&ghz())?;
    let w = MonogamyTriple::from_state(&w_state())?;

    let psi = BellState::PsiPlus.state();
    let mut family = Vec::new();
    for k in 0..=10 {
        let s = 1.0 - k as f64 / 10.0;
        let rec = symmetric_attack(&psi, 0, &AttackParams::asymmetric(0.0, 0.0, s, s))?;
        family.push(FamilyPoint {
            eps_overlap: s,
            probe_entropy: von_neumann_entropy(&rec.probe_state()?),
            bell_fidelity: rec.system_state()?.fidelity_with_pure(&psi)?,
        });
    }
    let strictly = family
        .windows(2)
        .all(|w| w[1].probe_entropy > w[0].probe_entropy && w[1].bell_fidelity < w[0].bell_fidelity);
    Ok(MonogamyReport {
        samples,
        violations,
        min_slack,
        ghz_tau: g.three_tangle(),
        ghz_pairwise_max: g.e_ab.max(g.e_ae),
        w_tau: w.three_tangle(),
        family,
        family_strictly_decreasing: strictly,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergReport {
    /// Bob's error in the computational (R) basis.
    pub r_error: f64,
    /// Bob's outcome distribution in the diagonal (D) basis, per input.
    pub d_probabilities: Vec<[f64; 2]>,
    pub h_r: f64,
    pub h_d: f64,
    /// `|H(D) − 1|`, zero when the uncertainty bound is attained.
    pub deviation: f64,
}

/// Error-free attack (θ = 0) with orthogonal `ε` vectors: R is untouched,
/// D is fully randomised.
pub fn heisenberg_check() -> Result<HeisenbergReport> {
    let p = AttackParams::asymmetric(0.0, 0.0, 0.0, 0.0);
    let mut r_error: f64 = 0.0;
    for j in 0..2 {
        let bob = symmetric_attack(&gates::ket(j), 0, &p)?.system_state()?;
        r_error = r_error.max(bob.entry(1 - j, 1 - j).re);
    }
    let x = gates::x_basis();
    let mut d_probabilities = Vec::new();
    let mut h_d: f64 = 1.0;
    let mut deviation: f64 = 0.0;
    for j in 0..2 {
        let bob = symmetric_attack(&gates::psi_j(j), 0, &p)?.system_state()?;
        let probs = x.probabilities_mixed(&bob, &[0])?;
        let h = shannon_entropy(&ProbDist::new(probs.clone())?);
        h_d = h_d.min(h);
        deviation = deviation.max((h - 1.0).abs()).max((probs[0] - 0.5).abs());
        d_probabilities.push([probs[0], probs[1]]);
    }
    Ok(HeisenbergReport {
        r_error,
        d_probabilities,
        h_r: binary_entropy(r_error),
        h_d,
        deviation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraclePoint {
    pub theta: f64,
    pub oracle_fidelity: f64,
    pub analytic_fidelity: f64,
    /// Trace of the printed (unnormalized) two-qubit matrix.
    pub printed_trace: f64,
    /// `⟨Φ⁺|ρ″|Φ⁺⟩` of the printed matrix as it stands.
    pub printed_fidelity: f64,
    pub printed_claim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub points: Vec<OraclePoint>,
    pub max_abs_diff: f64,
    pub discrepancy_note: String,
}

/// The printed `ρ″` for a `|Φ⁺⟩` pair with both qubits attacked.
pub fn printed_rho_double_prime(theta: f64) -> CMatrix {
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let a = 0.5 * (1.0 + c2);
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(a, 0.0);
    m[(3, 3)] = c(a, 0.0);
    m[(0, 3)] = c(a * c2, 0.0);
    m[(3, 0)] = c(a * c2, 0.0);
    m[(1, 1)] = c(0.5 * s2, 0.0);
    m[(2, 2)] = c(0.5 * s2, 0.0);
    m[(1, 2)] = c(0.5 * s2 * c2, 0.0);
    m[(2, 1)] = c(0.5 * s2 * c2, 0.0);
    m
}

/// Brute-force evolution of `|Φ⁺⟩` with a fresh symmetric probe on each
/// qubit, compared with `¼(1 + cos²θ)²` at `points` angles in `[0, π/2]`.
pub fn ng_oracle_report(points: usize) -> Result<OracleReport> {
    let phi = BellState::PhiPlus.state();
    let start = phi.tensor(&StateVector::basis_state(4, 0)?)?;
    let mut out = Vec::with_capacity(points);
    let mut max_diff: f64 = 0.0;
    for k in 0..points {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64 / (points.max(2) - 1) as f64;
        let u = ng_unitary(theta)?;
        let psi = start
            .apply_unitary(&u, &[0, 2, 3])?
            .apply_unitary(&u, &[1, 4, 5])?;
        let oracle = psi.reduced(&[0, 1])?.fidelity_with_pure(&phi)?;
        let analytic = 0.25 * (1.0 + theta.cos().powi(2)).powi(2);
        max_diff = max_diff.max((oracle - analytic).abs());
        let printed = printed_rho_double_prime(theta);
        let v = phi.amplitudes();
        out.push(OraclePoint {
            theta,
            oracle_fidelity: oracle,
            analytic_fidelity: analytic,
            printed_trace: printed.trace().re,
            printed_fidelity: (v.adjoint() * &printed * v)[(0, 0)].re,
            printed_claim: (1.0 + theta.cos().powi(2)).powi(2),
        });
    }
    Ok(OracleReport {
        points: out,
        max_abs_diff: max_diff,
        discrepancy_note: "the printed rho'' has trace 2 for every theta; its Phi+ overlap is \
                           (1+cos^2)^2/2, and the quoted fidelity (1+cos^2)^2 exceeds 1 for theta < pi/2. \
                           Normalizing rho'' to unit trace gives (1+cos^2)^2/4, which the exact \
                           state evolution reproduces."
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = seeded(1);
        for n in 1..=2 {
            assert!(crate::qstate::is_unitary(&random_unitary(n, &mut rng), 1e-12));
        }
    }

    #[test]
    fn duality_holds() {
        let r = duality_suite(200, &mut seeded(2)).unwrap();
        assert!(r.pure_max_violation < 1e-10, "{}", r.pure_max_violation);
        assert_eq!(r.mixed_violations, 0);
        assert!((1.620..=1.625).contains(&r.entropy_max));
        assert!((r.entropy_argmax - 0.5).abs() < 1e-3);
    }

    #[test]
    fn monogamy_holds() {
        let r = monogamy_suite(200, &mut seeded(3)).unwrap();
        assert_eq!(r.violations, 0);
        assert!((r.ghz_tau - 1.0).abs() < 1e-8 && r.w_tau.abs() < 1e-8);
        assert!(r.ghz_pairwise_max < 1e-8);
        assert!(r.family_strictly_decreasing);
    }

    #[test]
    fn heisenberg_attained() {
        let r = heisenberg_check().unwrap();
        assert!(r.r_error < 1e-12 && r.deviation < 1e-12);
    }

    #[test]
    fn oracle_matches_closed_form() {
        let r = ng_oracle_report(50).unwrap();
        assert!(r.max_abs_diff < 1e-12);
        for p in &r.points {
            assert!((p.printed_trace - 2.0).abs() < 1e-12);
            assert!((p.printed_fidelity / 2.0 - p.analytic_fidelity).abs() < 1e-12);
        }
    }

    #[test]
    fn suites_need_samples() {
        assert!(duality_suite(10, &mut seeded(0)).is_err());
    }
}
