use rand::Rng;

use super::{AttackKind, AttackParams};
use crate::qstate::{c, gates, hermitian_eigen, is_unitary, CMatrix, CVector, StateVector, TOL};
use crate::{Error, Result};

/// Two real unit vectors in one qubit with `⟨φ₀|φ₁⟩ = overlap`, built by
/// Gram–Schmidt from `|0⟩`.
pub fn realize_overlap(overlap: f64) -> Result<(StateVector, StateVector)> {
    if !overlap.is_finite() || overlap.abs() > 1.0 + TOL {
        return Err(Error::UnsatisfiableOverlaps(format!(
            "|overlap| = {} exceeds 1",
            overlap.abs()
        )));
    }
    let s = overlap.clamp(-1.0, 1.0);
    let phi1 = StateVector::new(vec![c(s, 0.), c((1.0 - s * s).max(0.0).sqrt(), 0.)])?;
    Ok((gates::ket(0), phi1))
}

/// The four probe vectors `ε₀, ε₁, E₀, E₁` on a two-qubit probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeVectors {
    pub eps0: StateVector,
    pub eps1: StateVector,
    pub e0: StateVector,
    pub e1: StateVector,
}

impl ProbeVectors {
    pub fn new(eps_overlap: f64, e_overlap: f64) -> Result<Self> {
        let (p0, p1) = realize_overlap(eps_overlap)?;
        let (q0, q1) = realize_overlap(e_overlap)?;
        let flag0 = gates::ket(0);
        let flag1 = gates::ket(1);
        Ok(ProbeVectors {
            eps0: flag0.tensor(&p0)?,
            eps1: flag0.tensor(&p1)?,
            e0: flag1.tensor(&q0)?,
            e1: flag1.tensor(&q1)?,
        })
    }

    /// Gram matrix in the order `ε₀, ε₁, E₀, E₁`.
    pub fn gram(&self) -> CMatrix {
        let v = [&self.eps0, &self.eps1, &self.e0, &self.e1];
        CMatrix::from_fn(4, 4, |i, j| v[i].overlap(v[j]))
    }
}

/// Isometry `qubit → qubit ⊗ probe` (8×2):
/// `|0⟩ ↦ cos θ |0⟩|ε₀⟩ + sin θ |1⟩|E₀⟩`,
/// `|1⟩ ↦ cos θ′ |1⟩|ε₁⟩ + sin θ′ |0⟩|E₁⟩`.
pub fn asymmetric_isometry(theta: f64, theta_prime: f64, probes: &ProbeVectors) -> Result<CMatrix> {
    branch_isometry(
        (theta.cos(), theta.sin()),
        (theta_prime.cos(), theta_prime.sin()),
        probes,
    )
}

fn branch_isometry(amp0: (f64, f64), amp1: (f64, f64), p: &ProbeVectors) -> Result<CMatrix> {
    let k0 = gates::ket(0);
    let k1 = gates::ket(1);
    let col0 = k0.tensor(&p.eps0)?.amplitudes().scale(amp0.0) + k1.tensor(&p.e0)?.amplitudes().scale(amp0.1);
    let col1 = k1.tensor(&p.eps1)?.amplitudes().scale(amp1.0) + k0.tensor(&p.e1)?.amplitudes().scale(amp1.1);
    let v = CMatrix::from_columns(&[col0, col1]);
    let gram = v.adjoint() * &v;
    if (gram - CMatrix::identity(2, 2)).iter().any(|z| z.norm() > 1e-12) {
        return Err(Error::UnsatisfiableOverlaps(
            "interaction is not an isometry".into(),
        ));
    }
    Ok(v)
}

/// `(√((1+cos θ)/2), √((1−cos θ)/2))`.
pub fn ng_amplitudes(theta: f64) -> (f64, f64) {
    let ct = theta.cos();
    (((1.0 + ct) / 2.0).sqrt(), ((1.0 - ct) / 2.0).max(0.0).sqrt())
}

/// Niu–Griffiths interaction: the branch amplitudes above with
/// `⟨ε₀|ε₁⟩ = ⟨E₀|E₁⟩ = cos θ`.
pub fn ng_isometry(theta: f64) -> Result<CMatrix> {
    if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::out_of_range("theta", theta, 0.0, std::f64::consts::PI));
    }
    let (a, b) = ng_amplitudes(theta);
    let ct = theta.cos();
    branch_isometry((a, b), (a, b), &ProbeVectors::new(ct, ct)?)
}

pub fn ng_unitary(theta: f64) -> Result<CMatrix> {
    ng_isometry(theta).map(|v| isometry_to_unitary(&v))
}

pub fn ng_kraus(theta: f64) -> Result<Vec<CMatrix>> {
    ng_isometry(theta).map(|v| isometry_kraus(&v))
}

/// Extend an 8×2 isometry to a unitary on `qubit ⊗ probe` whose action on
/// the ready state `|q⟩|00⟩` reproduces the isometry.
pub fn isometry_to_unitary(v: &CMatrix) -> CMatrix {
    let dim = v.nrows();
    let probe_dim = dim / v.ncols();
    let fixed: Vec<usize> = (0..v.ncols()).map(|q| q * probe_dim).collect();
    let mut basis: Vec<CVector> = (0..v.ncols()).map(|q| v.column(q).into_owned()).collect();
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut w = CVector::zeros(dim);
        w[e] = c(1., 0.);
        for b in &basis {
            let proj = b.dotc(&w);
            w -= b * proj;
        }
        let n = w.norm();
        if n > 1e-8 {
            basis.push(w.unscale(n));
        }
    }
    let mut u = CMatrix::zeros(dim, dim);
    let mut free = (0..dim).filter(|i| !fixed.contains(i));
    for (k, col) in basis.iter().enumerate() {
        let idx = if k < fixed.len() {
            fixed[k]
        } else {
            free.next().expect("enough free columns")
        };
        u.set_column(idx, col);
    }
    u
}

/// Kraus operators `K_m = (I ⊗ ⟨m|) V` of the channel obtained by tracing
/// out the probe.
pub fn isometry_kraus(v: &CMatrix) -> Vec<CMatrix> {
    let d = v.ncols();
    let probe_dim = v.nrows() / d;
    (0..probe_dim)
        .map(|m| CMatrix::from_fn(d, d, |out, inp| v[(out * probe_dim + m, inp)]))
        .collect()
}

/// `U = |0⟩⟨0| ⊗ C₀ + |1⟩⟨1| ⊗ C₁`.
pub fn generic_probe_unitary(c0: &CMatrix, c1: &CMatrix) -> Result<CMatrix> {
    if c0.shape() != c1.shape() || !c0.is_square() {
        return Err(Error::DimensionMismatch {
            expected: c0.nrows(),
            found: c1.nrows(),
        });
    }
    if !is_unitary(c0, TOL) || !is_unitary(c1, TOL) {
        return Err(Error::NotUnitary);
    }
    let d = c0.nrows();
    let mut u = CMatrix::zeros(2 * d, 2 * d);
    u.view_mut((0, 0), (d, d)).copy_from(c0);
    u.view_mut((d, d), (d, d)).copy_from(c1);
    Ok(u)
}

/// One-qubit probe blocks with `⟨u|d⟩ = overlap` for ready state `|0⟩`.
pub fn generic_probe_pair(overlap: f64) -> Result<(CMatrix, CMatrix)> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::out_of_range("probe_overlap", overlap, 0.0, 1.0));
    }
    Ok((gates::identity(1), gates::ry(2.0 * overlap.acos())))
}

/// Packet-plus-probe state after Eve's conditional probe acts on `|ψ_j⟩`
/// and Bob recombines the packets with the coding operation:
/// `(|ψ₀⟩|u⟩ + (−1)^j |ψ₁⟩|d⟩)/√2`.
pub fn gv_probe_state(j: usize, c0: &CMatrix, c1: &CMatrix, ready: &StateVector) -> Result<StateVector> {
    let u = generic_probe_unitary(c0, c1)?;
    let n = 1 + ready.num_qubits();
    let all: Vec<usize> = (0..n).collect();
    gates::psi_j(j)
        .tensor(ready)?
        .apply_unitary(&u, &all)?
        .apply_unitary(&gates::hadamard(), &[0])
}

/// Joint state after a probe interaction, with bookkeeping of which qubits
/// are system and which are probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub state: StateVector,
    pub system_qubits: Vec<usize>,
    pub probe_qubits: Vec<usize>,
    /// System qubits that were attacked, in the order the probes were attached.
    pub attacked: Vec<usize>,
}

impl ProbeRecord {
    pub fn system_state(&self) -> Result<crate::qstate::DensityMatrix> {
        self.state.reduced(&self.system_qubits)
    }

    pub fn probe_state(&self) -> Result<crate::qstate::DensityMatrix> {
        if self.probe_qubits.is_empty() {
            return Err(Error::EmptyKeep);
        }
        self.state.reduced(&self.probe_qubits)
    }
}

fn attach(target: usize, u: &CMatrix, record: &mut ProbeRecord) -> Result<()> {
    let n = record.state.num_qubits();
    let with_probe = record.state.tensor(&StateVector::basis_state(2, 0)?)?;
    record.state = with_probe.apply_unitary(u, &[target, n, n + 1])?;
    record.probe_qubits.extend([n, n + 1]);
    record.attacked.push(target);
    Ok(())
}

fn fresh_record(state: &StateVector, target_count: usize) -> Result<ProbeRecord> {
    let n = state.num_qubits();
    if n + 2 * target_count > crate::qstate::MAX_QUBITS {
        return Err(Error::TooManyQubits(n + 2 * target_count));
    }
    Ok(ProbeRecord {
        state: state.clone(),
        system_qubits: (0..n).collect(),
        probe_qubits: Vec::new(),
        attacked: Vec::new(),
    })
}

/// Apply the two-angle probe interaction to qubit `target` of `state`.
/// `params` must be an `asymmetric_probe` or `symmetric_ng` attack; the
/// probe is appended after the existing qubits.
pub fn symmetric_attack(state: &StateVector, target: usize, params: &AttackParams) -> Result<ProbeRecord> {
    if !matches!(params.kind, AttackKind::AsymmetricProbe | AttackKind::SymmetricNg) {
        return Err(Error::Config(format!(
            "{} is not a probe interaction",
            params.kind.name()
        )));
    }
    if target >= state.num_qubits() {
        return Err(Error::IndexOutOfRange {
            index: target,
            num_qubits: state.num_qubits(),
        });
    }
    let u = params.probe_unitary()?;
    let mut rec = fresh_record(state, 1)?;
    attach(target, &u, &mut rec)?;
    Ok(rec)
}

/// Attack each qubit in `targets` independently with probability `λ` using
/// a fresh Niu–Griffiths probe.
pub fn ng_attack<R: Rng + ?Sized>(
    state: &StateVector,
    targets: &[usize],
    params: &AttackParams,
    rng: &mut R,
) -> Result<ProbeRecord> {
    if params.kind != AttackKind::SymmetricNg {
        return Err(Error::Config(format!(
            "ng_attack needs symmetric_ng, got {}",
            params.kind.name()
        )));
    }
    params.validate()?;
    for &t in targets {
        if t >= state.num_qubits() {
            return Err(Error::IndexOutOfRange {
                index: t,
                num_qubits: state.num_qubits(),
            });
        }
    }
    let u = ng_unitary(params.theta)?;
    let chosen: Vec<usize> = targets
        .iter()
        .copied()
        .filter(|_| params.lambda >= 1.0 || rng.random::<f64>() < params.lambda)
        .collect();
    let mut rec = fresh_record(state, chosen.len())?;
    for t in chosen {
        attach(t, &u, &mut rec)?;
    }
    Ok(rec)
}

/// Re-express a probe register whose reduced state has rank ≤ 2 as a single
/// qubit via the Schmidt decomposition. The result has the non-probe qubits
/// first, in their original order, followed by the compressed probe.
pub fn compress_probe(psi: &StateVector, probe_qubits: &[usize]) -> Result<StateVector> {
    let n = psi.num_qubits();
    let system: Vec<usize> = (0..n).filter(|q| !probe_qubits.contains(q)).collect();
    if system.is_empty() || probe_qubits.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let rho_p = psi.reduced(probe_qubits)?;
    let (vals, vecs) = hermitian_eigen(rho_p.matrix());
    let pd = vals.len();
    if vals.iter().rev().skip(2).any(|&l| l > 1e-10) {
        return Err(Error::InvalidDensity(
            "probe support is larger than one qubit".into(),
        ));
    }
    let order: Vec<usize> = system.iter().chain(probe_qubits).copied().collect();
    let ordered = psi.permute_qubits(&order)?;
    let sd = 1usize << system.len();
    let amps = ordered.amplitudes();
    let mut out = vec![c(0., 0.); sd * 2];
    for s in 0..sd {
        for k in 0..2 {
            let v = vecs.column(pd - 1 - k);
            out[s * 2 + k] = (0..pd).map(|p| amps[s * pd + p] * v[p].conj()).sum();
        }
    }
    StateVector::from_unnormalized(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{holevo_bound, three_tangle};
    use crate::qstate::gates::BellState;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn overlaps_are_realized() {
        let p = ProbeVectors::new(0.3, -0.7).unwrap();
        let g = p.gram();
        assert!(close(g[(0, 1)].re, 0.3, 1e-15));
        assert!(close(g[(2, 3)].re, -0.7, 1e-15));
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert!(g[(i, j)].norm() < 1e-15);
        }
        assert!(matches!(
            realize_overlap(1.2),
            Err(Error::UnsatisfiableOverlaps(_))
        ));
    }

    #[test]
    fn isometries_preserve_norm() {
        let mut rng = crate::rng::seeded(5);
        for k in 0..=40 {
            let th = PI * k as f64 / 40.0;
            let u = ng_unitary(th).unwrap();
            assert!(is_unitary(&u, 1e-12));
            let ua = isometry_to_unitary(
                &asymmetric_isometry(th, 0.5 * th, &ProbeVectors::new(th.cos(), -0.2).unwrap()).unwrap(),
            );
            assert!(is_unitary(&ua, 1e-12));
            let psi = StateVector::random_haar(2, &mut rng).unwrap();
            let rec = symmetric_attack(&psi, 1, &AttackParams::symmetric_ng(th, 1.0)).unwrap();
            assert!(close(rec.state.norm_squared(), 1.0, 1e-12));
        }
    }

    #[test]
    fn unitary_matches_isometry_on_ready_state() {
        let v = ng_isometry(1.1).unwrap();
        let u = isometry_to_unitary(&v);
        for q in 0..2 {
            assert!((u.column(q * 4) - v.column(q)).norm() < 1e-15);
        }
    }

    #[test]
    fn ng_theta_zero_is_trivial() {
        let rec = symmetric_attack(
            &BellState::PsiPlus.state(),
            0,
            &AttackParams::symmetric_ng(0.0, 1.0),
        )
        .unwrap();
        let ab = rec.system_state().unwrap();
        assert!(close(
            ab.fidelity_with_pure(&BellState::PsiPlus.state()).unwrap(),
            1.0,
            1e-12
        ));
        assert!(close(rec.probe_state().unwrap().purity(), 1.0, 1e-12));
    }

    #[test]
    fn ng_disturbance_in_z_basis() {
        for k in 0..=10 {
            let th = FRAC_PI_2 * k as f64 / 10.0;
            let rec = symmetric_attack(&gates::ket(0), 0, &AttackParams::symmetric_ng(th, 1.0)).unwrap();
            let p1 = rec.system_state().unwrap().entry(1, 1).re;
            assert!(close(p1, (1.0 - th.cos()) / 2.0, 1e-12));
        }
    }

    #[test]
    fn ng_bell_fidelity_both_attacked() {
        for k in 0..=20 {
            let th = FRAC_PI_2 * k as f64 / 20.0;
            let mut rng = crate::rng::seeded(0);
            let rec = ng_attack(
                &BellState::PhiPlus.state(),
                &[0, 1],
                &AttackParams::symmetric_ng(th, 1.0),
                &mut rng,
            )
            .unwrap();
            let f = rec
                .system_state()
                .unwrap()
                .fidelity_with_pure(&BellState::PhiPlus.state())
                .unwrap();
            let c2 = th.cos().powi(2);
            assert!(close(f, 0.25 * (1.0 + c2).powi(2), 1e-12));
        }
    }

    #[test]
    fn ng_kraus_matches_unitary_dilation() {
        let th = 0.9;
        let psi = BellState::PsiPlus.state();
        let rec = symmetric_attack(&psi, 1, &AttackParams::symmetric_ng(th, 1.0)).unwrap();
        let via_kraus = psi
            .to_density()
            .apply_kraus(&ng_kraus(th).unwrap(), &[1])
            .unwrap();
        assert!((rec.system_state().unwrap().matrix() - via_kraus.matrix()).norm() < 1e-12);
    }

    #[test]
    fn lambda_zero_attaches_nothing() {
        let mut rng = crate::rng::seeded(9);
        let rec = ng_attack(
            &BellState::PsiPlus.state(),
            &[0, 1],
            &AttackParams::symmetric_ng(1.0, 0.0),
            &mut rng,
        )
        .unwrap();
        assert!(rec.attacked.is_empty());
        assert_eq!(rec.state, BellState::PsiPlus.state());
    }

    #[test]
    fn generic_probe_identity_blocks() {
        let i = gates::identity(1);
        let u = generic_probe_unitary(&i, &i).unwrap();
        assert!((u - gates::identity(2)).norm() < 1e-15);
        assert!(matches!(
            generic_probe_unitary(&i, &CMatrix::from_element(2, 2, c(1., 0.))),
            Err(Error::NotUnitary)
        ));
    }

    #[test]
    fn gv_probe_state_matches_closed_form() {
        let (c0, c1) = generic_probe_pair(0.4).unwrap();
        let r = gates::ket(0);
        let u = r.apply_unitary(&c0, &[0]).unwrap();
        let d = r.apply_unitary(&c1, &[0]).unwrap();
        for j in 0..2 {
            let got = gv_probe_state(j, &c0, &c1, &r).unwrap();
            let sign = if j == 0 { 1.0 } else { -1.0 };
            let want = gates::psi_j(0).tensor(&u).unwrap().amplitudes()
                + gates::psi_j(1).tensor(&d).unwrap().amplitudes().scale(sign);
            assert!((got.amplitudes() - want.unscale(2f64.sqrt())).norm() < 1e-12);
            // Bob's recombined packet decodes j with error (1 − ⟨u|d⟩)/2
            let p_err = got.reduced(&[0]).unwrap().entry(1 - j, 1 - j).re;
            assert!(close(p_err, (1.0 - 0.4) / 2.0, 1e-12));
        }
        let probe = gv_probe_state(0, &c0, &c1, &r).unwrap().reduced(&[1]).unwrap();
        let want = (u.to_density().matrix() + d.to_density().matrix()).scale(0.5);
        assert!((probe.matrix() - want).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_generic_probe_gives_half_error() {
        let (c0, c1) = (gates::identity(1), gates::pauli_x());
        let st = gv_probe_state(0, &c0, &c1, &gates::ket(0)).unwrap();
        assert!(close(st.reduced(&[0]).unwrap().entry(1, 1).re, 0.5, 1e-12));
    }

    #[test]
    fn error_free_asymmetric_attack_makes_ghz() {
        let p = AttackParams::asymmetric(0.0, 0.0, 0.0, 0.0);
        let rec = symmetric_attack(&BellState::PsiPlus.state(), 0, &p).unwrap();
        let ghz = compress_probe(&rec.state, &rec.probe_qubits).unwrap();
        assert_eq!(ghz.num_qubits(), 3);
        assert!(close(three_tangle(&ghz).unwrap(), 1.0, 1e-10));
    }

    #[test]
    fn error_free_attack_randomizes_diagonal_basis() {
        let p = AttackParams::asymmetric(0.0, 0.0, 0.0, 0.0);
        for j in 0..2 {
            let rec = symmetric_attack(&gates::psi_j(j), 0, &p).unwrap();
            let bob = rec.system_state().unwrap();
            assert!((bob.matrix() - gates::identity(1).scale(0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn trivial_interaction_leaves_state_alone() {
        let p = AttackParams::asymmetric(0.0, 0.0, 1.0, 1.0);
        let psi = BellState::PsiPlus.state();
        let rec = symmetric_attack(&psi, 1, &p).unwrap();
        assert!(close(
            rec.system_state().unwrap().fidelity_with_pure(&psi).unwrap(),
            1.0,
            1e-12
        ));
    }

    #[test]
    fn orthogonal_probes_reveal_z_bit() {
        let p = AttackParams::asymmetric(0.0, 0.0, 0.0, 0.0);
        let ens: Vec<_> = (0..2)
            .map(|j| {
                (
                    0.5,
                    symmetric_attack(&gates::ket(j), 0, &p)
                        .unwrap()
                        .probe_state()
                        .unwrap(),
                )
            })
            .collect();
        assert!(close(holevo_bound(&ens).unwrap(), 1.0, 1e-10));
    }

    #[test]
    fn compress_rejects_wide_support() {
        let mut rng = crate::rng::seeded(4);
        let psi = StateVector::random_haar(4, &mut rng).unwrap();
        assert!(compress_probe(&psi, &[2, 3]).is_err());
    }

    #[test]
    fn register_cap_limits_probe_count() {
        let mut rng = crate::rng::seeded(1);
        let psi = StateVector::random_haar(3, &mut rng).unwrap();
        assert!(matches!(
            ng_attack(&psi, &[0, 1], &AttackParams::symmetric_ng(0.3, 1.0), &mut rng),
            Err(Error::TooManyQubits(7))
        ));
    }
}
