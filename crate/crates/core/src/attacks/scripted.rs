use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ResendBasis;
use crate::protocols::ParticleStore;
use crate::qstate::{gates, gates::BellState, CMatrix, StateVector};
use crate::Result;

/// Measure-and-resend in `basis`: the projectors onto the basis states.
pub fn intercept_resend_kraus(basis: ResendBasis) -> Vec<CMatrix> {
    let b = match basis {
        ResendBasis::Z => gates::z_basis(),
        ResendBasis::X => gates::x_basis(),
    };
    (0..2).map(|k| b.projector(k)).collect()
}

/// Eve's guess at which transmitted particles belong together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingGuess {
    pub pairs: Vec<(usize, usize)>,
    pub unpaired: Option<usize>,
}

/// Uniformly random perfect matching of `particles` (one left over when
/// the count is odd).
pub fn random_pairing<R: Rng + ?Sized>(particles: &[usize], rng: &mut R) -> PairingGuess {
    let mut v = particles.to_vec();
    v.shuffle(rng);
    let unpaired = if v.len() % 2 == 1 { v.pop() } else { None };
    PairingGuess {
        pairs: v.chunks(2).map(|p| (p[0], p[1])).collect(),
        unpaired,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub guess: PairingGuess,
    /// Guessed pairs that coincide with a true pair.
    pub correct_pairs: usize,
    pub outcomes: Vec<BellState>,
}

impl PairingReport {
    pub fn all_correct(&self, true_pairs: usize) -> bool {
        self.correct_pairs == true_pairs
    }
}

/// Eve pairs the shuffled particles at random, Bell-measures each guessed
/// pair and resends the Bell state she found on the same slots.
pub fn pairing_guess_attack<R: Rng + ?Sized>(
    store: &mut ParticleStore,
    particles: &[usize],
    true_pairs: &[(usize, usize)],
    rng: &mut R,
) -> Result<PairingReport> {
    let guess = random_pairing(particles, rng);
    let basis = gates::bell_basis();
    let mut outcomes = Vec::with_capacity(guess.pairs.len());
    let mut correct = 0;
    for &(x, y) in &guess.pairs {
        if true_pairs
            .iter()
            .any(|&(a, b)| (a, b) == (x, y) || (a, b) == (y, x))
        {
            correct += 1;
        }
        let k = store.measure(&[x, y], &basis, rng)?;
        let bell = BellState::from_index(k).expect("four Bell outcomes");
        store.prepare_bell(x, y, bell)?;
        outcomes.push(bell);
    }
    Ok(PairingReport {
        guess,
        correct_pairs: correct,
        outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingTrial {
    pub correct: bool,
    pub detected: bool,
}

/// One run of the two-pair pairing-guess game: two `|Ψ⁺⟩` pairs are
/// shuffled, Eve guesses a pairing and Bell-measures it, then the true pairs
/// are checked in the Bell basis.
pub fn pairing_trial_n2<R: Rng + ?Sized>(rng: &mut R) -> Result<PairingTrial> {
    let mut store = ParticleStore::new();
    let true_pairs = [(0, 1), (2, 3)];
    for &(a, b) in &true_pairs {
        store.prepare_bell(a, b, BellState::PsiPlus)?;
    }
    let report = pairing_guess_attack(&mut store, &[0, 1, 2, 3], &true_pairs, rng)?;
    let basis = gates::bell_basis();
    let mut detected = false;
    for &(a, b) in &true_pairs {
        let k = store.measure(&[a, b], &basis, rng)?;
        detected |= BellState::from_index(k) != Some(BellState::PsiPlus);
    }
    Ok(PairingTrial {
        correct: report.all_correct(true_pairs.len()),
        detected,
    })
}

/// Product of Bell states placed on the given qubit pairs of an
/// `n`-qubit register.
pub fn bell_product_state(pairs: &[(usize, usize)], states: &[BellState]) -> Result<StateVector> {
    let mut psi = states[0].state();
    for s in &states[1..] {
        psi = psi.tensor(&s.state())?;
    }
    let placed: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let order: Vec<usize> = (0..placed.len())
        .map(|q| placed.iter().position(|&p| p == q).expect("pairs cover register"))
        .collect();
    psi.permute_qubits(&order)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingExact {
    pub p_correct: f64,
    pub p_detected: f64,
    pub p_detected_given_wrong: f64,
}

/// Exact success and detection probabilities of the two-pair pairing game,
/// by enumeration over Eve's three possible pairings and her 16 outcomes.
pub fn pairing_exact_n2() -> Result<PairingExact> {
    let truth = [(0, 1), (2, 3)];
    let initial = bell_product_state(&truth, &[BellState::PsiPlus, BellState::PsiPlus])?;
    let honest = initial.clone();
    let pairings = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
    let mut p_detected = 0.0;
    let mut detected_wrong = 0.0;
    for (i, g) in pairings.iter().enumerate() {
        let mut pass = 0.0;
        for k1 in BellState::ALL {
            for k2 in BellState::ALL {
                let resent = bell_product_state(g, &[k1, k2])?;
                let p_outcome = resent.overlap(&initial).norm_sqr();
                pass += p_outcome * honest.overlap(&resent).norm_sqr();
            }
        }
        p_detected += (1.0 - pass) / 3.0;
        if i > 0 {
            detected_wrong += (1.0 - pass) / 2.0;
        }
    }
    Ok(PairingExact {
        p_correct: 1.0 / 3.0,
        p_detected,
        p_detected_given_wrong: detected_wrong,
    })
}

/// Probability that Alice's random send offsets expose a scheduled dummy
/// injection over `rounds` rounds, enumerating every offset pattern in
/// `0..jitter_slots`. Eve injects at offset 0, the only schedule she can
/// commit to without seeing Alice's packet.
pub fn jitter_detection_exact(rounds: u32, jitter_slots: u64) -> f64 {
    let j = jitter_slots.max(1);
    let total = j.pow(rounds);
    let mut detected = 0u64;
    for pattern in 0..total {
        let mut rest = pattern;
        let mut hit = false;
        for _ in 0..rounds {
            hit |= rest % j != 0;
            rest /= j;
        }
        detected += u64::from(hit);
    }
    detected as f64 / total as f64
}

/// Disagreement rate on disclosed GV rounds when Eve keeps both real
/// packets and forwards a dummy `|ψ_k⟩` with random `k`: enumerate `j, k`.
pub fn hold_both_disagreement_exact() -> f64 {
    let mut dis = 0.0;
    for j in 0..2usize {
        for k in 0..2usize {
            // Bob recombines Eve's dummy and decodes k with certainty
            let bob = {
                let st = gates::psi_j(k)
                    .apply_unitary(&gates::hadamard(), &[0])
                    .expect("qubit");
                if st.amplitude(0).norm_sqr() > 0.5 {
                    0
                } else {
                    1
                }
            };
            if bob != j {
                dis += 0.25;
            }
        }
    }
    dis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn bell_product_places_pairs() {
        let psi = bell_product_state(&[(0, 2), (1, 3)], &[BellState::PsiPlus, BellState::PhiPlus]).unwrap();
        let r02 = psi.reduced(&[0, 2]).unwrap();
        assert!((r02.fidelity_with_pure(&BellState::PsiPlus.state()).unwrap() - 1.0).abs() < 1e-12);
        let r13 = psi.reduced(&[1, 3]).unwrap();
        assert!((r13.fidelity_with_pure(&BellState::PhiPlus.state()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_pairing_probabilities() {
        let e = pairing_exact_n2().unwrap();
        assert!((e.p_correct - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.p_detected_given_wrong - 0.75).abs() < 1e-12);
        assert!((e.p_detected - 0.5).abs() < 1e-12);
    }

    #[test]
    fn correct_guess_is_undetected() {
        let mut rng = seeded(3);
        for _ in 0..200 {
            let t = pairing_trial_n2(&mut rng).unwrap();
            if t.correct {
                assert!(!t.detected);
            }
        }
    }

    #[test]
    fn random_pairing_covers_everything_once() {
        let mut rng = seeded(8);
        let g = random_pairing(&[5, 6, 7, 8, 9], &mut rng);
        let mut seen: Vec<usize> = g.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        seen.extend(g.unpaired);
        seen.sort();
        assert_eq!(seen, vec![5, 6, 7, 8, 9]);
    }

    #[test]
    fn jitter_enumeration() {
        assert_eq!(jitter_detection_exact(4, 1), 0.0);
        assert!((jitter_detection_exact(4, 2) - 15.0 / 16.0).abs() < 1e-15);
        assert!((jitter_detection_exact(4, 3) - 80.0 / 81.0).abs() < 1e-15);
    }

    #[test]
    fn hold_both_half_disagreement() {
        assert!((hold_both_disagreement_exact() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn intercept_resend_kraus_dephases() {
        let k = intercept_resend_kraus(ResendBasis::Z);
        let rho = gates::psi_j(0).to_density().apply_kraus(&k, &[0]).unwrap();
        assert!(rho.entry(0, 1).norm() < 1e-15);
    }
}
