//! Bell-pair protocols: PP, CL, DLL and their GV variants.

use rand::Rng;

use super::transcript::{Announcement, AttackSummary, Event, MeasBasis, Party, ProtocolTranscript};
use super::verify::{verification_bb84, verification_bell, Bb84Check};
use super::{choose_subset, unsupported, ParticleStore, ProtocolConfig, ProtocolId};
use crate::attacks::{pairing_guess_attack, AttackKind, AttackParams};
use crate::qstate::gates::{self, BellState};
use crate::qstate::{permute_particles, PermutationMap};
use crate::rng::{self, SimRng, Stream};
use crate::{Error, Result};

const OP_NAMES: [&str; 4] = ["I", "X", "iY", "Z"];

pub(crate) struct Rngs {
    pub alice: SimRng,
    pub bob: SimRng,
    pub eve: SimRng,
    pub nature: SimRng,
}

impl Rngs {
    pub fn new(seed: u64) -> Self {
        Rngs {
            alice: rng::stream(seed, Stream::Alice),
            bob: rng::stream(seed, Stream::Bob),
            eve: rng::stream(seed, Stream::Eve),
            nature: rng::stream(seed, Stream::Nature),
        }
    }

    /// A party's private stream together with the measurement stream.
    pub fn split(&mut self, p: Party) -> (&mut SimRng, &mut SimRng) {
        let own = match p {
            Party::Alice => &mut self.alice,
            Party::Bob => &mut self.bob,
            Party::Eve => &mut self.eve,
        };
        (own, &mut self.nature)
    }
}

/// Who prepares, which particle crosses each leg, and how leg 1 is checked.
#[derive(Debug, Clone, Copy)]
struct Roles {
    preparer: Party,
    receiver: Party,
    gv: bool,
    /// Leg-1 particle of pair `k` is `2k + leg1_offset`.
    leg1_offset: usize,
    /// Leg-2 particle of pair `k` is `2k + leg2_offset`.
    leg2_offset: usize,
}

fn roles(id: ProtocolId) -> Roles {
    match id {
        ProtocolId::Pp | ProtocolId::Cl => Roles {
            preparer: Party::Bob,
            receiver: Party::Alice,
            gv: false,
            leg1_offset: 0,
            leg2_offset: 0,
        },
        ProtocolId::PpGv | ProtocolId::ClGv => Roles {
            preparer: Party::Bob,
            receiver: Party::Alice,
            gv: true,
            leg1_offset: 0,
            leg2_offset: 0,
        },
        ProtocolId::Dll => Roles {
            preparer: Party::Alice,
            receiver: Party::Bob,
            gv: false,
            leg1_offset: 0,
            leg2_offset: 1,
        },
        ProtocolId::DllGv => Roles {
            preparer: Party::Alice,
            receiver: Party::Bob,
            gv: true,
            leg1_offset: 1,
            leg2_offset: 0,
        },
        ProtocolId::Gv => unreachable!("GV has no Bell pairs"),
    }
}

pub fn run_pp_family(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    expect(config, &[ProtocolId::Pp, ProtocolId::Cl])?;
    run_pairs(config)
}

pub fn run_pp_gv_family(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    expect(config, &[ProtocolId::PpGv, ProtocolId::ClGv])?;
    run_pairs(config)
}

pub fn run_dll_family(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    expect(config, &[ProtocolId::Dll, ProtocolId::DllGv])?;
    run_pairs(config)
}

fn expect(config: &ProtocolConfig, ids: &[ProtocolId]) -> Result<()> {
    if ids.contains(&config.protocol) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "protocol {} cannot run here; expected one of {:?}",
            config.protocol,
            ids.iter().map(|p| p.name()).collect::<Vec<_>>()
        )))
    }
}

fn check_attack(id: ProtocolId, attack: Option<&AttackParams>) -> Result<()> {
    match attack.map(|a| a.kind) {
        Some(AttackKind::GenericProbe) => Err(unsupported(id, "generic_probe (GV packets only)")),
        Some(AttackKind::TimingDelay) => Err(unsupported(id, "timing_delay (GV packets only)")),
        Some(AttackKind::PairingGuess) if !id.is_gv_variant() => {
            Err(unsupported(id, "pairing_guess (needs a permuted transmission)"))
        }
        _ => Ok(()),
    }
}

pub(crate) fn attack_summary(a: &AttackParams) -> AttackSummary {
    AttackSummary {
        kind: a.kind,
        attacked_particles: 0,
        eve_bits: None,
        pairing_correct: None,
        lambda_semantics: "each transmitted particle is attacked independently with probability lambda"
            .into(),
    }
}

/// Apply a per-particle channel attack to the particles crossing `leg`.
pub(crate) fn channel_attack(
    store: &mut ParticleStore,
    t: &mut ProtocolTranscript,
    a: &AttackParams,
    leg: u8,
    particles: &[usize],
    eve: &mut SimRng,
) -> Result<()> {
    if !a.legs.includes(leg) {
        return Ok(());
    }
    let kraus = a.channel_kraus()?;
    let hit: Vec<usize> = particles
        .iter()
        .copied()
        .filter(|_| eve.random::<f64>() < a.lambda)
        .collect();
    for &p in &hit {
        store.apply_kraus(&kraus, &[p])?;
    }
    if let Some(s) = t.attack.as_mut() {
        s.attacked_particles += hit.len();
    }
    t.push(Event::Attack {
        kind: a.kind,
        leg,
        particles: hit,
        detail: String::new(),
    });
    Ok(())
}

fn attack_leg(
    store: &mut ParticleStore,
    t: &mut ProtocolTranscript,
    attack: Option<&AttackParams>,
    leg: u8,
    particles: &[usize],
    true_pairs: &[(usize, usize)],
    eve: &mut SimRng,
) -> Result<()> {
    let Some(a) = attack else { return Ok(()) };
    if a.kind != AttackKind::PairingGuess {
        return channel_attack(store, t, a, leg, particles, eve);
    }
    if leg != 1 {
        return Ok(());
    }
    let report = pairing_guess_attack(store, particles, true_pairs, eve)?;
    let all = report.all_correct(true_pairs.len());
    if let Some(s) = t.attack.as_mut() {
        s.attacked_particles += particles.len() - usize::from(report.guess.unpaired.is_some());
        s.pairing_correct = Some(all);
    }
    t.push(Event::Attack {
        kind: a.kind,
        leg,
        particles: particles.to_vec(),
        detail: format!(
            "{} of {} check pairs guessed",
            report.correct_pairs,
            true_pairs.len()
        ),
    });
    Ok(())
}

fn symbols(id: ProtocolId, bits: &[u8]) -> Vec<usize> {
    match id.bits_per_symbol() {
        1 => bits.iter().map(|&b| b as usize).collect(),
        _ => bits
            .chunks(2)
            .map(|c| 2 * c[0] as usize + c[1] as usize)
            .collect(),
    }
}

/// Bits Bob reads off a Bell outcome. PP only distinguishes the
/// Z-correlation.
pub fn decode_bell(id: ProtocolId, bell: BellState) -> Vec<u8> {
    if id.bits_per_symbol() == 1 {
        let (z_anti, _) = bell.correlations();
        return vec![u8::from(!z_anti)];
    }
    let s = (0..4)
        .find(|&s| BellState::PsiPlus.after_pauli(s) == bell)
        .expect("every Bell state is reachable");
    vec![(s >> 1) as u8, (s & 1) as u8]
}

fn run_pairs(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    config.validate()?;
    let id = config.protocol;
    let attack = config.attack.as_ref();
    check_attack(id, attack)?;
    let r = roles(id);
    let n = config.n;
    let l1 = |k: usize| 2 * k + r.leg1_offset;
    let l2 = |k: usize| 2 * k + r.leg2_offset;
    let partner = |p: usize| p ^ 1;

    let mut rngs = Rngs::new(config.seed);
    let mut t = ProtocolTranscript::new(id, config.seed, config.mode);
    t.attack = attack.map(attack_summary);
    let message = config.message_bits();
    t.sent_bits = message.clone();

    let mut store = ParticleStore::new();
    for k in 0..n {
        store.prepare_bell(2 * k, 2 * k + 1, BellState::PsiPlus)?;
    }
    t.push(Event::Prepare {
        by: r.preparer,
        particles: (0..2 * n).collect(),
        state: "psi_plus".into(),
    });

    // Leg 1 and its check.
    let candidates: Vec<usize> = if r.gv {
        let threshold = config.bell_threshold();
        let check = choose_subset(n, n / 2, rngs.split(r.preparer).0);
        let cand: Vec<usize> = (0..n).filter(|k| check.binary_search(k).is_err()).collect();
        let mut send: Vec<usize> = check.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        send.extend(cand.iter().map(|&k| l1(k)));
        let pi = PermutationMap::random(
            send.len(),
            rng::child_seed(config.seed, Stream::Permutation as u64),
        );
        let slots = permute_particles(&send, &pi)?;
        t.counts.transmitted_leg1 = slots.len();
        t.counts.retained = cand.len();
        t.push(Event::Transmit {
            leg: 1,
            from: r.preparer,
            to: r.receiver,
            particles: slots.clone(),
            packet: None,
            slot: 0,
        });
        let pairs: Vec<(usize, usize)> = check.iter().map(|&k| (2 * k, 2 * k + 1)).collect();
        attack_leg(&mut store, &mut t, attack, 1, &slots, &pairs, &mut rngs.eve)?;
        t.push(Event::Acknowledge {
            leg: 1,
            by: r.receiver,
        });
        let pos = |p: usize| slots.iter().position(|&s| s == p).expect("transmitted");
        t.push(Event::Announce {
            after_leg: 1,
            by: r.preparer,
            announcement: Announcement::PairCoordinates {
                slots: pairs.iter().map(|&(a, b)| (pos(a), pos(b))).collect(),
            },
        });
        let out = verification_bell(
            &mut store,
            &pairs,
            BellState::PsiPlus,
            r.receiver,
            &mut rngs.nature,
        )?;
        t.events.extend(out.events);
        t.counts.checked_leg1 = 2 * pairs.len();
        if !t.check("leg1_bell", out.error_rate, out.samples, threshold) {
            return Ok(t);
        }
        cand
    } else {
        let send: Vec<usize> = (0..n).map(l1).collect();
        t.counts.transmitted_leg1 = send.len();
        t.counts.retained = n;
        t.push(Event::Transmit {
            leg: 1,
            from: r.preparer,
            to: r.receiver,
            particles: send.clone(),
            packet: None,
            slot: 0,
        });
        attack_leg(&mut store, &mut t, attack, 1, &send, &[], &mut rngs.eve)?;
        t.push(Event::Acknowledge {
            leg: 1,
            by: r.receiver,
        });
        let check = choose_subset(n, n / 2, rngs.split(r.receiver).0);
        t.push(Event::Announce {
            after_leg: 1,
            by: r.receiver,
            announcement: Announcement::VerificationCoordinates {
                particles: check.iter().map(|&k| l1(k)).collect(),
            },
        });
        let checks: Vec<Bb84Check> = check
            .iter()
            .map(|&k| Bb84Check {
                particle: l1(k),
                measured_by: r.receiver,
                partner: partner(l1(k)),
                partner_by: r.preparer,
                reference: BellState::PsiPlus,
            })
            .collect();
        let (own, nature) = rngs.split(r.receiver);
        let out = verification_bb84(&mut store, &checks, own, nature)?;
        t.events.extend(out.events);
        t.counts.checked_leg1 = checks.len();
        if !t.check("leg1_bb84", out.error_rate, out.samples, config.bb84_threshold) {
            return Ok(t);
        }
        (0..n).filter(|k| check.binary_search(k).is_err()).collect()
    };

    // Alice encodes and sends leg 2 to Bob.
    let verify_idx = choose_subset(candidates.len(), candidates.len() / 2, &mut rngs.alice);
    let (mut verify, mut msg_pairs) = (Vec::new(), Vec::new());
    for (i, &k) in candidates.iter().enumerate() {
        if verify_idx.binary_search(&i).is_ok() {
            verify.push(k);
        } else {
            msg_pairs.push(k);
        }
    }
    let ops = gates::dense_coding_ops();
    for (&k, s) in msg_pairs.iter().zip(symbols(id, &message)) {
        store.apply_unitary(&ops[s], &[l2(k)])?;
        t.push(Event::Encode {
            by: Party::Alice,
            particle: l2(k),
            operation: OP_NAMES[s].into(),
        });
    }
    t.counts.encoded = msg_pairs.len();
    let send2: Vec<usize> = candidates.iter().map(|&k| l2(k)).collect();
    t.counts.transmitted_leg2 = send2.len();
    t.push(Event::Transmit {
        leg: 2,
        from: Party::Alice,
        to: Party::Bob,
        particles: send2.clone(),
        packet: None,
        slot: 1,
    });
    attack_leg(&mut store, &mut t, attack, 2, &send2, &[], &mut rngs.eve)?;
    t.push(Event::Acknowledge {
        leg: 2,
        by: Party::Bob,
    });
    t.push(Event::Announce {
        after_leg: 2,
        by: Party::Alice,
        announcement: Announcement::VerificationCoordinates {
            particles: verify.iter().map(|&k| l2(k)).collect(),
        },
    });
    t.counts.verified_leg2 = verify.len();
    if r.gv {
        let pairs: Vec<(usize, usize)> = verify.iter().map(|&k| (2 * k, 2 * k + 1)).collect();
        let out = verification_bell(
            &mut store,
            &pairs,
            BellState::PsiPlus,
            Party::Bob,
            &mut rngs.nature,
        )?;
        t.events.extend(out.events);
        if !t.check("leg2_bell", out.error_rate, out.samples, config.bell_threshold()) {
            return Ok(t);
        }
    } else {
        let checks: Vec<Bb84Check> = verify
            .iter()
            .map(|&k| Bb84Check {
                particle: 2 * k,
                measured_by: Party::Bob,
                partner: 2 * k + 1,
                partner_by: Party::Bob,
                reference: BellState::PsiPlus,
            })
            .collect();
        let out = verification_bb84(&mut store, &checks, &mut rngs.bob, &mut rngs.nature)?;
        t.events.extend(out.events);
        if !t.check("leg2_bb84", out.error_rate, out.samples, config.bb84_threshold) {
            return Ok(t);
        }
    }

    let basis = gates::bell_basis();
    for &k in &msg_pairs {
        let outcome = store.measure(&[2 * k, 2 * k + 1], &basis, &mut rngs.nature)?;
        t.push(Event::Measure {
            by: Party::Bob,
            particles: vec![2 * k, 2 * k + 1],
            basis: MeasBasis::Bell,
            outcome,
        });
        let bell = BellState::from_index(outcome).expect("Bell outcome");
        t.decoded_bits.extend(decode_bell(id, bell));
    }
    let errs = t.bit_errors();
    t.error_rates.insert(
        "message".into(),
        if message.is_empty() {
            0.0
        } else {
            errs as f64 / message.len() as f64
        },
    );
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{Legs, ResendBasis};

    fn honest(id: ProtocolId, n: usize, seed: u64) -> ProtocolTranscript {
        let mut c = ProtocolConfig::new(id, n, seed);
        c.bell_threshold = Some(0.25);
        super::super::run(&c).unwrap()
    }

    #[test]
    fn honest_runs_decode_exactly() {
        for id in [
            ProtocolId::Pp,
            ProtocolId::Cl,
            ProtocolId::Dll,
            ProtocolId::PpGv,
            ProtocolId::ClGv,
            ProtocolId::DllGv,
        ] {
            for seed in 0..5 {
                let t = honest(id, 16, seed);
                assert!(!t.aborted, "{id} {seed}");
                assert_eq!(t.decoded_bits, t.sent_bits);
                assert!(t.error_rates.values().all(|&e| e == 0.0));
                t.validate().unwrap();
            }
        }
    }

    #[test]
    fn gv_variant_counts() {
        for id in [ProtocolId::PpGv, ProtocolId::ClGv, ProtocolId::DllGv] {
            let c = honest(id, 16, 3).counts;
            assert_eq!(
                (c.transmitted_leg1, c.retained, c.checked_leg1, c.encoded),
                (24, 8, 16, 4)
            );
        }
    }

    #[test]
    fn single_basis_property() {
        let gv = honest(ProtocolId::DllGv, 16, 1).measurement_bases();
        assert!(gv.iter().all(|b| *b == MeasBasis::Bell));
        let pp = honest(ProtocolId::Pp, 16, 1).measurement_bases();
        assert!(pp.contains(&MeasBasis::Z) && pp.contains(&MeasBasis::X));
    }

    #[test]
    fn cl_iy_maps_psi_plus_to_phi_minus() {
        let bits = vec![1, 0, 1, 0, 1, 0, 1, 0];
        let mut c = ProtocolConfig::new(ProtocolId::Cl, 16, 4).with_message(bits.clone());
        c.bell_threshold = Some(0.25);
        let t = super::super::run(&c).unwrap();
        let outcomes: Vec<usize> = t
            .events
            .iter()
            .rev()
            .take(4)
            .filter_map(|e| match e {
                Event::Measure { outcome, .. } => Some(*outcome),
                _ => None,
            })
            .collect();
        assert!(outcomes.iter().all(|&o| o == BellState::PhiMinus.index()));
        assert_eq!(t.decoded_bits, bits);
    }

    #[test]
    fn intercept_resend_on_first_leg_gives_quarter_error() {
        let mut c = ProtocolConfig::new(ProtocolId::Pp, 4000, 11)
            .with_attack(AttackParams::intercept_resend(ResendBasis::Z).with_legs(Legs::First));
        c.bb84_threshold = 1.0;
        let t = run_pp_family(&c).unwrap();
        // 2000 samples, σ ≈ 0.0097
        assert!((t.error_rates["leg1_bb84"] - 0.25).abs() < 0.03);
    }

    #[test]
    fn z_measurement_breaks_bell_check_half_the_time() {
        let mut c = ProtocolConfig::new(ProtocolId::PpGv, 2000, 5)
            .with_attack(AttackParams::intercept_resend(ResendBasis::Z));
        c.bell_threshold = Some(1.0);
        let t = run_pp_gv_family(&c).unwrap();
        assert!((t.error_rates["leg1_bell"] - 0.5).abs() < 0.05);
    }

    #[test]
    fn pairing_guess_is_rejected_without_permutation() {
        let c = ProtocolConfig::new(ProtocolId::Pp, 8, 1).with_attack(AttackParams::pairing_guess());
        assert!(matches!(run_pp_family(&c), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn pairing_guess_gets_caught() {
        let mut c = ProtocolConfig::new(ProtocolId::PpGv, 16, 9).with_attack(AttackParams::pairing_guess());
        c.bell_threshold = Some(0.1);
        let t = run_pp_gv_family(&c).unwrap();
        assert!(t.aborted);
        assert_eq!(t.attack.unwrap().pairing_correct, Some(false));
    }

    #[test]
    fn wrong_family_is_an_error() {
        assert!(run_dll_family(&ProtocolConfig::new(ProtocolId::Pp, 8, 1)).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let c =
            ProtocolConfig::new(ProtocolId::DllGv, 16, 77).with_attack(AttackParams::symmetric_ng(0.7, 0.5));
        let a = serde_json::to_string(&super::super::run(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&super::super::run(&c).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
