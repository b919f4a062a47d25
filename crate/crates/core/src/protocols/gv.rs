//! The two-packet GV protocol in discrete time.

use rand::Rng;

use super::pairs::{attack_summary, channel_attack, Rngs};
use super::transcript::{Announcement, Event, GvTiming, MeasBasis, Party, ProtocolTranscript};
use super::{choose_subset, unsupported, ParticleStore, ProtocolConfig, ProtocolId};
use crate::attacks::{AttackKind, DummyStrategy};
use crate::qstate::{gates, Basis};
use crate::{Error, Result};

/// Bob's recombination followed by the `{ψ₀, ψ₁}` test.
fn recombine_basis() -> Basis {
    Basis::new(vec![gates::psi_j(0), gates::psi_j(1)]).expect("orthonormal")
}

pub fn run_gv(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    if config.protocol != ProtocolId::Gv {
        return Err(Error::Config(format!("run_gv cannot run {}", config.protocol)));
    }
    config.validate()?;
    let attack = config.attack.as_ref();
    if let Some(a) = attack {
        if a.kind == AttackKind::PairingGuess {
            return Err(unsupported(ProtocolId::Gv, "pairing_guess (no Bell pairs)"));
        }
    }
    let g = config.gv;
    let n = config.n;
    let mut rngs = Rngs::new(config.seed);
    let mut t = ProtocolTranscript::new(ProtocolId::Gv, config.seed, config.mode);
    t.attack = attack.map(attack_summary);
    let bits = config.message_bits();
    t.sent_bits = bits.clone();
    let basis = recombine_basis();
    let mut store = ParticleStore::new();
    let mut timings = Vec::with_capacity(n);
    let mut eve_bits = Vec::new();

    for (r, &j) in bits.iter().enumerate() {
        let nominal = r as u64 * g.period;
        let offset = if g.jitter_slots > 1 {
            rngs.alice.random_range(0..g.jitter_slots)
        } else {
            0
        };
        let t_s = nominal + offset;
        store.prepare(&[r], &gates::psi_j(j as usize))?;
        t.push(Event::Prepare {
            by: Party::Alice,
            particles: vec![r],
            state: format!("psi_{j}"),
        });
        for (packet, slot) in [(0u8, t_s), (1, t_s + g.tau)] {
            t.push(Event::Transmit {
                leg: 1,
                from: Party::Alice,
                to: Party::Bob,
                particles: vec![r],
                packet: Some(packet),
                slot,
            });
        }
        let mut timing = GvTiming::honest(t_s, g.tau, g.travel);

        if let Some(a) = attack {
            match a.kind {
                AttackKind::TimingDelay => {
                    if rngs.eve.random::<f64>() < a.lambda {
                        match a.dummy {
                            DummyStrategy::None => timing.t_r0 += a.delay_slots,
                            DummyStrategy::HoldBoth | DummyStrategy::Scheduled => {
                                // Eve absorbs both real packets, reads j and
                                // forwards a dummy |ψ_k⟩.
                                let seen = store.measure(&[r], &basis, &mut rngs.nature)?;
                                eve_bits.push(seen as u8);
                                let k = rngs.eve.random_range(0..2usize);
                                store.prepare(&[r], &gates::psi_j(k))?;
                                if a.dummy == DummyStrategy::Scheduled {
                                    timing.t_r0 = nominal + g.travel;
                                    timing.t_r = nominal + g.travel + g.tau;
                                }
                            }
                        }
                        if let Some(s) = t.attack.as_mut() {
                            s.attacked_particles += 1;
                        }
                        t.push(Event::Attack {
                            kind: a.kind,
                            leg: 1,
                            particles: vec![r],
                            detail: match a.dummy {
                                DummyStrategy::None => format!("packet 0 delayed {} slots", a.delay_slots),
                                DummyStrategy::HoldBoth => "packets held, dummy forwarded".into(),
                                DummyStrategy::Scheduled => "dummy injected at nominal slot".into(),
                            },
                        });
                    }
                }
                _ => channel_attack(&mut store, &mut t, a, 1, &[r], &mut rngs.eve)?,
            }
        }

        let outcome = store.measure(&[r], &basis, &mut rngs.nature)?;
        t.push(Event::Measure {
            by: Party::Bob,
            particles: vec![r],
            basis: MeasBasis::GvRecombine,
            outcome,
        });
        t.decoded_bits.push(outcome as u8);
        timings.push(timing);
    }
    if let (Some(s), true) = (t.attack.as_mut(), !eve_bits.is_empty()) {
        s.eve_bits = Some(eve_bits);
    }
    t.counts.transmitted_leg1 = n;

    t.push(Event::Acknowledge {
        leg: 1,
        by: Party::Bob,
    });
    t.push(Event::Announce {
        after_leg: 1,
        by: Party::Alice,
        announcement: Announcement::SendTimes {
            t_s: timings.iter().map(|x| x.t_s).collect(),
        },
    });
    let mut late = 0;
    for (round, timing) in timings.iter().enumerate() {
        let passed = timing.passes();
        late += usize::from(!passed);
        t.push(Event::Timing {
            round,
            timing: *timing,
            passed,
        });
    }
    if !t.check("gv_timing", late as f64 / n as f64, n, 0.0) {
        return Ok(t);
    }

    let k = ((config.disclosed_fraction * n as f64).round() as usize).clamp(1, n);
    let rounds = choose_subset(n, k, &mut rngs.alice);
    let disclosed: Vec<u8> = rounds.iter().map(|&r| t.decoded_bits[r]).collect();
    let wrong = rounds
        .iter()
        .zip(&disclosed)
        .filter(|(&r, &b)| bits[r] != b)
        .count();
    t.push(Event::Announce {
        after_leg: 1,
        by: Party::Bob,
        announcement: Announcement::DisclosedBits {
            rounds,
            bits: disclosed,
        },
    });
    t.counts.checked_leg1 = k;
    t.check("gv_sample", wrong as f64 / k as f64, k, config.bb84_threshold);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::AttackParams;

    fn cfg(n: usize, seed: u64) -> ProtocolConfig {
        ProtocolConfig::new(ProtocolId::Gv, n, seed)
    }

    #[test]
    fn honest_run_is_exact_and_on_time() {
        let t = run_gv(&cfg(64, 3)).unwrap();
        assert!(!t.aborted);
        assert_eq!(t.decoded_bits, t.sent_bits);
        t.validate().unwrap();
        for e in &t.events {
            if let Event::Timing { timing, .. } = e {
                assert_eq!(timing.t_r, timing.t_s + timing.travel + timing.tau);
            }
        }
        assert_eq!(t.measurement_bases().len(), 1);
    }

    #[test]
    fn delayed_packet_fails_timing() {
        let c = cfg(8, 1).with_attack(AttackParams::timing_delay(1, DummyStrategy::None));
        let t = run_gv(&c).unwrap();
        assert!(t.aborted);
        assert_eq!(t.error_rates["gv_timing"], 1.0);
    }

    #[test]
    fn orthogonal_probe_gives_half_disagreement() {
        let mut c = cfg(4000, 2).with_attack(AttackParams::generic_probe(0.0));
        c.bb84_threshold = 1.0;
        let t = run_gv(&c).unwrap();
        // 2000 disclosed rounds, σ ≈ 0.011
        assert!((t.error_rates["gv_sample"] - 0.5).abs() < 0.04);
    }

    #[test]
    fn hold_both_reads_everything_and_is_sampled_at_half() {
        let mut c = cfg(4000, 4).with_attack(AttackParams::timing_delay(0, DummyStrategy::HoldBoth));
        c.bb84_threshold = 1.0;
        let t = run_gv(&c).unwrap();
        assert_eq!(t.error_rates["gv_timing"], 0.0);
        assert_eq!(
            t.attack.as_ref().unwrap().eve_bits.as_deref(),
            Some(&t.sent_bits[..])
        );
        assert!((t.error_rates["gv_sample"] - 0.5).abs() < 0.04);
    }

    #[test]
    fn scheduled_dummies_are_caught_by_jitter() {
        let mut c = cfg(8, 5).with_attack(AttackParams::timing_delay(0, DummyStrategy::Scheduled));
        c.gv.jitter_slots = 4;
        assert!(run_gv(&c).unwrap().aborted);
        c.gv.jitter_slots = 0;
        let t = run_gv(&c).unwrap();
        assert_eq!(t.error_rates["gv_timing"], 0.0);
    }
}
