use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::ProtocolId;
use crate::attacks::AttackKind;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
    Eve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasBasis {
    Z,
    X,
    Bell,
    /// Bob's recombination of the two GV packets followed by a `{ψ₀, ψ₁}`
    /// measurement.
    GvRecombine,
}

/// Discrete-time record of one GV round. Packet `|0⟩` leaves at `t_s`;
/// packet `|1⟩` leaves `tau` slots later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GvTiming {
    pub t_s: u64,
    /// Arrival of packet `|0⟩` at Bob.
    pub t_r0: u64,
    /// Arrival of packet `|1⟩`, when Bob recombines.
    pub t_r: u64,
    pub tau: u64,
    pub travel: u64,
}

impl GvTiming {
    pub fn honest(t_s: u64, tau: u64, travel: u64) -> Self {
        GvTiming {
            t_s,
            t_r0: t_s + travel,
            t_r: t_s + travel + tau,
            tau,
            travel,
        }
    }

    /// `t_r = t_s + θ + τ`, with packet `|0⟩` itself on time.
    pub fn passes(&self) -> bool {
        self.t_r0 == self.t_s + self.travel && self.t_r == self.t_s + self.travel + self.tau
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Announcement {
    /// `Π_n`: channel slots of the transmitted Bell pairs.
    PairCoordinates { slots: Vec<(usize, usize)> },
    /// Particles forming the verification string of a leg.
    VerificationCoordinates { particles: Vec<usize> },
    /// GV send slots, revealed for the timing test.
    SendTimes { t_s: Vec<u64> },
    /// GV rounds and bits disclosed for the sample comparison.
    DisclosedBits { rounds: Vec<usize>, bits: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Prepare {
        by: Party,
        particles: Vec<usize>,
        state: String,
    },
    Transmit {
        leg: u8,
        from: Party,
        to: Party,
        /// Particles in channel-slot order.
        particles: Vec<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        packet: Option<u8>,
        slot: u64,
    },
    Acknowledge {
        leg: u8,
        by: Party,
    },
    Announce {
        /// Leg whose acknowledgement this disclosure must follow.
        after_leg: u8,
        by: Party,
        announcement: Announcement,
    },
    Measure {
        by: Party,
        particles: Vec<usize>,
        basis: MeasBasis,
        outcome: usize,
    },
    Encode {
        by: Party,
        particle: usize,
        operation: String,
    },
    Attack {
        kind: AttackKind,
        leg: u8,
        particles: Vec<usize>,
        #[serde(skip_serializing_if = "String::is_empty", default)]
        detail: String,
    },
    Timing {
        round: usize,
        timing: GvTiming,
        passed: bool,
    },
    Check {
        name: String,
        error_rate: f64,
        samples: usize,
        threshold: f64,
        passed: bool,
    },
    Abort {
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub transmitted_leg1: usize,
    pub retained: usize,
    pub checked_leg1: usize,
    pub transmitted_leg2: usize,
    pub verified_leg2: usize,
    pub encoded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSummary {
    pub kind: AttackKind,
    pub attacked_particles: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eve_bits: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairing_correct: Option<bool>,
    pub lambda_semantics: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub protocol: ProtocolId,
    pub seed: u64,
    pub mode: super::Mode,
    pub events: Vec<Event>,
    pub error_rates: BTreeMap<String, f64>,
    pub sent_bits: Vec<u8>,
    pub decoded_bits: Vec<u8>,
    pub aborted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub abort_reason: Option<String>,
    pub counts: Counts,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attack: Option<AttackSummary>,
}

impl ProtocolTranscript {
    pub(crate) fn new(protocol: ProtocolId, seed: u64, mode: super::Mode) -> Self {
        ProtocolTranscript {
            protocol,
            seed,
            mode,
            events: Vec::new(),
            error_rates: BTreeMap::new(),
            sent_bits: Vec::new(),
            decoded_bits: Vec::new(),
            aborted: false,
            abort_reason: None,
            counts: Counts::default(),
            attack: None,
        }
    }

    pub(crate) fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub(crate) fn check(&mut self, name: &str, error_rate: f64, samples: usize, threshold: f64) -> bool {
        let passed = error_rate <= threshold;
        self.error_rates.insert(name.to_string(), error_rate);
        self.push(Event::Check {
            name: name.to_string(),
            error_rate,
            samples,
            threshold,
            passed,
        });
        if !passed {
            self.abort(format!(
                "{name} error rate {error_rate:.4} exceeds {threshold:.4}"
            ));
        }
        passed
    }

    pub(crate) fn abort(&mut self, reason: String) {
        self.push(Event::Abort {
            reason: reason.clone(),
        });
        self.aborted = true;
        self.abort_reason = Some(reason);
    }

    /// Bits where decoding disagrees with what was sent.
    pub fn bit_errors(&self) -> usize {
        self.sent_bits
            .iter()
            .zip(&self.decoded_bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn measurement_bases(&self) -> HashSet<MeasBasis> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Measure { basis, .. } => Some(*basis),
                _ => None,
            })
            .collect()
    }

    /// Check causal order: every announcement follows the acknowledgement
    /// of the leg it depends on, and no particle crosses the same leg twice.
    pub fn validate(&self) -> Result<()> {
        let mut acked: HashSet<u8> = HashSet::new();
        let mut crossed: HashSet<(u8, usize, Option<u8>)> = HashSet::new();
        for (i, e) in self.events.iter().enumerate() {
            match e {
                Event::Acknowledge { leg, .. } => {
                    acked.insert(*leg);
                }
                Event::Announce { after_leg, .. } if !acked.contains(after_leg) => {
                    return Err(Error::CausalOrder(format!(
                        "event {i}: announcement before acknowledgement of leg {after_leg}"
                    )));
                }
                Event::Transmit {
                    leg,
                    particles,
                    packet,
                    ..
                } => {
                    if acked.contains(leg) {
                        return Err(Error::CausalOrder(format!(
                            "event {i}: transmission on leg {leg} after its acknowledgement"
                        )));
                    }
                    for &p in particles {
                        if !crossed.insert((*leg, p, *packet)) {
                            return Err(Error::CausalOrder(format!(
                                "event {i}: particle {p} crosses leg {leg} twice"
                            )));
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}
