//! Exact pair-plus-probes model behind the security grid.
//!
//! Register layout: qubits 0 and 1 are the pair, 2–3 the probe of the
//! first-leg attack, 4–5 the probe of the second-leg attack. Every attack
//! is the symmetric incoherent single-qubit interaction with fresh probes.

use serde::{Deserialize, Serialize};

use crate::attacks::{ng_unitary, Legs};
use crate::info::{binary_entropy, holevo_bound, mutual_information, mutual_information_binary};
use crate::protocols::{decode_bell, ProtocolId};
use crate::qstate::gates::{self, BellState};
use crate::qstate::{DensityMatrix, StateVector};
use crate::{Error, Result};

/// How Bob's information is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IbReading {
    /// Mutual information of the full symbol × Bell-outcome confusion matrix.
    FullConfusion,
    /// Sum over encoded bits of `1 − H₂(e_bit)` with per-bit marginal errors.
    #[default]
    PerBitMarginal,
    /// `1 − H₂(e)` on the Bell error rate itself.
    BinaryOnBellError,
}

/// Unit Eve's Holevo quantity is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiScale {
    #[default]
    PerSymbol,
    /// Divided by the number of channel crossings per encoded symbol.
    PerTransmittedQubit,
}

/// Whether Eve knows which pairs she attacked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveKnowledge {
    /// `χ = λ·χ_attacked`.
    Flagged,
    /// Holevo quantity of `λ·ρ_attacked + (1−λ)·|ready⟩⟨ready|`, the probe
    /// side of the convex-mixture `ρ′`.
    #[default]
    Unflagged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interpretation {
    #[serde(default)]
    pub ib: IbReading,
    #[serde(default)]
    pub chi: ChiScale,
    #[serde(default)]
    pub eve: EveKnowledge,
    #[serde(default)]
    pub legs: Legs,
}

impl Interpretation {
    /// Every combination of the three reading switches (both legs attacked).
    pub fn variants() -> Vec<Interpretation> {
        let mut out = Vec::new();
        for ib in [
            IbReading::FullConfusion,
            IbReading::PerBitMarginal,
            IbReading::BinaryOnBellError,
        ] {
            for chi in [ChiScale::PerSymbol, ChiScale::PerTransmittedQubit] {
                for eve in [EveKnowledge::Flagged, EveKnowledge::Unflagged] {
                    out.push(Interpretation {
                        ib,
                        chi,
                        eve,
                        legs: Legs::Both,
                    });
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        let ib = match self.ib {
            IbReading::FullConfusion => "full_confusion",
            IbReading::PerBitMarginal => "per_bit_marginal",
            IbReading::BinaryOnBellError => "binary_on_bell_error",
        };
        let chi = match self.chi {
            ChiScale::PerSymbol => "per_symbol",
            ChiScale::PerTransmittedQubit => "per_transmitted_qubit",
        };
        let eve = match self.eve {
            EveKnowledge::Flagged => "flagged",
            EveKnowledge::Unflagged => "unflagged",
        };
        let legs = match self.legs {
            Legs::Both => "both_legs",
            Legs::First => "first_leg",
            Legs::Second => "second_leg",
        };
        format!("ib={ib};chi={chi};eve={eve};legs={legs}")
    }
}

/// `1 − ⟨Φ|ρ′|Φ⟩`.
pub fn error_rate(rho_prime: &DensityMatrix, reference: BellState) -> Result<f64> {
    if rho_prime.num_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_prime.dim(),
        });
    }
    Ok(1.0 - rho_prime.fidelity_with_pure(&reference.state())?)
}

/// Holevo bound of Eve's probe ensemble `{p_s, ρ_E^s}`.
pub fn eve_information(ensemble: &[(f64, DensityMatrix)]) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::InvalidDistribution("empty probe ensemble".into()));
    }
    holevo_bound(ensemble)
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Attack { leg: u8, target: usize, probe: usize },
    Encode { target: usize },
}

fn steps(protocol: ProtocolId) -> Result<[Step; 3]> {
    use Step::*;
    Ok(match protocol {
        ProtocolId::Pp | ProtocolId::Cl | ProtocolId::PpGv | ProtocolId::ClGv => [
            Attack {
                leg: 1,
                target: 0,
                probe: 2,
            },
            Encode { target: 0 },
            Attack {
                leg: 2,
                target: 0,
                probe: 4,
            },
        ],
        ProtocolId::Dll => [
            Attack {
                leg: 1,
                target: 0,
                probe: 2,
            },
            Encode { target: 1 },
            Attack {
                leg: 2,
                target: 1,
                probe: 4,
            },
        ],
        ProtocolId::DllGv => [
            Attack {
                leg: 1,
                target: 1,
                probe: 2,
            },
            Encode { target: 0 },
            Attack {
                leg: 2,
                target: 0,
                probe: 4,
            },
        ],
        ProtocolId::Gv => {
            return Err(Error::Unsupported {
                protocol: protocol.name().into(),
                what: "pair-state security analysis (no Bell pairs)".into(),
            });
        }
    })
}

/// Channel crossings per encoded symbol.
pub const CROSSINGS_PER_SYMBOL: f64 = 2.0;

/// Symbols as bit strings, matching the protocols' encoding.
fn symbol_bits(protocol: ProtocolId, s: usize) -> Vec<u8> {
    if protocol.bits_per_symbol() == 1 {
        vec![s as u8]
    } else {
        vec![(s >> 1) as u8, (s & 1) as u8]
    }
}

/// Everything about a fully attacked pair at one interaction angle.
#[derive(Debug, Clone)]
pub struct AttackedModel {
    pub protocol: ProtocolId,
    pub theta: f64,
    /// `outcome_probs[s][b]`: Bell outcome `b` for symbol `s`, attacked pair.
    pub outcome_probs: Vec<[f64; 4]>,
    /// Eve's four-qubit probe state for each symbol.
    pub probe_states: Vec<DensityMatrix>,
    pub chi_attacked: f64,
    ready: DensityMatrix,
}

impl AttackedModel {
    pub fn new(protocol: ProtocolId, theta: f64, legs: Legs) -> Result<Self> {
        let plan = steps(protocol)?;
        let u = ng_unitary(theta)?;
        let ops = gates::dense_coding_ops();
        let alphabet = 1usize << protocol.bits_per_symbol();
        let start = BellState::PsiPlus
            .state()
            .tensor(&StateVector::basis_state(4, 0)?)?;
        let bell = gates::bell_basis();
        let mut outcome_probs = Vec::with_capacity(alphabet);
        let mut probe_states = Vec::with_capacity(alphabet);
        for op in ops.iter().take(alphabet) {
            let mut psi = start.clone();
            for step in plan {
                psi = match step {
                    Step::Attack { leg, target, probe } if legs.includes(leg) => {
                        psi.apply_unitary(&u, &[target, probe, probe + 1])?
                    }
                    Step::Attack { .. } => psi,
                    Step::Encode { target } => psi.apply_unitary(op, &[target])?,
                };
            }
            let p = bell.probabilities(&psi, &[0, 1])?;
            outcome_probs.push([p[0], p[1], p[2], p[3]]);
            probe_states.push(psi.reduced(&[2, 3, 4, 5])?);
        }
        let prior = 1.0 / alphabet as f64;
        let ensemble: Vec<(f64, DensityMatrix)> = probe_states.iter().map(|r| (prior, r.clone())).collect();
        let chi_attacked = eve_information(&ensemble)?;
        Ok(AttackedModel {
            protocol,
            theta,
            outcome_probs,
            probe_states,
            chi_attacked,
            ready: StateVector::basis_state(4, 0)?.to_density(),
        })
    }

    fn alphabet(&self) -> usize {
        self.outcome_probs.len()
    }

    fn expected(s: usize) -> BellState {
        BellState::PsiPlus.after_pauli(s)
    }

    /// Bell-outcome distribution for symbol `s` when a fraction `lambda` of
    /// pairs is attacked.
    pub fn channel(&self, s: usize, lambda: f64) -> [f64; 4] {
        let mut p = self.outcome_probs[s].map(|x| lambda * x);
        p[Self::expected(s).index()] += 1.0 - lambda;
        p
    }

    /// Symbol-averaged Bell error rate of the attacked pairs alone.
    pub fn attacked_error(&self) -> f64 {
        let n = self.alphabet();
        (0..n)
            .map(|s| 1.0 - self.outcome_probs[s][Self::expected(s).index()])
            .sum::<f64>()
            .max(0.0)
            / n as f64
    }

    pub fn error_rate(&self, lambda: f64) -> f64 {
        lambda * self.attacked_error()
    }

    pub fn bob_information(&self, lambda: f64, reading: IbReading) -> Result<f64> {
        let n = self.alphabet();
        let prior = 1.0 / n as f64;
        match reading {
            IbReading::FullConfusion => {
                let joint: Vec<Vec<f64>> = (0..n)
                    .map(|s| self.channel(s, lambda).iter().map(|p| prior * p).collect())
                    .collect();
                mutual_information(&joint)
            }
            IbReading::PerBitMarginal => {
                let bits = self.protocol.bits_per_symbol();
                let mut wrong = vec![0.0; bits];
                for s in 0..n {
                    let sent = symbol_bits(self.protocol, s);
                    for (b, p) in self.channel(s, lambda).iter().enumerate() {
                        let got = decode_bell(self.protocol, BellState::from_index(b).expect("Bell index"));
                        for i in 0..bits {
                            if got[i] != sent[i] {
                                wrong[i] += prior * p;
                            }
                        }
                    }
                }
                Ok(wrong.iter().map(|&e| 1.0 - binary_entropy(e)).sum())
            }
            IbReading::BinaryOnBellError => mutual_information_binary(self.error_rate(lambda).min(1.0)),
        }
    }

    pub fn eve_information(&self, lambda: f64, interp: &Interpretation) -> Result<f64> {
        let chi = match interp.eve {
            EveKnowledge::Flagged => lambda * self.chi_attacked,
            EveKnowledge::Unflagged => {
                let prior = 1.0 / self.alphabet() as f64;
                let ensemble = self
                    .probe_states
                    .iter()
                    .map(|r| {
                        Ok((
                            prior,
                            DensityMatrix::mixture(&[(lambda, r), (1.0 - lambda, &self.ready)])?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                eve_information(&ensemble)?
            }
        };
        Ok(match interp.chi {
            ChiScale::PerSymbol => chi,
            ChiScale::PerTransmittedQubit => chi / CROSSINGS_PER_SYMBOL,
        })
    }
}
