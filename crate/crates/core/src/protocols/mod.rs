//! Executable protocol state machines.
//!
//! Particle ids: pair `k` consists of particles `2k` (first qubit) and
//! `2k + 1` (second qubit), both prepared in `|Ψ⁺⟩`. In GV runs particle
//! `r` is the path qubit of round `r`.

mod gv;
mod pairs;
mod store;
mod transcript;
mod verify;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::AttackParams;
use crate::rng::{self, Stream};
use crate::{Error, Result};

pub use gv::run_gv;
pub use pairs::{decode_bell, run_dll_family, run_pp_family, run_pp_gv_family};
pub use store::ParticleStore;
pub use transcript::{
    Announcement, AttackSummary, Counts, Event, GvTiming, MeasBasis, Party, ProtocolTranscript,
};
pub use verify::{verification_bb84, verification_bell, Bb84Check, CheckOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolId {
    #[serde(rename = "GV")]
    Gv,
    #[serde(rename = "PP")]
    Pp,
    #[serde(rename = "CL")]
    Cl,
    #[serde(rename = "DLL")]
    Dll,
    #[serde(rename = "PP_GV")]
    PpGv,
    #[serde(rename = "CL_GV")]
    ClGv,
    #[serde(rename = "DLL_GV")]
    DllGv,
}

impl ProtocolId {
    pub const ALL: [ProtocolId; 7] = [
        ProtocolId::Gv,
        ProtocolId::Pp,
        ProtocolId::Cl,
        ProtocolId::Dll,
        ProtocolId::PpGv,
        ProtocolId::ClGv,
        ProtocolId::DllGv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::Gv => "GV",
            ProtocolId::Pp => "PP",
            ProtocolId::Cl => "CL",
            ProtocolId::Dll => "DLL",
            ProtocolId::PpGv => "PP_GV",
            ProtocolId::ClGv => "CL_GV",
            ProtocolId::DllGv => "DLL_GV",
        }
    }

    /// Variants built on orthogonal states (single-basis checks).
    pub fn is_gv_variant(self) -> bool {
        matches!(
            self,
            ProtocolId::Gv | ProtocolId::PpGv | ProtocolId::ClGv | ProtocolId::DllGv
        )
    }

    /// Bits carried by one message pair (or one GV round).
    pub fn bits_per_symbol(self) -> usize {
        match self {
            ProtocolId::Gv | ProtocolId::Pp | ProtocolId::PpGv => 1,
            _ => 2,
        }
    }

    /// Total message bits a run with `n` pairs or rounds carries.
    pub fn message_bits(self, n: usize) -> usize {
        match self {
            ProtocolId::Gv => n,
            _ => n / 4 * self.bits_per_symbol(),
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolId::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown protocol id {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Qkd,
    Qsdc,
}

/// Discrete-time channel model of a GV run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GvChannel {
    /// Slots a packet spends in the channel.
    pub travel: u64,
    /// Delay line between the two packets.
    pub tau: u64,
    /// Slots between successive rounds.
    pub period: u64,
    /// Alice draws each send offset uniformly from `0..jitter_slots`.
    pub jitter_slots: u64,
}

impl Default for GvChannel {
    fn default() -> Self {
        GvChannel {
            travel: 3,
            tau: 5,
            period: 16,
            jitter_slots: 0,
        }
    }
}

fn default_bb84_threshold() -> f64 {
    0.11
}

fn default_disclosed() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub protocol: ProtocolId,
    pub n: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackParams>,
    /// Message or key bits; drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<Vec<u8>>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_bb84_threshold")]
    pub bb84_threshold: f64,
    /// Defaults to the tolerable error computed for the protocol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bell_threshold: Option<f64>,
    #[serde(default = "default_disclosed")]
    pub disclosed_fraction: f64,
    #[serde(default)]
    pub gv: GvChannel,
}

impl ProtocolConfig {
    pub fn new(protocol: ProtocolId, n: usize, seed: u64) -> Self {
        ProtocolConfig {
            protocol,
            n,
            seed,
            attack: None,
            message: None,
            mode: Mode::Qkd,
            bb84_threshold: default_bb84_threshold(),
            bell_threshold: None,
            disclosed_fraction: default_disclosed(),
            gv: GvChannel::default(),
        }
    }

    pub fn with_attack(mut self, attack: AttackParams) -> Self {
        self.attack = Some(attack);
        self
    }

    pub fn with_message(mut self, bits: Vec<u8>) -> Self {
        self.message = Some(bits);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(4) {
            return Err(Error::Config(format!(
                "n = {} must be at least 4 and divisible by 4",
                self.n
            )));
        }
        if let Some(m) = &self.message {
            let want = self.protocol.message_bits(self.n);
            if m.len() != want {
                return Err(Error::Config(format!(
                    "{} with n = {} carries {want} bits, message has {}",
                    self.protocol,
                    self.n,
                    m.len()
                )));
            }
            if m.iter().any(|&b| b > 1) {
                return Err(Error::Config("message bits must be 0 or 1".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.bb84_threshold) {
            return Err(Error::out_of_range(
                "bb84_threshold",
                self.bb84_threshold,
                0.0,
                1.0,
            ));
        }
        if let Some(t) = self.bell_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::out_of_range("bell_threshold", t, 0.0, 1.0));
            }
        }
        if !(self.disclosed_fraction > 0.0 && self.disclosed_fraction <= 1.0) {
            return Err(Error::out_of_range(
                "disclosed_fraction",
                self.disclosed_fraction,
                0.0,
                1.0,
            ));
        }
        let g = self.gv;
        if g.tau == 0 || g.travel == 0 {
            return Err(Error::Config("gv.tau and gv.travel must be positive".into()));
        }
        if g.period < g.jitter_slots + g.tau + g.travel + 1 {
            return Err(Error::Config(format!(
                "gv.period = {} lets rounds overlap; need at least jitter_slots + tau + travel + 1",
                g.period
            )));
        }
        if let Some(a) = &self.attack {
            a.validate()?;
        }
        Ok(())
    }

    /// Threshold applied to Bell-basis checks.
    pub fn bell_threshold(&self) -> f64 {
        self.bell_threshold
            .unwrap_or_else(|| crate::analysis::default_bell_threshold(self.protocol))
    }

    /// The configured message, or one drawn from the message stream.
    pub(crate) fn message_bits(&self) -> Vec<u8> {
        self.message.clone().unwrap_or_else(|| {
            let mut r = rng::stream(self.seed, Stream::Message);
            (0..self.protocol.message_bits(self.n))
                .map(|_| r.random_range(0..2u8))
                .collect()
        })
    }
}

/// Run any protocol.
pub fn run(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    match config.protocol {
        ProtocolId::Gv => run_gv(config),
        ProtocolId::Pp | ProtocolId::Cl => run_pp_family(config),
        ProtocolId::PpGv | ProtocolId::ClGv => run_pp_gv_family(config),
        ProtocolId::Dll | ProtocolId::DllGv => run_dll_family(config),
    }
}

pub(crate) fn unsupported(protocol: ProtocolId, what: impl Into<String>) -> Error {
    Error::Unsupported {
        protocol: protocol.name().into(),
        what: what.into(),
    }
}

/// Random subset of `k` indices out of `0..n`, in ascending order.
pub(crate) fn choose_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut v = rand::seq::index::sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for p in ProtocolId::ALL {
            let s = serde_json::to_string(&p).unwrap();
            assert_eq!(s, format!("\"{}\"", p.name()));
            assert_eq!(p.name().parse::<ProtocolId>().unwrap(), p);
        }
    }

    #[test]
    fn n_must_be_multiple_of_four() {
        for n in [0, 2, 6, 10] {
            assert!(ProtocolConfig::new(ProtocolId::Pp, n, 1).validate().is_err());
        }
        assert!(ProtocolConfig::new(ProtocolId::Pp, 8, 1).validate().is_ok());
    }

    #[test]
    fn message_length_is_checked() {
        let c = ProtocolConfig::new(ProtocolId::Cl, 8, 1).with_message(vec![0, 1, 1]);
        assert!(c.validate().is_err());
        let c = ProtocolConfig::new(ProtocolId::Cl, 8, 1).with_message(vec![0, 1, 1, 0]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn minimal_json_config() {
        let c: ProtocolConfig = serde_json::from_str(r#"{"protocol":"PP_GV","n":8,"seed":42}"#).unwrap();
        assert_eq!(c, ProtocolConfig::new(ProtocolId::PpGv, 8, 42));
        assert!(
            serde_json::from_str::<ProtocolConfig>(r#"{"protocol":"PP_GV","n":8,"seed":42,"x":1}"#).is_err()
        );
    }
}
