//! Eavesdropper models.
//!
//! Probe-based attacks attach a two-qubit probe register per attacked
//! particle, initialised in the ready state `|E⟩ = |00⟩`. The first probe
//! qubit flags which branch of the interaction fired (`ε` vs `E` vectors),
//! the second carries the prescribed overlap, so every pair `ε_k ⊥ E_l` and
//! the two overlaps `⟨ε₀|ε₁⟩`, `⟨E₀|E₁⟩` can be set independently.

mod probe;
mod scripted;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::qstate::CMatrix;
use crate::{Error, Result};

pub use probe::{
    asymmetric_isometry, compress_probe, generic_probe_pair, generic_probe_unitary, gv_probe_state,
    isometry_kraus, isometry_to_unitary, ng_amplitudes, ng_attack, ng_isometry, ng_kraus, ng_unitary,
    realize_overlap, symmetric_attack, ProbeRecord, ProbeVectors,
};
pub use scripted::{
    bell_product_state, hold_both_disagreement_exact, intercept_resend_kraus, jitter_detection_exact,
    pairing_exact_n2, pairing_guess_attack, pairing_trial_n2, random_pairing, PairingExact, PairingGuess,
    PairingReport, PairingTrial,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    /// Conditional probe `U = |0⟩⟨0|⊗C₀ + |1⟩⟨1|⊗C₁` on a GV packet.
    GenericProbe,
    /// Two-angle probe interaction with independent `ε`/`E` overlaps.
    AsymmetricProbe,
    /// Niu–Griffiths symmetric incoherent single-qubit attack.
    SymmetricNg,
    InterceptResend,
    TimingDelay,
    PairingGuess,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::GenericProbe => "generic_probe",
            AttackKind::AsymmetricProbe => "asymmetric_probe",
            AttackKind::SymmetricNg => "symmetric_ng",
            AttackKind::InterceptResend => "intercept_resend",
            AttackKind::TimingDelay => "timing_delay",
            AttackKind::PairingGuess => "pairing_guess",
        }
    }
}

/// Which channel crossings of a two-leg protocol Eve touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Legs {
    #[default]
    Both,
    First,
    Second,
}

impl Legs {
    pub fn includes(self, leg: u8) -> bool {
        match self {
            Legs::Both => true,
            Legs::First => leg == 1,
            Legs::Second => leg == 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResendBasis {
    #[default]
    Z,
    X,
}

/// What Eve does with packets she holds back in GV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DummyStrategy {
    /// Hold the `|0⟩` packet for `delay_slots` and forward the original.
    #[default]
    None,
    /// Keep both real packets, forward a dummy `|ψ_k⟩` on schedule, decode j.
    HoldBoth,
    /// Inject dummies at the nominal send slots without waiting for Alice.
    Scheduled,
}

/// `⟨ε₀|ε₁⟩` and `⟨E₀|E₁⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeOverlaps {
    pub eps: f64,
    pub big_e: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackParams {
    pub kind: AttackKind,
    #[serde(default)]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_prime: Option<f64>,
    /// Probability that any given transmitted particle is attacked.
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlaps: Option<ProbeOverlaps>,
    /// `⟨u|d⟩` for the GV conditional probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_overlap: Option<f64>,
    #[serde(default)]
    pub basis: ResendBasis,
    #[serde(default)]
    pub delay_slots: u64,
    #[serde(default)]
    pub dummy: DummyStrategy,
    #[serde(default)]
    pub legs: Legs,
}

impl AttackParams {
    fn base(kind: AttackKind) -> Self {
        AttackParams {
            kind,
            theta: 0.0,
            theta_prime: None,
            lambda: 1.0,
            overlaps: None,
            probe_overlap: None,
            basis: ResendBasis::Z,
            delay_slots: 0,
            dummy: DummyStrategy::None,
            legs: Legs::Both,
        }
    }

    pub fn symmetric_ng(theta: f64, lambda: f64) -> Self {
        AttackParams {
            theta,
            lambda,
            ..Self::base(AttackKind::SymmetricNg)
        }
    }

    pub fn asymmetric(theta: f64, theta_prime: f64, eps: f64, big_e: f64) -> Self {
        AttackParams {
            theta,
            theta_prime: Some(theta_prime),
            overlaps: Some(ProbeOverlaps { eps, big_e }),
            ..Self::base(AttackKind::AsymmetricProbe)
        }
    }

    pub fn generic_probe(overlap: f64) -> Self {
        AttackParams {
            probe_overlap: Some(overlap),
            ..Self::base(AttackKind::GenericProbe)
        }
    }

    pub fn intercept_resend(basis: ResendBasis) -> Self {
        AttackParams {
            basis,
            ..Self::base(AttackKind::InterceptResend)
        }
    }

    pub fn timing_delay(delay_slots: u64, dummy: DummyStrategy) -> Self {
        AttackParams {
            delay_slots,
            dummy,
            ..Self::base(AttackKind::TimingDelay)
        }
    }

    pub fn pairing_guess() -> Self {
        Self::base(AttackKind::PairingGuess)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_legs(mut self, legs: Legs) -> Self {
        self.legs = legs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::out_of_range("attack.lambda", self.lambda, 0.0, 1.0));
        }
        for (name, v) in [
            ("attack.theta", Some(self.theta)),
            ("attack.theta_prime", self.theta_prime),
        ] {
            if let Some(v) = v {
                if !(0.0..=PI).contains(&v) {
                    return Err(Error::out_of_range(name, v, 0.0, PI));
                }
            }
        }
        if let Some(o) = self.overlaps {
            for (name, v) in [("attack.overlaps.eps", o.eps), ("attack.overlaps.big_e", o.big_e)] {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::out_of_range(name, v, -1.0, 1.0));
                }
            }
        }
        match self.kind {
            AttackKind::SymmetricNg => {
                if let Some(o) = self.overlaps {
                    let c = self.theta.cos();
                    if (o.eps - c).abs() > 1e-12 || (o.big_e - c).abs() > 1e-12 {
                        return Err(Error::Config(format!(
                            "symmetric_ng requires both probe overlaps to equal cos(theta) = {c}"
                        )));
                    }
                }
            }
            AttackKind::GenericProbe => {
                let s = self
                    .probe_overlap
                    .ok_or_else(|| Error::Config("generic_probe requires attack.probe_overlap".into()))?;
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::out_of_range("attack.probe_overlap", s, 0.0, 1.0));
                }
            }
            AttackKind::AsymmetricProbe if self.overlaps.is_none() => {
                return Err(Error::Config("asymmetric_probe requires attack.overlaps".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Isometry `qubit → qubit ⊗ probe(2 qubits)` for the probe-based kinds.
    pub fn probe_isometry(&self) -> Result<CMatrix> {
        self.validate()?;
        match self.kind {
            AttackKind::SymmetricNg => ng_isometry(self.theta),
            AttackKind::AsymmetricProbe => {
                let o = self.overlaps.expect("validated");
                asymmetric_isometry(
                    self.theta,
                    self.theta_prime.unwrap_or(self.theta),
                    &ProbeVectors::new(o.eps, o.big_e)?,
                )
            }
            other => Err(Error::Config(format!(
                "{} is not a probe interaction",
                other.name()
            ))),
        }
    }

    /// Unitary dilation of [`Self::probe_isometry`] with ready state `|00⟩`.
    pub fn probe_unitary(&self) -> Result<CMatrix> {
        self.probe_isometry().map(|v| isometry_to_unitary(&v))
    }

    /// Kraus operators of the channel seen by the legitimate parties.
    pub fn channel_kraus(&self) -> Result<Vec<CMatrix>> {
        match self.kind {
            AttackKind::SymmetricNg | AttackKind::AsymmetricProbe => {
                self.probe_isometry().map(|v| isometry_kraus(&v))
            }
            AttackKind::InterceptResend => Ok(intercept_resend_kraus(self.basis)),
            AttackKind::GenericProbe => {
                self.validate()?;
                let (c0, c1) = generic_probe_pair(self.probe_overlap.expect("validated"))?;
                let u = generic_probe_unitary(&c0, &c1)?;
                // probe ready state |0⟩: keep the columns with probe index 0
                let v = CMatrix::from_fn(4, 2, |r, q| u[(r, 2 * q)]);
                Ok(isometry_kraus(&v))
            }
            other => Err(Error::Config(format!(
                "{} has no single-qubit channel",
                other.name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_round_trip_through_json() {
        let p = AttackParams::asymmetric(0.3, 0.4, 0.1, -0.2).with_legs(Legs::First);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<AttackParams>(&s).unwrap(), p);
    }

    #[test]
    fn unknown_fields_rejected() {
        let r = serde_json::from_str::<AttackParams>(r#"{"kind":"symmetric_ng","thta":0.1}"#);
        assert!(r.is_err());
    }

    #[test]
    fn lambda_out_of_range_names_field() {
        let e = AttackParams::symmetric_ng(0.5, 1.3).validate().unwrap_err();
        assert!(e.to_string().contains("lambda"), "{e}");
    }

    #[test]
    fn ng_overlaps_must_match_theta() {
        let mut p = AttackParams::symmetric_ng(0.5, 1.0);
        p.overlaps = Some(ProbeOverlaps { eps: 0.5, big_e: 0.5 });
        assert!(p.validate().is_err());
        let c = 0.5f64.cos();
        p.overlaps = Some(ProbeOverlaps { eps: c, big_e: c });
        assert!(p.validate().is_ok());
    }

    #[test]
    fn generic_probe_needs_overlap() {
        let mut p = AttackParams::generic_probe(0.5);
        p.probe_overlap = None;
        assert!(p.validate().is_err());
    }

    #[test]
    fn channel_kraus_is_complete_for_probe_kinds() {
        for p in [
            AttackParams::symmetric_ng(1.0, 1.0),
            AttackParams::asymmetric(0.2, 0.9, 0.3, -0.4),
            AttackParams::intercept_resend(ResendBasis::X),
            AttackParams::generic_probe(0.3),
        ] {
            let k = p.channel_kraus().unwrap();
            let mut sum = CMatrix::zeros(2, 2);
            for m in &k {
                sum += m.adjoint() * m;
            }
            assert!((sum - crate::qstate::gates::identity(1)).norm() < 1e-12);
        }
    }
}
