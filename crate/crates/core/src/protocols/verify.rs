use rand::Rng;
use serde::{Deserialize, Serialize};

use super::store::ParticleStore;
use super::transcript::{Event, MeasBasis, Party};
use crate::qstate::gates::{self, BellState};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub error_rate: f64,
    pub samples: usize,
    pub errors: usize,
    pub events: Vec<Event>,
}

impl CheckOutcome {
    fn from_counts(samples: usize, errors: usize, events: Vec<Event>) -> Self {
        CheckOutcome {
            error_rate: if samples == 0 {
                0.0
            } else {
                errors as f64 / samples as f64
            },
            samples,
            errors,
            events,
        }
    }
}

/// One BB84 comparison: `particle` and `partner` are measured in the same
/// random basis and compared against the correlations of `reference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bb84Check {
    pub particle: usize,
    pub measured_by: Party,
    pub partner: usize,
    pub partner_by: Party,
    pub reference: BellState,
}

pub fn verification_bb84<R: Rng + ?Sized>(
    store: &mut ParticleStore,
    checks: &[Bb84Check],
    basis_rng: &mut R,
    nature: &mut R,
) -> Result<CheckOutcome> {
    let mut events = Vec::with_capacity(2 * checks.len());
    let mut errors = 0;
    for c in checks {
        let use_x = basis_rng.random::<bool>();
        let (basis, label) = if use_x {
            (gates::x_basis(), MeasBasis::X)
        } else {
            (gates::z_basis(), MeasBasis::Z)
        };
        let a = store.measure(&[c.particle], &basis, nature)?;
        let b = store.measure(&[c.partner], &basis, nature)?;
        let (z_anti, x_anti) = c.reference.correlations();
        let anti = if use_x { x_anti } else { z_anti };
        if (a != b) != anti {
            errors += 1;
        }
        events.push(Event::Measure {
            by: c.measured_by,
            particles: vec![c.particle],
            basis: label,
            outcome: a,
        });
        events.push(Event::Measure {
            by: c.partner_by,
            particles: vec![c.partner],
            basis: label,
            outcome: b,
        });
    }
    Ok(CheckOutcome::from_counts(checks.len(), errors, events))
}

/// Bell-basis check of reunited pairs; an error is any outcome other than
/// `expected`.
pub fn verification_bell<R: Rng + ?Sized>(
    store: &mut ParticleStore,
    pairs: &[(usize, usize)],
    expected: BellState,
    by: Party,
    nature: &mut R,
) -> Result<CheckOutcome> {
    let mut seen = std::collections::HashSet::new();
    for &(a, b) in pairs {
        for p in [a, b] {
            if !store.contains(p) || !seen.insert(p) {
                return Err(Error::UnpairedParticle(p));
            }
        }
    }
    let basis = gates::bell_basis();
    let mut events = Vec::with_capacity(pairs.len());
    let mut errors = 0;
    for &(a, b) in pairs {
        let k = store.measure(&[a, b], &basis, nature)?;
        if BellState::from_index(k) != Some(expected) {
            errors += 1;
        }
        events.push(Event::Measure {
            by,
            particles: vec![a, b],
            basis: MeasBasis::Bell,
            outcome: k,
        });
    }
    Ok(CheckOutcome::from_counts(pairs.len(), errors, events))
}
