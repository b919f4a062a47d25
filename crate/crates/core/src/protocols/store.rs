use std::collections::HashMap;

use rand::Rng;

use crate::qstate::{
    gates::BellState, measure_projective_mixed, Basis, CMatrix, DensityMatrix, StateVector, MAX_QUBITS,
};
use crate::{Error, Result};

#[derive(Debug, Clone)]
struct Register {
    rho: DensityMatrix,
    particles: Vec<usize>,
}

/// Live particles addressed by id. Particles that have interacted share a
/// register; registers are merged on demand and measured particles are
/// removed, so entanglement between distinct pairs only appears when an
/// operation actually creates it.
#[derive(Debug, Clone, Default)]
pub struct ParticleStore {
    registers: Vec<Option<Register>>,
    location: HashMap<usize, usize>,
}

impl ParticleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn prepare(&mut self, particles: &[usize], state: &StateVector) -> Result<()> {
        self.prepare_mixed(particles, state.to_density())
    }

    pub fn prepare_mixed(&mut self, particles: &[usize], rho: DensityMatrix) -> Result<()> {
        if particles.len() != rho.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: rho.num_qubits(),
                found: particles.len(),
            });
        }
        for (i, p) in particles.iter().enumerate() {
            if self.location.contains_key(p) || particles[..i].contains(p) {
                return Err(Error::DuplicateTarget(*p));
            }
        }
        let idx = self.registers.len();
        for &p in particles {
            self.location.insert(p, idx);
        }
        self.registers.push(Some(Register {
            rho,
            particles: particles.to_vec(),
        }));
        Ok(())
    }

    pub fn prepare_bell(&mut self, a: usize, b: usize, bell: BellState) -> Result<()> {
        self.prepare(&[a, b], &bell.state())
    }

    pub fn contains(&self, particle: usize) -> bool {
        self.location.contains_key(&particle)
    }

    pub fn len(&self) -> usize {
        self.location.len()
    }

    pub fn is_empty(&self) -> bool {
        self.location.is_empty()
    }

    /// Number of particles sharing a register with `particle`.
    pub fn register_size(&self, particle: usize) -> Result<usize> {
        let r = self.register_of(particle)?;
        Ok(self.reg(r).particles.len())
    }

    fn register_of(&self, particle: usize) -> Result<usize> {
        self.location
            .get(&particle)
            .copied()
            .ok_or(Error::UnknownParticle(particle))
    }

    fn reg(&self, idx: usize) -> &Register {
        self.registers[idx].as_ref().expect("live register")
    }

    /// Bring `particles` into one register and return it with their qubit
    /// positions.
    fn gather(&mut self, particles: &[usize]) -> Result<(usize, Vec<usize>)> {
        let mut regs: Vec<usize> = Vec::new();
        for (i, &p) in particles.iter().enumerate() {
            if particles[..i].contains(&p) {
                return Err(Error::DuplicateTarget(p));
            }
            let r = self.register_of(p)?;
            if !regs.contains(&r) {
                regs.push(r);
            }
        }
        let total: usize = regs.iter().map(|&r| self.reg(r).particles.len()).sum();
        if total > MAX_QUBITS {
            return Err(Error::TooManyQubits(total));
        }
        let target = regs[0];
        for &r in &regs[1..] {
            let other = self.registers[r].take().expect("live register");
            let base = self.registers[target].as_mut().expect("live register");
            base.rho = base.rho.tensor(&other.rho)?;
            for &p in &other.particles {
                self.location.insert(p, target);
            }
            base.particles.extend(other.particles);
        }
        let reg = self.reg(target);
        let positions = particles
            .iter()
            .map(|p| reg.particles.iter().position(|q| q == p).expect("gathered"))
            .collect();
        Ok((target, positions))
    }

    pub fn apply_unitary(&mut self, u: &CMatrix, particles: &[usize]) -> Result<()> {
        let (r, pos) = self.gather(particles)?;
        let reg = self.registers[r].as_mut().expect("live register");
        reg.rho = reg.rho.apply_unitary(u, &pos)?;
        Ok(())
    }

    pub fn apply_kraus(&mut self, kraus: &[CMatrix], particles: &[usize]) -> Result<()> {
        let (r, pos) = self.gather(particles)?;
        let reg = self.registers[r].as_mut().expect("live register");
        reg.rho = reg.rho.apply_kraus(kraus, &pos)?;
        Ok(())
    }

    /// Joint state of `particles` in the given order.
    pub fn reduced(&self, particles: &[usize]) -> Result<DensityMatrix> {
        let mut scratch = self.clone();
        let (r, pos) = scratch.gather(particles)?;
        scratch.reg(r).rho.partial_trace(&pos)
    }

    pub fn probabilities(&self, particles: &[usize], basis: &Basis) -> Result<Vec<f64>> {
        let mut scratch = self.clone();
        let (r, pos) = scratch.gather(particles)?;
        basis.probabilities_mixed(&scratch.reg(r).rho, &pos)
    }

    /// Measure `particles` jointly in `basis`. The measured particles are
    /// consumed; the rest of their register keeps its post-measurement state.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        particles: &[usize],
        basis: &Basis,
        rng: &mut R,
    ) -> Result<usize> {
        let (r, pos) = self.gather(particles)?;
        let reg = self.registers[r].take().expect("live register");
        let (k, post) = measure_projective_mixed(&reg.rho, basis, &pos, rng)?;
        for p in particles {
            self.location.remove(p);
        }
        let keep: Vec<usize> = (0..reg.particles.len()).filter(|q| !pos.contains(q)).collect();
        if !keep.is_empty() {
            let rho = post.partial_trace(&keep)?;
            let rest = keep.iter().map(|&q| reg.particles[q]).collect();
            self.registers[r] = Some(Register {
                rho: renormalized(rho)?,
                particles: rest,
            });
        }
        Ok(k)
    }

    /// Drop particles without measuring them.
    pub fn discard(&mut self, particles: &[usize]) -> Result<()> {
        for &p in particles {
            let r = self.register_of(p)?;
            let reg = self.registers[r].take().expect("live register");
            self.location.remove(&p);
            let keep: Vec<usize> = (0..reg.particles.len())
                .filter(|&q| reg.particles[q] != p)
                .collect();
            if !keep.is_empty() {
                self.registers[r] = Some(Register {
                    rho: reg.rho.partial_trace(&keep)?,
                    particles: keep.iter().map(|&q| reg.particles[q]).collect(),
                });
            }
        }
        Ok(())
    }
}

// Measurement and tracing accumulate rounding; re-symmetrize and fix the
// trace before handing the state back out.
fn renormalized(rho: DensityMatrix) -> Result<DensityMatrix> {
    let m = rho.matrix();
    let h = (m + m.adjoint()).scale(0.5);
    let tr = h.trace().re;
    DensityMatrix::new(h.unscale(tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::gates;
    use crate::rng::seeded;

    #[test]
    fn bell_pair_measurement_is_certain() {
        let mut s = ParticleStore::new();
        s.prepare_bell(0, 1, BellState::PsiPlus).unwrap();
        let mut rng = seeded(1);
        let k = s.measure(&[0, 1], &gates::bell_basis(), &mut rng).unwrap();
        assert_eq!(BellState::from_index(k), Some(BellState::PsiPlus));
        assert!(s.is_empty());
    }

    #[test]
    fn single_measurement_collapses_partner() {
        let mut rng = seeded(2);
        for _ in 0..20 {
            let mut s = ParticleStore::new();
            s.prepare_bell(10, 11, BellState::PsiPlus).unwrap();
            let a = s.measure(&[10], &gates::z_basis(), &mut rng).unwrap();
            let b = s.measure(&[11], &gates::z_basis(), &mut rng).unwrap();
            assert_ne!(a, b);
        }
    }

    #[test]
    fn mispaired_halves_are_uniform_over_bell_states() {
        let mut s = ParticleStore::new();
        s.prepare_bell(0, 1, BellState::PsiPlus).unwrap();
        s.prepare_bell(2, 3, BellState::PsiPlus).unwrap();
        let p = s.probabilities(&[0, 2], &gates::bell_basis()).unwrap();
        for x in p {
            assert!((x - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn entanglement_swapping_moves_between_registers() {
        let mut s = ParticleStore::new();
        s.prepare_bell(0, 1, BellState::PsiPlus).unwrap();
        s.prepare_bell(2, 3, BellState::PsiPlus).unwrap();
        let mut rng = seeded(3);
        s.measure(&[0, 2], &gates::bell_basis(), &mut rng).unwrap();
        assert_eq!(s.register_size(1).unwrap(), 2);
        let rho = s.reduced(&[1, 3]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_unknown_and_duplicate_particles() {
        let mut s = ParticleStore::new();
        s.prepare_bell(0, 1, BellState::PsiPlus).unwrap();
        assert!(matches!(
            s.prepare(&[1], &gates::ket(0)),
            Err(Error::DuplicateTarget(1))
        ));
        assert!(matches!(
            s.apply_unitary(&gates::pauli_x(), &[7]),
            Err(Error::UnknownParticle(7))
        ));
    }

    #[test]
    fn register_cap_is_enforced() {
        let mut s = ParticleStore::new();
        for k in 0..4 {
            s.prepare_bell(2 * k, 2 * k + 1, BellState::PsiPlus).unwrap();
        }
        let u = gates::identity(4);
        assert!(s.apply_unitary(&u, &[0, 2, 4, 6]).is_err());
    }

    #[test]
    fn discard_keeps_partner_mixed() {
        let mut s = ParticleStore::new();
        s.prepare_bell(0, 1, BellState::PsiPlus).unwrap();
        s.discard(&[0]).unwrap();
        assert!((s.reduced(&[1]).unwrap().purity() - 0.5).abs() < 1e-12);
    }
}
