use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::seeded;
use crate::{Error, Result};

/// Random reordering of transmitted particles, with the seed it was drawn
/// from. Position `i` is sent to position `mapping[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationMap {
    mapping: Vec<usize>,
    seed: u64,
}

impl PermutationMap {
    pub fn new(mapping: Vec<usize>, seed: u64) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &m in &mapping {
            if m >= mapping.len() || seen[m] {
                return Err(Error::InvalidPermutation(format!(
                    "{mapping:?} is not a bijection"
                )));
            }
            seen[m] = true;
        }
        Ok(PermutationMap { mapping, seed })
    }

    pub fn identity(size: usize) -> Self {
        PermutationMap {
            mapping: (0..size).collect(),
            seed: 0,
        }
    }

    /// Uniformly random permutation drawn from a ChaCha stream seeded
    /// with `seed`.
    pub fn random(size: usize, seed: u64) -> Self {
        let mut mapping: Vec<usize> = (0..size).collect();
        mapping.shuffle(&mut seeded(seed));
        PermutationMap { mapping, seed }
    }

    pub fn size(&self) -> usize {
        self.mapping.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn inverse(&self) -> PermutationMap {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        PermutationMap {
            mapping: inv,
            seed: self.seed,
        }
    }
}

/// Move the element at position `i` to position `pi(i)`.
pub fn permute_particles<T: Clone>(particles: &[T], pi: &PermutationMap) -> Result<Vec<T>> {
    if particles.len() != pi.size() {
        return Err(Error::PermutationSize {
            expected: pi.size(),
            found: particles.len(),
        });
    }
    let mut out: Vec<Option<T>> = vec![None; particles.len()];
    for (i, p) in particles.iter().enumerate() {
        out[pi.apply_index(i)] = Some(p.clone());
    }
    Ok(out
        .into_iter()
        .map(|p| p.expect("bijection fills every slot"))
        .collect())
}
