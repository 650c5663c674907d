//! Projective measurements over partitions of the basis.
//!
//! Every random draw comes from a ChaCha20 stream keyed by the master seed,
//! with the shot number as the stream id. Shot `k` of a run is therefore the
//! same no matter how many shots run, or in what order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::amplification::GoodSubspace;
use crate::state::StateVector;
use crate::{Error, Result};

/// Blocks below this probability cannot be selected.
pub const IMPOSSIBLE_BLOCK: f64 = 1e-15;

/// Disjoint nonempty blocks of basis indices covering `0..dim`; each block is
/// one outcome, the projector onto the span of its basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementPartition {
    blocks: Vec<Vec<usize>>,
    dim: usize,
}

impl MeasurementPartition {
    pub fn new(blocks: Vec<Vec<usize>>, dim: usize) -> Result<Self> {
        let mut owner = vec![None; dim];
        let mut blocks = blocks;
        for (b, block) in blocks.iter_mut().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= dim {
                    return Err(Error::IndexOutOfRange { index: i, dim });
                }
                if let Some(other) = owner[i] {
                    return Err(Error::InvalidPartition(format!("index {i} appears in blocks {other} and {b}")));
                }
                owner[i] = Some(b);
            }
        }
        if let Some(missing) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidPartition(format!("index {missing} is not covered")));
        }
        Ok(Self { blocks, dim })
    }

    /// `{good, rest}`: block 0 is the good subspace.
    pub fn good_vs_rest(good: &GoodSubspace) -> Self {
        Self { blocks: vec![good.indices().to_vec(), good.complement()], dim: good.dim() }
    }

    /// One block per basis state.
    pub fn singletons(dim: usize) -> Self {
        Self { blocks: (0..dim).map(|i| vec![i]).collect(), dim }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub block_index: usize,
    pub probability: f64,
    /// Projection onto the drawn block, renormalized.
    pub collapsed: StateVector,
}

fn check_dims(state: &StateVector, partition: &MeasurementPartition) -> Result<()> {
    if state.dim() != partition.dim {
        return Err(Error::DimensionMismatch { expected: partition.dim, found: state.dim() });
    }
    Ok(())
}

/// Probability per block, `Σ_{i ∈ block} |c_i|²`.
pub fn born_probabilities(state: &StateVector, partition: &MeasurementPartition) -> Result<Vec<f64>> {
    check_dims(state, partition)?;
    Ok(partition.blocks.iter().map(|b| state.weight_on(b)).collect())
}

/// Renormalized projection of `state` onto `block`.
pub fn collapse(state: &StateVector, block: &[usize], probability: f64) -> Result<StateVector> {
    let mut v = crate::CVector::zeros(state.dim());
    let scale = 1.0 / libm::sqrt(probability);
    for &i in block {
        v[i] = state.amplitudes()[i] * scale;
    }
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-12 {
        // `probability` was not the block weight; fall back to exact renormalization.
        v.unscale_mut(norm);
    }
    StateVector::with_tolerance(v, 1e-12)
}

fn shot_rng(seed: u64, shot: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

fn draw_block(probabilities: &[f64], u: f64) -> Result<usize> {
    let total: f64 = probabilities.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut chosen = probabilities.len() - 1;
    for (k, &p) in probabilities.iter().enumerate() {
        acc += p;
        if target < acc {
            chosen = k;
            break;
        }
    }
    let p = probabilities[chosen];
    if p < IMPOSSIBLE_BLOCK {
        return Err(Error::ImpossibleOutcome { block: chosen, probability: p });
    }
    Ok(chosen)
}

/// Block drawn by shot `shot` of the run keyed by `seed`, without building
/// the collapsed state.
pub fn sample_block(probabilities: &[f64], seed: u64, shot: u64) -> Result<usize> {
    let u: f64 = shot_rng(seed, shot).random();
    draw_block(probabilities, u)
}

/// Shot `shot` of the run keyed by `seed`.
pub fn sample_shot(
    state: &StateVector,
    partition: &MeasurementPartition,
    seed: u64,
    shot: u64,
) -> Result<MeasurementOutcome> {
    let probabilities = born_probabilities(state, partition)?;
    let block_index = sample_block(&probabilities, seed, shot)?;
    let probability = probabilities[block_index];
    let collapsed = collapse(state, &partition.blocks[block_index], probability)?;
    Ok(MeasurementOutcome { block_index, probability, collapsed })
}

/// A single seeded measurement (shot 0 of the run keyed by `seed`).
pub fn sample_collapse(state: &StateVector, partition: &MeasurementPartition, seed: u64) -> Result<MeasurementOutcome> {
    sample_shot(state, partition, seed, 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub shots: u64,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
}

impl Histogram {
    pub fn frequency(&self, block: usize) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.counts[block] as f64 / self.shots as f64
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|b| self.frequency(b)).collect()
    }

    /// `|frequency − p| / sqrt(p(1 − p)/n)` for a block; zero when the
    /// block is deterministic and the frequency agrees.
    pub fn deviation_sigmas(&self, block: usize) -> f64 {
        let p = self.probabilities[block];
        let diff = (self.frequency(block) - p).abs();
        let sigma = libm::sqrt(p * (1.0 - p) / self.shots as f64);
        if sigma > 0.0 {
            diff / sigma
        } else if diff < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Outcome counts of shots `0..shots`.
pub fn shot_histogram(
    state: &StateVector,
    partition: &MeasurementPartition,
    seed: u64,
    shots: u64,
) -> Result<Histogram> {
    let probabilities = born_probabilities(state, partition)?;
    let mut counts = vec![0u64; probabilities.len()];
    for shot in 0..shots {
        counts[sample_block(&probabilities, seed, shot)?] += 1;
    }
    Ok(Histogram { shots, counts, probabilities })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case1() -> StateVector {
        StateVector::from_real(&[0.7, 0.5, 0.3, 0.4, 0.1]).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(MeasurementPartition::new(vec![vec![0], vec![1]], 3).is_err());
        assert!(MeasurementPartition::new(vec![vec![0, 1], vec![1, 2]], 3).is_err());
        assert!(MeasurementPartition::new(vec![vec![0, 1], vec![]], 2).is_err());
        assert!(MeasurementPartition::new(vec![vec![0, 3], vec![1, 2]], 3).is_err());
        assert!(MeasurementPartition::new(vec![vec![2, 0], vec![1]], 3).is_ok());
    }

    #[test]
    fn born_probabilities_of_hydrogen_cases() {
        let p = MeasurementPartition::new(vec![vec![4], vec![0, 1, 2, 3]], 5).unwrap();
        let probs = born_probabilities(&case1(), &p).unwrap();
        assert!((probs[0] - 0.01).abs() < 1e-12 && (probs[1] - 0.99).abs() < 1e-12);

        let s = StateVector::from_real(&[0.1, 0.06, 0.08, 0.7, 0.7]).unwrap();
        let p = MeasurementPartition::new(vec![vec![0, 1, 2], vec![3, 4]], 5).unwrap();
        let probs = born_probabilities(&s, &p).unwrap();
        assert!((probs[0] - 0.02).abs() < 1e-12 && (probs[1] - 0.98).abs() < 1e-12);
    }

    #[test]
    fn basis_state_is_deterministic() {
        let s = StateVector::basis(3, 1).unwrap();
        let p = MeasurementPartition::singletons(3);
        assert_eq!(born_probabilities(&s, &p).unwrap(), vec![0.0, 1.0, 0.0]);
        for seed in 0..20 {
            let out = sample_collapse(&s, &p, seed).unwrap();
            assert_eq!(out.block_index, 1);
            assert_eq!(out.probability, 1.0);
            assert_eq!(out.collapsed, s);
        }
    }

    #[test]
    fn collapse_is_supported_in_block_and_normalized() {
        let p = MeasurementPartition::new(vec![vec![0, 2], vec![1, 3, 4]], 5).unwrap();
        for seed in 0..50 {
            let out = sample_collapse(&case1(), &p, seed).unwrap();
            assert!((out.collapsed.norm() - 1.0).abs() < 1e-12);
            let outside: f64 = (0..5)
                .filter(|i| !p.blocks()[out.block_index].contains(i))
                .map(|i| out.collapsed.amplitudes()[i].norm_sqr())
                .sum();
            assert_eq!(outside, 0.0);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let p = MeasurementPartition::singletons(5);
        let a = sample_collapse(&case1(), &p, 1234).unwrap();
        let b = sample_collapse(&case1(), &p, 1234).unwrap();
        assert_eq!(a, b);
        assert_eq!(sample_shot(&case1(), &p, 9, 17).unwrap(), sample_shot(&case1(), &p, 9, 17).unwrap());
    }

    #[test]
    fn histogram_shots_are_prefix_stable() {
        let p = MeasurementPartition::singletons(5);
        let probs = born_probabilities(&case1(), &p).unwrap();
        let short: Vec<usize> = (0..100).map(|k| sample_block(&probs, 5, k).unwrap()).collect();
        let long: Vec<usize> = (0..200).map(|k| sample_block(&probs, 5, k).unwrap()).collect();
        assert_eq!(&long[..100], &short[..]);
    }

    #[test]
    fn zero_probability_blocks_never_drawn() {
        assert_eq!(draw_block(&[0.0, 1.0, 0.0], 0.0).unwrap(), 1);
        assert_eq!(draw_block(&[0.0, 1.0, 0.0], 0.999_999_999).unwrap(), 1);
        assert!(matches!(draw_block(&[1.0, 0.0], 1.0), Err(Error::ImpossibleOutcome { block: 1, .. })));
    }

    #[test]
    fn empirical_frequencies_converge() {
        let p = MeasurementPartition::singletons(5);
        let h = shot_histogram(&case1(), &p, 77, 20_000).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 20_000);
        for b in 0..5 {
            assert!(h.deviation_sigmas(b) < 4.0, "block {b}: {}", h.deviation_sigmas(b));
        }
    }
}
