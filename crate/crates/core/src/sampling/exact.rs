use rand::Rng;

use super::{SampleSet, Sampler};
use crate::error::{Error, Result};
use crate::graph::{Graph, IndependentSet};
use crate::rng::stream_rng;
use crate::search::{mask_to_vec, BitGraph, DEFAULT_ENUMERATION_LIMIT};

/// Upper bound on the number of candidate sets held in memory.
const MAX_ENUMERATED_SETS: usize = 4_000_000;

/// Idealized sampler: uniform over the independent sets of the two largest
/// sizes (never the empty set).
#[derive(Clone, Debug)]
pub struct ExactSampler {
    pub vertex_limit: usize,
}

impl Default for ExactSampler {
    fn default() -> Self {
        ExactSampler { vertex_limit: DEFAULT_ENUMERATION_LIMIT }
    }
}

impl Sampler for ExactSampler {
    fn name(&self) -> &str {
        "exact"
    }

    fn sample(&self, kernel: &Graph, n_shots: usize, seed: u64) -> Result<SampleSet> {
        sample_exact_with_limit(kernel, n_shots, seed, self.vertex_limit)
    }
}

pub fn sample_exact(kernel: &Graph, n_shots: usize, seed: u64) -> Result<SampleSet> {
    sample_exact_with_limit(kernel, n_shots, seed, DEFAULT_ENUMERATION_LIMIT)
}

fn sample_exact_with_limit(kernel: &Graph, n_shots: usize, seed: u64, limit: usize) -> Result<SampleSet> {
    let bits = BitGraph::new(kernel, limit)?;
    if kernel.is_empty() {
        return Err(Error::InvalidParameter("cannot sample an empty kernel".into()));
    }
    let alpha = bits.max_independent_set().count_ones() as usize;
    let mut pool = Vec::new();
    bits.enumerate_of_size(alpha, MAX_ENUMERATED_SETS, &mut pool)?;
    if alpha > 1 {
        bits.enumerate_of_size(alpha - 1, MAX_ENUMERATED_SETS - pool.len(), &mut pool)?;
    }
    let sets = (0..n_shots).map(|i| {
        let pick = stream_rng(seed, i as u64).gen_range(0..pool.len());
        IndependentSet::from_members_unchecked(mask_to_vec(pool[pick]))
    });
    Ok(SampleSet::from_sets(kernel, sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn cycle_draws_cover_all_maximum_sets() {
        let c5 = Graph::cycle(5);
        let samples = sample_exact(&c5, 2000, 1).unwrap();
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for set in samples.repaired_sets() {
            assert!(set.size() == 1 || set.size() == 2);
            assert!(crate::graph::is_independent(&c5, set.members()).unwrap());
            *seen.entry(set.members().to_vec()).or_default() += 1;
        }
        // 5 pairs and 5 singletons, all present.
        assert_eq!(seen.len(), 10);
        assert_eq!(seen.keys().filter(|k| k.len() == 2).count(), 5);
    }

    #[test]
    fn single_vertex_always_returns_it() {
        let samples = sample_exact(&Graph::edgeless(1), 50, 4).unwrap();
        assert!(samples.repaired_sets().all(|s| s.members() == [0]));
    }

    #[test]
    fn path_draws_from_pair_and_singletons() {
        let samples = sample_exact(&Graph::path(3), 500, 9).unwrap();
        let allowed: [&[usize]; 4] = [&[0, 2], &[0], &[1], &[2]];
        for set in samples.repaired_sets() {
            assert!(allowed.contains(&set.members()));
        }
        assert!(samples.repaired_sets().any(|s| s.size() == 2));
    }

    #[test]
    fn size_limit_is_enforced() {
        let err = sample_exact(&Graph::edgeless(41), 1, 0).unwrap_err();
        assert!(matches!(err, Error::LimitExceeded { limit: 40, .. }));
    }

    #[test]
    fn same_seed_same_shots() {
        let g = Graph::cycle(7);
        assert_eq!(sample_exact(&g, 30, 5).unwrap(), sample_exact(&g, 30, 5).unwrap());
    }
}
