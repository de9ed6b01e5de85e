//! Kernel samplers and the shot-level machinery around them.
//!
//! A sampler turns a kernel graph into `n_shots` bitstrings. Each bitstring is
//! repaired into an independent set; shots whose atom register was not fully
//! loaded are flagged and later discarded by post-selection.

mod annealing;
mod exact;
mod energy;

pub use annealing::{sample_annealing, AnnealingParams, AnnealingSampler};
pub use energy::{classical_energy, to_ising, IsingForm, DEFAULT_PENALTY};
pub use exact::{sample_exact, ExactSampler};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, IndependentSet};
use crate::rng::stream_rng;

/// One measured bitstring over the kernel vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    pub bits: Vec<bool>,
    pub valid_loading: bool,
    /// `repair(bits)`; meaningful only when `valid_loading`.
    pub repaired: IndependentSet,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub shots: Vec<Shot>,
}

impl SampleSet {
    /// Repairs every bitstring against `graph`; all shots count as loaded.
    pub fn from_bitstrings(graph: &Graph, bitstrings: Vec<Vec<bool>>) -> Result<Self> {
        let shots = bitstrings
            .into_iter()
            .map(|bits| {
                let repaired = repair(graph, &bits)?;
                Ok(Shot { bits, valid_loading: true, repaired })
            })
            .collect::<Result<_>>()?;
        Ok(SampleSet { shots })
    }

    /// Builds a sample set directly from independent sets.
    pub fn from_sets(graph: &Graph, sets: impl IntoIterator<Item = IndependentSet>) -> Self {
        let n = graph.vertex_count();
        let shots = sets
            .into_iter()
            .map(|set| Shot { bits: set.to_bits(n), valid_loading: true, repaired: set })
            .collect();
        SampleSet { shots }
    }

    pub fn n_shots(&self) -> usize {
        self.shots.len()
    }

    /// Repaired sets of the correctly loaded shots, in shot order.
    pub fn repaired_sets(&self) -> impl Iterator<Item = &IndependentSet> {
        self.shots.iter().filter(|s| s.valid_loading).map(|s| &s.repaired)
    }

    pub fn valid_count(&self) -> usize {
        self.shots.iter().filter(|s| s.valid_loading).count()
    }

    /// Drops shots with loading defects.
    pub fn post_select(&self) -> SampleSet {
        SampleSet { shots: self.shots.iter().filter(|s| s.valid_loading).cloned().collect() }
    }

    pub fn best(&self) -> Option<&IndependentSet> {
        self.repaired_sets()
            .fold(None, |best: Option<&IndependentSet>, s| match best {
                Some(b) if b.size() >= s.size() => Some(b),
                _ => Some(s),
            })
    }
}

/// Common contract for kernel samplers.
pub trait Sampler: Send + Sync {
    fn name(&self) -> &str;

    /// Draws `n_shots` shots for `kernel`. Equal seeds give equal results.
    fn sample(&self, kernel: &Graph, n_shots: usize, seed: u64) -> Result<SampleSet>;
}

/// Greedy repair: while the set has conflicts, drop the member with the most
/// in-set neighbours (smallest id on ties). Never adds vertices.
pub fn repair(graph: &Graph, bits: &[bool]) -> Result<IndependentSet> {
    let n = graph.vertex_count();
    if bits.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: bits.len() });
    }
    let mut inside = bits.to_vec();
    let mut conflicts: Vec<usize> = (0..n)
        .map(|v| if inside[v] { graph.neighbors(v).iter().filter(|&&u| inside[u]).count() } else { 0 })
        .collect();
    loop {
        let (worst, count) = conflicts
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (v, &c)| if c > acc.1 { (v, c) } else { acc });
        if count == 0 {
            break;
        }
        inside[worst] = false;
        conflicts[worst] = 0;
        for &u in graph.neighbors(worst) {
            if inside[u] {
                conflicts[u] -= 1;
            }
        }
    }
    Ok(IndependentSet::from_members_unchecked((0..n).filter(|&v| inside[v]).collect()))
}

/// Marks each site of each shot as unloaded with probability `epsilon`.
/// Unloaded sites read as 0; any shot with a defect is flagged invalid.
pub fn apply_loading_errors(graph: &Graph, samples: &SampleSet, epsilon: f64, seed: u64) -> Result<SampleSet> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter("loading error must lie in [0, 1)".into()));
    }
    let shots = samples
        .shots
        .iter()
        .enumerate()
        .map(|(i, shot)| {
            let mut rng = stream_rng(seed, i as u64);
            let mut bits = shot.bits.clone();
            let mut defect = false;
            for b in bits.iter_mut() {
                if rng.gen::<f64>() < epsilon {
                    *b = false;
                    defect = true;
                }
            }
            if !defect {
                return Ok(shot.clone());
            }
            let repaired = repair(graph, &bits)?;
            Ok(Shot { bits, valid_loading: false, repaired })
        })
        .collect::<Result<_>>()?;
    Ok(SampleSet { shots })
}

/// Expected post-selection retention for an `n`-site register.
pub fn loading_success_probability(n: usize, epsilon: f64) -> f64 {
    (1.0 - epsilon).powi(n as i32)
}

/// Wraps a sampler with a per-site loading defect rate.
pub struct WithLoadingErrors<S> {
    pub inner: S,
    pub epsilon: f64,
}

impl<S: Sampler> Sampler for WithLoadingErrors<S> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn sample(&self, kernel: &Graph, n_shots: usize, seed: u64) -> Result<SampleSet> {
        let raw = self.inner.sample(kernel, n_shots, crate::rng::derive_seed(seed, 0))?;
        apply_loading_errors(kernel, &raw, self.epsilon, crate::rng::derive_seed(seed, 1))
    }
}
