//! Metropolis simulated annealing on the penalty energy.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::energy::{check_penalty, DEFAULT_PENALTY};
use super::{SampleSet, Sampler};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealingParams {
    /// Full sweeps per shot; `None` means `64 * n`.
    pub sweeps: Option<usize>,
    pub t_hot: f64,
    pub t_cold: f64,
    pub penalty: f64,
}

impl Default for AnnealingParams {
    fn default() -> Self {
        AnnealingParams { sweeps: None, t_hot: 2.0, t_cold: 0.05, penalty: DEFAULT_PENALTY }
    }
}

impl AnnealingParams {
    fn validate(&self) -> Result<()> {
        check_penalty(self.penalty)?;
        if !(self.t_hot > 0.0 && self.t_cold > 0.0 && self.t_cold <= self.t_hot) {
            return Err(Error::InvalidParameter(
                "temperatures must satisfy 0 < t_cold <= t_hot".into(),
            ));
        }
        Ok(())
    }

    fn sweeps_for(&self, n: usize) -> usize {
        self.sweeps.unwrap_or(64 * n)
    }

    /// Geometric interpolation from `t_hot` to `t_cold`, one entry per sweep.
    pub fn temperatures(&self, sweeps: usize) -> Vec<f64> {
        match sweeps {
            0 => Vec::new(),
            1 => vec![self.t_cold],
            _ => {
                let ratio = (self.t_cold / self.t_hot).ln() / (sweeps - 1) as f64;
                (0..sweeps).map(|k| self.t_hot * (ratio * k as f64).exp()).collect()
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnnealingSampler {
    pub params: AnnealingParams,
}

impl Sampler for AnnealingSampler {
    fn name(&self) -> &str {
        "sa"
    }

    fn sample(&self, kernel: &Graph, n_shots: usize, seed: u64) -> Result<SampleSet> {
        sample_annealing(kernel, n_shots, seed, &self.params)
    }
}

/// Independent annealing runs, one per shot, each on its own seed stream.
pub fn sample_annealing(
    kernel: &Graph,
    n_shots: usize,
    seed: u64,
    params: &AnnealingParams,
) -> Result<SampleSet> {
    params.validate()?;
    let temps = params.temperatures(params.sweeps_for(kernel.vertex_count()));
    let bitstrings: Vec<Vec<bool>> = (0..n_shots)
        .into_par_iter()
        .map(|i| anneal_once(kernel, &temps, params.penalty, i as u64, seed))
        .collect();
    SampleSet::from_bitstrings(kernel, bitstrings)
}

fn anneal_once(graph: &Graph, temps: &[f64], penalty: f64, shot: u64, seed: u64) -> Vec<bool> {
    let n = graph.vertex_count();
    let mut rng = stream_rng(seed, shot);
    let mut state: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    // Occupied neighbours per vertex.
    let mut occupied: Vec<usize> = (0..n)
        .map(|v| graph.neighbors(v).iter().filter(|&&u| state[u]).count())
        .collect();
    for &t in temps {
        for v in 0..n {
            let flip_in = !state[v];
            let delta = (penalty * occupied[v] as f64 - 1.0) * if flip_in { 1.0 } else { -1.0 };
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp() {
                state[v] = flip_in;
                for &u in graph.neighbors(v) {
                    if flip_in {
                        occupied[u] += 1;
                    } else {
                        occupied[u] -= 1;
                    }
                }
            }
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_independent;

    #[test]
    fn path_mostly_finds_the_maximum_set() {
        let samples = sample_annealing(&Graph::path(3), 1000, 1, &AnnealingParams::default()).unwrap();
        let hits = samples.repaired_sets().filter(|s| s.members() == [0, 2]).count();
        assert!(hits as f64 / 1000.0 >= 0.9, "hits = {hits}");
    }

    #[test]
    fn edgeless_graph_fills_up() {
        let g = Graph::edgeless(6);
        let samples = sample_annealing(&g, 200, 2, &AnnealingParams::default()).unwrap();
        assert!(samples.repaired_sets().all(|s| s.size() == 6));
    }

    #[test]
    fn zero_sweeps_gives_repaired_random_strings() {
        let g = Graph::cycle(9);
        let params = AnnealingParams { sweeps: Some(0), ..Default::default() };
        let samples = sample_annealing(&g, 100, 3, &params).unwrap();
        assert_eq!(samples.n_shots(), 100);
        for shot in &samples.shots {
            assert!(is_independent(&g, shot.repaired.members()).unwrap());
            assert!(shot.repaired.members().iter().all(|&v| shot.bits[v]));
        }
        // Unannealed strings are far from uniform-MIS quality.
        assert!(samples.repaired_sets().any(|s| s.size() < 4));
    }

    #[test]
    fn schedule_is_geometric() {
        let p = AnnealingParams::default();
        let t = p.temperatures(5);
        assert!((t[0] - 2.0).abs() < 1e-12);
        assert!((t[4] - 0.05).abs() < 1e-12);
        assert!((t[1] / t[0] - t[3] / t[2]).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = AnnealingParams { penalty: 1.0, ..Default::default() };
        assert!(sample_annealing(&Graph::path(2), 1, 0, &p).is_err());
        let p = AnnealingParams { t_cold: 3.0, ..Default::default() };
        assert!(sample_annealing(&Graph::path(2), 1, 0, &p).is_err());
    }
}
