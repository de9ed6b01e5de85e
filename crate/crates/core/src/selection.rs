//! Frozen-vertex selection from sample histograms.
//!
//! Shots are filtered to the two largest set sizes, per-vertex in-set counts
//! are tallied, and a restricted candidate list (RCL) of the most (or least)
//! frequently chosen vertices is formed. `λ` vertices are then drawn uniformly
//! from the RCL.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::stream_rng;
use crate::sampling::SampleSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Take high-count vertices into the solution and drop their neighbours.
    In,
    /// Drop low-count vertices.
    Out,
    /// Take uniformly random kernel vertices (ignores the samples).
    Random,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(Strategy::In),
            "out" => Ok(Strategy::Out),
            "random" => Ok(Strategy::Random),
            _ => Err(Error::InvalidParameter(format!("unknown strategy '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RclSize {
    Count(usize),
    /// Fraction of the kernel size, rounded up.
    Fraction(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionParams {
    pub lambda: usize,
    pub rcl: RclSize,
    pub strategy: Strategy,
    /// Break count ties towards low degree (in) / high degree (out).
    pub degree_bias: bool,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams { lambda: 1, rcl: RclSize::Fraction(0.4), strategy: Strategy::In, degree_bias: true }
    }
}

impl SelectionParams {
    pub fn greedy(strategy: Strategy) -> Self {
        SelectionParams { rcl: RclSize::Count(1), strategy, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(Error::InvalidParameter("selection size must be at least 1".into()));
        }
        match self.rcl {
            RclSize::Count(k) if k < self.lambda => Err(Error::InvalidParameter(format!(
                "RCL size {k} is smaller than selection size {}",
                self.lambda
            ))),
            RclSize::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
                Err(Error::InvalidParameter("RCL fraction must lie in (0, 1]".into()))
            }
            _ => Ok(()),
        }
    }

    /// Effective RCL size for a kernel with `n` vertices.
    pub fn rcl_len(&self, n: usize) -> usize {
        let k = match self.rcl {
            RclSize::Count(k) => k,
            RclSize::Fraction(f) => (f * n as f64).ceil() as usize,
        };
        k.max(self.lambda).max(1).min(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountHistogram {
    pub counts: Vec<usize>,
    pub shots_used: usize,
}

/// Keeps the valid shots whose repaired set has the largest or second
/// largest size present.
pub fn filter_shots(samples: &SampleSet) -> Result<SampleSet> {
    let mut sizes: Vec<usize> = samples.repaired_sets().map(|s| s.size()).collect();
    if sizes.is_empty() {
        return Err(Error::NoValidShots);
    }
    sizes.sort_unstable();
    sizes.dedup();
    let cutoff = if sizes.len() >= 2 { sizes[sizes.len() - 2] } else { sizes[0] };
    Ok(SampleSet {
        shots: samples
            .shots
            .iter()
            .filter(|s| s.valid_loading && s.repaired.size() >= cutoff)
            .cloned()
            .collect(),
    })
}

/// In-set occurrence count per kernel vertex over the valid shots.
pub fn build_histogram(samples: &SampleSet, kernel: &Graph) -> CountHistogram {
    let mut counts = vec![0; kernel.vertex_count()];
    let mut shots_used = 0;
    for set in samples.repaired_sets() {
        shots_used += 1;
        for &v in set.members() {
            counts[v] += 1;
        }
    }
    CountHistogram { counts, shots_used }
}

/// Outcome of one selection, in kernel ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    /// Vertices to delete from the kernel: `selected ∪ removed`.
    pub q: Vec<usize>,
    pub selected: Vec<usize>,
    pub removed: Vec<usize>,
    pub rcl: Vec<usize>,
}

/// Ranks kernel vertices for the RCL of `strategy` (best first).
pub fn rank_candidates(hist: &CountHistogram, kernel: &Graph, strategy: Strategy, degree_bias: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..kernel.vertex_count()).collect();
    match strategy {
        Strategy::In | Strategy::Random => order.sort_by_key(|&v| {
            let deg = if degree_bias { kernel.degree(v) } else { 0 };
            (std::cmp::Reverse(hist.counts[v]), deg, v)
        }),
        Strategy::Out => order.sort_by_key(|&v| {
            (hist.counts[v], std::cmp::Reverse(kernel.degree(v)), v)
        }),
    }
    order
}

/// The restricted candidate list for `params` (every vertex for the random
/// strategy), best candidates first.
pub fn candidate_list(samples: &SampleSet, kernel: &Graph, params: &SelectionParams) -> Result<Vec<usize>> {
    params.validate()?;
    let n = kernel.vertex_count();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot select from an empty kernel".into()));
    }
    if params.lambda > n {
        return Err(Error::InvalidParameter(format!(
            "selection size {} exceeds kernel size {n}",
            params.lambda
        )));
    }
    Ok(match params.strategy {
        Strategy::Random => (0..n).collect(),
        strategy => {
            let filtered = filter_shots(samples)?;
            let hist = build_histogram(&filtered, kernel);
            let mut ranked = rank_candidates(&hist, kernel, strategy, params.degree_bias);
            ranked.truncate(params.rcl_len(n));
            ranked
        }
    })
}

/// Expands drawn vertices into the full deletion set `Q`.
pub fn commit(kernel: &Graph, strategy: Strategy, mut drawn: Vec<usize>, rcl: Vec<usize>) -> Selection {
    drawn.sort_unstable();
    match strategy {
        Strategy::Out => Selection { q: drawn.clone(), selected: Vec::new(), removed: drawn, rcl },
        Strategy::In | Strategy::Random => {
            let mut removed: Vec<usize> = drawn.iter().flat_map(|&v| kernel.neighbors(v).iter().copied()).collect();
            removed.sort_unstable();
            removed.dedup();
            let mut q: Vec<usize> = drawn.iter().chain(&removed).copied().collect();
            q.sort_unstable();
            Selection { q, selected: drawn, removed, rcl }
        }
    }
}

/// Builds the selection for the kernel from its samples.
pub fn select(samples: &SampleSet, kernel: &Graph, params: &SelectionParams, seed: u64) -> Result<Selection> {
    let rcl = candidate_list(samples, kernel, params)?;
    let mut pool = rcl.clone();
    pool.shuffle(&mut stream_rng(seed, 0));
    let mut drawn: Vec<usize> = Vec::with_capacity(params.lambda);
    for v in pool {
        if drawn.len() == params.lambda {
            break;
        }
        // Selected vertices must stay mutually independent.
        if params.strategy != Strategy::Out && drawn.iter().any(|&u| kernel.has_edge(u, v)) {
            continue;
        }
        drawn.push(v);
    }
    Ok(commit(kernel, params.strategy, drawn, rcl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::IndependentSet;

    /// Four vertices whose maximum sets are {0, 3} and {2, 3}: vertex 3 is in
    /// every one, vertex 1 in none.
    fn toy() -> (Graph, SampleSet) {
        let g = Graph::new(4, [(0, 1), (1, 2), (1, 3), (0, 2)]).unwrap();
        let sets = [vec![0, 3], vec![2, 3], vec![0, 3], vec![2, 3]]
            .into_iter()
            .map(|m| IndependentSet::new(&g, m).unwrap());
        let samples = SampleSet::from_sets(&g, sets);
        (g, samples)
    }

    fn sets_of_sizes(g: &Graph, sizes: &[usize]) -> SampleSet {
        let sets = sizes.iter().map(|&k| IndependentSet::new(g, 0..k).unwrap());
        SampleSet::from_sets(g, sets)
    }

    #[test]
    fn filter_keeps_two_largest_sizes() {
        let g = Graph::edgeless(5);
        let kept = filter_shots(&sets_of_sizes(&g, &[5, 5, 4, 2, 1])).unwrap();
        let sizes: Vec<usize> = kept.repaired_sets().map(|s| s.size()).collect();
        assert_eq!(sizes, vec![5, 5, 4]);
    }

    #[test]
    fn filter_keeps_uniform_sizes() {
        let g = Graph::edgeless(3);
        assert_eq!(filter_shots(&sets_of_sizes(&g, &[2, 2, 2])).unwrap().n_shots(), 3);
    }

    #[test]
    fn filter_rejects_empty_input() {
        assert!(matches!(filter_shots(&SampleSet::default()), Err(Error::NoValidShots)));
    }

    #[test]
    fn exact_cycle_output_survives_filtering() {
        let c5 = Graph::cycle(5);
        let samples = crate::sampling::sample_exact(&c5, 300, 2).unwrap();
        assert_eq!(filter_shots(&samples).unwrap(), samples);
    }

    #[test]
    fn toy_histogram_has_frozen_vertices() {
        let (g, samples) = toy();
        let hist = build_histogram(&samples, &g);
        assert_eq!(hist.counts[3], hist.shots_used);
        assert_eq!(hist.counts[1], 0);
    }

    #[test]
    fn single_shot_histogram() {
        let g = Graph::path(3);
        let samples = SampleSet::from_sets(&g, [IndependentSet::new(&g, [0, 2]).unwrap()]);
        assert_eq!(build_histogram(&samples, &g).counts, vec![1, 0, 1]);
    }

    #[test]
    fn cycle_counts_are_two_fifths() {
        let c5 = Graph::cycle(5);
        let samples = crate::sampling::sample_exact(&c5, 20_000, 6).unwrap();
        let maximum = SampleSet {
            shots: samples.shots.into_iter().filter(|s| s.repaired.size() == 2).collect(),
        };
        let hist = build_histogram(&maximum, &c5);
        for c in hist.counts {
            let frac = c as f64 / hist.shots_used as f64;
            assert!((frac - 0.4).abs() < 0.03, "fraction {frac}");
        }
    }

    #[test]
    fn greedy_in_takes_the_always_selected_vertex() {
        let (g, samples) = toy();
        let sel = select(&samples, &g, &SelectionParams::greedy(Strategy::In), 0).unwrap();
        assert_eq!(sel.selected, vec![3]);
        assert_eq!(sel.removed, vec![1]);
        assert_eq!(sel.q, vec![1, 3]);
    }

    #[test]
    fn greedy_out_drops_the_never_selected_vertex() {
        let (g, samples) = toy();
        let sel = select(&samples, &g, &SelectionParams::greedy(Strategy::Out), 0).unwrap();
        assert!(sel.selected.is_empty());
        assert_eq!(sel.removed, vec![1]);
        assert_eq!(sel.q, vec![1]);
    }

    #[test]
    fn single_vertex_kernel() {
        let g = Graph::edgeless(1);
        let samples = SampleSet::from_sets(&g, [IndependentSet::new(&g, [0]).unwrap()]);
        for strategy in [Strategy::In, Strategy::Out, Strategy::Random] {
            let sel = select(&samples, &g, &SelectionParams { strategy, ..Default::default() }, 1).unwrap();
            assert_eq!(sel.q, vec![0]);
        }
    }

    #[test]
    fn lambda_larger_than_kernel_is_an_error() {
        let (g, samples) = toy();
        let params = SelectionParams { lambda: 5, rcl: RclSize::Count(5), ..Default::default() };
        assert!(select(&samples, &g, &params, 0).is_err());
    }

    #[test]
    fn rcl_fraction_rounds_up() {
        let p = SelectionParams::default();
        assert_eq!(p.rcl_len(37), 15);
        assert_eq!(p.rcl_len(1), 1);
        assert_eq!(p.rcl_len(5), 2);
        let p = SelectionParams { lambda: 3, ..Default::default() };
        assert_eq!(p.rcl_len(4), 3);
    }

    #[test]
    fn params_validation() {
        assert!(SelectionParams { lambda: 0, ..Default::default() }.validate().is_err());
        assert!(SelectionParams { lambda: 2, rcl: RclSize::Count(1), ..Default::default() }
            .validate()
            .is_err());
        assert!(SelectionParams { rcl: RclSize::Fraction(0.0), ..Default::default() }.validate().is_err());
    }

    #[test]
    fn degree_bias_breaks_count_ties() {
        // Star centre 0 and leaf 1 tie on counts; bias prefers the leaf.
        let g = Graph::new(3, [(0, 1), (0, 2)]).unwrap();
        let hist = CountHistogram { counts: vec![1, 1, 0], shots_used: 1 };
        assert_eq!(rank_candidates(&hist, &g, Strategy::In, true)[0], 1);
        assert_eq!(rank_candidates(&hist, &g, Strategy::In, false)[0], 0);
        assert_eq!(rank_candidates(&hist, &g, Strategy::Out, true)[0], 2);
    }

    #[test]
    fn strategy_parses() {
        assert_eq!("out".parse::<Strategy>().unwrap(), Strategy::Out);
        assert!("sideways".parse::<Strategy>().is_err());
    }
}
