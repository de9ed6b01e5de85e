//! The hybrid solve loop.
//!
//! Each iteration kernelizes the working graph exactly, samples the kernel,
//! updates the incumbent from the samples and then freezes a few vertices
//! chosen from the sample statistics. The loop stops once the kernel is empty.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_independent, Graph, IndependentSet};
use crate::kernel::classical_reduce;
use crate::rng::{derive_seed, derive_seed2};
use crate::rydberg::{RydbergConfig, RydbergSampler};
use crate::sampling::{AnnealingParams, AnnealingSampler, ExactSampler, Sampler, WithLoadingErrors};
use crate::search::DEFAULT_ENUMERATION_LIMIT;
use crate::selection::{candidate_list, commit, filter_shots, select, Selection, SelectionParams, Strategy};

const SAMPLER_STREAM: u64 = 0;
const SELECTION_STREAM: u64 = 1;

/// Serializable description of a kernel sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backend {
    Exact {
        #[serde(default = "default_vertex_limit")]
        vertex_limit: usize,
    },
    Sa(AnnealingParams),
    Rydberg(RydbergConfig),
}

fn default_vertex_limit() -> usize {
    DEFAULT_ENUMERATION_LIMIT
}

impl Backend {
    pub fn exact() -> Self {
        Backend::Exact { vertex_limit: DEFAULT_ENUMERATION_LIMIT }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact { .. } => "exact",
            Backend::Sa(_) => "sa",
            Backend::Rydberg(_) => "rydberg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    #[serde(flatten)]
    pub backend: Backend,
    /// Per-site loading defect probability; defective shots are post-selected away.
    #[serde(default)]
    pub loading_error: f64,
}

impl From<Backend> for BackendConfig {
    fn from(backend: Backend) -> Self {
        BackendConfig { backend, loading_error: 0.0 }
    }
}

impl BackendConfig {
    pub fn build(&self) -> Result<Box<dyn Sampler>> {
        if !(0.0..1.0).contains(&self.loading_error) {
            return Err(Error::InvalidParameter("loading error must lie in [0, 1)".into()));
        }
        let base: Box<dyn Sampler> = match &self.backend {
            Backend::Exact { vertex_limit } => Box::new(ExactSampler { vertex_limit: *vertex_limit }),
            Backend::Sa(params) => Box::new(AnnealingSampler { params: params.clone() }),
            Backend::Rydberg(config) => Box::new(RydbergSampler { config: config.clone() }),
        };
        Ok(if self.loading_error > 0.0 {
            Box::new(WithLoadingErrors { inner: base, epsilon: self.loading_error })
        } else {
            base
        })
    }
}

impl Sampler for Box<dyn Sampler> {
    fn name(&self) -> &str {
        self.as_ref().name()
    }

    fn sample(&self, kernel: &Graph, n_shots: usize, seed: u64) -> Result<crate::sampling::SampleSet> {
        self.as_ref().sample(kernel, n_shots, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub selection: SelectionParams,
    pub n_shots: usize,
    pub seed: u64,
    /// Cap on kernelization rounds; `None` runs until the kernel is empty.
    pub max_iterations: Option<usize>,
    /// Trial every RCL candidate classically and commit the best one.
    pub frugal: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            selection: SelectionParams::default(),
            n_shots: 1000,
            seed: 0,
            max_iterations: None,
            frugal: false,
        }
    }
}

impl SolveOptions {
    /// Name used in reports and benchmark tables.
    pub fn solver_label(&self) -> String {
        let base = match self.selection.strategy {
            Strategy::Random => "rReduMIS",
            Strategy::In | Strategy::Out => "qReduMIS",
        };
        if self.frugal {
            format!("{base}-frugal")
        } else {
            base.to_string()
        }
    }
}

/// Selection made in one iteration, in root-graph ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub selected: Vec<usize>,
    pub removed: Vec<usize>,
    pub rcl: Vec<usize>,
}

/// Snapshot of one iteration, in root-graph ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Selected and removed by exact reduction this round.
    pub reduced_selected: Vec<usize>,
    pub reduced_removed: Vec<usize>,
    /// Kernel left after reduction (sampled unless empty).
    pub kernel_vertices: Vec<usize>,
    pub kernel_size: usize,
    pub best_sample_size: Option<usize>,
    pub valid_shots: Option<usize>,
    pub selection: Option<SelectionRecord>,
    pub incumbent_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub backend: String,
    pub incumbent: IndependentSet,
    /// Vertices fixed into the solution, by reduction or selection.
    pub selected: Vec<usize>,
    /// Vertices fixed out of the solution.
    pub removed: Vec<usize>,
    pub iterations: usize,
    pub sampler_calls: usize,
    pub per_iteration: Vec<IterationRecord>,
    pub seed: u64,
    pub n_shots: usize,
    /// False when `max_iterations` stopped the loop early.
    pub completed: bool,
    pub wall_time_s: f64,
}

impl SolveReport {
    pub fn size(&self) -> usize {
        self.incumbent.size()
    }

    /// Size of the first exact reduction, in vertices.
    pub fn first_reduction_size(&self) -> usize {
        self.per_iteration
            .first()
            .map(|it| it.reduced_selected.len() + it.reduced_removed.len())
            .unwrap_or(0)
    }
}

/// Runs the hybrid loop with semi-greedy selection.
pub fn qredumis_solve(graph: &Graph, sampler: &dyn Sampler, options: &SolveOptions) -> Result<SolveReport> {
    run(graph, sampler, &SolveOptions { frugal: false, ..options.clone() })
}

/// Runs the loop in quantum-frugal mode: every RCL candidate is tried on a
/// copy of the kernel and the one whose removal lets exact reduction
/// eliminate the most vertices is committed (ties go to the smallest id).
pub fn qredumis_frugal_solve(graph: &Graph, sampler: &dyn Sampler, options: &SolveOptions) -> Result<SolveReport> {
    run(graph, sampler, &SolveOptions { frugal: true, ..options.clone() })
}

/// Dispatches on `options.frugal`.
pub fn solve(graph: &Graph, sampler: &dyn Sampler, options: &SolveOptions) -> Result<SolveReport> {
    run(graph, sampler, options)
}

fn run(graph: &Graph, sampler: &dyn Sampler, options: &SolveOptions) -> Result<SolveReport> {
    options.selection.validate()?;
    if options.n_shots == 0 {
        return Err(Error::InvalidParameter("n_shots must be at least 1".into()));
    }
    let start = Instant::now();
    let mut report = SolveReport {
        solver: options.solver_label(),
        backend: sampler.name().to_string(),
        incumbent: IndependentSet::empty(),
        selected: Vec::new(),
        removed: Vec::new(),
        iterations: 0,
        sampler_calls: 0,
        per_iteration: Vec::new(),
        seed: options.seed,
        n_shots: options.n_shots,
        completed: false,
        wall_time_s: 0.0,
    };
    // Working graph; its labels always point into `graph`.
    let mut current = graph.induced_subgraph(&(0..graph.vertex_count()).collect::<Vec<_>>());

    loop {
        if options.max_iterations.is_some_and(|cap| report.iterations >= cap) {
            break;
        }
        let iteration = report.iterations as u64;
        report.iterations += 1;

        let (kernel, trace) = classical_reduce(&current);
        let reduced_selected = to_root(&current, &trace.selected());
        let reduced_removed = to_root(&current, &trace.removed());
        report.selected.extend(&reduced_selected);
        report.removed.extend(&reduced_removed);
        let kernel = kernel.graph;
        let mut record = IterationRecord {
            reduced_selected,
            reduced_removed,
            kernel_vertices: to_root(&kernel, &(0..kernel.vertex_count()).collect::<Vec<_>>()),
            kernel_size: kernel.vertex_count(),
            best_sample_size: None,
            valid_shots: None,
            selection: None,
            incumbent_size: report.incumbent.size(),
        };

        if kernel.is_empty() {
            offer_fixed(graph, &mut report)?;
            record.incumbent_size = report.incumbent.size();
            report.per_iteration.push(record);
            report.completed = true;
            break;
        }

        report.sampler_calls += 1;
        let sampled = sampler
            .sample(&kernel, options.n_shots, derive_seed2(options.seed, iteration, SAMPLER_STREAM))
            .and_then(|s| filter_shots(&s));
        let filtered = match sampled {
            Ok(f) => f,
            Err(e) => {
                report.per_iteration.push(record);
                return Err(interrupted(e, report, start));
            }
        };
        record.valid_shots = Some(filtered.n_shots());
        if let Some(best) = filtered.best() {
            record.best_sample_size = Some(best.size());
            if report.selected.len() + best.size() > report.incumbent.size() {
                let mut members = report.selected.clone();
                members.extend(to_root(&kernel, best.members()));
                report.incumbent = IndependentSet::new(graph, members)?;
            }
        }

        let selection_seed = derive_seed2(options.seed, iteration, SELECTION_STREAM);
        let chosen = if options.frugal {
            frugal_select(&filtered, &kernel, &options.selection)
        } else {
            select(&filtered, &kernel, &options.selection, selection_seed)
        };
        let selection = match chosen {
            Ok(s) => s,
            Err(e) => {
                report.per_iteration.push(record);
                return Err(interrupted(e, report, start));
            }
        };
        let rec = SelectionRecord {
            selected: to_root(&kernel, &selection.selected),
            removed: to_root(&kernel, &selection.removed),
            rcl: to_root(&kernel, &selection.rcl),
        };
        report.selected.extend(&rec.selected);
        report.removed.extend(&rec.removed);
        record.selection = Some(rec);
        record.incumbent_size = report.incumbent.size();
        report.per_iteration.push(record);

        let keep: Vec<usize> = (0..kernel.vertex_count()).filter(|v| selection.q.binary_search(v).is_err()).collect();
        current = kernel.induced_subgraph(&keep);
    }

    offer_fixed(graph, &mut report)?;
    report.selected.sort_unstable();
    report.removed.sort_unstable();
    report.wall_time_s = start.elapsed().as_secs_f64();
    debug_assert!(is_independent(graph, report.incumbent.members()).unwrap_or(false));
    Ok(report)
}

/// `W <- S` when the fixed-in vertices alone beat the incumbent.
fn offer_fixed(graph: &Graph, report: &mut SolveReport) -> Result<()> {
    if report.selected.len() > report.incumbent.size() {
        report.incumbent = IndependentSet::new(graph, report.selected.iter().copied())?;
    }
    Ok(())
}

fn interrupted(source: Error, mut partial: SolveReport, start: Instant) -> Error {
    partial.wall_time_s = start.elapsed().as_secs_f64();
    Error::Interrupted { source: Box::new(source), partial: Box::new(partial) }
}

fn to_root(graph: &Graph, ids: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = ids.iter().map(|&v| graph.label(v)).collect();
    out.sort_unstable();
    out
}

fn frugal_select(samples: &crate::sampling::SampleSet, kernel: &Graph, params: &SelectionParams) -> Result<Selection> {
    let single = SelectionParams { lambda: 1, ..params.clone() };
    let rcl = candidate_list(samples, kernel, &single)?;
    let mut best: Option<(usize, usize)> = None;
    for &c in &rcl {
        let trial = commit(kernel, params.strategy, vec![c], Vec::new());
        let keep: Vec<usize> = (0..kernel.vertex_count()).filter(|v| trial.q.binary_search(v).is_err()).collect();
        let (rest, _) = classical_reduce(&kernel.induced_subgraph(&keep));
        let footprint = kernel.vertex_count() - rest.graph.vertex_count();
        let better = match best {
            None => true,
            Some((f, v)) => footprint > f || (footprint == f && c < v),
        };
        if better {
            best = Some((footprint, c));
        }
    }
    let (_, winner) = best.expect("candidate list is never empty");
    Ok(commit(kernel, params.strategy, vec![winner], rcl))
}

/// Baseline without kernelization: one sampler call of `n_shots` shots on the
/// whole graph, keeping the largest post-selected repaired sample.
pub fn bare_solve(graph: &Graph, sampler: &dyn Sampler, n_shots: usize, seed: u64) -> Result<SolveReport> {
    if n_shots == 0 {
        return Err(Error::InvalidParameter("n_shots must be at least 1".into()));
    }
    let start = Instant::now();
    let mut report = SolveReport {
        solver: format!("bare-{}", sampler.name()),
        backend: sampler.name().to_string(),
        incumbent: IndependentSet::empty(),
        selected: Vec::new(),
        removed: Vec::new(),
        iterations: 0,
        sampler_calls: 0,
        per_iteration: Vec::new(),
        seed,
        n_shots,
        completed: true,
        wall_time_s: 0.0,
    };
    if !graph.is_empty() {
        report.sampler_calls = 1;
        let samples = sampler.sample(graph, n_shots, derive_seed2(seed, 0, SAMPLER_STREAM))?;
        if let Some(best) = samples.best() {
            report.incumbent = best.clone();
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Total run time `T = D * n_shots * tau` of a solve, ignoring classical work.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTimeModel {
    /// Seconds per shot.
    pub tau: f64,
    pub n_shots: usize,
    pub iterations: usize,
}

impl RunTimeModel {
    pub fn new(tau: f64, n_shots: usize, iterations: usize) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) || n_shots == 0 || iterations == 0 {
            return Err(Error::InvalidParameter("run-time model fields must be positive".into()));
        }
        Ok(RunTimeModel { tau, n_shots, iterations })
    }
}

pub fn estimate_runtime(model: &RunTimeModel) -> f64 {
    model.iterations as f64 * model.n_shots as f64 * model.tau
}

/// `repetitions` independent solves in parallel; run `r` uses seed
/// `derive_seed(seed, r)`, so the result does not depend on thread count.
pub fn run_repetitions(
    graph: &Graph,
    sampler: &dyn Sampler,
    options: &SolveOptions,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<SolveReport>> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("at least one repetition is required".into()));
    }
    (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let opts = SolveOptions { seed: derive_seed(seed, r as u64), ..options.clone() };
            solve(graph, sampler, &opts)
        })
        .collect()
}
