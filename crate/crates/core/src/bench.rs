//! Benchmark harness: every configured solver on every instance, `R`
//! repetitions per cell, scored against certified optima.
//!
//! Output row order depends only on the configuration, never on which worker
//! finished first, so a fixed master seed reproduces the tables byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{bare_solve, solve, BackendConfig, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::graph::{generate_union_jack, read_graph, Graph, GraphFormat, UnionJackSpec};
use crate::metrics::{estimate_pmis, hardness, max_independent_set, DEFAULT_BOOTSTRAP_SAMPLES};
use crate::rng::{derive_seed, derive_seed2};
use crate::search::DEFAULT_ENUMERATION_LIMIT;
use crate::selection::SelectionParams;

pub const SCHEMA_VERSION: u32 = 1;
pub const RESULTS_HEADER: [&str; 9] =
    ["instance", "n", "H", "solver", "p_mis", "ci_low", "ci_high", "mean_D", "mean_sampler_calls"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    /// Graph file; `.col`/`.dimacs`/`.clq`/`.txt` are read as DIMACS.
    File(PathBuf),
    UnionJack(UnionJackSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub source: InstanceSource,
    /// Certified optimum; required above the exact oracle's size limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<usize>,
}

impl InstanceEntry {
    pub fn label(&self, index: usize) -> String {
        if let Some(id) = &self.id {
            return id.clone();
        }
        match &self.source {
            InstanceSource::File(p) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| format!("instance-{index}")),
            InstanceSource::UnionJack(s) => format!("uj-L{}-n{}-s{}", s.side_length, s.nodes, s.seed),
        }
    }

    pub fn load(&self, base: &Path) -> Result<Graph> {
        match &self.source {
            InstanceSource::File(p) => {
                let path = if p.is_absolute() { p.clone() } else { base.join(p) };
                read_graph(&path, GraphFormat::from_path(&path))
            }
            InstanceSource::UnionJack(spec) => generate_union_jack(spec),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Kernelization interleaved with sampler-informed (or random) selection.
    #[default]
    Reduce,
    /// The sampler alone on the whole graph.
    Bare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub kind: SolverKind,
    pub backend: BackendConfig,
    #[serde(default)]
    pub selection: SelectionParams,
    #[serde(default)]
    pub frugal: bool,
}

impl SolverSpec {
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.kind {
            SolverKind::Bare => format!("bare-{}", self.backend.backend.name()),
            SolverKind::Reduce => SolveOptions { selection: self.selection.clone(), frugal: self.frugal, ..Default::default() }.solver_label(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub instances: Vec<InstanceEntry>,
    pub solvers: Vec<SolverSpec>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_shots")]
    pub n_shots: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_samples: usize,
    /// Worker threads; `None` uses all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_repetitions() -> usize {
    20
}

fn default_shots() -> usize {
    1000
}

fn default_bootstrap() -> usize {
    DEFAULT_BOOTSTRAP_SAMPLES
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() || self.solvers.is_empty() {
            return Err(Error::InvalidParameter("bench needs at least one instance and one solver".into()));
        }
        if self.repetitions == 0 || self.n_shots == 0 || self.bootstrap_samples == 0 {
            return Err(Error::InvalidParameter("repetitions, n_shots and bootstrap_samples must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        for s in &self.solvers {
            s.selection.validate()?;
            s.backend.build()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub id: String,
    pub n: usize,
    pub edges: usize,
    pub optimum: usize,
    /// Absent above the counting limit.
    pub hardness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub hardness: Option<f64>,
    pub solver: String,
    pub p_mis: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_d: f64,
    pub mean_sampler_calls: f64,
}

/// Per-run record for call-count and reduction-size analyses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub instance: String,
    pub solver: String,
    pub repetition: usize,
    pub size: usize,
    pub qpu_calls: usize,
    pub first_reduction_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchOutcome {
    pub schema_version: u32,
    pub seed: u64,
    pub instances: Vec<InstanceSummary>,
    /// Sorted by hardness, ties kept in configuration order.
    pub rows: Vec<BenchRow>,
    pub calls: Vec<CallRecord>,
}

/// Loads every instance and certifies its optimum.
pub fn prepare_instances(config: &BenchConfig, base: &Path) -> Result<Vec<(InstanceSummary, Graph)>> {
    config
        .instances
        .par_iter()
        .enumerate()
        .map(|(i, entry)| {
            let id = entry.label(i);
            let graph = entry.load(base)?;
            let n = graph.vertex_count();
            let in_range = n <= DEFAULT_ENUMERATION_LIMIT;
            let optimum = match (entry.optimum, in_range) {
                (Some(opt), _) => opt,
                (None, true) => max_independent_set(&graph)?.size(),
                (None, false) => {
                    return Err(Error::InvalidParameter(format!(
                        "instance '{id}' has {n} vertices, above the oracle limit of {DEFAULT_ENUMERATION_LIMIT}; supply a known optimum"
                    )))
                }
            };
            let h = if in_range && n > 0 { Some(hardness(&graph)?.hardness) } else { None };
            Ok((InstanceSummary { id, n, edges: graph.edge_count(), optimum, hardness: h }, graph))
        })
        .collect()
}

/// Runs the full benchmark; relative instance paths resolve against `base`.
pub fn run_bench(config: &BenchConfig, base: &Path) -> Result<BenchOutcome> {
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(config, base))
}

fn run_in_pool(config: &BenchConfig, base: &Path) -> Result<BenchOutcome> {
    let instances = prepare_instances(config, base)?;
    let cells: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..config.solvers.len()).map(move |s| (i, s)))
        .collect();
    let results: Vec<(BenchRow, Vec<CallRecord>)> = cells
        .par_iter()
        .map(|&(i, s)| run_cell(config, &instances[i].0, &instances[i].1, i, s))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(results.len());
    let mut calls = Vec::new();
    for (row, c) in results {
        rows.push(row);
        calls.extend(c);
    }
    // Stable sort: equal hardness keeps configuration order; unknown last.
    rows.sort_by(|a, b| match (a.hardness, b.hardness) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(BenchOutcome {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        instances: instances.into_iter().map(|(s, _)| s).collect(),
        rows,
        calls,
    })
}

fn run_cell(
    config: &BenchConfig,
    info: &InstanceSummary,
    graph: &Graph,
    instance: usize,
    solver: usize,
) -> Result<(BenchRow, Vec<CallRecord>)> {
    let spec = &config.solvers[solver];
    let sampler = spec.backend.build()?;
    let cell_seed = derive_seed2(config.seed, instance as u64, solver as u64);
    let reports: Vec<SolveReport> = (0..config.repetitions)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(cell_seed, r as u64);
            match spec.kind {
                SolverKind::Bare => bare_solve(graph, &sampler, config.n_shots, seed),
                SolverKind::Reduce => {
                    let opts = SolveOptions {
                        selection: spec.selection.clone(),
                        n_shots: config.n_shots,
                        seed,
                        max_iterations: None,
                        frugal: spec.frugal,
                    };
                    solve(graph, &sampler, &opts)
                }
            }
        })
        .collect::<Result<_>>()?;

    let label = spec.label();
    let est = estimate_pmis(&reports, info.optimum.max(1), config.bootstrap_samples, derive_seed(cell_seed, u64::MAX))?;
    let runs = reports.len() as f64;
    let row = BenchRow {
        instance: info.id.clone(),
        n: info.n,
        hardness: info.hardness,
        solver: label.clone(),
        p_mis: est.p_mis,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        mean_d: reports.iter().map(|r| r.iterations as f64).sum::<f64>() / runs,
        mean_sampler_calls: reports.iter().map(|r| r.sampler_calls as f64).sum::<f64>() / runs,
    };
    let calls = reports
        .iter()
        .enumerate()
        .map(|(r, rep)| CallRecord {
            instance: info.id.clone(),
            solver: label.clone(),
            repetition: r,
            size: rep.size(),
            qpu_calls: rep.sampler_calls,
            first_reduction_size: rep.first_reduction_size(),
        })
        .collect();
    Ok((row, calls))
}

/// The results table as CSV text.
pub fn results_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.n.to_string(),
            r.hardness.map(|h| h.to_string()).unwrap_or_default(),
            r.solver.clone(),
            r.p_mis.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.mean_d.to_string(),
            r.mean_sampler_calls.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

pub fn calls_csv(calls: &[CallRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance", "solver", "repetition", "size", "qpu_calls", "first_reduction_size"])
        .map_err(csv_err)?;
    for c in calls {
        w.write_record([
            c.instance.clone(),
            c.solver.clone(),
            c.repetition.to_string(),
            c.size.to_string(),
            c.qpu_calls.to_string(),
            c.first_reduction_size.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Writes `results.csv`, `calls.csv` and `summary.json` into `dir`.
pub fn write_outputs(outcome: &BenchOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut summary_by_solver: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in &outcome.rows {
        summary_by_solver.entry(&r.solver).or_default().push(r.p_mis);
    }
    let means: BTreeMap<&str, f64> =
        summary_by_solver.into_iter().map(|(k, v)| (k, v.iter().sum::<f64>() / v.len() as f64)).collect();
    let summary = serde_json::json!({
        "schema_version": outcome.schema_version,
        "seed": outcome.seed,
        "instances": outcome.instances,
        "mean_p_mis": means,
        "rows": outcome.rows,
    });
    let paths = [dir.join("results.csv"), dir.join("calls.csv"), dir.join("summary.json")];
    fs::write(&paths[0], results_csv(&outcome.rows)?)?;
    fs::write(&paths[1], calls_csv(&outcome.calls)?)?;
    fs::write(&paths[2], serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(paths.to_vec())
}
