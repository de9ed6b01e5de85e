use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hybrid_mis::bench::{results_csv, run_bench, write_outputs, BenchConfig, SCHEMA_VERSION};
use hybrid_mis::driver::{bare_solve, solve, Backend, BackendConfig, SolveOptions};
use hybrid_mis::graph::{
    build_asset_graph, generate_union_jack, read_graph, to_json, write_graph, AssetGraphSpec, Graph, GraphFormat,
    UnionJackSpec,
};
use hybrid_mis::kernel::classical_reduce;
use hybrid_mis::metrics::{fit_scaling, hardness};
use hybrid_mis::rydberg::{validate_register, AhsProgram, RydbergConfig};
use hybrid_mis::sampling::AnnealingParams;
use hybrid_mis::selection::{RclSize, SelectionParams, Strategy};

const OUT_DIR_ENV: &str = "HYBRID_MIS_OUT_DIR";

#[derive(Parser)]
#[command(name = "hybrid-mis", version, about = "Maximum independent sets by kernelization and sampler-guided selection")]
struct Cli {
    /// Default directory for output files.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Run exact reduction and report the kernel.
    Kernelize(KernelizeArgs),
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run a benchmark described by a JSON config.
    Bench(BenchArgs),
    /// Compute the hardness parameter of an instance.
    Hardness(InstanceArgs),
    /// Fit the success-probability scaling law to bench results.
    Fit(FitArgs),
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Site-diluted square lattice with diagonal couplings.
    Uj {
        #[arg(long)]
        side: usize,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lattice spacing in micrometers.
        #[arg(long, default_value_t = 5.45)]
        spacing: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Threshold graph from a JSON correlation matrix.
    Asset {
        /// JSON document with `correlations` (and optionally `expected_returns`).
        #[arg(long)]
        correlations: PathBuf,
        #[arg(long)]
        threshold: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    instance: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KernelizeArgs {
    instance: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the kernel as a graph file.
    #[arg(long)]
    kernel_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendName {
    Exact,
    Sa,
    Rydberg,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    In,
    Out,
    Random,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    backend: BackendName,
    /// JSON backend settings (overrides --backend).
    #[arg(long)]
    backend_config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "in")]
    strategy: StrategyName,
    /// Sampler only, no kernelization.
    #[arg(long, conflicts_with = "frugal")]
    bare: bool,
    #[arg(long)]
    frugal: bool,
    #[arg(long, default_value_t = 1000)]
    n_shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    lambda: usize,
    #[arg(long, default_value_t = 0.4, conflicts_with = "rcl_size")]
    rcl_frac: f64,
    #[arg(long)]
    rcl_size: Option<usize>,
    #[arg(long)]
    no_degree_bias: bool,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Per-site loading defect probability.
    #[arg(long, default_value_t = 0.0)]
    loading_error: f64,
    /// Annealing sweeps per shot (sa backend).
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write per-iteration kernel and selection records.
    #[arg(long)]
    snapshots: Option<PathBuf>,
    /// Write the analog program for the first kernel (rydberg backend).
    #[arg(long)]
    ahs_program: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    n_shots: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    /// Bench results CSV.
    results: PathBuf,
    /// Only rows of this solver.
    #[arg(long)]
    solver: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out_dir.as_deref();
    match cli.command {
        Command::Generate(cmd) => cmd_generate(cmd, out_dir),
        Command::Kernelize(args) => cmd_kernelize(args, out_dir),
        Command::Solve(args) => cmd_solve(args, out_dir),
        Command::Bench(args) => cmd_bench(args, out_dir),
        Command::Hardness(args) => cmd_hardness(args, out_dir),
        Command::Fit(args) => cmd_fit(args, out_dir),
    }
}

fn load(path: &Path) -> Result<Graph> {
    read_graph(path, GraphFormat::from_path(path)).with_context(|| format!("reading {}", path.display()))
}

/// Explicit path wins; otherwise `default_name` inside the output directory;
/// otherwise stdout.
fn resolve_output(explicit: Option<PathBuf>, out_dir: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    explicit.or_else(|| out_dir.map(|d| d.join(default_name)))
}

fn emit(text: &str, path: Option<PathBuf>) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {}", p.display());
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(value: &Value, path: Option<PathBuf>) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"), path)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into())
}

fn cmd_generate(cmd: GenerateCmd, out_dir: Option<&Path>) -> Result<()> {
    let (graph, output, name) = match cmd {
        GenerateCmd::Uj { side, nodes, seed, spacing, output } => {
            let spec = UnionJackSpec { side_length: side, nodes, spacing, seed };
            (generate_union_jack(&spec)?, output, format!("uj-L{side}-n{nodes}-s{seed}.json"))
        }
        GenerateCmd::Asset { correlations, threshold, output } => {
            let mut doc: Value = serde_json::from_str(&fs::read_to_string(&correlations)?)
                .with_context(|| format!("parsing {}", correlations.display()))?;
            doc["threshold"] = json!(threshold);
            let spec: AssetGraphSpec = serde_json::from_value(doc)?;
            (build_asset_graph(&spec)?, output, format!("asset-{}.json", stem(&correlations)))
        }
    };
    match resolve_output(output, out_dir, &name) {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            write_graph(&p, &graph, GraphFormat::from_path(&p))?;
            eprintln!("wrote {} ({} vertices, {} edges)", p.display(), graph.vertex_count(), graph.edge_count());
            Ok(())
        }
        None => emit(&to_json(&graph)?, None),
    }
}

fn cmd_kernelize(args: KernelizeArgs, out_dir: Option<&Path>) -> Result<()> {
    let graph = load(&args.instance)?;
    let (kernel, trace) = classical_reduce(&graph);
    if let Some(p) = &args.kernel_out {
        write_graph(p, &kernel.graph, GraphFormat::from_path(p))?;
    }
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "n": graph.vertex_count(),
        "kernel_size": kernel.graph.vertex_count(),
        "selected": trace.selected(),
        "removed": trace.removed(),
        "trace": trace,
    });
    let name = format!("{}-kernel.json", stem(&args.instance));
    emit_json(&value, resolve_output(args.output, out_dir, &name))
}

fn backend_from_args(args: &SolveArgs) -> Result<BackendConfig> {
    let backend = match &args.backend_config {
        Some(p) => return Ok(serde_json::from_str(&fs::read_to_string(p)?).with_context(|| format!("parsing {}", p.display()))?),
        None => match args.backend {
            BackendName::Exact => Backend::exact(),
            BackendName::Sa => Backend::Sa(AnnealingParams { sweeps: args.sweeps, ..Default::default() }),
            BackendName::Rydberg => Backend::Rydberg(RydbergConfig::default()),
        },
    };
    Ok(BackendConfig { backend, loading_error: args.loading_error })
}

fn cmd_solve(args: SolveArgs, out_dir: Option<&Path>) -> Result<()> {
    let graph = load(&args.instance)?;
    let backend = backend_from_args(&args)?;
    let sampler = backend.build()?;
    let selection = SelectionParams {
        lambda: args.lambda,
        rcl: match args.rcl_size {
            Some(k) => RclSize::Count(k),
            None => RclSize::Fraction(args.rcl_frac),
        },
        strategy: match args.strategy {
            StrategyName::In => Strategy::In,
            StrategyName::Out => Strategy::Out,
            StrategyName::Random => Strategy::Random,
        },
        degree_bias: !args.no_degree_bias,
    };
    let options = SolveOptions {
        selection,
        n_shots: args.n_shots,
        seed: args.seed,
        max_iterations: args.max_iterations,
        frugal: args.frugal,
    };

    if let Some(p) = &args.ahs_program {
        let Backend::Rydberg(config) = &backend.backend else {
            bail!("--ahs-program requires the rydberg backend");
        };
        let (kernel, _) = classical_reduce(&graph);
        if kernel.is_empty() {
            bail!("instance is fully reducible; there is no kernel to program");
        }
        let program = AhsProgram::for_graph(&kernel.graph, config.schedule()?, config.c6)?;
        let spacing = graph
            .meta()
            .and_then(|m| m.spec.as_ref())
            .and_then(|s| s.get("spacing"))
            .and_then(Value::as_f64)
            .unwrap_or(5.45);
        let diagnostics = validate_register(&program, spacing, Some(&kernel.graph));
        if !diagnostics.ok() {
            eprintln!("warning: {}", diagnostics.message);
        }
        emit(&(program.to_json()? + "\n"), Some(p.clone()))?;
    }

    let report = if args.bare {
        bare_solve(&graph, &sampler, args.n_shots, args.seed)?
    } else {
        solve(&graph, &sampler, &options)?
    };
    if let Some(p) = &args.snapshots {
        let snaps = json!({
            "schema_version": SCHEMA_VERSION,
            "n": graph.vertex_count(),
            "edges": graph.edges(),
            "coords": graph.coords(),
            "iterations": report.per_iteration,
        });
        emit_json(&snaps, Some(p.clone()))?;
    }
    let mut value = serde_json::to_value(&report)?;
    value["schema_version"] = json!(SCHEMA_VERSION);
    value["instance"] = json!(args.instance.display().to_string());
    value["size"] = json!(report.size());
    let name = format!("{}-solve.json", stem(&args.instance));
    emit_json(&value, resolve_output(args.output, out_dir, &name))
}

fn cmd_bench(args: BenchArgs, out_dir: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut config = BenchConfig::from_json(&text)?;
    if let Some(w) = args.workers {
        config.workers = Some(w);
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.repetitions {
        config.repetitions = r;
    }
    if let Some(n) = args.n_shots {
        config.n_shots = n;
    }
    let base = args.config.parent().unwrap_or(Path::new("."));
    let dir = args
        .output_dir
        .or_else(|| config.output_dir.as_ref().map(|d| base.join(d)))
        .or_else(|| out_dir.map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("bench-out"));
    let outcome = run_bench(&config, base)?;
    for p in write_outputs(&outcome, &dir)? {
        eprintln!("wrote {}", p.display());
    }
    print!("{}", results_csv(&outcome.rows)?);
    Ok(())
}

fn cmd_hardness(args: InstanceArgs, out_dir: Option<&Path>) -> Result<()> {
    let graph = load(&args.instance)?;
    let report = hardness(&graph)?;
    let mut value = serde_json::to_value(&report)?;
    value["schema_version"] = json!(SCHEMA_VERSION);
    // Degeneracies can exceed what JSON readers hold exactly as numbers.
    value["degeneracy_at_mis"] = json!(report.degeneracy_at_mis.to_string());
    value["degeneracy_below"] = json!(report.degeneracy_below.to_string());
    let name = format!("{}-hardness.json", stem(&args.instance));
    emit_json(&value, resolve_output(args.output, out_dir, &name))
}

fn cmd_fit(args: FitArgs, out_dir: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(&args.results)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().context("empty results file")?.split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).with_context(|| format!("missing column {name}"));
    let (hc, pc, sc) = (col("H")?, col("p_mis")?, col("solver")?);
    let mut points = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if args.solver.as_deref().is_some_and(|s| fields.get(sc) != Some(&s)) {
            continue;
        }
        let (Some(h), Some(p)) = (fields.get(hc), fields.get(pc)) else { continue };
        if h.is_empty() {
            continue;
        }
        points.push((h.parse::<f64>()?, p.parse::<f64>()?));
    }
    let fit = fit_scaling(&points)?;
    let mut value = serde_json::to_value(&fit)?;
    value["schema_version"] = json!(SCHEMA_VERSION);
    value["points"] = json!(points.len());
    emit_json(&value, resolve_output(args.output, out_dir, "fit.json"))
}
