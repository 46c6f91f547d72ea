//! Command-line front end.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ultrafit_core::{
    cut_to_k_clusters, fit, is_ultrametric, knn_mst_graph, sample_triplets, CostSpec, CostTerm, FitConfig,
    FitResult, TripletSet,
};

use crate::eval::{accuracy, EvalError};
use crate::formats::{self, FormatError};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ultrafit", version, about = "Fit ultrametrics to edge-weighted graphs by gradient descent")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a k-nearest-neighbor + minimum spanning tree graph from a points CSV.
    GraphBuild(GraphBuildArgs),
    /// Fit an ultrametric to one or more edge lists.
    Fit(FitArgs),
    /// Cut a linkage matrix into k flat clusters.
    Cluster(ClusterArgs),
    /// Accuracy of predicted labels against ground truth.
    Eval(EvalArgs),
    /// Report whether an edge list is an ultrametric on its graph.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct GraphBuildArgs {
    /// Points CSV, one point per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Edge list to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub knn: usize,
    /// Accepted for uniformity; graph construction is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostKind {
    #[value(name = "closest")]
    Closest,
    #[value(name = "closest+size")]
    ClosestSize,
    #[value(name = "closest+triplet")]
    ClosestTriplet,
    #[value(name = "dasgupta")]
    Dasgupta,
    #[value(name = "dasgupta+size")]
    DasguptaSize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Edge list(s). With several inputs, `--output` names a directory.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Fitted edge list. The linkage matrix and cost trace are written next
    /// to it with extensions `.linkage` and `.trace.csv`.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = CostKind::Closest)]
    pub cost: CostKind,
    /// Weight of the regularization term (default 10 for closest+size, else 1).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Triplet margin.
    #[arg(long, default_value_t = 10.0)]
    pub alpha: f64,
    /// Number of highest merges penalized by the size term; 0 penalizes all.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Sigmoid temperature of the Dasgupta term.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 150)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0.1)]
    pub step_size: f64,
    /// Triplet file (`ref pos neg` per line).
    #[arg(long, conflicts_with = "labels")]
    pub triplets: Option<PathBuf>,
    /// Class-label file (`vertex class`) from which triplets are sampled.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 200, requires = "labels")]
    pub triplet_count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write an SVG chart of the cost trace (`.svg`).
    #[arg(long)]
    pub svg: bool,
    /// Parallel fits in batch mode.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Linkage matrix.
    #[arg(long)]
    pub input: PathBuf,
    /// Label CSV; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted labels (`vertex label`).
    #[arg(long)]
    pub input: PathBuf,
    /// Ground-truth labels (`vertex class`).
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Edge list.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Absolute tolerance.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }

    /// Short name of the error class, printed in diagnostics.
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Format { source: FormatError::Invalid(_), .. } | CliError::Validation(_) => "validation",
            CliError::Format { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::Numerical(_) => "numerical",
        }
    }
}

impl From<ultrafit_core::Error> for CliError {
    fn from(e: ultrafit_core::Error) -> Self {
        match e {
            ultrafit_core::Error::NonFiniteCost { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn with_path<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Format { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    f(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Writes `text` to `path`, or returns it for standard output.
fn emit(path: Option<&Path>, text: String) -> Result<String, CliError> {
    match path {
        Some(p) => {
            write_file(p, |w| w.write_all(text.as_bytes()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Runs one invocation and returns what should go to standard output.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::GraphBuild(a) => graph_build(&a),
        Command::Fit(a) => fit_command(&a),
        Command::Cluster(a) => cluster(&a),
        Command::Eval(a) => eval(&a),
        Command::Check(a) => check(&a),
    }
}

fn graph_build(a: &GraphBuildArgs) -> Result<String, CliError> {
    let pts = with_path(&a.input, formats::read_points(open(&a.input)?))?;
    let (g, w) = knn_mst_graph(&pts, a.knn)?;
    write_file(&a.output, |f| formats::write_edge_list(f, &g, &w))?;
    Ok(format!("{} vertices, {} edges\n", g.vertex_count(), g.edge_count()))
}

fn cost_spec(a: &FitArgs, triplets: Option<TripletSet>) -> Result<CostSpec, CliError> {
    let top_k = (a.top_k > 0).then_some(a.top_k);
    let lambda = a.lambda.unwrap_or(if a.cost == CostKind::ClosestSize { 10.0 } else { 1.0 });
    let size = CostTerm::ClusterSize { top_k };
    let dasgupta = CostTerm::Dasgupta { temperature: a.tau };
    let terms = match a.cost {
        CostKind::Closest => vec![(CostTerm::Closest, 1.0)],
        CostKind::ClosestSize => vec![(CostTerm::Closest, 1.0), (size, lambda)],
        CostKind::ClosestTriplet => {
            let triplets = triplets.ok_or_else(|| {
                CliError::Validation("closest+triplet needs --triplets or --labels".into())
            })?;
            vec![(CostTerm::Closest, 1.0), (CostTerm::Triplet { triplets, margin: a.alpha }, lambda)]
        }
        CostKind::Dasgupta => vec![(dasgupta, 1.0)],
        CostKind::DasguptaSize => vec![(dasgupta, 1.0), (size, lambda)],
    };
    Ok(CostSpec::new(terms)?)
}

struct FitOutput {
    edges: PathBuf,
    linkage: PathBuf,
    trace: PathBuf,
    svg: Option<PathBuf>,
}

impl FitOutput {
    fn at(edges: PathBuf, svg: bool) -> Self {
        Self {
            linkage: edges.with_extension("linkage"),
            trace: edges.with_extension("trace.csv"),
            svg: svg.then(|| edges.with_extension("svg")),
            edges,
        }
    }
}

fn fit_one(a: &FitArgs, input: &Path, out: &FitOutput) -> Result<String, CliError> {
    let (g, w) = with_path(input, formats::read_edge_list(open(input)?))?;
    let triplets = if a.cost == CostKind::ClosestTriplet {
        match (&a.triplets, &a.labels) {
            (Some(p), _) => Some(with_path(p, formats::read_triplets(open(p)?, g.vertex_count()))?),
            (None, Some(p)) => {
                let labels = with_path(p, formats::read_labels(open(p)?, Some(g.vertex_count())))?;
                Some(sample_triplets(&labels.classes, a.triplet_count, a.seed)?)
            }
            (None, None) => None,
        }
    } else {
        None
    };
    let cfg = FitConfig {
        cost: cost_spec(a, triplets)?,
        iterations: a.iterations,
        step_size: a.step_size,
        seed: a.seed,
        ..FitConfig::default()
    };
    let FitResult { u, dendrogram, trace, iterations, clamped_edges, .. } = fit(&g, &w, &cfg)?;
    write_file(&out.edges, |f| formats::write_edge_list(f, &g, &u))?;
    write_file(&out.linkage, |f| formats::write_linkage(f, &dendrogram))?;
    write_file(&out.trace, |f| formats::write_trace(f, &trace))?;
    if let Some(svg) = &out.svg {
        let name = input.file_name().unwrap_or(input.as_os_str());
        let title = format!("{} cost", name.to_string_lossy());
        let chart = formats::trace_svg(&trace, &title);
        write_file(svg, |f| f.write_all(chart.as_bytes()))?;
    }
    let mut msg = format!(
        "{}: {iterations} iterations, cost {} -> {}",
        input.display(),
        trace.first().copied().unwrap_or(f64::NAN),
        trace.last().copied().unwrap_or(f64::NAN),
    );
    if clamped_edges > 0 {
        msg.push_str(&format!(", {clamped_edges} negative edges clamped to 0"));
    }
    msg.push('\n');
    Ok(msg)
}

fn fit_command(a: &FitArgs) -> Result<String, CliError> {
    if a.jobs == 0 {
        return Err(CliError::Validation("--jobs must be at least 1".into()));
    }
    if let [input] = a.input.as_slice() {
        return fit_one(a, input, &FitOutput::at(a.output.clone(), a.svg));
    }
    fs::create_dir_all(&a.output).map_err(|source| CliError::Io { path: a.output.clone(), source })?;
    let jobs: Vec<(PathBuf, FitOutput)> = a
        .input
        .iter()
        .map(|input| {
            let stem = input.file_stem().unwrap_or(input.as_os_str());
            let edges = a.output.join(stem).with_extension("edges");
            (input.clone(), FitOutput::at(edges, a.svg))
        })
        .collect();
    let mut seen: Vec<&Path> = jobs.iter().map(|(_, o)| o.edges.as_path()).collect();
    seen.sort();
    if seen.windows(2).any(|p| p[0] == p[1]) {
        return Err(CliError::Validation("batch inputs share a file stem; outputs would collide".into()));
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<String, CliError>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..a.jobs.min(jobs.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((input, out)) = jobs.get(i) else { break };
                let r = fit_one(a, input, out);
                results.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    let mut text = String::new();
    for r in results.into_inner().expect("worker panicked") {
        text.push_str(&r.expect("every job ran")?);
    }
    Ok(text)
}

fn cluster(a: &ClusterArgs) -> Result<String, CliError> {
    let t = with_path(&a.input, formats::read_linkage(open(&a.input)?))?;
    let labels = cut_to_k_clusters(&t, a.k)?;
    let mut buf = Vec::new();
    formats::write_labels(&mut buf, &labels).expect("writing to memory");
    emit(a.output.as_deref(), String::from_utf8(buf).expect("ascii"))
}

fn eval(a: &EvalArgs) -> Result<String, CliError> {
    let pred = with_path(&a.input, formats::read_labels(open(&a.input)?, None))?;
    let truth = with_path(&a.truth, formats::read_labels(open(&a.truth)?, None))?;
    let n = pred.classes.len().max(truth.classes.len());
    let pad = |v: &[Option<u32>]| {
        let mut v = v.to_vec();
        v.resize(n, None);
        v
    };
    let acc = accuracy(&pad(&pred.classes), &pad(&truth.classes))?;
    emit(a.output.as_deref(), format!("accuracy {acc}\n"))
}

fn check(a: &CheckArgs) -> Result<String, CliError> {
    if a.tol.is_nan() || a.tol < 0.0 {
        return Err(CliError::Validation("--tol must be non-negative".into()));
    }
    let (g, w) = with_path(&a.input, formats::read_edge_list(open(&a.input)?))?;
    let verdict = if is_ultrametric(&g, &w, a.tol)? { "ultrametric" } else { "not ultrametric" };
    emit(a.output.as_deref(), format!("{verdict}\n"))
}
