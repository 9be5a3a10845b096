use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use deficiency_core::engine::JacobiSource;
use deficiency_core::graph::glue_copies;
use deficiency_core::radial::ReductionCheck;
use deficiency_core::{
    analyze, build_antitree, check_reduction_consistency, reduce_to_jacobi, solve_recurrence,
    AntitreeSpec, ClassifierTolerances, Complex64, DeficiencyIndex, EngineConfig, EngineError,
    Graph, OperatorDescriptor, RadialError, VertexId,
};

/// Deficiency indices of adjacency matrices on antitrees and related graphs.
#[derive(Parser)]
#[command(name = "deficiency", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an antitree truncation; writes antitree.json and spheres.csv.
    Antitree {
        #[command(flatten)]
        shape: AntitreeArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Glue copies of an antitree (or a graph file) in a chain at one vertex.
    Glue {
        #[command(flatten)]
        shape: AntitreeArgs,
        /// Base graph JSON instead of an antitree.
        #[arg(long, conflicts_with_all = ["alpha", "sizes"])]
        graph: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        copies: u64,
        /// Vertex of the base graph at which copies are joined.
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        /// Output JSON file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the deficiency index and write the report JSON.
    Analyze(AnalyzeArgs),
    /// Solve (J - z) u = 0 and write the solution trace CSV.
    Solve(SolveArgs),
    /// Check the radial reduction of an antitree on random functions.
    CheckReduction(CheckArgs),
}

#[derive(Args)]
struct AntitreeArgs {
    /// Power-law exponent: s_n = floor(n^alpha).
    #[arg(long, value_parser = positive_f64)]
    alpha: Option<f64>,
    /// Explicit sphere sizes, comma separated, starting with 1.
    #[arg(long, value_delimiter = ',', conflicts_with = "alpha")]
    sizes: Option<Vec<u64>>,
    /// Outermost materialised sphere (power law only).
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
}

impl AntitreeArgs {
    fn spec(&self) -> Result<AntitreeSpec, CliError> {
        let spec = match (&self.sizes, self.alpha) {
            (Some(sizes), _) => AntitreeSpec::explicit(sizes.clone()),
            (None, Some(alpha)) => AntitreeSpec::power_law(alpha, self.depth as usize),
            (None, None) => return Err(CliError::Usage("either --alpha or --sizes is required".into())),
        };
        spec.map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Operator descriptor JSON file.
    #[arg(long, conflicts_with_all = ["antitree", "alpha", "sizes"])]
    descriptor: Option<PathBuf>,
    /// Analyze a power-law antitree given by the flags below.
    #[arg(long, required_unless_present = "descriptor")]
    antitree: bool,
    #[command(flatten)]
    shape: AntitreeArgs,
    /// Glue this many copies of the antitree.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    copies: Option<u64>,
    #[command(flatten)]
    tolerances: Tolerances,
    /// Output JSON file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Tolerances {
    /// Scan length for the analytic criteria.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(10..))]
    scan_n_max: u64,
    /// Partial sum of 1/a_n above which the series counts as divergent.
    #[arg(long, default_value_t = 1e4, value_parser = positive_f64)]
    divergence_threshold: f64,
    /// Clean indices required at the end of a log-concavity scan.
    #[arg(long, default_value_t = 100)]
    min_clean_tail: usize,
    /// Solution length used by the classifier.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1000..))]
    classifier_n_max: u64,
    /// Skip the classifier when an analytic rule decides.
    #[arg(long)]
    no_corroborate: bool,
}

impl Tolerances {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            scan_n_max: self.scan_n_max as usize,
            divergence_threshold: self.divergence_threshold,
            min_clean_tail: self.min_clean_tail,
            classifier: ClassifierTolerances {
                n_max: self.classifier_n_max as usize,
                ..Default::default()
            },
            corroborate: !self.no_corroborate,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Antitree exponent of the Jacobi matrix.
    #[arg(long, value_parser = positive_f64, required_unless_present = "constant")]
    alpha: Option<f64>,
    /// Use the comparison matrix a_n = (n (n+1))^(alpha/2) instead of floors.
    #[arg(long, requires = "alpha")]
    exact: bool,
    /// Constant coefficients "a,b" instead of an antitree matrix.
    #[arg(long, value_parser = float_list::<2>, conflicts_with = "alpha", allow_hyphen_values = true)]
    constant: Option<[f64; 2]>,
    /// Spectral parameter "re,im".
    #[arg(long, value_parser = complex, default_value = "0,1", allow_hyphen_values = true)]
    z: Complex64,
    /// Initial values "re,im,re,im" for u(0), u(1); defaults to u(0) = 1,
    /// u(1) = (z - b_0) / a_0.
    #[arg(long, value_parser = float_list::<4>, allow_hyphen_values = true)]
    init: Option<[f64; 4]>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_max: u64,
    /// Output CSV file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_parser = positive_f64, required_unless_present = "sizes")]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',', conflicts_with = "alpha")]
    sizes: Option<Vec<u64>>,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(3..))]
    depth: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 1e-12, value_parser = positive_f64)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fault injection: shift a_INDEX of the reduced matrix by --perturb-delta.
    #[arg(long, requires = "perturb_delta")]
    perturb_index: Option<usize>,
    #[arg(long, requires = "perturb_index", allow_hyphen_values = true)]
    perturb_delta: Option<f64>,
    /// Output JSON file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a positive real, got {s}"))
    }
}

fn float_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let values = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{e} in '{s}'")))
        .collect::<Result<Vec<_>, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| p.parse::<f64>().map_err(|e| format!("{e} in '{s}'"));
    match parts.as_slice() {
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        _ => Err(format!("expected 're,im', got '{s}'")),
    }
}

enum CliError {
    Usage(String),
    Undetermined,
    Inconsistent(String),
    Io(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        if e.is_internal_inconsistency() {
            CliError::Inconsistent(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("writing to stdout")?,
    }
    Ok(())
}

/// Single-line JSON for large documents such as graphs.
fn compact_json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string(v)
        .map_err(|e| CliError::Io(anyhow::anyhow!("serializing output: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    deficiency_core::json::to_string(v)
        .map_err(|e| CliError::Io(anyhow::anyhow!("serializing output: {e}")))
}

fn cmd_antitree(shape: &AntitreeArgs, out: &Path) -> Result<(), CliError> {
    let spec = shape.spec()?;
    let g = build_antitree(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let sizes = spec.sizes().map_err(|e| CliError::Usage(e.to_string()))?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut csv = String::from("n,s_n\n");
    for (n, s) in sizes.iter().enumerate() {
        csv.push_str(&format!("{n},{s}\n"));
    }
    write_output(Some(&out.join("antitree.json")), &compact_json(&g)?)?;
    write_output(Some(&out.join("spheres.csv")), &csv)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn cmd_glue(
    shape: &AntitreeArgs,
    graph: Option<&Path>,
    copies: u64,
    vertex: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let base: Graph = match graph {
        Some(p) => read_json(p)?,
        None => build_antitree(&shape.spec()?).map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let glued = glue_copies(&base, copies as usize, VertexId(vertex))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    write_output(out, &compact_json(&glued)?)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let descriptor: OperatorDescriptor = match &args.descriptor {
        Some(p) => read_json(p)?,
        None => {
            let at = OperatorDescriptor::Antitree {
                spec: args.shape.spec()?,
            };
            match args.copies {
                Some(n) => OperatorDescriptor::Glued {
                    base: Box::new(at),
                    copies: n as usize,
                    vertex: 0,
                },
                None => at,
            }
        }
    };
    let report = analyze(&descriptor, &args.tolerances.config())?;
    write_output(args.out.as_deref(), &report.to_json())?;
    if report.eta == DeficiencyIndex::Undetermined {
        return Err(CliError::Undetermined);
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let source = match (&args.constant, args.alpha) {
        (Some(c), _) => JacobiSource::Constant { a: c[0], b: c[1] },
        (None, Some(alpha)) if args.exact => JacobiSource::AntitreeExact { alpha },
        (None, Some(alpha)) => JacobiSource::AntitreeFloor { alpha },
        (None, None) => return Err(CliError::Usage("either --alpha or --constant is required".into())),
    };
    let usage = |e: deficiency_core::JacobiError| CliError::Usage(e.to_string());
    let j = source.build().map_err(usage)?;
    let init = match &args.init {
        Some(v) => (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])),
        None => {
            let u1 = (args.z - j.b(0).map_err(usage)?) / j.a(0).map_err(usage)?;
            (Complex64::new(1.0, 0.0), u1)
        }
    };
    let sol = solve_recurrence(&j, args.z, init, args.n_max as usize).map_err(usage)?;
    write_output(args.out.as_deref(), &sol.to_csv())
}

fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let spec = match (&args.sizes, args.alpha) {
        (Some(s), _) => AntitreeSpec::explicit(s.clone()),
        (None, Some(alpha)) => AntitreeSpec::power_law(alpha, args.depth as usize),
        (None, None) => return Err(CliError::Usage("either --alpha or --sizes is required".into())),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut check = ReductionCheck::new(spec.clone(), args.depth as usize, args.trials as usize, args.tol)
        .seed(args.seed);
    if let (Some(k), Some(d)) = (args.perturb_index, args.perturb_delta) {
        let j = reduce_to_jacobi(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
        check = check.with_jacobi(j.perturbed_at(k, d));
    }
    match check_reduction_consistency(&check) {
        Ok(report) => write_output(args.out.as_deref(), &json(&report)?),
        Err(RadialError::Inconsistent(report)) => {
            write_output(args.out.as_deref(), &json(&report)?)?;
            Err(CliError::Inconsistent(report.to_string()))
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Antitree { shape, out } => cmd_antitree(shape, out),
        Command::Glue {
            shape,
            graph,
            copies,
            vertex,
            out,
        } => cmd_glue(shape, graph.as_deref(), *copies, *vertex, out.as_deref()),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Solve(args) => cmd_solve(args),
        Command::CheckReduction(args) => cmd_check(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Undetermined) => {
            eprintln!("deficiency index undetermined");
            ExitCode::from(3)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Inconsistent(m)) => {
            eprintln!("internal inconsistency: {m}");
            ExitCode::from(4)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
