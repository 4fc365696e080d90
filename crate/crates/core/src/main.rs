use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sdp3color::cones::{default_max_depth, probe_copositive_program, ConeError};
use sdp3color::encoder::{S2Params, DEFAULT_LOWER_BOUND};
use sdp3color::graph::{
    dedup_isomorphic, enumerate_graphs, generate, oracle_3color, parse_dimacs, Graph, GraphError, GraphKind,
};
use sdp3color::harness::{
    decide, run_dual, run_identities, sweep, sweep_graphs, write_rows, HarnessError, HarnessOptions, ReportFormat,
};
use sdp3color::solver::{SolveOptions, SolveStatus};

const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "sdp3color", version, about = "SDP encodings of graph 3-colorability, checked against exact coloring")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Primal and dual feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_feas: f64,
    /// Relative duality-gap tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol_gap: f64,
    /// Lower bound imposed on the primal objective.
    #[arg(long, global = true, default_value_t = DEFAULT_LOWER_BOUND, allow_hyphen_values = true)]
    bound: f64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Log solver iterations to standard error.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the primal program for a DIMACS graph and classify the optimum.
    Decide { file: PathBuf },
    /// Exact 3-coloring count and witness.
    Oracle { file: PathBuf },
    /// Decide every connected max-degree-4 labeled graph up to n-max vertices.
    Sweep {
        #[arg(long)]
        n_max: usize,
        /// Keep one graph per isomorphism class.
        #[arg(long)]
        dedup: bool,
    },
    /// Randomized checks of the coloring identities and dual certificates.
    Identities {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Solve the dual feasibility program.
    Dual { file: PathBuf },
    /// Copositivity experiments.
    Cones {
        #[command(subcommand)]
        command: ConesCommand,
    },
    /// Write a generated graph in DIMACS format.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ConesCommand {
    /// Test the copositive candidate of a D-graph and compare its objective
    /// with the closed form.
    #[command(name = "probe-copositive", visible_alias = "probe-thm32")]
    ProbeCopositive {
        /// Built-in name (k4, c5, p3, petersen) or a DIMACS file.
        #[arg(long, default_value = "k4")]
        graph: String,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c3: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c4: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        max_depth: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Complete,
    Cycle,
    Path,
    Petersen,
    Random,
}

enum Failure {
    Input(String),
    Solver(String),
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io { .. } | HarnessError::Format { .. } | HarnessError::Pool(_) => {
                Failure::Solver(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ConeError> for Failure {
    fn from(e: ConeError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_dimacs(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn named_graph(spec: &str) -> Result<Graph, Failure> {
    let lower = spec.to_ascii_lowercase();
    let sized = |prefix: &str| lower.strip_prefix(prefix).and_then(|k| k.parse::<usize>().ok());
    let kind = if lower == "petersen" {
        Some(GraphKind::Petersen)
    } else {
        sized("k")
            .map(GraphKind::Complete)
            .or_else(|| sized("c").map(GraphKind::Cycle))
            .or_else(|| sized("p").map(GraphKind::Path))
    };
    match kind {
        Some(k) => Ok(generate(&k)?),
        None => read_graph(Path::new(spec)),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Solver(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Solver(e.to_string())),
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Solver(e.to_string()))? + "\n";
    emit(out, &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let opts = HarnessOptions {
        solve: SolveOptions { feas_tol: g.tol_feas, gap_tol: g.tol_gap, verbose: g.verbose, ..Default::default() },
        bound: g.bound,
        ..Default::default()
    };
    match cli.command {
        Command::Decide { file } => {
            let graph = read_graph(&file)?;
            let v = decide(&graph, &opts)?;
            emit_json(&g.out, &v)?;
            if v.solver_status == SolveStatus::NumericalFailure {
                return Err(Failure::Solver(v.message.unwrap_or_else(|| "numerical failure".into())));
            }
        }
        Command::Oracle { file } => {
            let graph = read_graph(&file)?;
            emit_json(&g.out, &oracle_3color(&graph)?)?;
        }
        Command::Sweep { n_max, dedup } => {
            let (rows, summary) = if dedup {
                let graphs = dedup_isomorphic(enumerate_graphs(n_max)?);
                sweep_graphs(&graphs, &opts, g.jobs)?
            } else {
                sweep(n_max, &opts, g.jobs)?
            };
            let format = match g.format {
                Format::Json => ReportFormat::Json,
                Format::Csv => ReportFormat::Csv,
            };
            let mut buf = Vec::new();
            write_rows(&rows, format, &mut buf).map_err(Failure::Solver)?;
            emit(&g.out, &String::from_utf8_lossy(&buf))?;
            let summary = serde_json::to_string_pretty(&summary).map_err(|e| Failure::Solver(e.to_string()))?;
            eprintln!("{summary}");
        }
        Command::Identities { trials, seed } => {
            emit_json(&g.out, &run_identities(trials, seed)?)?;
        }
        Command::Dual { file } => {
            let graph = read_graph(&file)?;
            let r = run_dual(&graph, &opts)?;
            emit_json(&g.out, &r)?;
            if r.solver_status == SolveStatus::NumericalFailure {
                return Err(Failure::Solver("numerical failure in dual solve".into()));
            }
        }
        Command::Cones { command: ConesCommand::ProbeCopositive { graph, a, b, c3, c4, t, max_depth } } => {
            let graph = named_graph(&graph)?;
            let d = S2Params::defaults_for(graph.m());
            let params =
                S2Params { a: a.unwrap_or(d.a), b: b.unwrap_or(d.b), c3: c3.unwrap_or(d.c3), c4: c4.unwrap_or(d.c4) };
            let depth = max_depth.unwrap_or_else(|| default_max_depth(3 * graph.n() + 1));
            emit_json(&g.out, &probe_copositive_program(&graph, &params, t, depth)?)?;
        }
        Command::Gen { kind, n, p, seed } => {
            let need = |n: Option<usize>| n.ok_or_else(|| Failure::Input("--n is required for this kind".into()));
            let kind = match kind {
                Kind::Complete => GraphKind::Complete(need(n)?),
                Kind::Cycle => GraphKind::Cycle(need(n)?),
                Kind::Path => GraphKind::Path(need(n)?),
                Kind::Petersen => GraphKind::Petersen,
                Kind::Random => GraphKind::Random { n: need(n)?, p, seed },
            };
            emit(&g.out, &generate(&kind)?.to_dimacs())?;
        }
    }
    Ok(())
}
