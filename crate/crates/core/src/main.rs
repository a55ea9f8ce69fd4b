use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fixnode::generator::DEFAULT_SKIP_LAYER_PROB;
use fixnode::io::{parse_raw, to_json, GraphFile};
use fixnode::report::LabelingSummary;
use fixnode::stems::DEFAULT_ENUM_CAP;
use fixnode::{
    analyze, coverage_with_leaders, export_dot, generate, label_layers, AnalysisOptions, Density,
    Error, GeneratorConfig, LayeredOptions, MethodKind, NumericOptions, StructuredDag,
    ValidationPolicy,
};

#[derive(Parser)]
#[command(
    name = "fixnode",
    version,
    about = "Fixed-node analysis of leader-driven DAGs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the layer decomposition.
    Label(InputArgs),
    /// Print the generic dimension and a maximum stem family.
    Dim {
        #[command(flatten)]
        input: InputArgs,
        /// Use these leaders (1-based, comma separated) instead of the file's.
        #[arg(long, value_delimiter = ',')]
        leaders: Option<Vec<usize>>,
    },
    /// Compute fixed nodes with one or all methods.
    Fixed(AnalysisArgs),
    /// Run every method and exit with status 2 if they disagree.
    Verify(AnalysisArgs),
    /// Emit a random layered graph.
    Gen(GenArgs),
    /// Render the graph as DOT with fixed nodes marked.
    ExportDot(AnalysisArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Graph JSON file, or `-` for stdin.
    graph: PathBuf,
    /// Accept leaders with incoming edges (layered analysis is skipped).
    #[arg(long)]
    allow_nonsource_leaders: bool,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Layered,
    Oracle,
    Numeric,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct AnalysisArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Random realizations for the numeric method.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual and rank tolerance for the numeric method.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Do not skip targets outside a maximum cover.
    #[arg(long)]
    no_prune: bool,
    /// Largest prefix (in nodes) for which matched sets are enumerated; 0 disables.
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: usize,
    /// Include per-method wall time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Toggle node N in the first method's fixed set before comparing.
    #[arg(long, hide = true)]
    flip: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    /// Number of layers.
    #[arg(long, required_unless_present = "widths")]
    p: Option<usize>,
    /// Average nodes per layer; the total is p * width.
    #[arg(long, requires = "p", conflicts_with = "widths")]
    width: Option<usize>,
    /// Explicit layer widths; the first is the leader count.
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<usize>>,
    /// Total edge count.
    #[arg(long, conflicts_with = "edge_prob")]
    edges: Option<usize>,
    /// Probability of each optional downward edge.
    #[arg(long)]
    edge_prob: Option<f64>,
    #[arg(long)]
    leaders: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Share of optional edges that jump more than one layer.
    #[arg(long, default_value_t = DEFAULT_SKIP_LAYER_PROB)]
    skip_prob: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Lib(Error::Io(e))
    }
}

const EXIT_INVALID: u8 = 1;
const EXIT_DISAGREE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

fn read_input(path: &PathBuf) -> io::Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path)
    }
}

fn load(input: &InputArgs) -> Result<StructuredDag, CliError> {
    let raw = parse_raw(&read_input(&input.graph)?)?;
    let policy = ValidationPolicy {
        allow_nonsource_leaders: input.allow_nonsource_leaders,
    };
    let dag = StructuredDag::from_raw(&raw, policy)?;
    if dag.has_nonsource_leaders() {
        eprintln!("warning: some leaders have incoming edges; layered analysis is skipped");
    }
    Ok(dag)
}

fn emit(output: &Option<PathBuf>, text: &str) -> io::Result<()> {
    match output {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn methods_for(arg: MethodArg, dag: &StructuredDag) -> Result<Vec<MethodKind>, CliError> {
    let layered_ok = !dag.has_nonsource_leaders();
    Ok(match arg {
        MethodArg::Layered if !layered_ok => return Err(Error::NonSourceLeaders.into()),
        MethodArg::Layered => vec![MethodKind::Layered],
        MethodArg::Oracle => vec![MethodKind::Oracle],
        MethodArg::Numeric => vec![MethodKind::Numeric],
        MethodArg::All if layered_ok => {
            vec![MethodKind::Layered, MethodKind::Oracle, MethodKind::Numeric]
        }
        MethodArg::All => vec![MethodKind::Oracle, MethodKind::Numeric],
    })
}

fn options(args: &AnalysisArgs, methods: Vec<MethodKind>) -> AnalysisOptions {
    AnalysisOptions {
        methods,
        layered: LayeredOptions {
            prune: !args.no_prune,
            enum_cap: (args.enum_cap > 0).then_some(args.enum_cap),
        },
        numeric: NumericOptions {
            trials: args.trials,
            seed: args.seed,
            tol: args.tol,
            expected_dim: None,
        },
        timing: args.timing,
    }
}

/// Returns whether the methods agreed.
fn run_analysis(args: &AnalysisArgs, default: MethodArg) -> Result<bool, CliError> {
    let dag = load(&args.input)?;
    let methods = methods_for(args.method.unwrap_or(default), &dag)?;
    let first = methods[0];
    let mut report = analyze(&dag, &options(args, methods))?;
    if let Some(node) = args.flip {
        report.flip(first, node)?;
    }
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(&args.input.output, &text)?;
    if !report.agree {
        for d in &report.discrepancies {
            eprintln!(
                "disagreement at node {}: fixed by {:?}, not fixed by {:?}",
                d.node, d.fixed_by, d.free_by
            );
        }
    }
    Ok(report.agree)
}

fn export(args: &AnalysisArgs) -> Result<(), CliError> {
    let dag = load(&args.input)?;
    let method = match args.method.unwrap_or(MethodArg::Oracle) {
        MethodArg::All => return Err(CliError::Usage("export-dot takes a single --method".into())),
        m => m,
    };
    let report = analyze(&dag, &options(args, methods_for(method, &dag)?))?;
    let fixed: Vec<usize> = report
        .methods
        .values()
        .next()
        .map(|r| r.fixed.iter().map(|v| v - 1).collect())
        .unwrap_or_default();
    emit(
        &args.input.output,
        &export_dot(&dag, &label_layers(&dag), &fixed),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct DimOutput {
    leaders: Vec<usize>,
    generic_dim: usize,
    witness: Vec<Vec<usize>>,
}

fn dim(input: &InputArgs, leaders: &Option<Vec<usize>>) -> Result<(), CliError> {
    let dag = load(input)?;
    let leaders: Vec<usize> = match leaders {
        Some(ids) => {
            let n = dag.node_count();
            ids.iter()
                .map(|&id| {
                    if id == 0 || id > n {
                        Err(Error::NodeOutOfRange { id, n })
                    } else {
                        Ok(id - 1)
                    }
                })
                .collect::<Result<_, _>>()?
        }
        None => dag.leaders().to_vec(),
    };
    let (generic_dim, witness) = coverage_with_leaders(&dag, &leaders);
    let mut ext: Vec<usize> = leaders.iter().map(|v| v + 1).collect();
    ext.sort_unstable();
    ext.dedup();
    let out = DimOutput {
        leaders: ext,
        generic_dim,
        witness: witness
            .stems()
            .iter()
            .map(|s| s.iter().map(|v| v + 1).collect())
            .collect(),
    };
    emit(&input.output, &to_pretty(&out))?;
    Ok(())
}

fn gen(args: &GenArgs) -> Result<(), CliError> {
    let mut cfg = match (&args.widths, args.p, args.width) {
        (Some(widths), _, _) => {
            if args.p.is_some_and(|p| p != widths.len()) {
                return Err(CliError::Usage(
                    "--p does not match the number of --widths".into(),
                ));
            }
            if args.leaders.is_some_and(|m| Some(&m) != widths.first()) {
                return Err(CliError::Usage(
                    "--leaders must equal the first width".into(),
                ));
            }
            GeneratorConfig {
                widths: widths.clone(),
                density: Density::EdgeProb(0.0),
                seed: args.seed,
                skip_layer_prob: args.skip_prob,
            }
        }
        (None, Some(p), Some(width)) => {
            let leaders = args
                .leaders
                .ok_or_else(|| CliError::Usage("--leaders is required with --width".into()))?;
            fixnode::uniform(p, width, 0, leaders, args.seed)?
        }
        _ => return Err(CliError::Usage("give --widths, or --p with --width".into())),
    };
    cfg.skip_layer_prob = args.skip_prob;
    cfg.density = match (args.edges, args.edge_prob) {
        (Some(e), None) => Density::EdgeCount(e),
        (None, Some(q)) => Density::EdgeProb(q),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --edges or --edge-prob".into(),
            ))
        }
    };
    let dag = generate(&cfg)?;
    emit(&args.output, &to_json(&GraphFile::from_dag(&dag)))?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Label(input) => {
            let dag = load(&input)?;
            let summary = LabelingSummary::new(&dag, &label_layers(&dag));
            emit(&input.output, &to_pretty(&summary))?;
        }
        Command::Dim { input, leaders } => dim(&input, &leaders)?,
        Command::Fixed(args) => {
            run_analysis(&args, MethodArg::All)?;
        }
        Command::Verify(args) => {
            if !run_analysis(&args, MethodArg::All)? {
                return Ok(EXIT_DISAGREE);
            }
        }
        Command::Gen(args) => gen(&args)?,
        Command::ExportDot(args) => export(&args)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Lib(Error::Inconclusive { .. }) => EXIT_INCONCLUSIVE,
                _ => EXIT_INVALID,
            })
        }
    }
}
