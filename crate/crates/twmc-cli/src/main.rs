//! Command-line surface for the solver library: exact model counting,
//! randomized decision, and hard-instance generation.
//!
//! Results go to standard output as JSON (pretty by default, single-line
//! with `--json`); warnings and errors go to the error stream. Exit codes:
//! 0 for success (including a NO answer), 2 for usage, parse, or validation
//! problems, 3 for an exceeded resource budget.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use twmc::count_dp::{count_solutions, CountOptions};
use twmc::cutcount::{decide, DecideOptions};
use twmc::decomp::{greedy_decomposition, TreeDecomposition};
use twmc::graph::{Graph, GraphFormat, Instance};
use twmc::hardness::{generate, CnfFormula};
use twmc::logic::parse::parse_problem;
use twmc::logic::Problem;
use twmc::nice::{make_nice, NiceDecomposition};
use twmc::problems::{lookup, registry};
use twmc::Error;

#[derive(Parser)]
#[command(
    name = "twmc",
    version,
    about = "Counts and decides set-quantified modal specifications on graphs \
             of bounded treewidth",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count satisfying set assignments exactly.
    Count(SolveArgs),
    /// Decide satisfiability; specifications with component-count conditions
    /// use the randomized engine (YES answers are certain, NO answers are
    /// wrong with probability at most the target error).
    Decide(DecideArgs),
    /// Build a cycle-deletion instance from a 3-CNF formula, together with a
    /// narrow path decomposition and a gadget index.
    Generate(GenerateArgs),
    /// List the built-in problem catalogue.
    Problems,
}

#[derive(Args)]
struct SolveArgs {
    /// Graph file.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    /// Graph file format; `auto` picks `pace` for a `p tw`/`p dtw` header or
    /// a `.gr` extension and `edge-list` otherwise.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,

    /// Tree decomposition file (`.td`); computed heuristically when absent.
    #[arg(long, value_name = "FILE")]
    td: Option<PathBuf>,

    /// Built-in problem name (see `twmc problems`) or a specification file.
    #[arg(long, value_name = "NAME|FILE")]
    problem: String,

    /// Parameter and fixed-set values: a JSON file, or an inline JSON object
    /// such as '{"params":{"k":2},"fixed":{"T":[1,2]}}'.
    #[arg(long, value_name = "FILE|JSON")]
    bindings: Option<String>,

    /// Maximum live entries in any one dynamic-programming table.
    #[arg(long, value_name = "N", default_value_t = 1 << 24)]
    budget: usize,

    /// Worker threads; defaults to all available cores. The results never
    /// depend on this.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,

    /// Print compact single-line JSON instead of pretty JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    solve: SolveArgs,

    /// Master seed; the whole report is a pure function of it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Upper bound on the probability of answering NO on a satisfiable
    /// instance.
    #[arg(long, value_name = "P", default_value_t = 0.5f64.powi(20))]
    target_error: f64,
}

#[derive(Args)]
struct GenerateArgs {
    /// 3-CNF formula in DIMACS format.
    #[arg(long, value_name = "FILE")]
    cnf: PathBuf,

    /// Forbidden cycle length; must be at least 5.
    #[arg(short = 'l', long, value_name = "L")]
    cycle_length: u32,

    /// Output directory for the `.gr`, `.td`, and index files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Print compact single-line JSON instead of pretty JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Auto,
    Pace,
    EdgeList,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Count(args) => run_count(args),
        Command::Decide(args) => run_decide(args),
        Command::Generate(args) => run_generate(args),
        Command::Problems => run_problems(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::BudgetExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Everything the two solver subcommands share: a bound instance, the
/// specification, and a normalized decomposition.
struct Prepared {
    inst: Instance,
    problem: Problem,
    nice: NiceDecomposition,
}

fn prepare(args: &SolveArgs) -> twmc::Result<Prepared> {
    if let Some(workers) = args.workers {
        // At most one global pool per process; a second solver invocation in
        // the same process would already have one, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let graph_text = read_file(&args.graph)?;
    let format = resolve_format(args.format, &args.graph, &graph_text);
    let graph = Graph::parse(&graph_text, format)?;
    let problem = resolve_problem(&args.problem)?;
    let bindings = match &args.bindings {
        None => String::from("{}"),
        Some(value) if value.trim_start().starts_with('{') => value.clone(),
        Some(value) => read_file(Path::new(value))?,
    };
    let td = match &args.td {
        Some(path) => {
            let td = TreeDecomposition::parse(&read_file(path)?)?;
            let report = td.validate(&graph);
            if !report.is_valid() {
                let list =
                    report.violations.iter().map(ToString::to_string).collect::<Vec<_>>();
                return Err(Error::InvalidDecomposition(list.join("; ")));
            }
            td
        }
        None => {
            let td = greedy_decomposition(&graph);
            eprintln!("warning: heuristic decomposition, width {}", td.width());
            td
        }
    };
    let nice = make_nice(&graph, &td)?;
    let inst = problem.bind(graph, &bindings)?;
    Ok(Prepared { inst, problem, nice })
}

fn run_count(args: &SolveArgs) -> twmc::Result<()> {
    let started = Instant::now();
    let prep = prepare(args)?;
    let opts = CountOptions { max_table_entries: args.budget };
    let report = count_solutions(&prep.inst, &prep.problem, &prep.nice, &opts)?;
    let wall_time = started.elapsed().as_secs_f64();

    // Assembled by hand so the count stays a bare JSON integer even beyond
    // the 64-bit range.
    let mut out = String::new();
    if args.json {
        let _ = write!(
            out,
            "{{\"count\":{},\"width_used\":{},\"branches\":{},\"wall_time\":{:.6}}}",
            report.count, report.width_used, report.branches, wall_time
        );
    } else {
        let _ = write!(
            out,
            "{{\n  \"count\": {},\n  \"width_used\": {},\n  \"branches\": {},\n  \"wall_time\": {:.6}\n}}",
            report.count, report.width_used, report.branches, wall_time
        );
    }
    println!("{out}");
    Ok(())
}

fn run_decide(args: &DecideArgs) -> twmc::Result<()> {
    let prep = prepare(&args.solve)?;
    let opts = DecideOptions {
        seed: args.seed,
        target_error: args.target_error,
        max_table_entries: args.solve.budget,
    };
    let report = decide(&prep.inst, &prep.problem, &prep.nice, &opts)?;
    let mut doc = serde_json::to_value(&report)?;
    let obj = doc.as_object_mut().expect("report serializes to an object");
    obj.insert(
        "answer".into(),
        Value::String(String::from(if report.answer { "yes" } else { "no" })),
    );
    print_json(&doc, args.solve.json)?;
    Ok(())
}

fn run_generate(args: &GenerateArgs) -> twmc::Result<()> {
    let cnf = CnfFormula::parse_dimacs(&read_file(&args.cnf)?)?;
    let instance = generate(&cnf, args.cycle_length)?;
    fs::create_dir_all(&args.out)?;
    let stem = args
        .cnf
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| String::from("instance"));
    let graph_path = args.out.join(format!("{stem}.gr"));
    let td_path = args.out.join(format!("{stem}.td"));
    let index_path = args.out.join(format!("{stem}.index.json"));
    fs::write(&graph_path, instance.graph.to_gr_string())?;
    fs::write(&td_path, instance.decomposition.to_td_string())?;
    let mut index_text = serde_json::to_string_pretty(&instance.index_json())?;
    index_text.push('\n');
    fs::write(&index_path, index_text)?;

    let summary = json!({
        "graph": graph_path.to_string_lossy(),
        "decomposition": td_path.to_string_lossy(),
        "index": index_path.to_string_lossy(),
        "n": instance.graph.n(),
        "m": instance.graph.m(),
        "k": instance.k,
        "l": instance.index.l,
        "width": instance.decomposition.width(),
    });
    print_json(&summary, args.json)?;
    Ok(())
}

fn run_problems() -> twmc::Result<()> {
    for template in registry() {
        println!("{:32} {}", template.name(), template.summary());
    }
    Ok(())
}

fn print_json(doc: &Value, compact: bool) -> twmc::Result<()> {
    let text =
        if compact { serde_json::to_string(doc)? } else { serde_json::to_string_pretty(doc)? };
    println!("{text}");
    Ok(())
}

fn read_file(path: &Path) -> twmc::Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Picks the graph parser: an explicit choice wins; otherwise a `.gr`
/// extension or a PACE problem header selects the PACE format.
fn resolve_format(choice: FormatArg, path: &Path, text: &str) -> GraphFormat {
    match choice {
        FormatArg::Pace => GraphFormat::Pace,
        FormatArg::EdgeList => GraphFormat::EdgeList,
        FormatArg::Auto => {
            if path.extension().is_some_and(|ext| ext == "gr") {
                return GraphFormat::Pace;
            }
            let header = text
                .lines()
                .map(str::trim)
                .find(|line| !line.is_empty() && !line.starts_with('c') && !line.starts_with('#'));
            match header {
                Some(line) if line.starts_with("p ") => GraphFormat::Pace,
                _ => GraphFormat::EdgeList,
            }
        }
    }
}

/// Resolves `--problem`: a catalogue name first, then a specification file.
fn resolve_problem(value: &str) -> twmc::Result<Problem> {
    match lookup(value) {
        Ok(problem) => Ok(problem),
        Err(lookup_err) => {
            let path = Path::new(value);
            if path.exists() {
                parse_problem(&read_file(path)?)
            } else if value.contains(['/', '.']) {
                Err(Error::Io(io::Error::new(
                    io::ErrorKind::NotFound,
                    format!("problem specification file `{value}` not found"),
                )))
            } else {
                Err(lookup_err)
            }
        }
    }
}
