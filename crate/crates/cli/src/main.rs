//! `sbal`: structural balance analysis of signed graphs from the command line.
//!
//! Exit status: 0 on success (also when the solver hit its limits; a warning
//! goes to stderr), 2 for invalid or infeasible options, 3 when the input
//! cannot be read or parsed, 4 for internal failures.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use signed_balance::oracle::{family_oracle, Family};
use signed_balance::report::{analyze, AnalyzeOptions, Provenance};
use signed_balance::solver::{
    export_milp, render_lp, solve, solve_kcolour, solve_weighted, Cuts, Formulation, LpTarget, SolverConfig, Status,
};
use signed_balance::stats::{reshuffle_experiment, Statistic};
use signed_balance::{generate, parse_edge_list, read_edge_list, write_edge_list, FamilySpec, Signing, SignedGraph, Topology};

#[derive(Parser)]
#[command(name = "sbal", version, about = "Structural balance analysis of signed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every partial-balance measure of a graph, including the frustration index.
    Analyze {
        input: PathBuf,
        /// Longest cycle length counted for D and C (default: n).
        #[arg(long)]
        cycle_cap: Option<usize>,
        /// Stop enumerating after this many cycles; cycle measures are then skipped.
        #[arg(long, default_value_t = signed_balance::measures::DEFAULT_CYCLE_LIMIT)]
        cycle_limit: u64,
        /// Cycle lengths reported as D_k.
        #[arg(long, value_delimiter = ',', default_value = "3")]
        dk: Vec<usize>,
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        solver: SolverOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Exact frustration index with certificate colouring and frustrated edges.
    Frustration {
        input: PathBuf,
        /// Treat a weighted input as signs only.
        #[arg(long)]
        unweighted: bool,
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        solver: SolverOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Minimum frustration over partitions into at most k groups.
    Kbalance {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        solver: SolverOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Writes a random or structured signed graph as an edge list.
    Generate {
        /// Family and parameters, e.g. `gnm:n=20,m=40`, `ising-lattice:dims=10x10`,
        /// `hypercube:d=4`, `barabasi-albert:n=50,attach=2`, `random-regular:n=50,d=4`,
        /// `gnp:n=30,p=0.1`, `complete-all-negative:n=9`.
        #[arg(long)]
        family: String,
        /// Exactly floor(f·m) negative edges.
        #[arg(long, conflicts_with = "negative_prob")]
        negative_fraction: Option<f64>,
        /// Each edge negative with probability q.
        #[arg(long)]
        negative_prob: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Z-score of a statistic against sign-reshuffled replicas.
    Ztest {
        input: PathBuf,
        /// L, F, F_prime, X, D, C_inv_k, C_inv_fact, D_<k>, T, W, lambda or A.
        #[arg(long, default_value = "L")]
        stat: String,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        graph: GraphOpts,
        #[command(flatten)]
        solver: SolverOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Binary programming model of the frustration index in LP format.
    ExportModel {
        input: PathBuf,
        #[arg(long, value_enum)]
        form: FormArg,
        /// Comma-separated: triangle, degree, fix, parity.
        #[arg(long, default_value = "")]
        cuts: String,
        /// Refuse models with a quadratic objective.
        #[arg(long)]
        linear_only: bool,
        #[command(flatten)]
        graph: GraphOpts,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Closed-form measure values for complete graphs.
    Oracle {
        /// `a`: one negative edge, `c`: every edge negative.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    And,
    Xor,
    Abs,
    Ubqp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct GraphOpts {
    /// Keep only the largest connected component.
    #[arg(long)]
    giant_component: bool,
}

#[derive(Args)]
struct SolverOpts {
    /// Stop once the proven bound is within this many edges of the best solution.
    #[arg(long, default_value_t = 0)]
    gap: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    no_preprocessing: bool,
    #[arg(long)]
    no_colour_fixing: bool,
    #[arg(long)]
    no_degree_branching: bool,
    #[arg(long)]
    no_triangle_bound: bool,
    #[arg(long)]
    no_local_search: bool,
}

impl SolverOpts {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            time_limit: self.time_limit,
            gap: self.gap,
            use_preprocessing: !self.no_preprocessing,
            use_colour_fixing: !self.no_colour_fixing,
            use_degree_branching: !self.no_degree_branching,
            use_triangle_lower_bound: !self.no_triangle_bound,
            use_local_search_seed: !self.no_local_search,
            workers: self.workers,
            node_budget: self.node_budget,
        }
    }
}

#[derive(Args)]
struct OutputOpts {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Output file (default: stdout).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

enum Failure {
    Options(String),
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Options(_) => 2,
            Failure::Input(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Options(m) | Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<signed_balance::Error> for Failure {
    fn from(e: signed_balance::Error) -> Self {
        use signed_balance::Error as E;
        match e {
            E::Parse { .. }
            | E::DuplicateEdge { .. }
            | E::SelfLoop { .. }
            | E::InvalidWeight { .. }
            | E::NodeOutOfRange { .. } => Failure::Input(e.to_string()),
            E::InvalidSpec(_) | E::Unsupported(_) | E::LengthMismatch { .. } | E::Refused { .. } => {
                Failure::Options(e.to_string())
            }
            E::NoConvergence { .. } => Failure::Internal(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(finished) => {
            if !finished {
                eprintln!("warning: the solver stopped at its limits; the reported bounds are not proven optimal");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn load(path: &PathBuf, opts: &GraphOpts) -> Result<(SignedGraph, String), Failure> {
    let g = if path.as_os_str() == "-" {
        let text = std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        parse_edge_list(&text)
    } else {
        read_edge_list(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    let g = g.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let g = if opts.giant_component { g.giant_component().0 } else { g };
    Ok((g, path.display().to_string()))
}

fn emit(out: &OutputOpts, text: String, json: Value) -> Result<(), Failure> {
    let body = match out.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&json).expect("json value") + "\n",
    };
    write_output(out.output.as_ref(), &body)
}

fn write_output(path: Option<&PathBuf>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::Internal(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn provenance(g: &SignedGraph, input: &str, giant: bool, seed: Option<u64>, options: Value) -> Provenance {
    let mut p = Provenance::new(g, options);
    p.input = Some(input.to_string());
    p.giant_component = giant;
    p.seed = seed;
    p
}

fn solver_options(cfg: &SolverConfig) -> Value {
    serde_json::to_value(cfg).expect("config serialises")
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Analyze { input, cycle_cap, cycle_limit, dk, graph, solver, out } => {
            if let Some(k) = dk.iter().find(|&&k| k < 3) {
                return Err(Failure::Options(format!("--dk lengths must be at least 3, got {k}")));
            }
            let (g, name) = load(&input, &graph)?;
            let opts = AnalyzeOptions { cycle_cap, cycle_limit, dk, solver: solver.config() };
            let mut report = analyze(&g, &opts)?;
            report.provenance.input = Some(name);
            report.provenance.giant_component = graph.giant_component;
            let finished = report.solver.as_ref().is_none_or(|s| s.status == Status::Optimal);
            let json = serde_json::to_value(&report).expect("report serialises");
            emit(&out, report.to_text(), json)?;
            Ok(finished)
        }
        Command::Frustration { input, unweighted, graph, solver, out } => {
            let (g, name) = load(&input, &graph)?;
            let cfg = solver.config();
            let mut options = solver_options(&cfg);
            options["weighted"] = json!(g.is_weighted() && !unweighted);
            let prov = provenance(&g, &name, graph.giant_component, None, options);
            let (mut result, value, lower, status, colouring, edges, elapsed) = if g.is_weighted() && !unweighted {
                let r = solve_weighted(&g, &cfg)?;
                let v = serde_json::to_value(&r).expect("result serialises");
                (v, format!("{}", r.l), format!("{}", r.lower_bound), r.status, r.colouring.bits().to_vec(), r.frustrated_edges, r.elapsed_secs)
            } else {
                let r = solve(&g, &cfg)?;
                let v = serde_json::to_value(&r).expect("result serialises");
                (v, r.l.to_string(), r.lower_bound.to_string(), r.status, r.colouring.bits().to_vec(), r.frustrated_edges, r.elapsed_secs)
            };
            // timings would make repeated runs differ
            if let Some(obj) = result.as_object_mut() {
                obj.remove("elapsed_secs");
            }
            let mut text = prov.text_lines().join("\n");
            let _ = writeln!(text);
            let _ = writeln!(text, "L = {value}, status = {status}");
            let _ = writeln!(text, "lower bound = {lower}");
            let _ = writeln!(text, "nodes = {}, elapsed = {elapsed:.3}s", result["nodes"]);
            let group = |black: bool| -> String {
                (0..g.n()).filter(|&v| colouring[v] == black).map(|v| g.label(v)).collect::<Vec<_>>().join(" ")
            };
            let _ = writeln!(text, "white = {}", group(false));
            let _ = writeln!(text, "black = {}", group(true));
            let _ = writeln!(text, "frustrated edges ({}):", edges.len());
            for (u, v) in &edges {
                let _ = writeln!(text, "  {} {}", g.label(*u), g.label(*v));
            }
            emit(&out, text, json!({ "provenance": prov, "result": result }))?;
            Ok(status == Status::Optimal)
        }
        Command::Kbalance { input, k, graph, solver, out } => {
            let (g, name) = load(&input, &graph)?;
            let cfg = solver.config();
            let mut options = solver_options(&cfg);
            options["k"] = json!(k);
            let prov = provenance(&g, &name, graph.giant_component, None, options);
            let r = solve_kcolour(&g, k, &cfg)?;
            let mut result = serde_json::to_value(&r).expect("result serialises");
            if let Some(obj) = result.as_object_mut() {
                obj.remove("elapsed_secs");
            }
            let mut text = prov.text_lines().join("\n");
            let _ = writeln!(text);
            let _ = writeln!(text, "k = {k}, L = {}, status = {}", r.l, r.status);
            let _ = writeln!(text, "lower bound = {}", r.lower_bound);
            let _ = writeln!(text, "nodes = {}, elapsed = {:.3}s", r.nodes, r.elapsed_secs);
            let used = r.colours.iter().max().map_or(0, |c| c + 1);
            for c in 0..used {
                let members: Vec<String> = (0..g.n()).filter(|&v| r.colours[v] == c).map(|v| g.label(v)).collect();
                let _ = writeln!(text, "group {c} = {}", members.join(" "));
            }
            let _ = writeln!(text, "frustrated edges ({}):", r.frustrated_edges.len());
            for (u, v) in &r.frustrated_edges {
                let _ = writeln!(text, "  {} {}", g.label(*u), g.label(*v));
            }
            emit(&out, text, json!({ "provenance": prov, "result": result }))?;
            Ok(r.status == Status::Optimal)
        }
        Command::Generate { family, negative_fraction, negative_prob, seed, output } => {
            let topology: Topology = family.parse()?;
            let signing = match (negative_fraction, negative_prob) {
                (_, Some(q)) => Signing::Probability(q),
                (Some(f), None) => Signing::Fraction(f),
                (None, None) => Signing::default(),
            };
            let spec = FamilySpec { topology, signing, seed };
            let g = generate(&spec)?;
            let mut text = format!("# {} seed={}\n", spec.topology, seed);
            text.push_str(&write_edge_list(&g));
            write_output(output.as_ref(), &text)?;
            Ok(true)
        }
        Command::Ztest { input, stat, trials, seed, graph, solver, out } => {
            let stat: Statistic = stat.parse()?;
            let (g, name) = load(&input, &graph)?;
            let cfg = solver.config();
            let mut options = solver_options(&cfg);
            options["statistic"] = json!(stat.to_string());
            options["trials"] = json!(trials);
            let prov = provenance(&g, &name, graph.giant_component, Some(seed), options);
            let s = reshuffle_experiment(&g, stat, trials, seed, &cfg)?;
            let fmt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |v| v.to_string());
            let mut text = prov.text_lines().join("\n");
            let _ = writeln!(text);
            let _ = writeln!(text, "statistic = {}", s.statistic);
            let _ = writeln!(text, "observed = {}", s.observed);
            let _ = writeln!(text, "trials = {}, evaluated = {}, skipped = {}", s.trials, s.evaluated, s.skipped);
            let _ = writeln!(text, "mean = {}", fmt(s.mean));
            let _ = writeln!(text, "sd = {}", fmt(s.sd));
            let _ = writeln!(text, "z = {}", fmt(s.z));
            if !s.exact {
                let _ = writeln!(
                    text,
                    "# inexact: {} gap-terminated, {} budget-terminated solver runs",
                    s.gap_terminated, s.budget_terminated
                );
            }
            emit(&out, text, json!({ "provenance": prov, "summary": s }))?;
            Ok(s.budget_terminated == 0)
        }
        Command::ExportModel { input, form, cuts, linear_only, graph, output } => {
            let cuts: Cuts = cuts.parse()?;
            let formulation = match form {
                FormArg::And => Formulation::And,
                FormArg::Xor => Formulation::Xor,
                FormArg::Abs => Formulation::Abs,
                FormArg::Ubqp => Formulation::Ubqp,
            };
            let (g, _) = load(&input, &graph)?;
            let model = export_milp(&g, formulation, cuts)?;
            let target = if linear_only { LpTarget::LinearOnly } else { LpTarget::Standard };
            write_output(output.as_ref(), &render_lp(&model, target)?)?;
            Ok(true)
        }
        Command::Oracle { family, n, out } => {
            let family: Family = family.parse()?;
            let table = family_oracle(n, family)?;
            let mut text = format!(
                "# {} {}\n# family = {}, n = {}, m = {}, m_neg = {}\n",
                "sbal",
                signed_balance::report::VERSION,
                table.family,
                table.n,
                table.m,
                table.m_neg
            );
            for (name, value) in &table.rows {
                let _ = writeln!(text, "{name} = {value}");
            }
            let json = json!({
                "tool": "sbal",
                "version": signed_balance::report::VERSION,
                "oracle": table,
            });
            emit(&out, text, json)?;
            Ok(true)
        }
    }
}
