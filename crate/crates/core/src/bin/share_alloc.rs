use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use share_alloc::envy::{
    min_envy_fpt, solve_ersa_auto, solve_ersa_bounded_shared, solve_ersa_fpt_agents, solve_ersa_identical_clique,
    solve_ersa_treewidth, NiceTreeDecomposition, TreeDecomposition,
};
use share_alloc::error::{Error, Result};
use share_alloc::io::{format_ratio, instance_to_json, parse_ratio, read_instance, read_sharing, sharing_to_json};
use share_alloc::model::{envious_agents, sharing_cost, validate_sharing, welfare, Instance, Rational, Sharing};
use share_alloc::oracle::{max_welfare_bruteforce, min_envy_bruteforce};
use share_alloc::random::{generate_random, AttentionModel, GraphModel};
use share_alloc::reductions::{
    gen_3sat_ersa, gen_clique_ersa, gen_independent_set_ersa, gen_multicolored_clique_ersa, gen_n3dm_ewsa, Cnf, Graph,
};
use share_alloc::welfare::{maximize_ewsa_simple, solve_ewsa_bounded_exact, solve_uwsa};

#[derive(Parser)]
#[command(name = "share-alloc", version, about = "Exact solvers for sharing indivisible resources on a social network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance and print the answer as JSON.
    Solve(SolveArgs),
    /// Check a sharing against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        sharing: PathBuf,
    },
    /// Write a random instance or a reduction gadget.
    Gen(GenArgs),
    /// Solve every instance in a directory and write a JSON report.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    Uwsa,
    Ewsa,
    Ersa,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Matching,
    FptAgents,
    Treewidth,
    IdenticalClique,
    BoundedShared,
    Brute,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    /// Sharings allowed per agent.
    #[arg(long, default_value_t = 1)]
    b: usize,
    /// Welfare threshold (`p/q` or integer) or envy bound.
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Auto)]
    algorithm: AlgorithmArg,
    #[arg(long)]
    instance: PathBuf,
    /// Where to write the witness sharing on a yes answer.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Tree decomposition of the sharing graph for `treewidth`.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Shared-resource limit for `bounded-shared`; defaults to half the agents.
    #[arg(long)]
    s_max: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Gadget {
    IndependentSet,
    #[value(name = "3sat")]
    Sat,
    MulticoloredClique,
    Clique,
    N3dm,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, conflicts_with = "gadget", required_unless_present = "gadget")]
    random: bool,
    #[arg(long, value_enum)]
    gadget: Option<Gadget>,
    /// Source problem for `--gadget`, as JSON.
    #[arg(long, requires = "gadget")]
    source: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    agents: usize,
    #[arg(long, default_value_t = 5)]
    resources: usize,
    #[arg(long, default_value = "clique")]
    sharing: String,
    #[arg(long, default_value = "same_as_sharing_bidirected")]
    attention: String,
    #[arg(long, default_value_t = 10)]
    u_max: u64,
    /// Instance file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Outcome {
    yes: bool,
    value: Value,
    algorithm: &'static str,
    witness: Option<Sharing>,
}

fn envy_bound(k: &str) -> Result<usize> {
    let k: i64 =
        k.trim().parse().map_err(|_| Error::Precondition(format!("envy bound must be an integer, got {k:?}")))?;
    usize::try_from(k).map_err(|_| Error::Precondition(format!("k must be nonnegative, got {k}")))
}

fn welfare_bound(k: &str) -> Result<Rational> {
    parse_ratio(k).ok_or_else(|| Error::Precondition(format!("threshold must be an integer or p/q, got {k:?}")))
}

fn not_for(algorithm: &str, problem: &str) -> Error {
    Error::Precondition(format!("{algorithm} does not solve {problem}"))
}

fn solve_uwsa_cmd(inst: &Instance, args: &SolveArgs) -> Result<Outcome> {
    let k = welfare_bound(&args.k)?;
    match args.algorithm {
        AlgorithmArg::Auto | AlgorithmArg::Matching => {
            let s = solve_uwsa(inst, args.b, k)?;
            Ok(Outcome {
                yes: s.yes,
                value: json!(format_ratio(s.optimum)),
                algorithm: "matching",
                witness: Some(s.witness),
            })
        }
        AlgorithmArg::Brute => {
            let w = max_welfare_bruteforce(inst, args.b)?;
            Ok(Outcome {
                yes: w.utilitarian >= k,
                value: json!(format_ratio(w.utilitarian)),
                algorithm: "brute",
                witness: Some(w.utilitarian_witness),
            })
        }
        _ => Err(not_for("this algorithm", "uwsa")),
    }
}

fn solve_ewsa_cmd(inst: &Instance, args: &SolveArgs) -> Result<Outcome> {
    let k = welfare_bound(&args.k)?;
    match (args.algorithm, args.b) {
        (AlgorithmArg::Auto | AlgorithmArg::Matching, 1) => {
            let (v, w) = maximize_ewsa_simple(inst)?;
            Ok(Outcome { yes: v >= k, value: json!(format_ratio(v)), algorithm: "matching", witness: Some(w) })
        }
        (AlgorithmArg::Matching, _) => Err(Error::Precondition("matching solves ewsa only for b = 1".into())),
        (AlgorithmArg::Auto, b) => {
            let w = solve_ewsa_bounded_exact(inst, b, k)?;
            Ok(Outcome { yes: w.is_some(), value: Value::Null, algorithm: "exact-search", witness: w })
        }
        (AlgorithmArg::Brute, b) => {
            let w = max_welfare_bruteforce(inst, b)?;
            Ok(Outcome {
                yes: w.egalitarian >= k,
                value: json!(format_ratio(w.egalitarian)),
                algorithm: "brute",
                witness: Some(w.egalitarian_witness),
            })
        }
        _ => Err(not_for("this algorithm", "ewsa")),
    }
}

fn read_decomposition(path: &Path, inst: &Instance) -> Result<NiceTreeDecomposition> {
    let text = std::fs::read_to_string(path)?;
    let td: TreeDecomposition = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line().max(1),
        column: e.column().max(1),
        message: e.to_string(),
    })?;
    NiceTreeDecomposition::from_tree_decomposition(&td, inst.agent_count(), inst.sharing_edges())
}

fn solve_ersa_cmd(inst: &Instance, args: &SolveArgs) -> Result<Outcome> {
    if args.b != 1 {
        return Err(Error::Precondition("ersa uses simple sharings, b must be 1".into()));
    }
    let k = envy_bound(&args.k)?;
    let exact = |min: usize, w: Sharing, algorithm| Outcome {
        yes: min <= k,
        value: json!(min),
        algorithm,
        witness: (min <= k).then_some(w),
    };
    let decision =
        |w: Option<Sharing>, algorithm| Outcome { yes: w.is_some(), value: Value::Null, algorithm, witness: w };
    Ok(match args.algorithm {
        AlgorithmArg::Auto => {
            let a = solve_ersa_auto(inst, k as i64)?;
            Outcome { value: json!(a.min_envy), ..decision(a.witness, a.algorithm.name()) }
        }
        AlgorithmArg::FptAgents if k == 0 => {
            let (min, w) = min_envy_fpt(inst)?;
            exact(min, w, "fpt-agents")
        }
        AlgorithmArg::FptAgents => decision(solve_ersa_fpt_agents(inst, k)?, "fpt-agents"),
        AlgorithmArg::Treewidth => {
            let nice = match &args.decomposition {
                Some(p) => read_decomposition(p, inst)?,
                None => share_alloc::envy::nice_decomposition(inst),
            };
            let a = solve_ersa_treewidth(inst, &nice, k)?;
            exact(a.min_envy, a.witness, "treewidth")
        }
        AlgorithmArg::IdenticalClique => {
            let a = solve_ersa_identical_clique(inst, k)?;
            exact(a.min_envy, a.witness, "identical-clique")
        }
        AlgorithmArg::BoundedShared => {
            let s_max = args.s_max.unwrap_or(inst.agent_count() / 2);
            decision(solve_ersa_bounded_shared(inst, k, s_max)?, "bounded-shared")
        }
        AlgorithmArg::Brute => {
            let (min, w) = min_envy_bruteforce(inst, 1)?;
            exact(min, w, "brute")
        }
        AlgorithmArg::Matching => return Err(not_for("matching", "ersa")),
    })
}

fn solve(args: &SolveArgs) -> Result<ExitCode> {
    let inst = read_instance(&args.instance)?;
    let start = Instant::now();
    let out = match args.problem {
        Problem::Uwsa => solve_uwsa_cmd(&inst, args)?,
        Problem::Ewsa => solve_ewsa_cmd(&inst, args)?,
        Problem::Ersa => solve_ersa_cmd(&inst, args)?,
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    if let (true, Some(path), Some(w)) = (out.yes, &args.witness, &out.witness) {
        std::fs::write(path, sharing_to_json(w))?;
    }
    println!(
        "{}",
        json!({
            "answer": if out.yes { "yes" } else { "no" },
            "value": out.value,
            "algorithm": out.algorithm,
            "elapsed_ms": elapsed_ms,
        })
    );
    Ok(if out.yes { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify(instance: &Path, sharing: &Path) -> Result<ExitCode> {
    let inst = read_instance(instance)?;
    let s = match read_sharing(sharing, &inst) {
        Err(Error::InvalidSharing(v)) => {
            let violations: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            println!("{}", json!({ "valid": false, "violations": violations }));
            return Ok(ExitCode::from(1));
        }
        other => other?,
    };
    validate_sharing(&inst, &s).map_err(Error::InvalidSharing)?;
    let envy = envious_agents(&inst, &s)?;
    let w = welfare(&inst, &s)?;
    let cost = sharing_cost(&inst, &s)?;
    let within_budget = inst.extension().budget.allows(cost);
    println!(
        "{}",
        json!({
            "valid": within_budget,
            "envious": envy.count(),
            "envious_agents": envy.envious,
            "utilitarian": format_ratio(w.utilitarian),
            "egalitarian": format_ratio(w.egalitarian),
            "cost": cost,
            "within_budget": within_budget,
        })
    );
    Ok(if within_budget { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSource {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    l: usize,
    #[serde(default)]
    coloring: Option<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CnfSource {
    variables: usize,
    clauses: Vec<Vec<i32>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct N3dmSource {
    x: Vec<u64>,
    y: Vec<u64>,
    z: Vec<u64>,
    t: u64,
}

fn read_source<T: serde::de::DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| Error::Precondition("--gadget needs --source".into()))?;
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line().max(1),
        column: e.column().max(1),
        message: e.to_string(),
    })
}

fn source_graph(src: &GraphSource) -> Result<Graph> {
    Graph::new(src.vertices, src.edges.iter().map(|&[u, v]| (u, v)))
}

fn generate(args: &GenArgs) -> Result<ExitCode> {
    let source = args.source.as_deref();
    let (inst, target) = match args.gadget {
        None => {
            let sharing: GraphModel = args.sharing.parse()?;
            let attention: AttentionModel = args.attention.parse()?;
            let inst = generate_random(args.seed, args.agents, args.resources, sharing, attention, args.u_max)?;
            (inst, Value::Null)
        }
        Some(Gadget::IndependentSet | Gadget::Clique) => {
            let src: GraphSource = read_source(source)?;
            let g = source_graph(&src)?;
            let gadget = if matches!(args.gadget, Some(Gadget::Clique)) {
                gen_clique_ersa(&g, src.l)?
            } else {
                gen_independent_set_ersa(&g, src.l)?
            };
            (gadget.instance, json!({ "problem": "ersa", "k": gadget.k }))
        }
        Some(Gadget::MulticoloredClique) => {
            let src: GraphSource = read_source(source)?;
            let coloring = src
                .coloring
                .as_deref()
                .ok_or_else(|| Error::Precondition("multicolored-clique needs a \"coloring\"".into()))?;
            let gadget = gen_multicolored_clique_ersa(&source_graph(&src)?, coloring, src.l)?;
            (gadget.instance, json!({ "problem": "ersa", "k": gadget.k }))
        }
        Some(Gadget::Sat) => {
            let src: CnfSource = read_source(source)?;
            let gadget = gen_3sat_ersa(&Cnf { variables: src.variables, clauses: src.clauses })?;
            (gadget.instance, json!({ "problem": "ersa", "k": gadget.k }))
        }
        Some(Gadget::N3dm) => {
            let src: N3dmSource = read_source(source)?;
            let gadget = gen_n3dm_ewsa(&src.x, &src.y, &src.z, src.t)?;
            (gadget.instance, json!({ "problem": "ewsa", "b": gadget.b, "k": format_ratio(gadget.k) }))
        }
    };
    let doc = instance_to_json(&inst);
    match &args.out {
        Some(path) => {
            std::fs::write(path, doc)?;
            println!("{}", json!({ "out": path, "target": target }));
        }
        None => {
            print!("{doc}");
            if !target.is_null() {
                eprintln!("{target}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(corpus: &Path, report: &Path) -> Result<ExitCode> {
    let r = share_alloc::bench::run_bench(corpus)?;
    let text = serde_json::to_string_pretty(&r).expect("reports always serialize");
    std::fs::write(report, text + "\n")?;
    let failed = r.records.iter().filter(|x| !x.errors.is_empty()).count();
    println!("{}", json!({ "instances": r.records.len(), "with_errors": failed, "report": report }));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Verify { instance, sharing } => verify(instance, sharing),
        Command::Gen(args) => generate(args),
        Command::Bench { corpus, report } => bench(corpus, report),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::TooLarge(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
