//! `cqb`: exact min-cut graph partitioning from the command line.
//!
//! Exit status is 0 on success, 1 on errors and 2 when `solve` stops at a
//! node or time limit (the report is still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cqb::graph::{gen_debruijn, gen_mixed, gen_planar, gen_random, gen_toroidal, write_edge_list};
use cqb::optimality::{check_local_min, check_strict, descent_direction, Move, Tolerances, Witness};
use cqb::oracle::BRUTE_FORCE_LIMIT;
use cqb::{
    brute_force, load_graph, make_qp, root_bound, solve, BoundVariant, Graph, GraphFormat, PartitionSpec, Quadratic,
    SolveStatus, SolverConfig,
};

#[derive(Parser)]
#[command(name = "cqb", version, about = "Exact min-cut graph partitioning by convex quadratic branch and bound")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve to optimality (or until a limit) and report the partition.
    Solve(SolveArgs),
    /// Root lower bounds under both shifts, plus the exact optimum for small graphs.
    Bound(BoundArgs),
    /// Write a generated instance as an edge list.
    Generate(GenerateArgs),
    /// Optimality conditions at a point read from a file.
    Check(CheckArgs),
    /// Exhaustive optimum for graphs with at most 24 vertices.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file (edge list or Matrix Market).
    #[arg(long, conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_parser = ["el", "mtx"])]
    format: Option<String>,
    /// Generated instance: toroidal:HxK, planar:HxK, mixed:HxK, random:N:DENSITY, debruijn:ORDER.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SpecArgs {
    /// Lower bound on the size of side 1.
    #[arg(long)]
    l: Option<usize>,
    /// Upper bound on the size of side 1.
    #[arg(long)]
    u: Option<usize>,
    /// Shorthand for l = u = floor(n/2); also the default when no bounds are given.
    #[arg(long, conflicts_with_all = ["l", "u"])]
    bisection: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value = "sdp", value_parser = ["eig", "sdp"])]
    bound: String,
    /// Stationarity tolerance for the relaxations.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the JSON report here ("-" for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// Whitespace- or comma-separated coordinates, one per vertex.
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    json: Option<PathBuf>,
}

fn generate(kind: &str, seed: u64) -> Result<Graph> {
    let (family, args) = kind.split_once(':').with_context(|| format!("expected KIND:ARGS, got '{kind}'"))?;
    let grid = |s: &str| -> Result<(usize, usize)> {
        let (h, k) = s.split_once('x').with_context(|| format!("expected HxK, got '{s}'"))?;
        Ok((h.parse()?, k.parse()?))
    };
    let g = match family {
        "toroidal" => {
            let (h, k) = grid(args)?;
            gen_toroidal(h, k, seed)?
        }
        "planar" => {
            let (h, k) = grid(args)?;
            gen_planar(h, k, seed)?
        }
        "mixed" => {
            let (h, k) = grid(args)?;
            gen_mixed(h, k, seed)?
        }
        "random" => {
            let (n, d) = args.split_once(':').with_context(|| format!("expected random:N:DENSITY, got '{kind}'"))?;
            let mut density: f64 = d.parse()?;
            if density > 1.0 {
                density /= 100.0;
            }
            gen_random(n.parse()?, density, seed)?
        }
        "debruijn" => gen_debruijn(args.parse()?)?,
        other => bail!("unknown generator '{other}'"),
    };
    Ok(g)
}

fn load(args: &GraphArgs) -> Result<Graph> {
    match (&args.input, &args.gen) {
        (Some(path), _) => {
            let format = match args.format.as_deref() {
                Some(f) => f.parse()?,
                None => GraphFormat::from_path(path),
            };
            load_graph(path, format).with_context(|| format!("reading {}", path.display()))
        }
        (None, Some(kind)) => generate(kind, args.seed),
        (None, None) => bail!("one of --input or --gen is required"),
    }
}

fn partition_spec(args: &SpecArgs, n: usize) -> Result<PartitionSpec> {
    if args.bisection {
        return Ok(PartitionSpec::bisection(n));
    }
    Ok(match (args.l, args.u) {
        (None, None) => PartitionSpec::bisection(n),
        (l, u) => PartitionSpec::new(l.unwrap_or(0), u.unwrap_or(n), n)?,
    })
}

fn emit<R: Serialize>(report: &R, path: Option<&Path>) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let text = serde_json::to_string_pretty(report)?;
    if path == Path::new("-") {
        println!("{text}");
    } else {
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Partition {
    side0: Vec<usize>,
    side1: Vec<usize>,
}

#[derive(Serialize)]
struct TracePoint {
    node: u64,
    value: f64,
    elapsed_s: f64,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct SolveReport {
    n: usize,
    #[serde(rename = "density%")]
    density_percent: f64,
    l: usize,
    u: usize,
    bound_variant: String,
    opt_value: f64,
    partition: Partition,
    node_count: u64,
    wall_time_s: f64,
    status: String,
    root_LB: f64,
    lower_bound: f64,
    incumbent_trace: Vec<TracePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift_warning: Option<String>,
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let g = load(&args.graph)?;
    let spec = partition_spec(&args.spec, g.n())?;
    let config = SolverConfig {
        bound: args.bound.parse::<BoundVariant>()?,
        tol: args.tol,
        max_nodes: args.max_nodes,
        time_limit: args.time_limit.map(Duration::from_secs_f64),
        threads: args.threads.max(1),
        ..SolverConfig::default()
    };
    let sol = solve(&g, spec, &config)?;
    let report = SolveReport {
        n: g.n(),
        density_percent: g.density_percent(),
        l: spec.lower,
        u: spec.upper,
        bound_variant: config.bound.to_string(),
        opt_value: sol.value,
        partition: Partition { side0: sol.side0.clone(), side1: sol.side1.clone() },
        node_count: sol.node_count,
        wall_time_s: sol.elapsed.as_secs_f64(),
        status: sol.status.to_string(),
        root_LB: sol.root_lower_bound,
        lower_bound: sol.lower_bound,
        incumbent_trace: sol
            .incumbent_trace
            .iter()
            .map(|t| TracePoint { node: t.node, value: t.value, elapsed_s: t.elapsed_s })
            .collect(),
        shift_warning: sol.shift_warning.clone(),
    };
    println!(
        "{}: value {} with |side1| = {}, {} nodes, {:.3} s",
        sol.status,
        sol.value,
        sol.side1.len(),
        sol.node_count,
        report.wall_time_s
    );
    emit(&report, args.json.as_deref())?;
    Ok(if sol.status == SolveStatus::Optimal { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct BoundReport {
    n: usize,
    l: usize,
    u: usize,
    LB1: f64,
    LB2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    opt: Option<f64>,
}

fn cmd_bound(args: BoundArgs) -> Result<ExitCode> {
    let g = load(&args.graph)?;
    let spec = partition_spec(&args.spec, g.n())?;
    let config = SolverConfig { tol: args.tol, ..SolverConfig::default() };
    let lb1 = root_bound(&g, spec, BoundVariant::Eig, &config)?.lower_bound;
    let lb2 = root_bound(&g, spec, BoundVariant::Sdp, &config)?.lower_bound;
    let opt = if g.n() <= BRUTE_FORCE_LIMIT { Some(brute_force(&g, spec)?.value) } else { None };
    println!("LB1 {lb1:.6}  LB2 {lb2:.6}{}", opt.map(|o| format!("  opt {o}")).unwrap_or_default());
    emit(&BoundReport { n: g.n(), l: spec.lower, u: spec.upper, LB1: lb1, LB2: lb2, opt }, args.json.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_generate(args: GenerateArgs) -> Result<ExitCode> {
    let g = generate(&args.gen, args.seed)?;
    let text = write_edge_list(&g);
    match &args.output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} vertices, {} edges to {}", g.n(), g.edge_count(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn read_point(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad coordinate '{t}'")))
        .collect()
}

#[derive(Serialize)]
struct Direction {
    /// Nonzero entries of `d`.
    entries: Vec<(usize, i8)>,
    alpha_max: f64,
    f_before: f64,
    f_after: f64,
}

#[derive(Serialize)]
struct CheckReport {
    n: usize,
    f: f64,
    lambda: f64,
    p1: bool,
    p2: bool,
    p3: bool,
    p4: Option<bool>,
    c1: bool,
    c2: bool,
    c3: bool,
    stationary: bool,
    local_min: bool,
    strict_local_min: bool,
    witness: Option<String>,
    descent: Option<Direction>,
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode> {
    let g = load(&args.graph)?;
    let spec = partition_spec(&args.spec, g.n())?;
    let q = make_qp(&g, spec)?;
    let x = read_point(&args.point)?;
    let tol = Tolerances::default();
    let a = check_local_min(&q, &x, tol)?;
    let s = check_strict(&q, &x, tol)?;
    let descent = descent_direction(&q, &x, &a, tol)?.map(|step| {
        let entries = match step.direction {
            Move::Single { i, sign } => vec![(i, sign)],
            Move::Pair { i, j, sign } => vec![(i, sign), (j, -sign)],
        };
        let y = step.direction.apply(&x, step.alpha_max);
        Direction { entries, alpha_max: step.alpha_max, f_before: q.value(&x), f_after: q.value(&y) }
    });
    let witness = a.witness.map(|w| match w {
        Witness::Kkt { gap } => format!("first-order conditions fail (gap {gap:.3e})"),
        Witness::P2 { i, j } => format!("P2 fails for free pair ({i}, {j})"),
        Witness::P3 { i, j } => format!("P3 fails for pair ({i}, {j})"),
        Witness::P4 { i, case } => format!("P4 fails at {i} ({case:?})"),
    });
    let report = CheckReport {
        n: x.len(),
        f: q.value(&x),
        lambda: a.lambda,
        p1: a.p1,
        p2: a.p2,
        p3: a.p3,
        p4: a.p4,
        c1: s.c1,
        c2: s.c2,
        c3: s.c3,
        stationary: a.is_stationary(),
        local_min: a.is_local_min(),
        strict_local_min: a.is_local_min() && s.is_strict(),
        witness,
        descent,
    };
    println!(
        "P1 {} P2 {} P3 {} P4 {}  C1 {} C2 {} C3 {}  local min: {}",
        a.p1,
        a.p2,
        a.p3,
        a.p4.map_or("n/a".to_string(), |b| b.to_string()),
        s.c1,
        s.c2,
        s.c3,
        report.local_min
    );
    if let Some(d) = &report.descent {
        println!("descent direction {:?}: f {} -> {} at step {}", d.entries, d.f_before, d.f_after, d.alpha_max);
    }
    emit(&report, args.json.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleReport {
    n: usize,
    l: usize,
    u: usize,
    opt_value: f64,
    partition: Partition,
    feasible_count: u64,
    wall_time_s: f64,
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let g = load(&args.graph)?;
    let spec = partition_spec(&args.spec, g.n())?;
    let started = Instant::now();
    let s = brute_force(&g, spec)?;
    let side1: Vec<usize> = (0..g.n()).filter(|&i| s.x[i] == 1.0).collect();
    let side0: Vec<usize> = (0..g.n()).filter(|&i| s.x[i] == 0.0).collect();
    println!("opt {} over {} feasible vectors", s.value, s.feasible_count);
    let report = OracleReport {
        n: g.n(),
        l: spec.lower,
        u: spec.upper,
        opt_value: s.value,
        partition: Partition { side0, side1 },
        feasible_count: s.feasible_count,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    emit(&report, args.json.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
