//! Command-line front end: `plan`, `bench` and `oracle`.
//!
//! Every flag can also be set through an environment variable named
//! `PRRT_` followed by the flag in upper snake case, e.g. `PRRT_SEED=4`.
//! Exit codes: 0 success, 1 no path found, 2 invalid input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prrt::bench::{
    grid_oracle_cost, path_json, render_svg, run_trials, stats_csv, tree_csv, SvgOptions, TrialSpec,
    DEFAULT_EPS_CONV, DEFAULT_NODE_CAP, DEFAULT_ORACLE_RESOLUTION,
};
use prrt::planner::{best_path, plan, Variant};
use prrt::scenarios::{resolve, Scenario};
use prrt::Error;

#[derive(Parser)]
#[command(name = "prrt", version, about = "RRT*, P-RRT* and APF planners with a benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one planner on one scenario.
    Plan(PlanArgs),
    /// Repeated seeded trials summarised as a table.
    Bench(BenchArgs),
    /// Grid-Dijkstra reference cost of a scenario.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct PlanArgs {
    /// Builtin scenario name or path to a scenario file.
    #[arg(long, env = "PRRT_SCENARIO")]
    scenario: String,
    /// rrtstar, prrtstar or apf. Defaults to the scenario's choice.
    #[arg(long, env = "PRRT_PLANNER")]
    planner: Option<Variant>,
    #[arg(long, env = "PRRT_MAX_ITERS")]
    max_iters: Option<usize>,
    #[arg(long, env = "PRRT_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "PRRT_NODE_CAP")]
    node_cap: Option<usize>,
    #[arg(long, env = "PRRT_GAMMA")]
    gamma: Option<f64>,
    /// Accept a gamma at or below the theoretical lower bound.
    #[arg(long, env = "PRRT_ALLOW_LOW_GAMMA")]
    allow_low_gamma: bool,
    /// Descent step length (RGD for prrtstar, gradient descent for apf).
    #[arg(long, env = "PRRT_LAMBDA")]
    lambda: Option<f64>,
    #[arg(long, env = "PRRT_RGD_K")]
    rgd_k: Option<usize>,
    /// Obstacle distance threshold (RGD stop distance, or APF repulsion range).
    #[arg(long, env = "PRRT_DOBS")]
    dobs: Option<f64>,
    #[arg(long, env = "PRRT_GOAL_BIAS")]
    goal_bias: Option<f64>,
    /// Step along the raw force instead of the unit force.
    #[arg(long, env = "PRRT_RAW_FORCE")]
    raw_force: bool,
    #[arg(long, env = "PRRT_OUT_PATH")]
    out_path: Option<PathBuf>,
    #[arg(long, env = "PRRT_OUT_TREE")]
    out_tree: Option<PathBuf>,
    #[arg(long, env = "PRRT_OUT_SVG")]
    out_svg: Option<PathBuf>,
    /// World axes drawn in the SVG, e.g. `0,2` for a side view of a 3D world.
    #[arg(long, env = "PRRT_SVG_AXES", value_delimiter = ',', num_args = 2, default_values_t = [0, 1])]
    svg_axes: Vec<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, env = "PRRT_SCENARIO")]
    scenario: String,
    #[arg(long, env = "PRRT_PLANNERS", value_delimiter = ',', default_value = "rrtstar,prrtstar")]
    planners: Vec<Variant>,
    #[arg(long, env = "PRRT_REPEATS", default_value_t = 50)]
    repeats: usize,
    #[arg(long, env = "PRRT_BASE_SEED", default_value_t = 0)]
    base_seed: u64,
    #[arg(long, env = "PRRT_NODE_CAP", default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Convergence threshold relative to the reference cost.
    #[arg(long, env = "PRRT_EPS_CONV", default_value_t = DEFAULT_EPS_CONV)]
    eps_conv: f64,
    /// Reference cost; computed with the grid oracle when omitted.
    #[arg(long, env = "PRRT_REFERENCE_COST")]
    reference_cost: Option<f64>,
    #[arg(long, env = "PRRT_RESOLUTION", default_value_t = DEFAULT_ORACLE_RESOLUTION)]
    resolution: f64,
    #[arg(long, env = "PRRT_OUT")]
    out: Option<PathBuf>,
    /// Run trials one at a time for clean timings.
    #[arg(long, env = "PRRT_SERIAL")]
    serial: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, env = "PRRT_SCENARIO")]
    scenario: String,
    #[arg(long, env = "PRRT_RESOLUTION", default_value_t = DEFAULT_ORACLE_RESOLUTION)]
    resolution: f64,
}

enum Failure {
    NoPath,
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn write(path: &Option<PathBuf>, contents: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, contents).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn load(name: &str) -> Result<Scenario, Failure> {
    resolve(name).map_err(|e| Failure::Invalid(format!("{name}: {e}")))
}

fn run_plan(a: PlanArgs) -> Result<(), Failure> {
    let scenario = load(&a.scenario)?;
    let mut cfg = scenario.config();
    if let Some(v) = a.planner {
        cfg.variant = v;
    }
    if let Some(n) = a.max_iters {
        cfg.max_iters = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.node_cap.is_some() {
        cfg.node_cap = a.node_cap;
    }
    if a.gamma.is_some() {
        cfg.gamma = a.gamma;
    }
    cfg.allow_low_gamma = a.allow_low_gamma;
    if let Some(l) = a.lambda {
        cfg.rgd.lambda = l;
        cfg.apf.lambda = l;
    }
    if let Some(k) = a.rgd_k {
        cfg.rgd.k = k;
    }
    if let Some(d) = a.dobs {
        cfg.rgd.d_obs_star = d;
        cfg.apf.d_obs_star = d;
    }
    if let Some(b) = a.goal_bias {
        cfg.goal_bias = b;
    }
    cfg.rgd.raw_force = a.raw_force;
    cfg.apf.raw_force = a.raw_force;

    for w in cfg.validate(&scenario.env)? {
        eprintln!("warning: {w}");
    }
    let (tree, metrics) = plan(&scenario.env, &cfg)?;
    let path = best_path(&tree, &scenario.env);

    write(&a.out_path, &path_json(path.as_ref()))?;
    write(&a.out_tree, &tree_csv(&tree))?;
    if a.out_svg.is_some() {
        let d = scenario.dimension();
        let axes = (a.svg_axes[0], a.svg_axes[1]);
        if axes.0 >= d || axes.1 >= d || axes.0 == axes.1 {
            return Err(Failure::Invalid(format!("svg axes {axes:?} do not fit a {d}D world")));
        }
        let opts = SvgOptions {
            axes,
            ..SvgOptions::default()
        };
        write(&a.out_svg, &render_svg(&tree, &scenario.env, path.as_ref(), opts))?;
    }

    println!("scenario    {}", scenario.name);
    println!("planner     {}", cfg.variant);
    println!("iterations  {}", metrics.iterations);
    println!("nodes       {}", metrics.node_count);
    println!("time        {:.4} s", metrics.elapsed);
    match (metrics.iters_first, metrics.final_cost) {
        (Some(first), Some(cost)) => {
            println!("first path  iteration {first}");
            println!("best cost   {cost:.6}");
            Ok(())
        }
        _ => {
            println!("best cost   -");
            Err(Failure::NoPath)
        }
    }
}

fn run_bench(a: BenchArgs) -> Result<(), Failure> {
    let scenario = load(&a.scenario)?;
    let reference = match a.reference_cost {
        Some(c) => c,
        None => grid_oracle_cost(&scenario.env, a.resolution)?,
    };
    eprintln!("reference cost {reference:.6}");
    let spec = TrialSpec {
        repeats: a.repeats,
        base_seed: a.base_seed,
        eps_conv: a.eps_conv,
        node_cap: a.node_cap,
        reference_cost: reference,
        parallel: !a.serial,
    };
    let mut rows = Vec::new();
    for variant in a.planners {
        let mut cfg = scenario.config();
        cfg.variant = variant;
        let (row, _) = run_trials(&scenario, &cfg, &spec)?;
        rows.push(row);
    }
    let table = stats_csv(&rows);
    print!("{table}");
    write(&a.out, &table)?;
    if rows.iter().all(|r| r.fail == r.repeats) {
        return Err(Failure::NoPath);
    }
    Ok(())
}

fn run_oracle(a: OracleArgs) -> Result<(), Failure> {
    let scenario = load(&a.scenario)?;
    match grid_oracle_cost(&scenario.env, a.resolution) {
        Ok(c) => {
            println!("{c:.6}");
            Ok(())
        }
        Err(e @ Error::Resolution { .. }) => Err(Failure::Invalid(e.to_string())),
        Err(e) => {
            eprintln!("{e}");
            Err(Failure::NoPath)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => run_plan(a),
        Command::Bench(a) => run_bench(a),
        Command::Oracle(a) => run_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NoPath) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
