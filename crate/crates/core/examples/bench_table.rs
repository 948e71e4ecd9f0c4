//! Seeded trials of both planners on `local_minima_2d`, printed as the
//! CSV results table.

use prrt::bench::{grid_oracle_cost, run_trials, stats_csv, TrialSpec};
use prrt::planner::{PlannerConfig, Variant};
use prrt::scenarios::builtin;

fn main() -> prrt::Result<()> {
    let scenario = builtin("local_minima_2d")?;
    let reference = grid_oracle_cost(&scenario.env, 0.1)?;
    eprintln!("reference cost {reference:.4}");
    let spec = TrialSpec {
        repeats: 10,
        node_cap: 50_000,
        ..TrialSpec::new(reference)
    };
    let mut rows = Vec::new();
    for variant in [Variant::RrtStar, Variant::PRrtStar] {
        let cfg = PlannerConfig { variant, ..scenario.config() };
        rows.push(run_trials(&scenario, &cfg, &spec)?.0);
    }
    print!("{}", stats_csv(&rows));
    Ok(())
}
