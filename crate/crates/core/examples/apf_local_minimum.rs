//! The plain potential field planner stalls in the U-shaped trap of
//! `local_minima_2d`, while P-RRT* on the same world reaches the goal.

use prrt::planner::{plan, PlannerConfig, Variant};
use prrt::potential::{gradient_descent, ApfConfig};
use prrt::scenarios::builtin;

fn main() -> prrt::Result<()> {
    let scenario = builtin("local_minima_2d")?;
    let descent = gradient_descent(&scenario.env, &ApfConfig::default());
    let end = descent.path.last().expect("descent starts at the start");
    println!("APF: {:?} after {} steps at {:?}", descent.outcome, descent.path.len() - 1, end);

    let cfg = PlannerConfig {
        variant: Variant::PRrtStar,
        max_iters: 5_000,
        ..scenario.config()
    };
    let (_, m) = plan(&scenario.env, &cfg)?;
    println!("P-RRT*: first path at iteration {:?}, best cost {:?}", m.iters_first, m.final_cost);
    Ok(())
}
