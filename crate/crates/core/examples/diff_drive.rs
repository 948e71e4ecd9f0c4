//! Differential-drive planning: edges are RK4-integrated unicycle arcs,
//! and every stored trajectory satisfies the no-slip constraint.

use prrt::kinodynamic::{integrate, Control, DriveState};
use prrt::planner::{best_path, plan, PlannerConfig};
use prrt::scenarios::builtin;

fn main() -> prrt::Result<()> {
    let arc = integrate(DriveState::new(0.0, 0.0, 0.0), Control { v: 1.0, omega: 0.5 }, 0.02, 100);
    let end = arc.last().unwrap();
    println!("2 s arc ends at ({:.4}, {:.4}, {:.4})", end.x, end.y, end.theta);

    let scenario = builtin("diffdrive_local_minima")?;
    let cfg = PlannerConfig {
        max_iters: 40_000,
        target_cost: Some(f64::INFINITY),
        ..scenario.config()
    };
    let (tree, m) = plan(&scenario.env, &cfg)?;
    println!("first path at iteration {:?}, {} vertices", m.iters_first, tree.len());
    println!("max no-slip residual {:.2e}", tree.max_constraint_residual());
    if let Some(p) = best_path(&tree, &scenario.env) {
        println!("path length {:.3} over {} integrated states", p.cost, p.states.len());
    }
    Ok(())
}
