//! Where randomized gradient descent moves uniform samples: counts of how
//! many end in the goal ball and how many stop against an obstacle.

use prrt::planner::{Planner, PlannerConfig, Variant};
use prrt::potential::{rgd, RgdConfig};
use prrt::scenarios::builtin;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> prrt::Result<()> {
    let scenario = builtin("local_minima_2d")?;
    let env = &scenario.env;
    let (planner, _) = Planner::new(env, PlannerConfig::new(Variant::RrtStar))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = RgdConfig::default();
    let (mut in_goal, mut blocked, mut moved) = (0, 0, 0.0);
    let n = 10_000;
    for _ in 0..n {
        let x = planner.sample(&mut rng)?;
        let y = rgd(&x, env, env.goal_center(), &cfg)?;
        moved += x.dist(&y);
        if env.in_goal(&y) {
            in_goal += 1;
        } else if env.obstacle_clearance(&y) <= cfg.d_obs_star {
            blocked += 1;
        }
    }
    println!("{n} samples: {in_goal} end in the goal, {blocked} stop at an obstacle");
    println!("mean displacement {:.3} (cap k * lambda = {:.1})", moved / n as f64, cfg.k as f64 * cfg.lambda);
    Ok(())
}
