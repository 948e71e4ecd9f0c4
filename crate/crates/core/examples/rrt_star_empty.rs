//! RRT* in an empty square: the best cost approaches the straight-line
//! distance as the tree grows.

use prrt::geometry::{Aabb, Environment};
use prrt::planner::{best_path, Planner, PlannerConfig, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> prrt::Result<()> {
    let env = Environment::new(Aabb::new([0.0, 0.0], [20.0, 20.0])?, vec![], [1.0, 1.0], [19.0, 19.0], 0.5)?;
    let straight = env.start().dist(env.goal_center()) - env.goal_radius();
    let (mut planner, _) = Planner::new(&env, PlannerConfig::new(Variant::RrtStar))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 1..=20_000 {
        let x = planner.sample(&mut rng)?;
        planner.step_with_sample(&x);
        if i % 4_000 == 0 {
            let best = planner.best_cost().map_or("-".into(), |c| format!("{c:.4}"));
            println!("iter {i:>6}  vertices {:>6}  best {best}  (straight {straight:.4})", planner.tree().len());
        }
    }
    let path = best_path(planner.tree(), &env).expect("an empty world is solved");
    println!("path has {} vertices", path.vertices.len());
    Ok(())
}
