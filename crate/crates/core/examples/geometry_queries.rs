//! Distance, segment and clearance queries against a box world.

use prrt::geometry::{distance, Aabb, Environment, State};

fn main() -> prrt::Result<()> {
    let env = Environment::new(
        Aabb::new([0.0, 0.0], [10.0, 10.0])?,
        vec![Aabb::new([4.0, 2.0], [6.0, 8.0])?],
        [1.0, 5.0],
        [9.0, 5.0],
        0.5,
    )?;
    let (a, b, c) = (State::from([1.0, 5.0]), State::from([9.0, 5.0]), State::from([5.0, 9.5]));
    println!("|ab| = {}", distance(&a, &b)?);
    println!("a -> b free: {}", env.segment_free(&a, &b));
    println!("a -> c free: {}", env.segment_free(&a, &c));
    let near = env.nearest_obstacle(&c);
    println!("clearance at {c:?}: {:.3} (closest point {:?})", env.obstacle_clearance(&c), near.closest);
    println!("free measure {:.1}", env.free_measure());
    Ok(())
}
