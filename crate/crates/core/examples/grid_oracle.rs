//! Reference costs from the grid oracle at two resolutions, next to the
//! straight-line lower bound. A coarse grid may have no cell center inside
//! a small goal ball; that entry prints as `-`.

use prrt::bench::grid_oracle_cost;
use prrt::scenarios::{builtin, BUILTIN_NAMES};

fn main() -> prrt::Result<()> {
    println!("{:<24} {:>10} {:>10} {:>10}", "scenario", "straight", "coarse", "fine");
    for name in BUILTIN_NAMES {
        let s = builtin(name)?;
        let (coarse, fine) = if s.dimension() == 2 { (0.5, 0.1) } else { (1.0, 0.25) };
        let cost = |h: f64| grid_oracle_cost(&s.env, h).map_or("-".to_string(), |c| format!("{c:.3}"));
        println!("{name:<24} {:>10.3} {:>10} {:>10}", s.straight_line_bound(), cost(coarse), cost(fine));
    }
    Ok(())
}
