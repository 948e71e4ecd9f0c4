//! Grows RRT* and P-RRT* trees with the same budget on `cluttered_2d` and
//! writes one SVG per planner. Usage: `compare_svg [out_dir]`.

use std::path::PathBuf;

use prrt::bench::{render_svg, SvgOptions};
use prrt::planner::{best_path, plan, PlannerConfig, Variant};
use prrt::scenarios::builtin;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    let scenario = builtin("cluttered_2d")?;
    for variant in [Variant::RrtStar, Variant::PRrtStar] {
        let cfg = PlannerConfig {
            variant,
            max_iters: 20_000,
            seed: 1,
            ..scenario.config()
        };
        let (tree, m) = plan(&scenario.env, &cfg)?;
        let path = best_path(&tree, &scenario.env);
        let file = out.join(format!("cluttered_{variant}.svg"));
        let opts = SvgOptions { scale: 5.0, ..SvgOptions::default() };
        std::fs::write(&file, render_svg(&tree, &scenario.env, path.as_ref(), opts))?;
        println!("{variant:>8}: {} vertices, best {:?} -> {}", tree.len(), m.final_cost, file.display());
    }
    Ok(())
}
