mod common;

use common::square;
use prrt::bench::{convergence_rate, grid_oracle_cost, median, render_svg, run_trials, tree_csv, SvgOptions, TrialSpec};
use prrt::geometry::{Aabb, State};
use prrt::planner::{best_path, plan, IndexKind, Planner, PlannerConfig, Variant};
use prrt::scenarios::{builtin, BUILTIN_NAMES};

/// Cheapest tree over the given vertices by brute force: every assignment
/// of parents, keeping those that reach the root without cycles over free
/// segments. Returns (parent per vertex, cost per vertex).
fn brute_force_tree(pts: &[State], free: impl Fn(usize, usize) -> bool) -> (Vec<usize>, Vec<f64>) {
    let n = pts.len();
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    let combos = (n - 1).pow((n - 1) as u32);
    for code in 0..combos {
        let mut parent = vec![0; n];
        let mut c = code;
        for p in parent.iter_mut().skip(1) {
            *p = c % (n - 1);
            c /= n - 1;
        }
        // Parent digit k means vertex k, skipping the vertex itself.
        for (v, p) in parent.iter_mut().enumerate().skip(1) {
            if *p >= v {
                *p += 1;
            }
        }
        if (1..n).any(|v| !free(parent[v], v)) {
            continue;
        }
        let mut cost = vec![f64::NAN; n];
        cost[0] = 0.0;
        let mut ok = true;
        for v in 1..n {
            let mut chain = vec![v];
            let mut u = v;
            while u != 0 && cost[u].is_nan() {
                u = parent[u];
                if chain.contains(&u) {
                    ok = false;
                    break;
                }
                chain.push(u);
            }
            if !ok {
                break;
            }
            for w in chain.into_iter().rev() {
                if cost[w].is_nan() {
                    cost[w] = cost[parent[w]] + pts[parent[w]].dist(&pts[w]);
                }
            }
        }
        if !ok {
            continue;
        }
        let total: f64 = cost.iter().sum();
        if best.as_ref().is_none_or(|b| total < b.0) {
            best = Some((total, parent, cost));
        }
    }
    let (_, parent, cost) = best.expect("some tree exists");
    (parent, cost)
}

#[test]
fn five_vertex_tree_matches_brute_force() {
    let env = square(10.0, vec![Aabb::new([4.0, 3.0], [5.0, 7.0]).unwrap()], [1.0, 5.0], [9.0, 9.5], 0.3);
    let cfg = PlannerConfig {
        gamma: Some(1000.0),
        ..PlannerConfig::new(Variant::RrtStar)
    };
    let (mut planner, _) = Planner::new(&env, cfg).unwrap();
    let samples = [[3.0, 8.0], [8.0, 8.0], [4.5, 7.5], [9.0, 4.5]];
    for s in samples {
        planner.step_with_sample(&s.into()).expect("each sample connects");
    }
    let tree = planner.tree();
    assert_eq!(tree.len(), 5);
    // B first hangs off A, then C steals it.
    let ids: Vec<usize> = (1..5).map(|v| tree.parent(v).unwrap()).collect();
    assert_eq!(ids, vec![0, 3, 0, 3]);

    let pts: Vec<State> = tree.states().to_vec();
    let (parent, cost) = brute_force_tree(&pts, |a, b| env.segment_free(&pts[a], &pts[b]));
    for v in 1..5 {
        assert_eq!(tree.parent(v), Some(parent[v]), "vertex {v}");
        assert!((tree.cost(v) - cost[v]).abs() < 1e-12, "vertex {v}: {} vs {}", tree.cost(v), cost[v]);
    }
    assert!(tree.check_invariants(&env).is_ok());
}

#[test]
fn linear_index_grows_the_same_tree() {
    let scenario = builtin("local_minima_2d").unwrap();
    for variant in [Variant::RrtStar, Variant::PRrtStar] {
        let kd = PlannerConfig {
            variant,
            max_iters: 3000,
            seed: 11,
            ..scenario.config()
        };
        let lin = PlannerConfig {
            index: IndexKind::Linear,
            ..kd.clone()
        };
        let (a, ma) = plan(&scenario.env, &kd).unwrap();
        let (b, mb) = plan(&scenario.env, &lin).unwrap();
        assert_eq!(tree_csv(&a), tree_csv(&b), "{variant}");
        assert_eq!(ma.cost_history, mb.cost_history);
    }
}

#[test]
fn potential_guidance_finds_first_path_sooner_in_open_space() {
    let env = square(50.0, vec![], [2.0, 2.0], [48.0, 48.0], 1.0);
    let first = |variant: Variant| {
        let iters: Vec<f64> = (0..50)
            .map(|seed| {
                let cfg = PlannerConfig {
                    variant,
                    seed,
                    max_iters: 50_000,
                    target_cost: Some(f64::INFINITY),
                    ..PlannerConfig::default()
                };
                let (_, m) = plan(&env, &cfg).unwrap();
                m.iters_first.unwrap_or(m.iterations) as f64
            })
            .collect();
        median(&iters).unwrap()
    };
    let (rrt, prrt) = (first(Variant::RrtStar), first(Variant::PRrtStar));
    assert!(5.0 * prrt <= rrt, "median first path RRT* {rrt} vs P-RRT* {prrt}");
}

#[test]
fn svg_draws_one_edge_per_non_root_vertex() {
    let scenario = builtin("cluttered_2d").unwrap();
    let cfg = PlannerConfig {
        node_cap: Some(2000),
        max_iters: 100_000,
        seed: 3,
        ..scenario.config()
    };
    let (tree, _) = plan(&scenario.env, &cfg).unwrap();
    assert_eq!(tree.len(), 2000);
    let path = best_path(&tree, &scenario.env);
    let svg = render_svg(&tree, &scenario.env, path.as_ref(), SvgOptions::default());
    assert_eq!(svg.matches("class=\"edge\"").count(), tree.len() - 1);
    assert_eq!(svg.matches("class=\"obstacle\"").count(), scenario.env.obstacles().len());
}

#[test]
fn every_builtin_has_a_grid_path() {
    for name in BUILTIN_NAMES {
        let s = builtin(name).unwrap();
        let h = if s.dimension() == 2 { 0.1 } else { 0.25 };
        let c = grid_oracle_cost(&s.env, h).unwrap_or_else(|e| panic!("{name}: {e}"));
        // Never below the straight-line bound, and a grid path is finite.
        assert!(c >= s.straight_line_bound() - 1e-9 && c.is_finite(), "{name}: {c}");
    }
}

#[test]
fn guided_runs_converge_faster_on_the_trap() {
    let scenario = builtin("local_minima_2d").unwrap();
    let reference = grid_oracle_cost(&scenario.env, 0.1).unwrap();
    let spec = TrialSpec {
        repeats: 25,
        node_cap: 60_000,
        eps_conv: 0.05,
        ..TrialSpec::new(reference)
    };
    let rate = |variant: Variant| {
        let cfg = PlannerConfig {
            variant,
            ..scenario.config()
        };
        let (_, raw) = run_trials(&scenario, &cfg, &spec).unwrap();
        let rates: Vec<f64> = raw.iter().map(|m| convergence_rate(m).unwrap_or(0.0)).collect();
        median(&rates).unwrap()
    };
    let (rrt, prrt) = (rate(Variant::RrtStar), rate(Variant::PRrtStar));
    assert!(prrt > rrt, "median convergence rate RRT* {rrt} vs P-RRT* {prrt}");
}
