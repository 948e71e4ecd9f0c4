//! Property suites shared by the integration tests and the acceptance
//! runner. Each suite returns a one-line summary or the first violation.

#![allow(dead_code)]

use prrt::bench::{path_json, render_svg, tree_csv, SvgOptions};
use prrt::geometry::{Aabb, Environment, State};
use prrt::kinodynamic::{integrate, Control, DriveState};
use prrt::planner::{best_path, plan, PlannerConfig, Variant};
use prrt::potential::{att_force, att_potential, rep_force, rep_potential, rgd, ApfConfig, RgdConfig};
use prrt::scenarios::builtin;
use prrt::spatial_index::{KdTree, LinearIndex, NeighborIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Outcome = Result<String, String>;

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn square(side: f64, obstacles: Vec<Aabb>, start: [f64; 2], goal: [f64; 2], r: f64) -> Environment {
    Environment::new(Aabb::new([0.0, 0.0], [side, side]).unwrap(), obstacles, start, goal, r).unwrap()
}

/// Up to `n` random boxes in a 20 x 20 world that keep clear of the start
/// (1, 1) and the goal ball around (18, 18).
pub fn random_world(rng: &mut ChaCha8Rng, n: usize) -> Environment {
    let mut boxes = Vec::new();
    for _ in 0..n {
        let (w, h) = (rng.random_range(0.5..4.0), rng.random_range(0.5..4.0));
        let (x, y) = (rng.random_range(0.0..20.0 - w), rng.random_range(0.0..20.0 - h));
        let b = Aabb::new([x, y], [x + w, y + h]).unwrap();
        let clear = |p: [f64; 2], m: f64| {
            let grown = Aabb::new([x - m, y - m], [x + w + m, y + h + m]).unwrap();
            !grown.contains(&p.into())
        };
        if clear([1.0, 1.0], 0.2) && clear([18.0, 18.0], 1.2) {
            boxes.push(b);
        }
    }
    square(20.0, boxes, [1.0, 1.0], [18.0, 18.0], 1.0)
}

/// Nearest and radius queries of the kd-tree against a plain scan over the
/// same points, ties broken by lowest id.
pub fn index_matches_scan(trials: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d);
    for t in 0..trials {
        let dim = 2 + t % 2;
        let n = rng.random_range(1..120);
        let mut kd = KdTree::new();
        let mut lin = LinearIndex::new();
        let mut pts = Vec::with_capacity(n);
        for id in 0..n {
            // Coarse coordinates make exact ties common.
            let p = State::new((0..dim).map(|_| (rng.random_range(0.0..10.0f64) * 4.0).round() / 4.0));
            kd.insert(p.clone(), id).map_err(|e| e.to_string())?;
            lin.insert(p.clone(), id).map_err(|e| e.to_string())?;
            pts.push(p);
        }
        let q = State::new((0..dim).map(|_| rng.random_range(-1.0..11.0)));
        let oracle = (0..n)
            .min_by(|&a, &b| pts[a].dist_sq(&q).total_cmp(&pts[b].dist_sq(&q)).then(a.cmp(&b)))
            .unwrap();
        ensure(kd.nearest(&q) == Some(oracle), || format!("trial {t}: kd nearest differs from scan"))?;
        ensure(lin.nearest(&q) == Some(oracle), || format!("trial {t}: linear nearest differs from scan"))?;

        let r = rng.random_range(0.0..4.0);
        let mut expect: Vec<usize> = (0..n).filter(|&i| pts[i].dist(&q) <= r).collect();
        expect.sort_unstable();
        for (name, mut got) in [("kd", kd.within(&q, r)), ("linear", lin.within(&q, r))] {
            got.sort_unstable();
            ensure(got == expect, || format!("trial {t}: {name} radius query differs from scan"))?;
        }
    }
    Ok(format!("{trials} randomized index trials agree with the scan"))
}

/// Short seeded runs on random worlds: invariants checked every iteration
/// and a non-increasing best-cost history.
pub fn randomized_runs(runs: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e);
    let mut with_path = 0;
    for r in 0..runs {
        let env = random_world(&mut rng, 12);
        let variant = if r % 2 == 0 { Variant::RrtStar } else { Variant::PRrtStar };
        let cfg = PlannerConfig {
            max_iters: 300,
            seed: r as u64,
            validate_every: Some(1),
            ..PlannerConfig::new(variant)
        };
        let (tree, m) = plan(&env, &cfg).map_err(|e| format!("run {r}: {e}"))?;
        tree.check_invariants(&env).map_err(|e| format!("run {r}: {e}"))?;
        for w in m.cost_history.windows(2) {
            ensure(w[1].1 <= w[0].1, || format!("run {r}: best cost rose {} -> {}", w[0].1, w[1].1))?;
        }
        if let Some(p) = best_path(&tree, &env) {
            with_path += 1;
            ensure(Some(p.cost) == m.final_cost, || format!("run {r}: best path cost mismatch"))?;
        }
    }
    Ok(format!("{runs} randomized runs valid, {with_path} with a path"))
}

fn numeric_gradient(f: impl Fn(&State) -> f64, x: &State, h: f64) -> State {
    State::new((0..x.dim()).map(|i| {
        let mut plus = x.coords().to_vec();
        let mut minus = plus.clone();
        plus[i] += h;
        minus[i] -= h;
        (f(&State::new(plus)) - f(&State::new(minus))) / (2.0 * h)
    }))
}

fn rel_err(a: &State, b: &State) -> f64 {
    a.dist(b) / a.norm().max(b.norm()).max(1e-12)
}

/// Both forces equal the negative gradient of their potential by central
/// differences, away from the switch shells, the poles and points with a
/// non-unique closest obstacle point.
pub fn forces_are_gradients(samples: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf0);
    let env = square(
        20.0,
        vec![
            Aabb::new([5.0, 5.0], [8.0, 7.0]).unwrap(),
            Aabb::new([12.0, 3.0], [13.0, 15.0]).unwrap(),
        ],
        [1.0, 10.0],
        [18.0, 10.0],
        0.5,
    );
    let cfg = ApfConfig {
        k_a: 1.3,
        k_r: 4.0,
        d_g_star: 2.5,
        d_obs_star: 1.5,
        ..ApfConfig::default()
    };
    let goal = env.goal_center().clone();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < samples {
        let x = State::from([rng.random_range(0.5..19.5), rng.random_range(0.5..19.5)]);
        let d = x.dist(&goal);
        if d < 1e-3 || (d - cfg.d_g_star).abs() < 1e-3 {
            continue;
        }
        let fd = numeric_gradient(|p| att_potential(p, &goal, &cfg), &x, 1e-6).scaled(-1.0);
        let e = rel_err(&att_force(&x, &goal, &cfg), &fd);
        worst = worst.max(e);
        ensure(e < 1e-5, || format!("attractive force at {x:?} off by {e:e}"))?;

        let near = env.nearest_obstacle(&x);
        let second = env
            .obstacles()
            .iter()
            .map(|o| o.clamp(&x).dist(&x))
            .filter(|&s| (s - near.distance).abs() > 1e-12)
            .fold(f64::INFINITY, f64::min);
        if near.distance > 1e-2 && (near.distance - cfg.d_obs_star).abs() > 1e-3 && second - near.distance > 1e-3 {
            let f = rep_force(&env, &x, &cfg).map_err(|e| e.to_string())?;
            let fd = numeric_gradient(|p| rep_potential(&env, p, &cfg), &x, 1e-7).scaled(-1.0);
            let e = rel_err(&f, &fd);
            if f.norm() > 0.0 || fd.norm() > 0.0 {
                worst = worst.max(e);
                ensure(e < 1e-5, || format!("repulsive force at {x:?} off by {e:e}"))?;
            }
        }
        checked += 1;
    }
    Ok(format!("{samples} finite-difference checks, worst relative error {worst:.1e}"))
}

/// RGD outputs are free and within `k * lambda` of the input, descend
/// monotonically in an empty world, and return at once next to obstacles.
pub fn rgd_properties(samples: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x96);
    let cfg = RgdConfig::default();
    let reach = cfg.k as f64 * cfg.lambda + 1e-9;
    for i in 0..samples {
        let env = random_world(&mut rng, 15);
        let goal = env.goal_center().clone();
        let x = State::from([rng.random_range(0.0..20.0), rng.random_range(0.0..20.0)]);
        if !env.point_free(&x) {
            continue;
        }
        let y = rgd(&x, &env, &goal, &cfg).map_err(|e| e.to_string())?;
        ensure(env.point_free(&y), || format!("sample {i}: output not free"))?;
        ensure(y.dist(&x) <= reach, || format!("sample {i}: moved {} > k lambda", y.dist(&x)))?;
        if env.obstacle_clearance(&x) <= cfg.d_obs_star {
            ensure(y == x, || format!("sample {i}: moved despite clearance below d_obs"))?;
        }
    }

    let empty = square(20.0, vec![], [1.0, 1.0], [18.0, 18.0], 1.0);
    let goal = empty.goal_center().clone();
    for i in 0..samples / 10 {
        let x = State::from([rng.random_range(1.0..19.0), rng.random_range(1.0..19.0)]);
        if empty.obstacle_clearance(&x) <= cfg.d_obs_star {
            continue;
        }
        let mut last = x.dist(&goal);
        for k in 1..=cfg.k {
            let y = rgd(&x, &empty, &goal, &RgdConfig { k, ..cfg }).map_err(|e| e.to_string())?;
            let d = y.dist(&goal);
            ensure(d <= last + 1e-12, || format!("empty world sample {i}: distance rose at step {k}"))?;
            last = d;
        }
    }
    Ok(format!("{samples} RGD samples satisfy freedom, reach and stop rules"))
}

/// Endpoint error of RK4 against the closed-form arc for step `dt`.
pub fn arc_error(dt: f64) -> f64 {
    let (v, omega, t) = (1.0, 1.3, 2.0);
    let steps = (t / dt).round() as usize;
    let traj = integrate(DriveState::new(0.0, 0.0, 0.0), Control { v, omega }, dt, steps);
    let end = traj.last().unwrap();
    let r = v / omega;
    let (x, y) = (r * (omega * t).sin(), r * (1.0 - (omega * t).cos()));
    (end.x - x).hypot(end.y - y)
}

/// Fourth-order convergence of the integrator and small non-holonomic
/// residuals on every trajectory the planner stores.
pub fn drive_properties() -> Outcome {
    let ratio = arc_error(0.2) / arc_error(0.1);
    ensure((12.0..=20.0).contains(&ratio), || format!("rk4 halving ratio {ratio}"))?;
    let scenario = builtin("diffdrive_local_minima").map_err(|e| e.to_string())?;
    let cfg = PlannerConfig {
        max_iters: 1500,
        seed: 3,
        ..scenario.config()
    };
    let (tree, _) = plan(&scenario.env, &cfg).map_err(|e| e.to_string())?;
    let residual = tree.max_constraint_residual();
    ensure(tree.len() > 100, || format!("only {} vertices grown", tree.len()))?;
    ensure(residual < 1e-3, || format!("stored trajectory residual {residual:e}"))?;
    Ok(format!("rk4 ratio {ratio:.2}, max residual {residual:.1e} over {} edges", tree.len() - 1))
}

/// The text artifacts of one seeded run.
pub fn artifacts(name: &str, variant: Variant, iters: usize, seed: u64) -> (String, String, String) {
    let scenario = builtin(name).unwrap();
    let cfg = PlannerConfig {
        variant,
        max_iters: iters,
        seed,
        ..scenario.config()
    };
    let (tree, _) = plan(&scenario.env, &cfg).unwrap();
    let path = best_path(&tree, &scenario.env);
    (
        tree_csv(&tree),
        render_svg(&tree, &scenario.env, path.as_ref(), SvgOptions::default()),
        path_json(path.as_ref()),
    )
}

/// Repeated seeded runs produce byte-identical CSV, SVG and path files.
pub fn determinism() -> Outcome {
    let cases = [
        ("local_minima_2d", Variant::PRrtStar),
        ("cluttered_2d", Variant::RrtStar),
        ("diffdrive_local_minima", Variant::PRrtStar),
    ];
    for (name, variant) in cases {
        let a = artifacts(name, variant, 800, 11);
        let b = artifacts(name, variant, 800, 11);
        ensure(a == b, || format!("{name}/{variant}: outputs differ between runs"))?;
    }
    Ok(format!("{} seeded runs reproduce byte for byte", cases.len()))
}
