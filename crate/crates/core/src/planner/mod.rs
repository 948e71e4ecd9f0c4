//! RRT*, P-RRT* and the APF baseline behind one entry point, [`plan`].

mod ops;
mod tree;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Environment, State};
use crate::kinodynamic::{steer, DriveModel};
use crate::potential::{gradient_descent, rgd_unchecked, ApfConfig, DescentOutcome, RgdConfig};
use crate::spatial_index::{gamma_star, near_radius, KdTree, LinearIndex, NearParams, NeighborIndex, VertexId};

pub use ops::{
    extend_to, get_tuple, rewire, rewire_with, select_best_parent, select_best_parent_with, Candidate, CandidateTuple,
    Segment,
};
pub use tree::Tree;

/// Rejection-sampling budget before an environment is declared degenerate.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// Default `gamma` as a multiple of `gamma_star`.
pub const DEFAULT_GAMMA_FACTOR: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    RrtStar,
    PRrtStar,
    Apf,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::RrtStar => "rrtstar",
            Variant::PRrtStar => "prrtstar",
            Variant::Apf => "apf",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_', '*'], "").as_str() {
            "rrtstar" | "rrt" => Ok(Variant::RrtStar),
            "prrtstar" | "prrt" => Ok(Variant::PRrtStar),
            "apf" => Ok(Variant::Apf),
            _ => Err(Error::invalid("planner", format!("unknown planner '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Steering {
    Holonomic,
    DifferentialDrive(DriveModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    KdTree,
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub variant: Variant,
    /// Neighbourhood constant; `None` picks `DEFAULT_GAMMA_FACTOR * gamma_star`.
    pub gamma: Option<f64>,
    /// Accept a `gamma` at or below `gamma_star` (reported as a warning).
    pub allow_low_gamma: bool,
    pub max_iters: usize,
    /// Stop once the tree holds this many vertices.
    pub node_cap: Option<usize>,
    pub rgd: RgdConfig,
    pub apf: ApfConfig,
    pub seed: u64,
    pub goal_bias: f64,
    pub steering: Steering,
    /// Optional cap on straight edge length. Off by default.
    pub max_edge: Option<f64>,
    pub index: IndexKind,
    /// Stop as soon as the best cost drops to this value.
    pub target_cost: Option<f64>,
    /// Check the tree invariants every this many iterations.
    pub validate_every: Option<usize>,
    /// Initial heading for differential-drive runs.
    pub start_heading: f64,
    /// Record elapsed time every this many iterations.
    pub timing_stride: Option<usize>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            variant: Variant::PRrtStar,
            gamma: None,
            allow_low_gamma: false,
            max_iters: 10_000,
            node_cap: None,
            rgd: RgdConfig::default(),
            apf: ApfConfig::default(),
            seed: 0,
            goal_bias: 0.0,
            steering: Steering::Holonomic,
            max_edge: None,
            index: IndexKind::KdTree,
            target_cost: None,
            validate_every: None,
            start_heading: 0.0,
            timing_stride: None,
        }
    }
}

impl PlannerConfig {
    pub fn new(variant: Variant) -> Self {
        PlannerConfig {
            variant,
            ..Self::default()
        }
    }

    /// Checks the configuration against `env` and returns any warnings.
    pub fn validate(&self, env: &Environment) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !(0.0..1.0).contains(&self.goal_bias) {
            return Err(Error::invalid("goal_bias", format!("{} is outside [0, 1)", self.goal_bias)));
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::invalid("gamma", format!("{g} is not a positive number")));
            }
            let floor = gamma_star(env, env.dim());
            if g <= floor {
                if !self.allow_low_gamma {
                    NearParams::new(env, g)?;
                }
                warnings.push(format!(
                    "gamma {g} does not exceed gamma* = {floor}; asymptotic optimality is not guaranteed"
                ));
            }
        }
        if let Some(e) = self.max_edge {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::invalid("max_edge", format!("{e} is not a positive number")));
            }
        }
        if self.node_cap == Some(0) {
            return Err(Error::invalid("node_cap", "must be at least 1"));
        }
        if self.timing_stride == Some(0) || self.validate_every == Some(0) {
            return Err(Error::invalid("timing_stride", "strides must be positive"));
        }
        match self.variant {
            Variant::PRrtStar => {
                self.rgd.validate()?;
                warnings.extend(self.rgd.warning());
            }
            Variant::Apf => self.apf.validate(env)?,
            Variant::RrtStar => {}
        }
        if let Steering::DifferentialDrive(model) = &self.steering {
            model.validate()?;
            if env.dim() != 2 {
                return Err(Error::invalid("steering", "differential drive needs a 2D environment"));
            }
            if self.variant == Variant::Apf {
                return Err(Error::invalid("steering", "the APF planner is holonomic only"));
            }
        }
        Ok(warnings)
    }

    pub fn near_params(&self, env: &Environment) -> NearParams {
        let d = env.dim();
        let gamma = self.gamma.unwrap_or_else(|| DEFAULT_GAMMA_FACTOR * gamma_star(env, d));
        NearParams::unchecked(gamma, d)
    }
}

/// Per-run measurements.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMetrics {
    /// Iteration (1-based) that produced the first goal-connected path.
    pub iters_first: Option<usize>,
    pub time_first: Option<f64>,
    /// Iteration at which the best cost reached `target_cost`.
    pub iters_opt: Option<usize>,
    pub time_opt: Option<f64>,
    /// `(iteration, best cost)` at every improvement.
    pub cost_history: Vec<(usize, f64)>,
    pub final_cost: Option<f64>,
    pub node_count: usize,
    pub iterations: usize,
    /// Wall time of the whole loop in seconds.
    pub elapsed: f64,
    /// No target given: no path. Target given: target not reached.
    pub failed: bool,
    /// `(iteration, elapsed seconds)` every `timing_stride` iterations.
    pub time_marks: Vec<(usize, f64)>,
}

impl RunMetrics {
    pub fn first_cost(&self) -> Option<f64> {
        self.cost_history.first().map(|&(_, c)| c)
    }

    /// Best cost once the target was reached.
    pub fn cost_at_opt(&self) -> Option<f64> {
        let it = self.iters_opt?;
        self.cost_history.iter().rev().find(|&&(i, _)| i <= it).map(|&(_, c)| c)
    }
}

/// A root-to-goal path through the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    /// Vertex states, with stored trajectories expanded in between.
    pub states: Vec<State>,
    pub cost: f64,
}

/// Cheapest vertex inside the goal ball, walked back to the root.
pub fn best_path(tree: &Tree, env: &Environment) -> Option<Path> {
    let goal = (0..tree.len())
        .filter(|&v| env.in_goal(tree.state(v)))
        .min_by(|&a, &b| tree.cost(a).total_cmp(&tree.cost(b)).then(a.cmp(&b)))?;
    let vertices = tree.path_to(goal);
    let mut states = vec![tree.state(Tree::ROOT).clone()];
    for &v in &vertices[1..] {
        if let Some(traj) = tree.trajectory(v) {
            states.extend(traj[1..traj.len() - 1].iter().map(|s| s.position()));
        }
        states.push(tree.state(v).clone());
    }
    Some(Path {
        vertices,
        states,
        cost: tree.cost(goal),
    })
}

/// Incremental planner state. [`plan`] drives it from a seeded RNG; tests
/// can feed samples directly through [`Planner::step_with_sample`].
pub struct Planner<'a> {
    env: &'a Environment,
    cfg: PlannerConfig,
    params: NearParams,
    tree: Tree,
    index: Box<dyn NeighborIndex + Send>,
    in_goal: Vec<bool>,
    best: Option<f64>,
}

impl<'a> Planner<'a> {
    /// Validates `cfg` and sets up a tree rooted at the start state.
    pub fn new(env: &'a Environment, cfg: PlannerConfig) -> Result<(Self, Vec<String>)> {
        let warnings = cfg.validate(env)?;
        let params = cfg.near_params(env);
        let mut index: Box<dyn NeighborIndex + Send> = match cfg.index {
            IndexKind::KdTree => Box::new(KdTree::new()),
            IndexKind::Linear => Box::new(LinearIndex::new()),
        };
        let root = env.start().clone();
        index.insert(root.clone(), Tree::ROOT)?;
        let tree = Tree::with_heading(root.clone(), cfg.start_heading);
        let root_in_goal = env.in_goal(&root);
        Ok((
            Planner {
                env,
                cfg,
                params,
                tree,
                index,
                in_goal: vec![root_in_goal],
                best: root_in_goal.then_some(0.0),
            },
            warnings,
        ))
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn best_cost(&self) -> Option<f64> {
        self.best
    }

    pub fn near_params(&self) -> NearParams {
        self.params
    }

    /// Uniform free sample, or the goal center with probability `goal_bias`.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Result<State> {
        if self.cfg.goal_bias > 0.0 && rng.random::<f64>() < self.cfg.goal_bias {
            return Ok(self.env.goal_center().clone());
        }
        let b = self.env.bounds();
        for _ in 0..MAX_REJECTIONS {
            let x = State::new(
                b.min
                    .iter()
                    .zip(b.max.iter())
                    .map(|(&lo, &hi)| rng.random_range(lo..=hi)),
            );
            if self.env.point_free(&x) {
                return Ok(x);
            }
        }
        Err(Error::DegenerateEnvironment {
            attempts: MAX_REJECTIONS,
        })
    }

    /// Runs one iteration on `x_rand`: the P-RRT* transform (if enabled),
    /// parent selection, insertion and rewiring. Returns the new vertex.
    pub fn step_with_sample(&mut self, x_rand: &State) -> Option<VertexId> {
        let x = match self.cfg.variant {
            Variant::PRrtStar => rgd_unchecked(x_rand, self.env, self.env.goal_center(), &self.cfg.rgd),
            _ => x_rand.clone(),
        };
        match self.cfg.steering {
            Steering::Holonomic => self.extend_holonomic(x),
            Steering::DifferentialDrive(model) => self.extend_drive(&x, &model),
        }
    }

    fn near_set(&self, x: &State) -> Vec<VertexId> {
        let r = near_radius(self.tree.len(), self.params);
        let near = self.index.within(x, r);
        if near.is_empty() {
            self.index.nearest(x).into_iter().collect()
        } else {
            near
        }
    }

    fn extend_holonomic(&mut self, mut x: State) -> Option<VertexId> {
        if let Some(max_edge) = self.cfg.max_edge {
            let nearest = self.index.nearest(&x)?;
            let from = self.tree.state(nearest);
            let d = from.dist(&x);
            if d > max_edge {
                x = from.lerp(&x, max_edge / d);
            }
        }
        let near = self.near_set(&x);
        // A sample that lands exactly on a vertex adds nothing. RGD produces
        // these constantly: every descent that reaches the goal center stops
        // on the same point.
        if near.iter().any(|&v| *self.tree.state(v) == x) {
            return None;
        }
        let tuple = get_tuple(&x, &near, &self.tree);
        let parent = select_best_parent(&tuple, self.env)?;
        let v = self.insert(x, parent);
        let in_goal = &self.in_goal;
        let best = &mut self.best;
        rewire_with(v, &tuple, &mut self.tree, self.env, |u, c| {
            if in_goal[u] && best.is_none_or(|b| c < b) {
                *best = Some(c);
            }
        });
        Some(v)
    }

    fn insert(&mut self, x: State, parent: VertexId) -> VertexId {
        let v = self.tree.add(x.clone(), parent);
        self.index
            .insert(x, v)
            .expect("tree ids are dense and never reused");
        self.note_vertex(v);
        v
    }

    fn note_vertex(&mut self, v: VertexId) {
        let g = self.env.in_goal(self.tree.state(v));
        self.in_goal.push(g);
        let c = self.tree.cost(v);
        if g && self.best.is_none_or(|b| c < b) {
            self.best = Some(c);
        }
    }

    // No rewiring: a control grid cannot land exactly on an existing state,
    // so candidate parents are tried nearest first and the first collision
    // free extension is kept.
    fn extend_drive(&mut self, x: &State, model: &DriveModel) -> Option<VertexId> {
        let mut near = self.near_set(x);
        near.sort_by(|&a, &b| {
            let da = self.tree.state(a).dist_sq(x);
            let db = self.tree.state(b).dist_sq(x);
            da.total_cmp(&db).then(a.cmp(&b))
        });
        for parent in near {
            if let Some(ext) = steer(self.tree.drive_state(parent), x, model, self.env) {
                let v = self.tree.add_trajectory(parent, ext.traj, ext.cost);
                let end = self.tree.state(v).clone();
                self.index
                    .insert(end, v)
                    .expect("tree ids are dense and never reused");
                self.note_vertex(v);
                return Some(v);
            }
        }
        None
    }

    fn node_cap_reached(&self) -> bool {
        self.cfg.node_cap.is_some_and(|cap| self.tree.len() >= cap)
    }

    fn check(&self, when: &str) {
        if let Err(e) = self.tree.check_invariants(self.env) {
            panic!("tree invariant violated {when}: {e}");
        }
    }
}

/// Runs the configured planner on `env`.
///
/// Identical `(env, cfg)` pairs produce identical trees and metrics apart
/// from wall-clock fields.
pub fn plan(env: &Environment, cfg: &PlannerConfig) -> Result<(Tree, RunMetrics)> {
    if cfg.variant == Variant::Apf {
        cfg.validate(env)?;
        return Ok(plan_apf(env, cfg));
    }
    let (mut planner, _warnings) = Planner::new(env, cfg.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut m = RunMetrics::default();
    if let Some(c) = planner.best {
        m.cost_history.push((0, c));
        m.iters_first = Some(0);
        m.time_first = Some(0.0);
    }
    let reached = |best: Option<f64>| match (best, cfg.target_cost) {
        (Some(b), Some(t)) => b <= t,
        _ => false,
    };
    if reached(planner.best) {
        m.iters_opt = Some(0);
        m.time_opt = Some(0.0);
    }

    let clock = Instant::now();
    let mut iter = 0;
    while iter < cfg.max_iters && m.iters_opt.is_none() && !planner.node_cap_reached() {
        iter += 1;
        let x_rand = planner.sample(&mut rng)?;
        let before = planner.best;
        planner.step_with_sample(&x_rand);

        if planner.best != before {
            let c = planner.best.expect("best cost only ever appears");
            let t = clock.elapsed().as_secs_f64();
            if m.iters_first.is_none() {
                m.iters_first = Some(iter);
                m.time_first = Some(t);
            }
            m.cost_history.push((iter, c));
            if reached(planner.best) {
                m.iters_opt = Some(iter);
                m.time_opt = Some(t);
            }
        }
        if cfg.timing_stride.is_some_and(|s| iter % s == 0) {
            m.time_marks.push((iter, clock.elapsed().as_secs_f64()));
        }
        if cfg.validate_every.is_some_and(|s| iter % s == 0) {
            planner.check("during planning");
        }
    }
    m.elapsed = clock.elapsed().as_secs_f64();
    planner.check("at termination");

    m.iterations = iter;
    m.final_cost = planner.best;
    m.node_count = planner.tree.len();
    m.failed = match cfg.target_cost {
        Some(_) => m.iters_opt.is_none(),
        None => m.final_cost.is_none(),
    };
    Ok((planner.into_tree(), m))
}

/// The APF baseline recorded as a chain-shaped tree of descent steps.
fn plan_apf(env: &Environment, cfg: &PlannerConfig) -> (Tree, RunMetrics) {
    let clock = Instant::now();
    let apf = ApfConfig {
        max_steps: cfg.apf.max_steps.min(cfg.max_iters),
        ..cfg.apf
    };
    let descent = gradient_descent(env, &apf);
    let elapsed = clock.elapsed().as_secs_f64();

    let mut path = descent.path.into_iter();
    let mut tree = Tree::new(path.next().expect("descent starts at the start state"));
    let mut last = Tree::ROOT;
    for x in path {
        last = tree.add(x, last);
    }
    let mut m = RunMetrics {
        iterations: tree.len() - 1,
        node_count: tree.len(),
        elapsed,
        ..RunMetrics::default()
    };
    if descent.outcome == DescentOutcome::ReachedGoal {
        let c = tree.cost(last);
        m.iters_first = Some(tree.len() - 1);
        m.time_first = Some(elapsed);
        m.cost_history.push((tree.len() - 1, c));
        m.final_cost = Some(c);
        if cfg.target_cost.is_some_and(|t| c <= t) {
            m.iters_opt = m.iters_first;
            m.time_opt = m.time_first;
        }
    }
    m.failed = match cfg.target_cost {
        Some(_) => m.iters_opt.is_none(),
        None => m.final_cost.is_none(),
    };
    (tree, m)
}
