//! Artificial potential fields: the attractive/repulsive potentials and
//! forces, the classic gradient-descent planner, and the randomized gradient
//! descent (RGD) that turns uniform samples into goal-directed ones.

use crate::error::{Error, Result};
use crate::geometry::{Environment, State, EPS};

/// Force magnitude below which the descent is considered stationary.
pub const ZERO_FORCE: f64 = 1e-6;

/// Steps without a new potential minimum before the descent is declared
/// trapped.
pub const STALL_WINDOW: usize = 50;

/// Parameters of the full attractive + repulsive field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApfConfig {
    /// Attractive scale.
    pub k_a: f64,
    /// Repulsive scale.
    pub k_r: f64,
    /// Radius of the conic region around the goal.
    pub d_g_star: f64,
    /// Repulsion cutoff distance.
    pub d_obs_star: f64,
    /// Step length.
    pub lambda: f64,
    pub max_steps: usize,
    /// Step `lambda * F` instead of `lambda` along the unit force.
    pub raw_force: bool,
}

impl Default for ApfConfig {
    fn default() -> Self {
        ApfConfig {
            k_a: 1.0,
            k_r: 100.0,
            d_g_star: 2.0,
            d_obs_star: 2.0,
            lambda: 0.1,
            max_steps: 5000,
            raw_force: false,
        }
    }
}

impl ApfConfig {
    pub fn validate(&self, env: &Environment) -> Result<()> {
        for (name, v) in [
            ("k_a", self.k_a),
            ("k_r", self.k_r),
            ("d_g_star", self.d_g_star),
            ("d_obs_star", self.d_obs_star),
            ("lambda", self.lambda),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid("apf", format!("{name} must be positive")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("apf", "max_steps must be positive"));
        }
        if self.lambda >= 0.1 * env.bounds().diagonal() {
            return Err(Error::invalid("apf", "lambda must be below a tenth of the world diagonal"));
        }
        Ok(())
    }
}

/// Parameters of the randomized gradient descent sample transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgdConfig {
    /// Maximum number of descent steps per sample.
    pub k: usize,
    /// Step length.
    pub lambda: f64,
    /// Clearance at which the descent stops.
    pub d_obs_star: f64,
    /// Step `lambda * F` instead of `lambda` along the unit force.
    pub raw_force: bool,
}

impl Default for RgdConfig {
    fn default() -> Self {
        RgdConfig {
            k: 90,
            lambda: 0.1,
            d_obs_star: 0.1,
            raw_force: false,
        }
    }
}

impl RgdConfig {
    pub const K_RANGE: (usize, usize) = (1, 10_000);
    pub const K_RECOMMENDED: (usize, usize) = (80, 100);

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = Self::K_RANGE;
        if !(lo..=hi).contains(&self.k) {
            return Err(Error::invalid("rgd", format!("k must lie in [{lo}, {hi}]")));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("rgd", "lambda must be positive"));
        }
        if !(self.d_obs_star > 0.0 && self.d_obs_star.is_finite()) {
            return Err(Error::invalid("rgd", "d_obs_star must be positive"));
        }
        Ok(())
    }

    /// A non-fatal remark when `k` is outside the range that balances
    /// exploration and exploitation well.
    pub fn warning(&self) -> Option<String> {
        let (lo, hi) = Self::K_RECOMMENDED;
        (!(lo..=hi).contains(&self.k))
            .then(|| format!("rgd k = {} is outside the recommended range [{lo}, {hi}]", self.k))
    }
}

/// Attractive potential: quadratic far from the goal, conic inside
/// `d_g_star`.
pub fn att_potential(x: &State, goal: &State, cfg: &ApfConfig) -> f64 {
    let d = x.dist(goal);
    if d > cfg.d_g_star {
        cfg.k_a * d * d
    } else {
        cfg.k_a * (cfg.d_g_star * d - cfg.d_g_star * cfg.d_g_star)
    }
}

/// Negated gradient of [`att_potential`]. Zero at the goal itself.
pub fn att_force(x: &State, goal: &State, cfg: &ApfConfig) -> State {
    let offset = x.sub(goal);
    let d = offset.norm();
    if d > cfg.d_g_star {
        offset.scaled(-2.0 * cfg.k_a)
    } else if d == 0.0 {
        State::zeros(x.dim())
    } else {
        offset.scaled(-cfg.k_a * cfg.d_g_star / d)
    }
}

/// Repulsive potential of the nearest obstacle. Infinite on contact.
pub fn rep_potential(env: &Environment, x: &State, cfg: &ApfConfig) -> f64 {
    let d_min = env.obstacle_clearance(x);
    if d_min > cfg.d_obs_star {
        0.0
    } else if d_min == 0.0 {
        f64::INFINITY
    } else {
        let g = 1.0 / d_min - 1.0 / cfg.d_obs_star;
        0.5 * cfg.k_r * g * g
    }
}

/// Negated gradient of [`rep_potential`]: pushes away from the closest
/// obstacle point.
pub fn rep_force(env: &Environment, x: &State, cfg: &ApfConfig) -> Result<State> {
    let near = env.nearest_obstacle(x);
    let d_min = near.distance;
    if d_min == 0.0 {
        return Err(Error::Singularity);
    }
    if d_min > cfg.d_obs_star {
        return Ok(State::zeros(x.dim()));
    }
    let away = x.sub(&near.closest);
    let magnitude = cfg.k_r * (1.0 / d_min - 1.0 / cfg.d_obs_star) / (d_min * d_min);
    Ok(away.scaled(magnitude / d_min))
}

/// Why a gradient descent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentOutcome {
    ReachedGoal,
    LocalMinimum,
    StepLimit,
}

#[derive(Debug, Clone)]
pub struct Descent {
    pub path: Vec<State>,
    pub outcome: DescentOutcome,
}

/// Classic APF planner: follow the total force from the start.
///
/// Each step moves `lambda` along the unit force, clamped to the remaining
/// distance to the goal and halved while the step would hit an obstacle.
/// The descent is declared stuck when the force vanishes, when no collision
/// free step remains, or when the total potential has not reached a new
/// minimum for [`STALL_WINDOW`] steps (fixed-length steps oscillate around
/// an equilibrium instead of settling on it).
pub fn gradient_descent(env: &Environment, cfg: &ApfConfig) -> Descent {
    gradient_descent_from(env, env.start(), cfg)
}

pub fn gradient_descent_from(env: &Environment, start: &State, cfg: &ApfConfig) -> Descent {
    let goal = env.goal_center();
    let total_potential = |x: &State| att_potential(x, goal, cfg) + rep_potential(env, x, cfg);

    let mut x = start.clone();
    let mut path = vec![x.clone()];
    let mut best_u = total_potential(&x);
    let mut stalled = 0;
    let finish = |path, outcome| Descent { path, outcome };

    for _ in 0..cfg.max_steps {
        if env.in_goal(&x) {
            return finish(path, DescentOutcome::ReachedGoal);
        }
        let force = match rep_force(env, &x, cfg) {
            Ok(rep) => att_force(&x, goal, cfg).add_scaled(&rep, 1.0),
            Err(_) => return finish(path, DescentOutcome::LocalMinimum),
        };
        let magnitude = force.norm();
        if magnitude < ZERO_FORCE {
            return finish(path, DescentOutcome::LocalMinimum);
        }
        let mut step = if cfg.raw_force {
            cfg.lambda * magnitude
        } else {
            cfg.lambda.min(x.dist(goal))
        };
        let dir = force.divided(magnitude);
        let next = loop {
            let candidate = x.add_scaled(&dir, step);
            if env.segment_free(&x, &candidate) {
                break Some(candidate);
            }
            step *= 0.5;
            if step < 1e-9 {
                break None;
            }
        };
        let Some(next) = next else {
            return finish(path, DescentOutcome::LocalMinimum);
        };
        x = next;
        path.push(x.clone());

        let u = total_potential(&x);
        if u < best_u - 1e-9 * best_u.abs().max(1.0) {
            best_u = u;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_WINDOW {
                return finish(path, DescentOutcome::LocalMinimum);
            }
        }
    }
    let outcome = if env.in_goal(&x) {
        DescentOutcome::ReachedGoal
    } else {
        DescentOutcome::StepLimit
    };
    finish(path, outcome)
}

/// Randomized gradient descent on the pure quadratic attractive field
/// `U = d^2(x, goal)`.
///
/// Moves the free sample `x_rand` toward `goal` for at most `cfg.k` steps,
/// returning early as soon as the sample is within `cfg.d_obs_star` of an
/// obstacle. A step that would leave free space is discarded and the current
/// sample returned.
pub fn rgd(x_rand: &State, env: &Environment, goal: &State, cfg: &RgdConfig) -> Result<State> {
    if !env.point_free(x_rand) {
        return Err(Error::NotFree("rgd input sample"));
    }
    Ok(rgd_unchecked(x_rand, env, goal, cfg))
}

pub(crate) fn rgd_unchecked(x_rand: &State, env: &Environment, goal: &State, cfg: &RgdConfig) -> State {
    let mut x = x_rand.clone();
    // Clearance is 1-Lipschitz, so after moving `s` it is at least the last
    // measured value minus `s`. Queries are only repeated once that bound
    // can no longer rule out the stop condition.
    let mut clearance = f64::NEG_INFINITY;
    for _ in 0..cfg.k {
        if clearance <= cfg.d_obs_star + EPS {
            clearance = env.obstacle_clearance(&x);
            if clearance <= cfg.d_obs_star {
                return x;
            }
        }
        // F_att = -grad d^2 = 2 (goal - x)
        let to_goal = goal.sub(&x);
        let d = to_goal.norm();
        if d == 0.0 {
            return x;
        }
        // Unit steps never pass the goal; raw steps are lambda * |F|.
        let step = if cfg.raw_force { 2.0 * cfg.lambda * d } else { cfg.lambda.min(d) };
        let next = x.add_scaled(&to_goal, step / d);
        // A step shorter than the clearance, toward a goal inside the bounds,
        // cannot collide.
        if (step >= clearance || step > d) && !env.segment_free(&x, &next) {
            return x;
        }
        clearance -= step;
        x = next;
    }
    x
}
