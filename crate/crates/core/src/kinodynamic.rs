//! Differential-drive steering: RK4 integration of the unicycle model
//! `x' = v cos(theta)`, `y' = v sin(theta)`, `theta' = omega` and a
//! control-grid extension toward a target position.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Environment, State};

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Planar pose of a differential-drive robot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveState {
    pub x: f64,
    pub y: f64,
    /// Heading in `(-pi, pi]`.
    pub theta: f64,
}

impl DriveState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        DriveState {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> State {
        State::from([self.x, self.y])
    }
}

/// Control input: forward speed and turn rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Control {
    pub v: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveModel {
    pub v_max: f64,
    pub w_max: f64,
    /// Integration step.
    pub dt: f64,
    /// How long one control is held per extension.
    pub duration: f64,
    /// Samples per control axis.
    pub control_grid: usize,
}

impl Default for DriveModel {
    fn default() -> Self {
        DriveModel {
            v_max: 1.0,
            w_max: 1.5,
            dt: 0.02,
            duration: 0.5,
            control_grid: 7,
        }
    }
}

impl DriveModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("v_max", self.v_max),
            ("w_max", self.w_max),
            ("dt", self.dt),
            ("duration", self.duration),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid("drive model", format!("{name} must be positive")));
            }
        }
        if self.dt > self.duration {
            return Err(Error::invalid("drive model", "dt exceeds the hold duration"));
        }
        if self.control_grid < 2 {
            return Err(Error::invalid("drive model", "control_grid must be at least 2"));
        }
        Ok(())
    }

    /// Integration steps per extension.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round().max(1.0) as usize
    }

    /// Forward speeds `v_max * i / g` for `i = 1..=g` crossed with turn rates
    /// evenly spaced over `[-w_max, w_max]`, speed-major.
    pub fn controls(&self) -> Vec<Control> {
        let g = self.control_grid;
        let mut out = Vec::with_capacity(g * g);
        for i in 1..=g {
            let v = self.v_max * i as f64 / g as f64;
            for j in 0..g {
                let omega = -self.w_max + 2.0 * self.w_max * j as f64 / (g - 1) as f64;
                out.push(Control { v, omega });
            }
        }
        out
    }
}

/// One classical fourth-order Runge-Kutta step of the unicycle model.
pub fn rk4_step(s: DriveState, control: Control, dt: f64) -> DriveState {
    let Control { v, omega } = control;
    let deriv = |theta: f64| (v * theta.cos(), v * theta.sin());
    let k1 = deriv(s.theta);
    let k2 = deriv(s.theta + 0.5 * dt * omega);
    let k3 = k2;
    let k4 = deriv(s.theta + dt * omega);
    DriveState {
        x: s.x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y: s.y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        theta: normalize_angle(s.theta + dt * omega),
    }
}

/// Integrates `control` for `steps` steps, returning every state including
/// the initial one.
pub fn integrate(from: DriveState, control: Control, dt: f64, steps: usize) -> Vec<DriveState> {
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(from);
    let mut s = from;
    for _ in 0..steps {
        s = rk4_step(s, control, dt);
        traj.push(s);
    }
    traj
}

/// Whether an integrated trajectory stays in free space.
///
/// Broad phase: the trajectory's bounding box against every obstacle. Only
/// when that overlaps do we check each consecutive pair of states exactly.
pub fn trajectory_free(env: &Environment, traj: &[DriveState]) -> bool {
    let Some(first) = traj.first() else {
        return true;
    };
    let (mut lo, mut hi) = ([first.x, first.y], [first.x, first.y]);
    for s in traj {
        lo = [lo[0].min(s.x), lo[1].min(s.y)];
        hi = [hi[0].max(s.x), hi[1].max(s.y)];
    }
    let sweep = Aabb {
        min: State::from(lo),
        max: State::from(hi),
    };
    if !env.bounds().contains(&sweep.min) || !env.bounds().contains(&sweep.max) {
        return false;
    }
    let mut touching = env.obstacles().iter().filter(|o| o.intersects(&sweep)).peekable();
    if touching.peek().is_none() {
        return true;
    }
    let touching: Vec<&Aabb> = touching.collect();
    traj.windows(2).all(|w| {
        let (a, b) = (w[0].position(), w[1].position());
        !touching.iter().any(|o| o.intersects_segment(&a, &b))
    })
}

/// A collision-free extension produced by [`steer`].
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub control: Control,
    pub traj: Vec<DriveState>,
    pub end: DriveState,
    /// Arc length of the trajectory.
    pub cost: f64,
}

/// Tries every control on the grid from `from` and keeps the collision-free
/// trajectory whose endpoint lands closest to `toward`. The heading at
/// `toward` is ignored. `None` when every control collides.
pub fn steer(from: DriveState, toward: &State, model: &DriveModel, env: &Environment) -> Option<Extension> {
    let steps = model.steps();
    let dt = model.duration / steps as f64;
    let mut best: Option<(f64, Extension)> = None;
    for control in model.controls() {
        let traj = integrate(from, control, dt, steps);
        let end = *traj.last().expect("non-empty trajectory");
        let d = end.position().dist_sq(toward);
        if best.as_ref().is_some_and(|(bd, _)| d >= *bd) {
            continue;
        }
        if !trajectory_free(env, &traj) {
            continue;
        }
        let cost = control.v.abs() * dt * steps as f64;
        best = Some((
            d,
            Extension {
                control,
                traj,
                end,
                cost,
            },
        ));
    }
    best.map(|(_, ext)| ext)
}

/// Largest violation of `sin(theta) dx - cos(theta) dy = 0` over consecutive
/// pairs, using the midpoint heading of each pair.
pub fn constraint_residual(traj: &[DriveState]) -> f64 {
    traj.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let mid = a.theta + 0.5 * normalize_angle(b.theta - a.theta);
            (mid.sin() * (b.x - a.x) - mid.cos() * (b.y - a.y)).abs()
        })
        .fold(0.0, f64::max)
}
