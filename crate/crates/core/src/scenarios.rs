//! Scenario files and the built-in test worlds.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "example",
//!   "dimension": 2,
//!   "bounds": {"min": [0, 0], "max": [10, 10]},
//!   "start": [1, 1],
//!   "goal": {"center": [9, 9], "radius": 0.5},
//!   "obstacles": [
//!     {"min": [4, 0], "max": [5, 6]}
//!   ],
//!   "defaults": {"planner": "prrtstar", "max_iters": 5000}
//! }
//! ```
//!
//! Every key except `defaults` is required and unknown keys are rejected.
//! `defaults` may hold `planner`, `max_iters`, `node_cap`, `seed`, `gamma`,
//! `goal_bias`, `rgd_k`, `rgd_lambda`, `rgd_d_obs`, `start_heading` and
//! `drive` (an object with `v_max`, `w_max`, `dt`, `duration` and
//! `control_grid`, which switches the planner to differential-drive steering).
//!
//! [`Scenario::to_json`] writes keys in the order above and every float with
//! 17 significant digits (C's `%.17g`), so saving a loaded canonical document
//! reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Environment, State};
use crate::kinodynamic::DriveModel;
use crate::planner::{PlannerConfig, Steering, Variant};

pub const FORMAT_VERSION: u32 = 1;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 8] = [
    "local_minima_2d",
    "cluttered_2d",
    "maze_a_2d",
    "maze_b_2d",
    "barriers_3d",
    "narrow_3d",
    "maze_3d",
    "diffdrive_local_minima",
];

/// Planner settings a scenario suggests. Unset fields leave the caller's
/// configuration alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Defaults {
    pub planner: Option<Variant>,
    pub max_iters: Option<usize>,
    pub node_cap: Option<usize>,
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub goal_bias: Option<f64>,
    pub rgd_k: Option<usize>,
    pub rgd_lambda: Option<f64>,
    pub rgd_d_obs: Option<f64>,
    pub start_heading: Option<f64>,
    pub drive: Option<DriveModel>,
}

impl Defaults {
    pub fn apply(&self, cfg: &mut PlannerConfig) {
        if let Some(v) = self.planner {
            cfg.variant = v;
        }
        if let Some(n) = self.max_iters {
            cfg.max_iters = n;
        }
        if self.node_cap.is_some() {
            cfg.node_cap = self.node_cap;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.gamma.is_some() {
            cfg.gamma = self.gamma;
        }
        if let Some(b) = self.goal_bias {
            cfg.goal_bias = b;
        }
        if let Some(k) = self.rgd_k {
            cfg.rgd.k = k;
        }
        if let Some(l) = self.rgd_lambda {
            cfg.rgd.lambda = l;
        }
        if let Some(d) = self.rgd_d_obs {
            cfg.rgd.d_obs_star = d;
        }
        if let Some(h) = self.start_heading {
            cfg.start_heading = h;
        }
        if let Some(model) = self.drive {
            cfg.steering = Steering::DifferentialDrive(model);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub env: Environment,
    pub defaults: Defaults,
}

impl Scenario {
    pub fn new(name: impl Into<String>, env: Environment) -> Self {
        Scenario {
            name: name.into(),
            env,
            defaults: Defaults::default(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.env.dim()
    }

    /// Straight-line distance from the start to the goal ball, a lower bound
    /// on any path cost.
    pub fn straight_line_bound(&self) -> f64 {
        (self.env.start().dist(self.env.goal_center()) - self.env.goal_radius()).max(0.0)
    }

    /// `PlannerConfig::default()` with the scenario's defaults applied.
    pub fn config(&self) -> PlannerConfig {
        let mut cfg = PlannerConfig::default();
        self.defaults.apply(&mut cfg);
        cfg
    }

    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.into_scenario()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Canonical text form.
    pub fn to_json(&self) -> String {
        let env = &self.env;
        let mut s = String::new();
        let _ = writeln!(s, "{{");
        let _ = writeln!(s, "  \"format_version\": {FORMAT_VERSION},");
        let _ = writeln!(s, "  \"name\": {},", serde_json::Value::from(self.name.as_str()));
        let _ = writeln!(s, "  \"dimension\": {},", env.dim());
        let _ = writeln!(s, "  \"bounds\": {},", aabb_json(env.bounds()));
        let _ = writeln!(s, "  \"start\": {},", vec_json(env.start()));
        let _ = writeln!(
            s,
            "  \"goal\": {{\"center\": {}, \"radius\": {}}},",
            vec_json(env.goal_center()),
            fmt_g17(env.goal_radius())
        );
        if env.obstacles().is_empty() {
            let _ = writeln!(s, "  \"obstacles\": [],");
        } else {
            let _ = writeln!(s, "  \"obstacles\": [");
            let n = env.obstacles().len();
            for (i, o) in env.obstacles().iter().enumerate() {
                let sep = if i + 1 < n { "," } else { "" };
                let _ = writeln!(s, "    {}{sep}", aabb_json(o));
            }
            let _ = writeln!(s, "  ],");
        }
        let fields = defaults_fields(&self.defaults);
        if fields.is_empty() {
            let _ = writeln!(s, "  \"defaults\": {{}}");
        } else {
            let _ = writeln!(s, "  \"defaults\": {{");
            let n = fields.len();
            for (i, (k, v)) in fields.iter().enumerate() {
                let sep = if i + 1 < n { "," } else { "" };
                let _ = writeln!(s, "    \"{k}\": {v}{sep}");
            }
            let _ = writeln!(s, "  }}");
        }
        s.push_str("}\n");
        s
    }
}

/// A builtin name, or otherwise a path to a scenario file.
pub fn resolve(name_or_path: &str) -> Result<Scenario> {
    if BUILTIN_NAMES.contains(&name_or_path) {
        builtin(name_or_path)
    } else {
        Scenario::load(name_or_path)
    }
}

/// Formats `x` like C's `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    const P: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn vec_json(x: &State) -> String {
    let parts: Vec<String> = x.iter().map(|&v| fmt_g17(v)).collect();
    format!("[{}]", parts.join(", "))
}

fn aabb_json(b: &Aabb) -> String {
    format!("{{\"min\": {}, \"max\": {}}}", vec_json(&b.min), vec_json(&b.max))
}

fn defaults_fields(d: &Defaults) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if let Some(v) = d.planner {
        out.push(("planner", format!("\"{}\"", v.name())));
    }
    if let Some(n) = d.max_iters {
        out.push(("max_iters", n.to_string()));
    }
    if let Some(n) = d.node_cap {
        out.push(("node_cap", n.to_string()));
    }
    if let Some(n) = d.seed {
        out.push(("seed", n.to_string()));
    }
    let floats = [
        ("gamma", d.gamma),
        ("goal_bias", d.goal_bias),
    ];
    for (k, v) in floats {
        if let Some(v) = v {
            out.push((k, fmt_g17(v)));
        }
    }
    if let Some(k) = d.rgd_k {
        out.push(("rgd_k", k.to_string()));
    }
    let floats = [
        ("rgd_lambda", d.rgd_lambda),
        ("rgd_d_obs", d.rgd_d_obs),
        ("start_heading", d.start_heading),
    ];
    for (k, v) in floats {
        if let Some(v) = v {
            out.push((k, fmt_g17(v)));
        }
    }
    if let Some(m) = d.drive {
        out.push((
            "drive",
            format!(
                "{{\"v_max\": {}, \"w_max\": {}, \"dt\": {}, \"duration\": {}, \"control_grid\": {}}}",
                fmt_g17(m.v_max),
                fmt_g17(m.w_max),
                fmt_g17(m.dt),
                fmt_g17(m.duration),
                m.control_grid
            ),
        ));
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    format_version: u32,
    name: String,
    dimension: usize,
    bounds: RawBox,
    start: Vec<f64>,
    goal: RawGoal,
    obstacles: Vec<RawBox>,
    #[serde(default)]
    defaults: RawDefaults,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGoal {
    center: Vec<f64>,
    radius: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDefaults {
    planner: Option<String>,
    max_iters: Option<usize>,
    node_cap: Option<usize>,
    seed: Option<u64>,
    gamma: Option<f64>,
    goal_bias: Option<f64>,
    rgd_k: Option<usize>,
    rgd_lambda: Option<f64>,
    rgd_d_obs: Option<f64>,
    start_heading: Option<f64>,
    drive: Option<RawDrive>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    v_max: f64,
    w_max: f64,
    dt: f64,
    duration: f64,
    control_grid: usize,
}

impl RawScenario {
    fn into_scenario(self) -> Result<Scenario> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::invalid(
                "format_version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.format_version),
            ));
        }
        let d = self.dimension;
        let check = |field: &'static str, v: &[f64]| {
            if v.len() != d {
                return Err(Error::invalid(field, format!("has {} coordinates, dimension is {d}", v.len())));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(field, "coordinates must be finite"));
            }
            Ok(())
        };
        check("bounds", &self.bounds.min)?;
        check("bounds", &self.bounds.max)?;
        check("start", &self.start)?;
        check("goal", &self.goal.center)?;
        let bounds = Aabb::new(self.bounds.min, self.bounds.max)?;
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for o in self.obstacles {
            check("obstacles", &o.min)?;
            check("obstacles", &o.max)?;
            obstacles.push(Aabb::new(o.min, o.max).map_err(|e| match e {
                Error::Invalid { reason, .. } => Error::invalid("obstacles", reason),
                other => other,
            })?);
        }
        let env = Environment::new(bounds, obstacles, self.start, self.goal.center, self.goal.radius)?;
        let defaults = self.defaults.into_defaults()?;
        Ok(Scenario {
            name: self.name,
            env,
            defaults,
        })
    }
}

impl RawDefaults {
    fn into_defaults(self) -> Result<Defaults> {
        let planner = self.planner.as_deref().map(str::parse::<Variant>).transpose()?;
        let drive = self
            .drive
            .map(|r| {
                let m = DriveModel {
                    v_max: r.v_max,
                    w_max: r.w_max,
                    dt: r.dt,
                    duration: r.duration,
                    control_grid: r.control_grid,
                };
                m.validate().map(|_| m)
            })
            .transpose()?;
        if let Some(b) = self.goal_bias {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::invalid("goal_bias", format!("{b} is outside [0, 1)")));
            }
        }
        Ok(Defaults {
            planner,
            max_iters: self.max_iters,
            node_cap: self.node_cap,
            seed: self.seed,
            gamma: self.gamma,
            goal_bias: self.goal_bias,
            rgd_k: self.rgd_k,
            rgd_lambda: self.rgd_lambda,
            rgd_d_obs: self.rgd_d_obs,
            start_heading: self.start_heading,
            drive,
        })
    }
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Aabb {
    Aabb::new([x0, y0], [x1, y1]).expect("builtin boxes are well formed")
}

fn cuboid(min: [f64; 3], max: [f64; 3]) -> Aabb {
    Aabb::new(min, max).expect("builtin boxes are well formed")
}

fn world(
    name: &str,
    bounds: Aabb,
    obstacles: Vec<Aabb>,
    start: State,
    goal: State,
    radius: f64,
) -> Scenario {
    let env = Environment::new(bounds, obstacles, start, goal, radius).expect("builtin worlds are valid");
    Scenario::new(name, env)
}

/// One of the hand-designed worlds listed in [`BUILTIN_NAMES`].
pub fn builtin(name: &str) -> Result<Scenario> {
    let s = match name {
        "local_minima_2d" => local_minima_2d(),
        "cluttered_2d" => cluttered_2d(),
        "maze_a_2d" => maze_a_2d(),
        "maze_b_2d" => maze_b_2d(),
        "barriers_3d" => barriers_3d(),
        "narrow_3d" => narrow_3d(),
        "maze_3d" => maze_3d(),
        "diffdrive_local_minima" => diffdrive_local_minima(),
        _ => return Err(Error::UnknownScenario(name.to_string())),
    };
    Ok(s)
}

/// U-shaped obstacles opening toward the start; the potential field
/// descent from the start runs into the pocket and stalls there.
fn u_trap() -> Vec<Aabb> {
    vec![
        rect(15.0, 33.0, 35.0, 35.0),
        rect(15.0, 15.0, 35.0, 17.0),
        rect(33.0, 17.0, 35.0, 33.0),
    ]
}

/// 50 x 50 world with a U-shaped trap between start (5, 25) and goal
/// (45, 25). The optimal path hugs the top (or bottom) arm:
/// `(5,25) -> (15,35) -> (35,35) -> goal ball`, length
/// `20 + 20 sqrt(2) - 1 ~ 47.284`.
pub fn local_minima_2d() -> Scenario {
    let mut s = world(
        "local_minima_2d",
        rect(0.0, 0.0, 50.0, 50.0),
        u_trap(),
        [5.0, 25.0].into(),
        [45.0, 25.0].into(),
        1.0,
    );
    s.defaults.planner = Some(Variant::PRrtStar);
    s
}

/// 150 x 150 world packed with a staggered field of 4 x 4 blocks. A
/// diagonal channel runs from the start corner to the goal corner between
/// two staircases of 3 x 3 blocks whose corners pinch it to 0.2-wide gates
/// every 3 units. The optimal path is the straight diagonal through the
/// gates. The goal ball is small, so uniform sampling rarely lands in it.
pub fn cluttered_2d() -> Scenario {
    const W: f64 = 150.0;
    const STEP: f64 = 3.0;
    const BLOCK: f64 = 4.0;
    const PITCH: f64 = 5.5;
    let mut obstacles = Vec::new();
    // Gate i is centred on (3.6 + 3i, 3.6 + 3i); corners are computed in
    // tenths so the coordinates stay short decimals.
    let tenths = |n: i64| n as f64 / 10.0;
    for i in 0.. {
        let (lo, hi) = (35 + 30 * i, 37 + 30 * i);
        let (a, b, c, d) = (tenths(lo - 30), tenths(lo), tenths(hi), tenths(hi + 30));
        if d > W {
            break;
        }
        obstacles.push(rect(a, c, b, d));
        obstacles.push(rect(c, a, d, b));
    }
    // Keep the field clear of a band around the channel walls.
    let margin = STEP + 1.5;
    let rows = (W / PITCH) as usize;
    for j in 0..rows {
        for i in 0..=rows {
            let x = 1.0 + PITCH * i as f64 + if j % 2 == 1 { PITCH / 2.0 } else { 0.0 };
            let y = 1.0 + PITCH * j as f64;
            let (x1, y1) = (x + BLOCK, y + BLOCK);
            if x1 > W - 0.5 || y1 > W - 0.5 {
                continue;
            }
            let (a, b) = (x - y1, x1 - y);
            if a.min(b) > margin || a.max(b) < -margin {
                obstacles.push(rect(x, y, x1, y1));
            }
        }
    }
    let mut s = world(
        "cluttered_2d",
        rect(0.0, 0.0, W, W),
        obstacles,
        [1.0, 1.0].into(),
        [W - 1.5, W - 1.5].into(),
        0.15,
    );
    s.defaults.planner = Some(Variant::PRrtStar);
    s
}

/// Serpentine: vertical walls with alternating gaps at the top and bottom.
pub fn maze_a_2d() -> Scenario {
    let mut obstacles = Vec::new();
    for i in 0..4 {
        let x = 9.0 + 10.0 * i as f64;
        if i % 2 == 0 {
            obstacles.push(rect(x, 0.0, x + 2.0, 42.0));
        } else {
            obstacles.push(rect(x, 8.0, x + 2.0, 50.0));
        }
    }
    world(
        "maze_a_2d",
        rect(0.0, 0.0, 50.0, 50.0),
        obstacles,
        [3.0, 3.0].into(),
        [47.0, 47.0].into(),
        1.5,
    )
}

/// Nested rings of walls, each with one doorway on a different side.
pub fn maze_b_2d() -> Scenario {
    let obstacles = vec![
        // outer ring, door on the left
        rect(5.0, 5.0, 45.0, 7.0),
        rect(5.0, 43.0, 45.0, 45.0),
        rect(43.0, 7.0, 45.0, 43.0),
        rect(5.0, 7.0, 7.0, 20.0),
        rect(5.0, 26.0, 7.0, 43.0),
        // inner ring, door on the right
        rect(14.0, 14.0, 36.0, 16.0),
        rect(14.0, 34.0, 36.0, 36.0),
        rect(14.0, 16.0, 16.0, 34.0),
        rect(34.0, 16.0, 36.0, 22.0),
        rect(34.0, 28.0, 36.0, 34.0),
    ];
    world(
        "maze_b_2d",
        rect(0.0, 0.0, 50.0, 50.0),
        obstacles,
        [2.0, 48.0].into(),
        [25.0, 25.0].into(),
        1.5,
    )
}

/// Three thick plates across the x axis, each with a window in a
/// different corner.
pub fn barriers_3d() -> Scenario {
    let mut obstacles = Vec::new();
    let windows = [(2.0, 2.0), (14.0, 14.0), (2.0, 14.0)];
    for (i, &(wy, wz)) in windows.iter().enumerate() {
        let x0 = 5.0 + 5.0 * i as f64;
        let x1 = x0 + 1.0;
        let (w0y, w1y, w0z, w1z) = (wy, wy + 4.0, wz, wz + 4.0);
        // Plate minus a square window, as four slabs.
        obstacles.push(cuboid([x0, 0.0, 0.0], [x1, w0y, 20.0]));
        obstacles.push(cuboid([x0, w1y, 0.0], [x1, 20.0, 20.0]));
        obstacles.push(cuboid([x0, w0y, 0.0], [x1, w1y, w0z]));
        obstacles.push(cuboid([x0, w0y, w1z], [x1, w1y, 20.0]));
    }
    world(
        "barriers_3d",
        cuboid([0.0; 3], [20.0; 3]),
        obstacles,
        [1.0, 10.0, 10.0].into(),
        [19.0, 10.0, 10.0].into(),
        0.8,
    )
}

/// Two plates pierced only by slots one unit wide.
pub fn narrow_3d() -> Scenario {
    let obstacles = vec![
        // first plate: vertical slot at y in [9.5, 10.5]
        cuboid([6.0, 0.0, 0.0], [7.0, 9.5, 20.0]),
        cuboid([6.0, 10.5, 0.0], [7.0, 20.0, 20.0]),
        // second plate: horizontal slot at z in [4.5, 5.5]
        cuboid([13.0, 0.0, 0.0], [14.0, 20.0, 4.5]),
        cuboid([13.0, 0.0, 5.5], [14.0, 20.0, 20.0]),
    ];
    world(
        "narrow_3d",
        cuboid([0.0; 3], [20.0; 3]),
        obstacles,
        [2.0, 10.0, 10.0].into(),
        [18.0, 10.0, 5.0].into(),
        0.8,
    )
}

/// Three floors joined by shafts at alternating corners.
pub fn maze_3d() -> Scenario {
    let obstacles = vec![
        // floor at z in [6, 7], shaft near (17, 17)
        cuboid([0.0, 0.0, 6.0], [15.0, 20.0, 7.0]),
        cuboid([15.0, 0.0, 6.0], [20.0, 15.0, 7.0]),
        // floor at z in [13, 14], shaft near (3, 3)
        cuboid([5.0, 0.0, 13.0], [20.0, 20.0, 14.0]),
        cuboid([0.0, 5.0, 13.0], [5.0, 20.0, 14.0]),
        // partition on the middle level
        cuboid([9.0, 5.0, 7.0], [11.0, 20.0, 13.0]),
    ];
    world(
        "maze_3d",
        cuboid([0.0; 3], [20.0; 3]),
        obstacles,
        [2.0, 2.0, 2.0].into(),
        [17.0, 17.0, 17.0].into(),
        1.0,
    )
}

/// 100 x 100 world with a 14 x 14 U-shaped trap in the middle, opening
/// toward the start. The differential-drive robot starts at (5, 50) facing
/// the pocket; the goal ball sits behind the trap at (95, 50).
pub fn diffdrive_local_minima() -> Scenario {
    let mut s = world(
        "diffdrive_local_minima",
        rect(0.0, 0.0, 100.0, 100.0),
        vec![
            rect(43.0, 55.0, 57.0, 57.0),
            rect(43.0, 43.0, 57.0, 45.0),
            rect(55.0, 45.0, 57.0, 55.0),
        ],
        [5.0, 50.0].into(),
        [95.0, 50.0].into(),
        1.5,
    );
    s.defaults.planner = Some(Variant::PRrtStar);
    s.defaults.start_heading = Some(0.0);
    s.defaults.drive = Some(DriveModel::default());
    s
}
