//! Points, axis-aligned obstacles and the collision queries every planner
//! component is built on.
//!
//! The robot is a point. Obstacles are closed axis-aligned boxes: a state on
//! an obstacle face is occupied, a state on the world boundary is free.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Deref, Index};

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Absolute tolerance used where exact comparison is impossible.
pub const EPS: f64 = 1e-9;

/// A point in a d-dimensional configuration space.
#[derive(Clone, PartialEq, Default)]
pub struct State(SmallVec<[f64; 3]>);

impl State {
    pub fn new(coords: impl IntoIterator<Item = f64>) -> Self {
        State(coords.into_iter().collect())
    }

    pub fn zeros(dim: usize) -> Self {
        State(SmallVec::from_elem(0.0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Euclidean distance. Dimensions are assumed to match; see [`distance`]
    /// for the checked variant.
    #[inline]
    pub fn dist(&self, other: &State) -> f64 {
        self.dist_sq(other).sqrt()
    }

    #[inline]
    pub fn dist_sq(&self, other: &State) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `self - other`, componentwise.
    pub fn sub(&self, other: &State) -> State {
        State(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    /// `self + scale * dir`.
    pub fn add_scaled(&self, dir: &State, scale: f64) -> State {
        State(
            self.0
                .iter()
                .zip(dir.0.iter())
                .map(|(a, b)| a + scale * b)
                .collect(),
        )
    }

    pub fn scaled(&self, scale: f64) -> State {
        State(self.0.iter().map(|c| c * scale).collect())
    }

    pub fn divided(&self, denom: f64) -> State {
        State(self.0.iter().map(|c| c / denom).collect())
    }

    pub fn dot(&self, other: &State) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Linear interpolation `(1 - s) * self + s * other`.
    pub fn lerp(&self, other: &State, s: f64) -> State {
        State(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| (1.0 - s) * a + s * b)
                .collect(),
        )
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Deref for State {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for State {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const N: usize> From<[f64; N]> for State {
    fn from(coords: [f64; N]) -> Self {
        State::new(coords)
    }
}

impl From<Vec<f64>> for State {
    fn from(coords: Vec<f64>) -> Self {
        State(SmallVec::from_vec(coords))
    }
}

/// Checked Euclidean distance.
pub fn distance(a: &State, b: &State) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(a.dist(b))
}

/// Closed axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct Aabb {
    pub min: State,
    pub max: State,
}

impl Aabb {
    pub fn new(min: impl Into<State>, max: impl Into<State>) -> Result<Self> {
        let (min, max) = (min.into(), max.into());
        if min.dim() != max.dim() {
            return Err(Error::DimensionMismatch {
                expected: min.dim(),
                got: max.dim(),
            });
        }
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::invalid("aabb", "corners must be finite"));
        }
        if min.iter().zip(max.iter()).any(|(lo, hi)| lo > hi) {
            return Err(Error::invalid("aabb", "min corner exceeds max corner"));
        }
        Ok(Aabb { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.dim()
    }

    pub fn contains(&self, x: &State) -> bool {
        (0..self.dim()).all(|i| self.min[i] <= x[i] && x[i] <= self.max[i])
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.max[i] - self.min[i]).product()
    }

    pub fn diagonal(&self) -> f64 {
        self.min.dist(&self.max)
    }

    pub fn center(&self) -> State {
        self.min.lerp(&self.max, 0.5)
    }

    /// Per-axis clamp of `x` onto the box: the closest point of the box.
    pub fn clamp(&self, x: &State) -> State {
        State::new((0..self.dim()).map(|i| x[i].clamp(self.min[i], self.max[i])))
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        (0..self.dim()).all(|i| self.min[i] <= other.max[i] && other.min[i] <= self.max[i])
    }

    /// Smallest box containing both endpoints.
    pub fn of_segment(a: &State, b: &State) -> Aabb {
        Aabb {
            min: State::new(a.iter().zip(b.iter()).map(|(p, q)| p.min(*q))),
            max: State::new(a.iter().zip(b.iter()).map(|(p, q)| p.max(*q))),
        }
    }

    /// Exact slab test: does the closed segment `a -> b` touch the closed box?
    pub fn intersects_segment(&self, a: &State, b: &State) -> bool {
        let mut t_enter = 0.0_f64;
        let mut t_exit = 1.0_f64;
        for i in 0..self.dim() {
            let delta = b[i] - a[i];
            if delta == 0.0 {
                if a[i] < self.min[i] || a[i] > self.max[i] {
                    return false;
                }
                continue;
            }
            let inv = 1.0 / delta;
            let mut t0 = (self.min[i] - a[i]) * inv;
            let mut t1 = (self.max[i] - a[i]) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_enter = t_enter.max(t0);
            t_exit = t_exit.min(t1);
            if t_enter > t_exit {
                return false;
            }
        }
        true
    }
}

/// Result of a nearest-obstacle query.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstacleProximity {
    /// Distance to the union of obstacles; `+inf` when there are none.
    pub distance: f64,
    /// A point of the obstacle set achieving `distance`. Equals the query
    /// point when it lies inside an obstacle or when there are no obstacles.
    pub closest: State,
}

/// The planning problem's workspace: bounds, obstacles, start and goal ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    bounds: Aabb,
    obstacles: Vec<Aabb>,
    start: State,
    goal_center: State,
    goal_radius: f64,
}

impl Environment {
    /// Builds and validates an environment.
    pub fn new(
        bounds: Aabb,
        obstacles: Vec<Aabb>,
        start: impl Into<State>,
        goal_center: impl Into<State>,
        goal_radius: f64,
    ) -> Result<Self> {
        let (start, goal_center) = (start.into(), goal_center.into());
        let dim = bounds.dim();
        if dim < 2 {
            return Err(Error::invalid("dimension", "must be at least 2"));
        }
        let dims = [start.dim(), goal_center.dim()]
            .into_iter()
            .chain(obstacles.iter().map(Aabb::dim));
        if let Some(got) = dims.into_iter().find(|&d| d != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got });
        }
        if bounds.volume() <= 0.0 {
            return Err(Error::invalid("bounds", "must have positive volume"));
        }
        if !(goal_radius > 0.0 && goal_radius.is_finite()) {
            return Err(Error::invalid("goal", "radius must be positive and finite"));
        }
        if !start.is_finite() || !goal_center.is_finite() {
            return Err(Error::invalid("start", "coordinates must be finite"));
        }
        let env = Environment {
            bounds,
            obstacles,
            start,
            goal_center,
            goal_radius,
        };
        if !env.bounds.contains(&env.start) {
            return Err(Error::invalid("start", "outside the world bounds"));
        }
        if env.obstacles.iter().any(|o| o.contains(&env.start)) {
            return Err(Error::invalid("start", "inside an obstacle"));
        }
        let b = &env.bounds;
        if (0..dim).any(|i| {
            env.goal_center[i] - goal_radius < b.min[i] - EPS
                || env.goal_center[i] + goal_radius > b.max[i] + EPS
        }) {
            return Err(Error::invalid("goal", "goal ball leaves the world bounds"));
        }
        Ok(env)
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[Aabb] {
        &self.obstacles
    }

    pub fn start(&self) -> &State {
        &self.start
    }

    pub fn goal_center(&self) -> &State {
        &self.goal_center
    }

    pub fn goal_radius(&self) -> f64 {
        self.goal_radius
    }

    pub fn in_goal(&self, x: &State) -> bool {
        x.dist_sq(&self.goal_center) <= self.goal_radius * self.goal_radius
    }

    /// Inside the bounds and outside every (closed) obstacle.
    pub fn point_free(&self, x: &State) -> bool {
        self.bounds.contains(x) && !self.obstacles.iter().any(|o| o.contains(x))
    }

    /// Whether the closed straight segment `a -> b` stays in free space.
    pub fn segment_free(&self, a: &State, b: &State) -> bool {
        if !self.bounds.contains(a) || !self.bounds.contains(b) {
            return false;
        }
        let sweep = Aabb::of_segment(a, b);
        !self
            .obstacles
            .iter()
            .any(|o| o.intersects(&sweep) && o.intersects_segment(a, b))
    }

    /// Exact distance from `x` to the union of obstacles.
    pub fn nearest_obstacle(&self, x: &State) -> ObstacleProximity {
        let mut best = ObstacleProximity {
            distance: f64::INFINITY,
            closest: x.clone(),
        };
        let mut best_sq = f64::INFINITY;
        for o in &self.obstacles {
            let p = o.clamp(x);
            let d_sq = p.dist_sq(x);
            if d_sq < best_sq {
                best_sq = d_sq;
                best.closest = p;
                if d_sq == 0.0 {
                    best.distance = 0.0;
                    best.closest = x.clone();
                    return best;
                }
            }
        }
        best.distance = best_sq.sqrt();
        best
    }

    /// Distance to the nearest obstacle without materialising the point.
    pub fn obstacle_clearance(&self, x: &State) -> f64 {
        let mut best_sq = f64::INFINITY;
        for o in &self.obstacles {
            let mut d_sq = 0.0;
            for i in 0..x.dim() {
                let c = x[i].clamp(o.min[i], o.max[i]) - x[i];
                d_sq += c * c;
            }
            best_sq = best_sq.min(d_sq);
        }
        best_sq.sqrt()
    }

    /// Lebesgue measure of the bounds. Used as an upper bound on the free
    /// measure.
    pub fn free_measure(&self) -> f64 {
        self.bounds.volume()
    }
}

/// Volume of the unit ball in `d` dimensions, `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // V(d) = V(d - 2) * 2 pi / d, V(0) = 1, V(1) = 2.
    let (mut v, start) = if d.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_world(obstacles: Vec<Aabb>) -> Environment {
        Environment::new(
            Aabb::new([0.0, 0.0], [10.0, 10.0]).unwrap(),
            obstacles,
            [0.5, 0.5],
            [9.0, 9.0],
            0.5,
        )
        .unwrap()
    }

    fn random_box_world(rng: &mut ChaCha8Rng, count: usize) -> Environment {
        let obstacles = (0..count)
            .map(|_| {
                let x = rng.random_range(1.0..8.0);
                let y = rng.random_range(1.0..8.0);
                let w = rng.random_range(0.1..2.0);
                let h = rng.random_range(0.1..2.0);
                Aabb::new([x, y], [x + w, y + h]).unwrap()
            })
            .filter(|o| !o.contains(&State::from([0.5, 0.5])))
            .collect();
        unit_world(obstacles)
    }

    /// Dense sampling along the segment at a fixed step.
    fn sampled_segment_free(env: &Environment, a: &State, b: &State, step: f64) -> bool {
        let len = a.dist(b);
        let n = ((len / step).ceil() as usize).max(1);
        (0..=n).all(|i| env.point_free(&a.lerp(b, i as f64 / n as f64)))
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0].into(), &[3.0, 4.0].into()).unwrap(), 5.0);
        let x = State::from([1.5, -2.0]);
        assert_eq!(distance(&x, &x).unwrap(), 0.0);
        let d = distance(&[1.0, 1.0, 1.0].into(), &[2.0, 2.0, 2.0].into()).unwrap();
        assert!((d - 3f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            distance(&[0.0, 0.0].into(), &[0.0, 0.0, 0.0].into()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn triangle_inequality_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let mut p = || State::new((0..3).map(|_| rng.random_range(-50.0..50.0)));
            let (a, b, c) = (p(), p(), p());
            assert!(a.dist(&c) <= a.dist(&b) + b.dist(&c) + EPS);
        }
    }

    #[test]
    fn point_free_conventions() {
        let env = unit_world(vec![Aabb::new([4.0, 4.0], [6.0, 6.0]).unwrap()]);
        assert!(unit_world(vec![]).point_free(&[5.0, 5.0].into()));
        assert!(!env.point_free(&[5.0, 5.0].into()));
        assert!(!env.point_free(&[4.0, 5.0].into()), "obstacle face is occupied");
        assert!(env.point_free(&[0.0, 10.0].into()), "world boundary is free");
        assert!(!env.point_free(&[-0.1, 5.0].into()));
    }

    #[test]
    fn segment_free_examples() {
        let empty = unit_world(vec![]);
        assert!(empty.segment_free(&[0.0, 0.0].into(), &[10.0, 10.0].into()));

        let env = unit_world(vec![Aabb::new([4.0, 4.0], [6.0, 6.0]).unwrap()]);
        assert!(!env.segment_free(&[3.0, 5.0].into(), &[7.0, 5.0].into()));
        // Grazing the top face and touching the corner both count as contact.
        assert!(!env.segment_free(&[2.0, 6.0].into(), &[8.0, 6.0].into()));
        assert!(!env.segment_free(&[3.0, 5.0].into(), &[5.0, 7.0].into()));
        assert!(env.segment_free(&[2.0, 6.0 + 1e-6].into(), &[8.0, 6.0 + 1e-6].into()));
        assert!(!env.segment_free(&[5.0, 1.0].into(), &[5.0, 11.0].into()));
    }

    #[test]
    fn segment_free_matches_dense_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut grazes = 0;
        for world in 0..100 {
            let env = random_box_world(&mut rng, 1 + world % 12);
            for _ in 0..100 {
                let mut p = || State::from([rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)]);
                let (a, b) = (p(), p());
                let exact = env.segment_free(&a, &b);
                let step = 1e-4 * a.dist(&b).max(1e-3);
                let sampled = sampled_segment_free(&env, &a, &b, step);
                if exact != sampled {
                    // Sampling can only miss a contact, never invent one, and a
                    // missed contact must pass within one sampling step.
                    assert!(!exact && sampled);
                    let n = (a.dist(&b) / step).ceil() as usize;
                    let closest = (0..=n)
                        .map(|i| env.obstacle_clearance(&a.lerp(&b, i as f64 / n as f64)))
                        .fold(f64::INFINITY, f64::min);
                    assert!(closest <= step, "exact check reports a contact {closest} away");
                    grazes += 1;
                }
            }
        }
        assert!(grazes <= 2, "{grazes} near-tangent cases");
    }

    #[test]
    fn segment_degenerates_to_point_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let env = random_box_world(&mut rng, 10);
        for _ in 0..10_000 {
            let x = State::from([rng.random_range(-1.0..11.0), rng.random_range(-1.0..11.0)]);
            assert_eq!(env.segment_free(&x, &x), env.point_free(&x));
        }
    }

    #[test]
    fn nearest_obstacle_examples() {
        let env = Environment::new(
            Aabb::new([-5.0, -5.0], [5.0, 5.0]).unwrap(),
            vec![Aabb::new([1.0, 1.0], [2.0, 2.0]).unwrap()],
            [0.0, 0.0],
            [-3.0, -3.0],
            0.5,
        )
        .unwrap();
        let p = env.nearest_obstacle(&[0.0, 0.0].into());
        assert!((p.distance - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.closest, State::from([1.0, 1.0]));

        let inside = State::from([1.5, 1.2]);
        let p = env.nearest_obstacle(&inside);
        assert_eq!(p.distance, 0.0);
        assert_eq!(p.closest, inside);

        let none = unit_world(vec![]);
        assert!(none.nearest_obstacle(&[1.0, 1.0].into()).distance.is_infinite());
    }

    #[test]
    fn nearest_obstacle_matches_surface_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let count = rng.random_range(1..5);
            let env = random_box_world(&mut rng, count);
            let x = State::from([rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)]);
            let exact = env.nearest_obstacle(&x);
            if exact.distance == 0.0 {
                continue;
            }
            // 2500 samples per edge, 10^4 per box surface.
            let per_edge = 2500;
            let mut best = f64::INFINITY;
            let mut max_pitch: f64 = 0.0;
            for o in env.obstacles() {
                let (x0, y0, x1, y1) = (o.min[0], o.min[1], o.max[0], o.max[1]);
                let corners = [[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]];
                for w in corners.windows(2) {
                    let (a, b) = (State::from(w[0]), State::from(w[1]));
                    max_pitch = max_pitch.max(a.dist(&b) / per_edge as f64);
                    for i in 0..=per_edge {
                        let s = a.lerp(&b, i as f64 / per_edge as f64);
                        let d = s.dist(&x);
                        assert!(exact.distance <= d + EPS);
                        best = best.min(d);
                    }
                }
            }
            assert!(best - exact.distance <= 2.0 * max_pitch + EPS);
            assert!((exact.closest.dist(&x) - exact.distance).abs() < EPS);
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn free_measure_is_bounds_volume() {
        assert_eq!(unit_world(vec![]).free_measure(), 100.0);
        let with_box = unit_world(vec![Aabb::new([4.0, 4.0], [6.0, 6.0]).unwrap()]);
        assert_eq!(with_box.free_measure(), 100.0);
        let cube = Environment::new(
            Aabb::new([0.0; 3], [1.0; 3]).unwrap(),
            vec![],
            [0.1; 3],
            [0.5; 3],
            0.1,
        )
        .unwrap();
        assert_eq!(cube.free_measure(), 1.0);
    }

    #[test]
    fn environment_rejects_bad_problems() {
        let bounds = Aabb::new([0.0, 0.0], [10.0, 10.0]).unwrap();
        let wall = Aabb::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let err = Environment::new(bounds.clone(), vec![wall], [0.5, 0.5], [5.0, 5.0], 1.0);
        assert!(matches!(err, Err(Error::Invalid { field: "start", .. })));
        let err = Environment::new(bounds.clone(), vec![], [0.5, 0.5], [9.8, 5.0], 1.0);
        assert!(matches!(err, Err(Error::Invalid { field: "goal", .. })));
        assert!(Aabb::new([1.0, 0.0], [0.0, 1.0]).is_err());
    }
}
