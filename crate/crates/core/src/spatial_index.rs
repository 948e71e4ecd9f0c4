//! Exact nearest-neighbour and fixed-radius queries over tree vertices, and
//! the shrinking neighbourhood radius used by RRT*.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Environment, State};

/// Opaque handle of a tree vertex.
pub type VertexId = usize;

/// Exact point index. Implementations must agree with a linear scan.
pub trait NeighborIndex {
    fn insert(&mut self, point: State, id: VertexId) -> Result<()>;

    /// Closest entry; ties go to the lowest id. `None` when empty.
    fn nearest(&self, x: &State) -> Option<VertexId>;

    /// Every entry with `distance <= r`, sorted by id.
    fn within(&self, x: &State, r: f64) -> Vec<VertexId>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Brute-force index. Reference implementation for the kd-tree.
#[derive(Debug, Default, Clone)]
pub struct LinearIndex {
    entries: Vec<(State, VertexId)>,
    ids: HashSet<VertexId>,
}

impl LinearIndex {
    pub fn new() -> Self {
        Self::default()
    }
}

impl NeighborIndex for LinearIndex {
    fn insert(&mut self, point: State, id: VertexId) -> Result<()> {
        if !self.ids.insert(id) {
            return Err(Error::DuplicateId(id));
        }
        self.entries.push((point, id));
        Ok(())
    }

    fn nearest(&self, x: &State) -> Option<VertexId> {
        self.entries
            .iter()
            .map(|(p, id)| (p.dist_sq(x), *id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
    }

    fn within(&self, x: &State, r: f64) -> Vec<VertexId> {
        let r_sq = r * r;
        let mut ids: Vec<_> = self
            .entries
            .iter()
            .filter(|(p, _)| p.dist_sq(x) <= r_sq)
            .map(|(_, id)| *id)
            .collect();
        ids.sort_unstable();
        ids
    }

    fn len(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Debug, Clone)]
struct KdNode {
    point: State,
    id: VertexId,
    axis: usize,
    children: [Option<u32>; 2],
}

/// Incrementally built kd-tree. Splitting axes cycle with depth; no
/// rebalancing, which is fine for the randomly ordered inserts a sampling
/// planner produces.
#[derive(Debug, Default, Clone)]
pub struct KdTree {
    nodes: Vec<KdNode>,
    ids: HashSet<VertexId>,
}

impl KdTree {
    pub fn new() -> Self {
        Self::default()
    }

    fn nearest_rec(&self, node: u32, x: &State, best: &mut (f64, VertexId)) {
        let n = &self.nodes[node as usize];
        let d_sq = n.point.dist_sq(x);
        if d_sq < best.0 || (d_sq == best.0 && n.id < best.1) {
            *best = (d_sq, n.id);
        }
        let diff = x[n.axis] - n.point[n.axis];
        let (near, far) = if diff < 0.0 {
            (n.children[0], n.children[1])
        } else {
            (n.children[1], n.children[0])
        };
        if let Some(c) = near {
            self.nearest_rec(c, x, best);
        }
        // `<=` so that equidistant entries with lower ids are still found.
        if let Some(c) = far {
            if diff * diff <= best.0 {
                self.nearest_rec(c, x, best);
            }
        }
    }

    fn within_rec(&self, node: u32, x: &State, r: f64, r_sq: f64, out: &mut Vec<VertexId>) {
        let n = &self.nodes[node as usize];
        if n.point.dist_sq(x) <= r_sq {
            out.push(n.id);
        }
        let diff = x[n.axis] - n.point[n.axis];
        if let Some(c) = n.children[0] {
            if diff <= r {
                self.within_rec(c, x, r, r_sq, out);
            }
        }
        if let Some(c) = n.children[1] {
            if diff >= -r {
                self.within_rec(c, x, r, r_sq, out);
            }
        }
    }
}

impl NeighborIndex for KdTree {
    fn insert(&mut self, point: State, id: VertexId) -> Result<()> {
        if !point.is_finite() {
            return Err(Error::invalid("point", "coordinates must be finite"));
        }
        if !self.ids.insert(id) {
            return Err(Error::DuplicateId(id));
        }
        let slot = self.nodes.len() as u32;
        let dim = point.dim();
        if self.nodes.is_empty() {
            self.nodes.push(KdNode {
                point,
                id,
                axis: 0,
                children: [None, None],
            });
            return Ok(());
        }
        let mut cur = 0usize;
        let axis = loop {
            let n = &self.nodes[cur];
            let side = usize::from(point[n.axis] >= n.point[n.axis]);
            match n.children[side] {
                Some(next) => cur = next as usize,
                None => {
                    let axis = (n.axis + 1) % dim;
                    self.nodes[cur].children[side] = Some(slot);
                    break axis;
                }
            }
        };
        self.nodes.push(KdNode {
            point,
            id,
            axis,
            children: [None, None],
        });
        Ok(())
    }

    fn nearest(&self, x: &State) -> Option<VertexId> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, VertexId::MAX);
        self.nearest_rec(0, x, &mut best);
        Some(best.1)
    }

    fn within(&self, x: &State, r: f64) -> Vec<VertexId> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() && r >= 0.0 {
            self.within_rec(0, x, r, r * r, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }
}

/// `gamma^* = (2 (1 + 1/d))^(1/d) * (mu(X_free) / zeta_d)^(1/d)`, with the
/// bounds volume standing in for the free measure.
pub fn gamma_star(env: &Environment, d: usize) -> f64 {
    let d_f = d as f64;
    (2.0 * (1.0 + 1.0 / d_f)).powf(1.0 / d_f)
        * (env.free_measure() / unit_ball_volume(d)).powf(1.0 / d_f)
}

/// Parameters of the neighbourhood radius rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearParams {
    pub gamma: f64,
    pub dimension: usize,
}

impl NearParams {
    /// Checked constructor: `gamma` must exceed `gamma_star(env, d)`.
    pub fn new(env: &Environment, gamma: f64) -> Result<Self> {
        let dimension = env.dim();
        let floor = gamma_star(env, dimension);
        if gamma.is_nan() || gamma <= floor {
            return Err(Error::invalid(
                "gamma",
                format!("{gamma} does not exceed gamma* = {floor}"),
            ));
        }
        Ok(NearParams { gamma, dimension })
    }

    /// Skips the lower-bound check.
    pub fn unchecked(gamma: f64, dimension: usize) -> Self {
        NearParams { gamma, dimension }
    }
}

/// `gamma (ln n / n)^(1/d)`, zero for `n < 2`.
pub fn near_radius(n: usize, params: NearParams) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let n = n as f64;
    params.gamma * (n.ln() / n).powf(1.0 / params.dimension as f64)
}
