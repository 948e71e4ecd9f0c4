use crate::geometry::{Environment, State, EPS};
use crate::kinodynamic::{constraint_residual, trajectory_free, DriveState};
use crate::spatial_index::VertexId;

/// Rooted planning tree with parent links and cost-to-come.
///
/// Vertices are never removed; ids are dense indices in insertion order and
/// the root is always vertex 0.
#[derive(Debug, Clone)]
pub struct Tree {
    states: Vec<State>,
    parent: Vec<Option<VertexId>>,
    cost: Vec<f64>,
    edge_cost: Vec<f64>,
    children: Vec<Vec<VertexId>>,
    heading: Vec<f64>,
    trajectories: Vec<Option<Vec<DriveState>>>,
}

impl Tree {
    pub fn new(root: State) -> Self {
        Self::with_heading(root, 0.0)
    }

    pub fn with_heading(root: State, heading: f64) -> Self {
        Tree {
            states: vec![root],
            parent: vec![None],
            cost: vec![0.0],
            edge_cost: vec![0.0],
            children: vec![Vec::new()],
            heading: vec![heading],
            trajectories: vec![None],
        }
    }

    pub const ROOT: VertexId = 0;

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, v: VertexId) -> &State {
        &self.states[v]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn cost(&self, v: VertexId) -> f64 {
        self.cost[v]
    }

    /// Cost of the edge from `v`'s parent to `v`.
    pub fn edge_cost(&self, v: VertexId) -> f64 {
        self.edge_cost[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn heading(&self, v: VertexId) -> f64 {
        self.heading[v]
    }

    pub fn drive_state(&self, v: VertexId) -> DriveState {
        let p = &self.states[v];
        DriveState::new(p[0], p[1], self.heading[v])
    }

    /// Integrated trajectory from the parent, for kinodynamic edges.
    pub fn trajectory(&self, v: VertexId) -> Option<&[DriveState]> {
        self.trajectories[v].as_deref()
    }

    /// `(parent, child)` pairs in child order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
    }

    /// Appends a straight-edge vertex.
    pub fn add(&mut self, state: State, parent: VertexId) -> VertexId {
        let edge = self.states[parent].dist(&state);
        self.push(state, parent, edge, 0.0, None)
    }

    /// Appends a vertex reached by an integrated trajectory.
    pub fn add_trajectory(&mut self, parent: VertexId, traj: Vec<DriveState>, cost: f64) -> VertexId {
        let end = *traj.last().expect("trajectory has an endpoint");
        self.push(end.position(), parent, cost, end.theta, Some(traj))
    }

    fn push(
        &mut self,
        state: State,
        parent: VertexId,
        edge: f64,
        heading: f64,
        traj: Option<Vec<DriveState>>,
    ) -> VertexId {
        let id = self.states.len();
        self.states.push(state);
        self.parent.push(Some(parent));
        self.cost.push(self.cost[parent] + edge);
        self.edge_cost.push(edge);
        self.children.push(Vec::new());
        self.children[parent].push(id);
        self.heading.push(heading);
        self.trajectories.push(traj);
        id
    }

    /// Makes `new_parent` the parent of `v` over a straight edge and pushes
    /// the cost change down `v`'s subtree. Calls `on_cost` for every vertex
    /// whose cost changed, `v` included.
    pub fn reparent(&mut self, v: VertexId, new_parent: VertexId, mut on_cost: impl FnMut(VertexId, f64)) {
        debug_assert!(!self.is_ancestor(v, new_parent), "reparenting would create a cycle");
        if let Some(old) = self.parent[v] {
            let siblings = &mut self.children[old];
            if let Some(pos) = siblings.iter().position(|&c| c == v) {
                siblings.swap_remove(pos);
            }
        }
        self.parent[v] = Some(new_parent);
        self.children[new_parent].push(v);
        self.edge_cost[v] = self.states[new_parent].dist(&self.states[v]);
        self.trajectories[v] = None;

        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let p = self.parent[u].expect("non-root");
            self.cost[u] = self.cost[p] + self.edge_cost[u];
            on_cost(u, self.cost[u]);
            stack.extend_from_slice(&self.children[u]);
        }
    }

    /// Whether `a` lies on the path from `b` to the root (`b` included).
    pub fn is_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        let mut cur = Some(b);
        while let Some(v) = cur {
            if v == a {
                return true;
            }
            cur = self.parent[v];
        }
        false
    }

    /// Vertices from the root down to `v`.
    pub fn path_to(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Checks the structural invariants: single zero-cost root, acyclic
    /// parent links, consistent costs and collision-free edges.
    pub fn check_invariants(&self, env: &Environment) -> Result<(), String> {
        if self.parent[Self::ROOT].is_some() || self.cost[Self::ROOT] != 0.0 {
            return Err("root must have no parent and zero cost".into());
        }
        let n = self.len();
        let mut child_count = 0;
        for v in 1..n {
            let Some(p) = self.parent[v] else {
                return Err(format!("vertex {v} has no parent"));
            };
            // Every chain must reach the root in fewer than n hops.
            let mut cur = v;
            let mut hops = 0;
            while let Some(q) = self.parent[cur] {
                cur = q;
                hops += 1;
                if hops > n {
                    return Err(format!("cycle through vertex {v}"));
                }
            }
            if cur != Self::ROOT {
                return Err(format!("vertex {v} does not reach the root"));
            }
            let expected = self.cost[p] + self.edge_cost[v];
            if (self.cost[v] - expected).abs() > EPS {
                return Err(format!("vertex {v}: cost {} != {}", self.cost[v], expected));
            }
            match &self.trajectories[v] {
                None => {
                    let len = self.states[p].dist(&self.states[v]);
                    if (self.edge_cost[v] - len).abs() > EPS {
                        return Err(format!("vertex {v}: edge cost is not the segment length"));
                    }
                    if !env.segment_free(&self.states[p], &self.states[v]) {
                        return Err(format!("edge {p} -> {v} collides"));
                    }
                }
                Some(traj) => {
                    let start = traj[0].position();
                    let end = traj.last().unwrap().position();
                    if start.dist(&self.states[p]) > EPS || end.dist(&self.states[v]) > EPS {
                        return Err(format!("trajectory of {v} does not join its endpoints"));
                    }
                    if !trajectory_free(env, traj) {
                        return Err(format!("trajectory {p} -> {v} collides"));
                    }
                }
            }
            if !self.children[p].contains(&v) {
                return Err(format!("vertex {v} missing from children of {p}"));
            }
        }
        for c in &self.children {
            child_count += c.len();
        }
        if child_count != n - 1 {
            return Err("child lists disagree with parent links".into());
        }
        Ok(())
    }

    /// Largest non-holonomic residual over all stored trajectories.
    pub fn max_constraint_residual(&self) -> f64 {
        self.trajectories
            .iter()
            .flatten()
            .map(|t| constraint_residual(t))
            .fold(0.0, f64::max)
    }
}
