use crate::geometry::{Environment, State};
use crate::spatial_index::VertexId;

use super::tree::Tree;

/// Straight-line local path `tau(s) = (1 - s) x1 + s x2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub from: State,
    pub to: State,
}

impl Segment {
    pub fn cost(&self) -> f64 {
        self.from.dist(&self.to)
    }

    pub fn at(&self, s: f64) -> State {
        self.from.lerp(&self.to, s)
    }

    pub fn reversed(&self) -> Segment {
        Segment {
            from: self.to.clone(),
            to: self.from.clone(),
        }
    }

    pub fn is_free(&self, env: &Environment) -> bool {
        env.segment_free(&self.from, &self.to)
    }
}

pub fn extend_to(x1: &State, x2: &State) -> Segment {
    debug_assert_eq!(x1.dim(), x2.dim());
    Segment {
        from: x1.clone(),
        to: x2.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub vertex: VertexId,
    /// Cost-to-come of the sample through `vertex`.
    pub cost: f64,
    pub tau: Segment,
}

/// Candidate parents sorted by `(cost, vertex)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateTuple {
    pub entries: Vec<Candidate>,
}

impl CandidateTuple {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn get_tuple(x: &State, near: &[VertexId], tree: &Tree) -> CandidateTuple {
    let mut entries: Vec<Candidate> = near
        .iter()
        .map(|&v| {
            let tau = extend_to(tree.state(v), x);
            Candidate {
                vertex: v,
                cost: tree.cost(v) + tau.cost(),
                tau,
            }
        })
        .collect();
    entries.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(a.vertex.cmp(&b.vertex)));
    CandidateTuple { entries }
}

/// First candidate with a collision-free segment.
pub fn select_best_parent(tuple: &CandidateTuple, env: &Environment) -> Option<VertexId> {
    select_best_parent_with(tuple, |tau| tau.is_free(env))
}

/// Like [`select_best_parent`] with a caller-supplied collision test.
pub fn select_best_parent_with(tuple: &CandidateTuple, mut free: impl FnMut(&Segment) -> bool) -> Option<VertexId> {
    tuple.entries.iter().find(|c| free(&c.tau)).map(|c| c.vertex)
}

/// Reparents every candidate that becomes strictly cheaper through `x_new`.
/// Returns the number of rewired vertices.
pub fn rewire(x_new: VertexId, tuple: &CandidateTuple, tree: &mut Tree, env: &Environment) -> usize {
    rewire_with(x_new, tuple, tree, env, |_, _| {})
}

/// [`rewire`] reporting every cost change, descendants included.
pub fn rewire_with(
    x_new: VertexId,
    tuple: &CandidateTuple,
    tree: &mut Tree,
    env: &Environment,
    mut on_cost: impl FnMut(VertexId, f64),
) -> usize {
    let mut count = 0;
    for entry in &tuple.entries {
        let v = entry.vertex;
        if v == x_new {
            continue;
        }
        let back = entry.tau.reversed();
        // Costs may have dropped earlier in this loop, so read the tree.
        if tree.cost(x_new) + back.cost() < tree.cost(v) && env.segment_free(tree.state(x_new), tree.state(v)) {
            tree.reparent(v, x_new, &mut on_cost);
            count += 1;
        }
    }
    count
}
