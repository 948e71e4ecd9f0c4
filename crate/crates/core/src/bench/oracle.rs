use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::{Environment, State};

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost.
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A uniform grid of cell centers over the world bounds.
struct Grid<'a> {
    env: &'a Environment,
    counts: Vec<usize>,
    step: Vec<f64>,
    free: Vec<bool>,
}

impl<'a> Grid<'a> {
    fn new(env: &'a Environment, resolution: f64) -> Self {
        let b = env.bounds();
        let d = env.dim();
        let mut counts = Vec::with_capacity(d);
        let mut step = Vec::with_capacity(d);
        for i in 0..d {
            let extent = b.max[i] - b.min[i];
            let n = (extent / resolution).round().max(1.0) as usize;
            counts.push(n);
            step.push(extent / n as f64);
        }
        let mut grid = Grid {
            env,
            counts,
            step,
            free: Vec::new(),
        };
        let total = grid.len();
        grid.free = (0..total).map(|c| env.point_free(&grid.center(c))).collect();
        grid
    }

    fn len(&self) -> usize {
        self.counts.iter().product()
    }

    fn coords(&self, mut cell: usize) -> Vec<usize> {
        self.counts
            .iter()
            .map(|&n| {
                let c = cell % n;
                cell /= n;
                c
            })
            .collect()
    }

    fn index(&self, coords: &[i64]) -> Option<usize> {
        let mut idx = 0;
        let mut stride = 1;
        for (i, &c) in coords.iter().enumerate() {
            if c < 0 || c as usize >= self.counts[i] {
                return None;
            }
            idx += c as usize * stride;
            stride *= self.counts[i];
        }
        Some(idx)
    }

    fn center(&self, cell: usize) -> State {
        let b = self.env.bounds();
        State::new(
            self.coords(cell)
                .iter()
                .enumerate()
                .map(|(i, &c)| b.min[i] + (c as f64 + 0.5) * self.step[i]),
        )
    }

    fn cell_of(&self, x: &State) -> Vec<i64> {
        let b = self.env.bounds();
        (0..x.dim())
            .map(|i| {
                let c = ((x[i] - b.min[i]) / self.step[i]).floor() as i64;
                c.clamp(0, self.counts[i] as i64 - 1)
            })
            .collect()
    }
}

/// Every offset in `{-1, 0, 1}^d` except the origin.
fn neighbour_offsets(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for k in 0..3usize.pow(d as u32) {
        let mut k = k;
        let off: Vec<i64> = (0..d)
            .map(|_| {
                let o = (k % 3) as i64 - 1;
                k /= 3;
                o
            })
            .collect();
        if off.iter().any(|&o| o != 0) {
            out.push(off);
        }
    }
    out
}

/// Worst-case ratio of an 8-connected grid path to the straight segment it
/// replaces, `sqrt(4 - 2 sqrt(2))`, reached at 22.5 degree headings.
pub const OCTILE_BOUND: f64 = 1.082_392_200_292_393_9;

/// Shortest path cost over a uniform grid of cell centers with
/// 8-connectivity in 2D (26 in 3D, `3^d - 1` in general).
///
/// Every edge is a straight segment checked against the obstacles and costs
/// its Euclidean length. The start joins the free centers of its own and the
/// adjacent cells that it can see; the search ends at the first free center
/// inside the goal ball. Grid paths are restricted to 45 degree headings, so
/// the estimate can exceed the true optimum by up to about 8%
/// ([`OCTILE_BOUND`]) plus a cell or two at the ends; much less when the
/// optimal path runs along those headings.
pub fn grid_oracle_cost(env: &Environment, resolution: f64) -> Result<f64> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::invalid("resolution", "must be positive"));
    }
    let grid = Grid::new(env, resolution);
    let offsets = neighbour_offsets(env.dim());
    let n = grid.len();
    let is_target: Vec<bool> = (0..n)
        .map(|c| grid.free[c] && env.in_goal(&grid.center(c)))
        .collect();
    if !is_target.iter().any(|&t| t) {
        return Err(Error::Resolution {
            resolution,
            which: "goal",
        });
    }

    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    let start = env.start();
    let home = grid.cell_of(start);
    let mut seeds = offsets.clone();
    seeds.push(vec![0; env.dim()]);
    for off in &seeds {
        let c: Vec<i64> = home.iter().zip(off).map(|(a, b)| a + b).collect();
        let Some(cell) = grid.index(&c) else { continue };
        if !grid.free[cell] {
            continue;
        }
        let center = grid.center(cell);
        if env.segment_free(start, &center) {
            let cost = start.dist(&center);
            if cost < dist[cell] {
                dist[cell] = cost;
                heap.push(Entry { cost, node: cell });
            }
        }
    }
    if heap.is_empty() {
        return Err(Error::Resolution {
            resolution,
            which: "start",
        });
    }

    while let Some(Entry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        if is_target[node] {
            return Ok(cost);
        }
        let here: Vec<i64> = grid.coords(node).iter().map(|&c| c as i64).collect();
        let center = grid.center(node);
        for off in &offsets {
            let c: Vec<i64> = here.iter().zip(off).map(|(a, b)| a + b).collect();
            let Some(next) = grid.index(&c) else { continue };
            if !grid.free[next] {
                continue;
            }
            let other = grid.center(next);
            let cand = cost + center.dist(&other);
            if cand < dist[next] && env.segment_free(&center, &other) {
                dist[next] = cand;
                heap.push(Entry { cost: cand, node: next });
            }
        }
    }
    Err(Error::invalid("scenario", "no grid path connects start and goal"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Aabb;

    #[test]
    fn octile_constant() {
        assert!((OCTILE_BOUND - (4.0 - 2.0 * 2f64.sqrt()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn offsets_count() {
        assert_eq!(neighbour_offsets(2).len(), 8);
        assert_eq!(neighbour_offsets(3).len(), 26);
    }

    #[test]
    fn empty_world_within_octile_bound() {
        let env = Environment::new(
            Aabb::new([0.0, 0.0], [20.0, 20.0]).unwrap(),
            vec![],
            [1.0, 2.0],
            [17.0, 9.0],
            0.5,
        )
        .unwrap();
        let straight = env.start().dist(env.goal_center()) - 0.5;
        let h = 0.25;
        let c = grid_oracle_cost(&env, h).unwrap();
        assert!(c >= straight - 1e-9);
        assert!(c <= OCTILE_BOUND * straight + 2.0 * h, "{c} vs {straight}");
    }

    #[test]
    fn gap_is_used() {
        // Wall at x in [9, 11] with a gap y in [14, 16].
        let env = Environment::new(
            Aabb::new([0.0, 0.0], [20.0, 20.0]).unwrap(),
            vec![
                Aabb::new([9.0, 0.0], [11.0, 14.0]).unwrap(),
                Aabb::new([9.0, 16.0], [11.0, 20.0]).unwrap(),
            ],
            [2.0, 2.0],
            [18.0, 2.0],
            0.5,
        )
        .unwrap();
        let h = 0.25;
        let c = grid_oracle_cost(&env, h).unwrap();
        // Any path must pass the gap, so it is at least two legs to (10, 14).
        let via_gap = State::from([2.0, 2.0]).dist(&[9.0, 14.0].into())
            + 2.0
            + State::from([11.0, 14.0]).dist(&[18.0, 2.0].into())
            - 0.5;
        assert!(c >= via_gap - 1e-9);
        assert!(c <= OCTILE_BOUND * via_gap + 2.0 * h);
    }

    #[test]
    fn blocked_goal_cells_are_reported() {
        let env = Environment::new(
            Aabb::new([0.0, 0.0], [10.0, 10.0]).unwrap(),
            vec![],
            [1.0, 1.0],
            [5.3, 5.3],
            0.05,
        )
        .unwrap();
        assert!(matches!(
            grid_oracle_cost(&env, 1.0),
            Err(Error::Resolution { which: "goal", .. })
        ));
    }

    #[test]
    fn refinement_does_not_inflate() {
        let env = Environment::new(
            Aabb::new([0.0, 0.0], [20.0, 20.0]).unwrap(),
            vec![Aabb::new([5.0, 3.0], [8.0, 15.0]).unwrap(), Aabb::new([12.0, 6.0], [14.0, 20.0]).unwrap()],
            [1.0, 10.0],
            [18.0, 10.0],
            0.6,
        )
        .unwrap();
        let coarse = grid_oracle_cost(&env, 0.5).unwrap();
        let fine = grid_oracle_cost(&env, 0.25).unwrap();
        assert!(fine <= 1.01 * coarse, "{fine} vs {coarse}");
    }
}
