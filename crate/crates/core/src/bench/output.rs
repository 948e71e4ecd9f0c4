use std::fmt::Write as _;

use serde_json::json;

use crate::geometry::{Environment, State};
use crate::planner::{Path, Tree};
use crate::scenarios::fmt_g17;

/// Drawing options for [`render_svg`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// World axes mapped to the horizontal and vertical picture axes.
    pub axes: (usize, usize),
    /// Pixels per world unit.
    pub scale: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            axes: (0, 1),
            scale: 12.0,
        }
    }
}

/// Static picture of the world, the tree and the best path.
///
/// Each non-root vertex contributes exactly one element of class `edge`.
/// Higher-dimensional worlds are drawn as a projection onto `opts.axes`.
pub fn render_svg(tree: &Tree, env: &Environment, path: Option<&Path>, opts: SvgOptions) -> String {
    let (ax, ay) = opts.axes;
    let b = env.bounds();
    let s = opts.scale;
    let width = (b.max[ax] - b.min[ax]) * s;
    let height = (b.max[ay] - b.min[ay]) * s;
    let px = |x: &State| ((x[ax] - b.min[ax]) * s, (b.max[ay] - x[ay]) * s);
    let pt = |x: &State| {
        let (u, v) = px(x);
        format!("{u:.3},{v:.3}")
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect class="world" x="0" y="0" width="{width:.3}" height="{height:.3}" fill="#ffffff" stroke="#000000"/>"##
    );
    for o in env.obstacles() {
        let (x0, y1) = px(&o.min);
        let (x1, y0) = px(&o.max);
        let _ = writeln!(
            out,
            r##"<rect class="obstacle" x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="#555555"/>"##,
            x1 - x0,
            y1 - y0
        );
    }
    for (p, v) in tree.edges() {
        match tree.trajectory(v) {
            Some(traj) => {
                let pts: Vec<String> = traj.iter().map(|d| pt(&d.position())).collect();
                let _ = writeln!(
                    out,
                    r##"<polyline class="edge" points="{}" fill="none" stroke="#8fb3d9" stroke-width="0.8"/>"##,
                    pts.join(" ")
                );
            }
            None => {
                let (x1, y1) = px(tree.state(p));
                let (x2, y2) = px(tree.state(v));
                let _ = writeln!(
                    out,
                    r##"<line class="edge" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#8fb3d9" stroke-width="0.8"/>"##
                );
            }
        }
    }
    if let Some(path) = path {
        let pts: Vec<String> = path.states.iter().map(pt).collect();
        let _ = writeln!(
            out,
            r##"<polyline class="path" points="{}" fill="none" stroke="#d62728" stroke-width="2.5"/>"##,
            pts.join(" ")
        );
    }
    let (gx, gy) = px(env.goal_center());
    let _ = writeln!(
        out,
        r##"<circle class="goal" cx="{gx:.3}" cy="{gy:.3}" r="{:.3}" fill="#2ca02c" fill-opacity="0.5"/>"##,
        env.goal_radius() * s
    );
    let (sx, sy) = px(env.start());
    let _ = writeln!(
        out,
        r##"<circle class="start" cx="{sx:.3}" cy="{sy:.3}" r="4" fill="#1f77b4"/>"##
    );
    out.push_str("</svg>\n");
    out
}

/// One row per vertex: `id,parent,cost,heading,x0,x1,...`; the root's
/// parent is `-`.
pub fn tree_csv(tree: &Tree) -> String {
    let dim = tree.state(Tree::ROOT).dim();
    let mut out = String::from("id,parent,cost,heading");
    for i in 0..dim {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for v in 0..tree.len() {
        let parent = tree.parent(v).map_or("-".to_string(), |p| p.to_string());
        let _ = write!(out, "{v},{parent},{},{}", fmt_g17(tree.cost(v)), fmt_g17(tree.heading(v)));
        for c in tree.state(v).iter() {
            let _ = write!(out, ",{}", fmt_g17(*c));
        }
        out.push('\n');
    }
    out
}

/// JSON document describing a path, or `null` when there is none.
pub fn path_json(path: Option<&Path>) -> String {
    let value = match path {
        None => serde_json::Value::Null,
        Some(p) => json!({
            "cost": p.cost,
            "vertices": p.vertices,
            "states": p.states.iter().map(|s| s.coords().to_vec()).collect::<Vec<_>>(),
        }),
    };
    let mut s = serde_json::to_string_pretty(&value).expect("paths serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Aabb;

    fn env() -> Environment {
        Environment::new(
            Aabb::new([0.0, 0.0], [10.0, 10.0]).unwrap(),
            vec![Aabb::new([4.0, 4.0], [6.0, 6.0]).unwrap()],
            [1.0, 1.0],
            [9.0, 9.0],
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn empty_tree_draws_world_and_markers_only() {
        let env = env();
        let svg = render_svg(&Tree::new(env.start().clone()), &env, None, SvgOptions::default());
        assert_eq!(svg.matches("class=\"edge\"").count(), 0);
        assert_eq!(svg.matches("class=\"obstacle\"").count(), 1);
        assert!(svg.contains("class=\"start\"") && svg.contains("class=\"goal\""));
        assert!(!svg.contains("class=\"path\""));
    }

    #[test]
    fn tree_csv_lists_every_vertex() {
        let mut t = Tree::new([0.0, 0.0].into());
        t.add([0.5, 0.0].into(), Tree::ROOT);
        let csv = tree_csv(&t);
        assert_eq!(csv, "id,parent,cost,heading,x0,x1\n0,-,0,0,0,0\n1,0,0.5,0,0.5,0\n");
    }

    #[test]
    fn missing_path_is_null() {
        assert_eq!(path_json(None), "null\n");
    }
}
