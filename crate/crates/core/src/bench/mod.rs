//! Repeated trials, summary statistics, the grid cost oracle and file
//! output.

mod oracle;
mod output;

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::planner::{plan, PlannerConfig, RunMetrics};
use crate::scenarios::Scenario;

pub use oracle::{grid_oracle_cost, OCTILE_BOUND};
pub use output::{path_json, render_svg, tree_csv, SvgOptions};

/// Default convergence threshold, relative to the reference cost.
pub const DEFAULT_EPS_CONV: f64 = 0.02;

/// Default node cap per trial.
pub const DEFAULT_NODE_CAP: usize = 200_000;

/// Iteration budget per trial as a multiple of the node cap. Keeps runs
/// finite when most samples fail to connect.
pub const ITERS_PER_NODE: usize = 4;

/// Grid resolution used for builtin reference costs.
pub const DEFAULT_ORACLE_RESOLUTION: f64 = 0.1;

/// Approximate bytes per tree vertex used for memory reporting: the
/// coordinates, parent link, cost, edge cost, heading, child link and index
/// entry.
pub fn bytes_per_node(dim: usize) -> usize {
    dim * 8 + 5 * 8 + 2 * 8 + dim * 8
}

/// Settings for [`run_trials`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub repeats: usize,
    pub base_seed: u64,
    /// A trial converges once its best cost is within this fraction of
    /// `reference_cost`.
    pub eps_conv: f64,
    pub node_cap: usize,
    /// Usually the grid-oracle cost of the scenario.
    pub reference_cost: f64,
    /// Run trials on the rayon pool instead of one after another.
    pub parallel: bool,
}

impl TrialSpec {
    pub fn new(reference_cost: f64) -> Self {
        TrialSpec {
            repeats: 50,
            base_seed: 0,
            eps_conv: DEFAULT_EPS_CONV,
            node_cap: DEFAULT_NODE_CAP,
            reference_cost,
            parallel: true,
        }
    }

    pub fn target_cost(&self) -> f64 {
        self.reference_cost * (1.0 + self.eps_conv)
    }
}

/// One row of the results table. Statistics cover converged trials only and
/// are `None` when every trial failed.
#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub environment: String,
    pub algorithm: String,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub n_avg: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_avg: Option<f64>,
    /// Mean converged path cost.
    pub c_star: Option<f64>,
    pub fail: usize,
    pub repeats: usize,
}

pub const CSV_HEADER: &str = "environment,algorithm,n_min,n_max,n_avg,t_min,t_max,t_avg,c_star,fail";

impl StatRow {
    pub fn from_metrics(environment: &str, algorithm: &str, raw: &[RunMetrics]) -> Self {
        let ok: Vec<&RunMetrics> = raw.iter().filter(|m| !m.failed && m.iters_opt.is_some()).collect();
        let n: Vec<usize> = ok.iter().filter_map(|m| m.iters_opt).collect();
        let t: Vec<f64> = ok.iter().filter_map(|m| m.time_opt).collect();
        let c: Vec<f64> = ok.iter().filter_map(|m| m.cost_at_opt()).collect();
        let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        let n_f: Vec<f64> = n.iter().map(|&x| x as f64).collect();
        StatRow {
            environment: environment.to_string(),
            algorithm: algorithm.to_string(),
            n_min: n.iter().copied().min(),
            n_max: n.iter().copied().max(),
            n_avg: mean(&n_f),
            t_min: t.iter().copied().reduce(f64::min),
            t_max: t.iter().copied().reduce(f64::max),
            t_avg: mean(&t),
            c_star: mean(&c),
            fail: raw.len() - ok.len(),
            repeats: raw.len(),
        }
    }

    /// The row in [`CSV_HEADER`] order, absent values as `-`.
    pub fn csv_line(&self) -> String {
        fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
            v.map_or_else(|| "-".to_string(), f)
        }
        let int = |x: usize| x.to_string();
        let fl = |p: usize| move |x: f64| format!("{x:.p$}");
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.environment,
            self.algorithm,
            opt(self.n_min, int),
            opt(self.n_max, int),
            opt(self.n_avg, fl(1)),
            opt(self.t_min, fl(4)),
            opt(self.t_max, fl(4)),
            opt(self.t_avg, fl(4)),
            opt(self.c_star, fl(3)),
            self.fail
        )
    }
}

/// The whole table with header.
pub fn stats_csv(rows: &[StatRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_line());
    }
    out
}

/// Runs `spec.repeats` seeded trials of `cfg` on the scenario. Seeds are
/// `base_seed, base_seed + 1, ...` and results come back in seed order.
pub fn run_trials(scenario: &Scenario, cfg: &PlannerConfig, spec: &TrialSpec) -> Result<(StatRow, Vec<RunMetrics>)> {
    if spec.repeats == 0 {
        return Err(Error::invalid("repeats", "must be at least 1"));
    }
    if !(spec.eps_conv >= 0.0 && spec.eps_conv.is_finite()) {
        return Err(Error::invalid("eps_conv", "must be a non-negative number"));
    }
    let mut base = cfg.clone();
    base.node_cap = Some(spec.node_cap);
    base.max_iters = spec.node_cap.saturating_mul(ITERS_PER_NODE);
    base.target_cost = Some(spec.target_cost());
    base.validate(&scenario.env)?;

    let trial = |i: usize| {
        let cfg = PlannerConfig {
            seed: spec.base_seed.wrapping_add(i as u64),
            ..base.clone()
        };
        plan(&scenario.env, &cfg).map(|(_, m)| m)
    };
    let raw: Vec<RunMetrics> = if spec.parallel {
        (0..spec.repeats).into_par_iter().map(trial).collect::<Result<_>>()?
    } else {
        (0..spec.repeats).map(trial).collect::<Result<_>>()?
    };
    let row = StatRow::from_metrics(&scenario.name, cfg.variant.name(), &raw);
    Ok((row, raw))
}

/// `(c_init - c_opt) / (t_opt - t_init)`: cost removed per second between
/// the first path and convergence.
pub fn convergence_rate(m: &RunMetrics) -> Option<f64> {
    let c_init = m.first_cost()?;
    let c_opt = m.cost_at_opt()?;
    let (t_init, t_opt) = (m.time_first?, m.time_opt?);
    if t_opt == t_init {
        return None;
    }
    Some((c_init - c_opt) / (t_opt - t_init))
}

/// Iterations to convergence with failures counted as `cap`.
pub fn iters_to_converge(m: &RunMetrics, cap: usize) -> usize {
    m.iters_opt.filter(|_| !m.failed).unwrap_or(cap)
}

/// Median of a list of values; the mean of the middle pair for even
/// lengths. `None` for an empty list.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}
