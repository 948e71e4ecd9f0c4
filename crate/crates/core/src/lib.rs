//! Sampling-based motion planning: RRT*, the potential-guided P-RRT*, an
//! artificial potential field baseline, differential-drive steering and a
//! benchmarking toolkit.
//!
//! ```no_run
//! use prrt::planner::{plan, PlannerConfig, Variant};
//! use prrt::scenarios::builtin;
//!
//! let scenario = builtin("local_minima_2d").unwrap();
//! let cfg = PlannerConfig {
//!     max_iters: 20_000,
//!     seed: 1,
//!     ..PlannerConfig::new(Variant::PRrtStar)
//! };
//! let (_tree, metrics) = plan(&scenario.env, &cfg).unwrap();
//! println!("best cost: {:?}", metrics.final_cost);
//! ```
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod bench;
pub mod error;
pub mod geometry;
pub mod kinodynamic;
pub mod planner;
pub mod potential;
pub mod scenarios;
pub mod spatial_index;

pub use error::{Error, Result};
pub use geometry::{Aabb, Environment, State};
pub use planner::{plan, PlannerConfig, RunMetrics, Tree, Variant};
