//! Freeze-tag awakening schedules for robots inside a polygonal domain with
//! holes.
//!
//! The geometry and scheduling code is generic over [`Scalar`] (`f64` or
//! `f32`). File formats, the instance generator and SVG output use `f64`.
//!
//! ```
//! use freezetag::{solve_cfa, Domain64, Metric, Point64, RobotSet64};
//!
//! let d = Domain64::new(
//!     vec![Point64::new(0.0, 0.0), Point64::new(1.0, 0.0), Point64::new(1.0, 1.0), Point64::new(0.0, 1.0)],
//!     vec![],
//! )
//! .unwrap();
//! let s = RobotSet64::new(&[Point64::new(0.1, 0.1), Point64::new(0.9, 0.9)], 0).unwrap();
//! let run = solve_cfa(&d, &s, 6.0, Metric::Geodesic).unwrap();
//! assert!((run.schedule.makespan_all - 0.8 * 2f64.sqrt()).abs() < 1e-12);
//! ```

pub mod cfa;
pub mod generate;
pub mod geodesic;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod ptas;
pub mod scalar;
pub mod schedule;
pub mod spanner;
pub mod svg;
pub mod tree;

pub use cfa::{cfa_schedule, place_steiner, solve_cfa, CfaError, CfaRun};
pub use geodesic::{build_visibility_graph, geodesic_path, gvp, GeodesicEngine, GeodesicMetric, GeodesicPath};
pub use geometry::{is_visible, point_in_domain, Point, PolygonDomain};
pub use graph::WeightedGraph;
pub use oracle::{optimal_makespan, OracleError, OracleResult};
pub use ptas::{choose_representatives, compose_ptas, pixelize, sbat_search, solve_ptas, Pixel, PtasOptions};
pub use scalar::Scalar;
pub use schedule::{validate_schedule, AwakeningSchedule, Metric, MovementModel, RobotSet, Violation};
pub use spanner::{greedy_spanner, theta_graph, verify_spanner, SpannerGraph};
pub use tree::{AwakeningTree, TravelTable};

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type Domain64 = PolygonDomain<f64>;
pub type Domain32 = PolygonDomain<f32>;
pub type RobotSet64 = RobotSet<f64>;
pub type RobotSet32 = RobotSet<f32>;
pub type Schedule64 = AwakeningSchedule<f64>;
pub type Schedule32 = AwakeningSchedule<f32>;
