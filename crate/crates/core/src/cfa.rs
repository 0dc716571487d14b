//! Steiner robot placement and the constant-factor awakening strategy.
//!
//! Every robot sits on a vertex of a bounded-degree spanner. Once awake, a
//! robot visits its spanner neighbours nearest first, waking each on arrival
//! and walking back home before the next trip. A robot that would reach a
//! sleeper no earlier than someone already on the way skips it without
//! moving; one that would arrive strictly earlier takes over the claim.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::geodesic::{build_visibility_graph, GeodesicError, GeodesicPath};
use crate::geometry::PolygonDomain;
use crate::graph::WeightedGraph;
use crate::scalar::{cmp_scalar, Scalar};
use crate::schedule::{AwakeningSchedule, Metric, MovementModel, RobotSet, TimedPoint};
use crate::spanner::{greedy_spanner, SpannerError, SpannerGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CfaError {
    #[error("spanner has {spanner} vertices but there are {robots} robots")]
    SizeMismatch { spanner: usize, robots: usize },
    #[error("robot {0} is unreachable through the spanner")]
    Unreachable(usize),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Spanner(#[from] SpannerError),
}

/// Adds a Steiner robot on every reflex or hole corner that no robot
/// already occupies. Steiner ids follow the originals, corners in R-then-V
/// order.
pub fn place_steiner<T: Scalar>(d: &PolygonDomain<T>, s: &RobotSet<T>) -> RobotSet<T> {
    let mut out = s.clone();
    for corner in d.corners() {
        if !out.robots().iter().any(|r| r.point.coincides(corner)) {
            out.push_steiner(corner);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Arrival { target: usize },
    Decision,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event<T: Scalar> {
    time: T,
    robot: usize,
    kind: EventKind,
}

impl<T: Scalar> Event<T> {
    fn rank(&self) -> (u8, usize, usize) {
        match self.kind {
            EventKind::Arrival { target } => (0, self.robot, target),
            EventKind::Decision => (1, self.robot, 0),
        }
    }
}

impl<T: Scalar> Eq for Event<T> {}

impl<T: Scalar> Ord for Event<T> {
    // reversed: BinaryHeap pops the earliest event, arrivals before decisions
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_scalar(&other.time, &self.time).then_with(|| other.rank().cmp(&self.rank()))
    }
}

impl<T: Scalar> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn push_point<T: Scalar>(it: &mut Vec<TimedPoint<T>>, p: TimedPoint<T>) {
    if it.last() != Some(&p) {
        it.push(p);
    }
}

/// Runs the strategy over `vt`, whose vertex `i` hosts robot `i`. Spanner
/// edges join mutually visible robots, so a geodesic-metric trip is the
/// straight edge and a visibility-metric trip has length zero.
pub fn cfa_schedule<T: Scalar>(
    s: &RobotSet<T>,
    vt: &SpannerGraph<T>,
    metric: Metric,
) -> Result<AwakeningSchedule<T>, CfaError> {
    let route = |p: usize, u: usize| {
        let (a, b) = (s.point(p), s.point(u));
        match metric {
            Metric::Geodesic if !a.coincides(b) => GeodesicPath {
                waypoints: vec![a, b],
                corners: Vec::new(),
                length: a.dist(b),
            },
            _ => GeodesicPath {
                waypoints: vec![a],
                corners: Vec::new(),
                length: T::zero(),
            },
        }
    };
    cfa_schedule_with(s, vt, metric, route)
}

/// As [`cfa_schedule`] with caller-supplied trips: `route(p, u)` is the
/// path robot `p` walks from home until it wakes `u` (it walks the same
/// path back).
pub fn cfa_schedule_with<T: Scalar>(
    s: &RobotSet<T>,
    vt: &SpannerGraph<T>,
    metric: Metric,
    route: impl Fn(usize, usize) -> GeodesicPath<T>,
) -> Result<AwakeningSchedule<T>, CfaError> {
    let n = s.len();
    if vt.len() != n {
        return Err(CfaError::SizeMismatch {
            spanner: vt.len(),
            robots: n,
        });
    }
    let src = s.source();
    let mut awake = vec![false; n];
    let mut wake = vec![T::zero(); n];
    let mut claim: Vec<Option<(T, usize)>> = vec![None; n];
    let mut cursor = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    let mut itineraries: Vec<Vec<TimedPoint<T>>> = vec![Vec::new(); n];

    awake[src] = true;
    itineraries[src].push(TimedPoint {
        t: T::zero(),
        point: s.point(src),
    });
    let mut heap = BinaryHeap::new();
    heap.push(Event {
        time: T::zero(),
        robot: src,
        kind: EventKind::Decision,
    });

    while let Some(ev) = heap.pop() {
        let p = ev.robot;
        match ev.kind {
            EventKind::Arrival { target } => {
                if !awake[target] && claim[target] == Some((ev.time, p)) {
                    awake[target] = true;
                    wake[target] = ev.time;
                    children[p].push(target);
                    itineraries[target].push(TimedPoint {
                        t: ev.time,
                        point: s.point(target),
                    });
                    heap.push(Event {
                        time: ev.time,
                        robot: target,
                        kind: EventKind::Decision,
                    });
                }
            }
            EventKind::Decision => {
                let order = &vt.neighbor_order[p];
                while cursor[p] < order.len() {
                    let u = order[cursor[p]];
                    cursor[p] += 1;
                    if awake[u] {
                        continue;
                    }
                    let path = route(p, u);
                    let arrival = ev.time + path.polyline_length();
                    if let Some((t, q)) = claim[u] {
                        if t < arrival || (t == arrival && q < p) {
                            continue;
                        }
                    }
                    claim[u] = Some((arrival, p));
                    let it = &mut itineraries[p];
                    let mut t = ev.time;
                    push_point(it, TimedPoint { t, point: path.start() });
                    for w in path.waypoints.windows(2) {
                        t = t + w[0].dist(w[1]);
                        push_point(it, TimedPoint { t, point: w[1] });
                    }
                    let at = arrival;
                    for w in path.waypoints.windows(2).rev() {
                        t = t + w[0].dist(w[1]);
                        push_point(it, TimedPoint { t, point: w[0] });
                    }
                    heap.push(Event {
                        time: at,
                        robot: p,
                        kind: EventKind::Arrival { target: u },
                    });
                    heap.push(Event {
                        time: t,
                        robot: p,
                        kind: EventKind::Decision,
                    });
                    break;
                }
            }
        }
    }

    if let Some(r) = awake.iter().position(|a| !a) {
        return Err(CfaError::Unreachable(r));
    }
    let mut schedule = AwakeningSchedule {
        metric,
        model: MovementModel::ReturnHome,
        source: src,
        children,
        wake_times: wake,
        itineraries,
        makespan_all: T::zero(),
        makespan_original: T::zero(),
    };
    schedule.update_makespans(s);
    Ok(schedule)
}

/// Everything the domain-wide strategy produces.
#[derive(Debug, Clone)]
pub struct CfaRun<T> {
    /// S followed by the Steiner robots.
    pub robots: RobotSet<T>,
    pub visibility: WeightedGraph<T>,
    pub spanner: SpannerGraph<T>,
    pub schedule: AwakeningSchedule<T>,
}

/// Places Steiner robots, builds the greedy `t`-spanner of the visibility
/// graph over all robots and runs the strategy on it.
pub fn solve_cfa<T: Scalar>(
    d: &PolygonDomain<T>,
    s: &RobotSet<T>,
    t: T,
    metric: Metric,
) -> Result<CfaRun<T>, CfaError> {
    let robots = place_steiner(d, s);
    let visibility = build_visibility_graph(&robots.points(), d)?;
    let spanner = greedy_spanner(&visibility, t)?;
    let schedule = cfa_schedule(&robots, &spanner, metric)?;
    Ok(CfaRun {
        robots,
        visibility,
        spanner,
        schedule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::schedule::{validate_schedule, ViolationKind};
    use crate::spanner::complete_graph;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn square() -> PolygonDomain<f64> {
        PolygonDomain::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)], vec![]).unwrap()
    }

    fn lshape() -> PolygonDomain<f64> {
        PolygonDomain::new(
            vec![
                p(0.0, 0.0),
                p(1.0, 0.0),
                p(1.0, 0.5),
                p(0.5, 0.5),
                p(0.5, 1.0),
                p(0.0, 1.0),
            ],
            vec![],
        )
        .unwrap()
    }

    fn spanner_of(points: &[Point<f64>], edges: &[(usize, usize)]) -> SpannerGraph<f64> {
        let base = complete_graph(points);
        let mut g = base.empty_like();
        for &(u, v) in edges {
            g.add_edge(u, v, points[u].dist(points[v]));
        }
        let order = (0..g.len())
            .map(|v| {
                let mut nb = g.neighbors(v).to_vec();
                nb.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
                nb.into_iter().map(|x| x.0).collect()
            })
            .collect();
        SpannerGraph {
            k_measured: g.max_degree(),
            graph: g,
            t_target: 6.0,
            t_measured: 1.0,
            neighbor_order: order,
        }
    }

    #[test]
    fn steiner_placement() {
        let s = RobotSet::new(&[p(0.2, 0.2)], 0).unwrap();
        assert_eq!(place_steiner(&square(), &s).len(), 1);
        let out = place_steiner(&lshape(), &s);
        assert_eq!(out.len(), 2);
        assert_eq!(out.point(1), p(0.5, 0.5));
        assert_eq!(out.steiner_count(), 1);
        let occupied = RobotSet::new(&[p(0.2, 0.2), p(0.5, 0.5)], 0).unwrap();
        assert_eq!(place_steiner(&lshape(), &occupied).len(), 2);
    }

    #[test]
    fn single_neighbour() {
        let pts = [p(0.1, 0.1), p(0.4, 0.5)];
        let s = RobotSet::new(&pts, 0).unwrap();
        let vt = spanner_of(&pts, &[(0, 1)]);
        let sch = cfa_schedule(&s, &vt, Metric::Geodesic).unwrap();
        assert!((sch.makespan_all - 0.5).abs() < 1e-12);
        assert_eq!(sch.awakedist(0).unwrap(), 0.0);
        assert!((sch.awakedist(1).unwrap() - 0.5).abs() < 1e-12);
        assert!(sch.awakedist(2).is_err());
        assert!(validate_schedule(&sch, &s, &square()).is_empty());
    }

    #[test]
    fn star_wake_times() {
        // d1 = 0.1, d2 = 0.3: second wake at 2*d1 + d2
        let pts = [p(0.5, 0.5), p(0.6, 0.5), p(0.5, 0.8)];
        let s = RobotSet::new(&pts, 0).unwrap();
        let vt = spanner_of(&pts, &[(0, 1), (0, 2)]);
        let sch = cfa_schedule(&s, &vt, Metric::Geodesic).unwrap();
        assert!((sch.wake_times[1] - 0.1).abs() < 1e-12);
        assert!((sch.wake_times[2] - 0.5).abs() < 1e-12);
        assert_eq!(sch.children[0], vec![1, 2]);
        assert_eq!(sch.model, MovementModel::ReturnHome);
        assert!(validate_schedule(&sch, &s, &square()).is_empty());
    }

    #[test]
    fn earlier_arrival_takes_over_claim() {
        // 0 wakes 1 (t=0.3), is home at 0.6 and heads for 2 (arrival 1.4).
        // 1 wakes 3 first, is home at 0.7, and reaches 2 at 1.2.
        let pts = [p(0.1, 0.1), p(0.4, 0.1), p(0.9, 0.1), p(0.4, 0.3)];
        let s = RobotSet::new(&pts, 0).unwrap();
        let vt = spanner_of(&pts, &[(0, 1), (0, 2), (1, 2), (1, 3)]);
        let sch = cfa_schedule(&s, &vt, Metric::Geodesic).unwrap();
        assert!((sch.wake_times[1] - 0.3).abs() < 1e-12);
        assert!((sch.wake_times[3] - 0.5).abs() < 1e-12);
        assert!((sch.wake_times[2] - 1.2).abs() < 1e-12);
        assert_eq!(sch.children[0], vec![1]);
        assert_eq!(sch.children[1], vec![3, 2]);
        // the loser still walked its trip
        assert!((sch.itineraries[0].last().unwrap().t - 2.2).abs() < 1e-12);
        assert!(validate_schedule(&sch, &s, &square()).is_empty());
    }

    #[test]
    fn visibility_metric_collapses() {
        let pts = [p(0.1, 0.1), p(0.9, 0.2), p(0.4, 0.7)];
        let s = RobotSet::new(&pts, 0).unwrap();
        let vt = greedy_spanner(&complete_graph(&pts), 6.0).unwrap();
        let sch = cfa_schedule(&s, &vt, Metric::Visibility).unwrap();
        assert!(sch.wake_times.iter().all(|&t| t == 0.0));
        assert!(sch.visibility_degenerate());
        assert!(validate_schedule(&sch, &s, &square()).is_empty());
    }

    #[test]
    fn unreachable_robot_is_an_error() {
        let pts = [p(0.1, 0.1), p(0.9, 0.2), p(0.4, 0.7)];
        let s = RobotSet::new(&pts, 0).unwrap();
        let vt = spanner_of(&pts, &[(0, 1)]);
        assert_eq!(cfa_schedule(&s, &vt, Metric::Geodesic), Err(CfaError::Unreachable(2)));
        let small = spanner_of(&pts[..2], &[(0, 1)]);
        assert!(matches!(
            cfa_schedule(&s, &small, Metric::Geodesic),
            Err(CfaError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn solve_in_lshape_wakes_everyone() {
        let s = RobotSet::new(&[p(0.9, 0.2), p(0.2, 0.9), p(0.1, 0.1)], 0).unwrap();
        let run = solve_cfa(&lshape(), &s, 6.0, Metric::Geodesic).unwrap();
        assert_eq!(run.robots.len(), 4);
        assert!(run.schedule.makespan_all > 0.0);
        assert!(validate_schedule(&run.schedule, &run.robots, &lshape()).is_empty());
    }

    #[test]
    fn validator_flags_forgeries() {
        let pts = [p(0.5, 0.5), p(0.6, 0.5), p(0.5, 0.8)];
        let s = RobotSet::new(&pts, 0).unwrap();
        let vt = spanner_of(&pts, &[(0, 1), (1, 2)]);
        let sch = cfa_schedule(&s, &vt, Metric::Geodesic).unwrap();
        assert_eq!(sch.children[1], vec![2]);

        let mut early = sch.clone();
        early.wake_times[1] = 0.5;
        early.wake_times[2] = 0.2;
        early.itineraries[1][0].t = 0.5;
        let v = validate_schedule(&early, &s, &square());
        assert_eq!(v.iter().filter(|x| x.kind == ViolationKind::Causality).count(), 1);

        // itinerary crossing a hole
        let holed = PolygonDomain::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
            vec![vec![p(0.3, 0.6), p(0.3, 0.7), p(0.7, 0.7), p(0.7, 0.6)]],
        )
        .unwrap();
        let pts = [p(0.5, 0.5), p(0.5, 0.8)];
        let s = RobotSet::new(&pts, 0).unwrap();
        let vt = spanner_of(&pts, &[(0, 1)]);
        let sch = cfa_schedule(&s, &vt, Metric::Geodesic).unwrap();
        let v = validate_schedule(&sch, &s, &holed);
        assert_eq!(v.iter().filter(|x| x.kind == ViolationKind::Containment).count(), 2);
        let mut one_way = sch.clone();
        one_way.itineraries[0].pop();
        let v = validate_schedule(&one_way, &s, &holed);
        assert_eq!(v.iter().filter(|x| x.kind == ViolationKind::Containment).count(), 1);
    }
}
