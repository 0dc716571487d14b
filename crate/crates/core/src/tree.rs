//! Awakening trees under the continue movement model, and the travel table
//! both tree searches price moves with.
//!
//! A waker's position is a *site*: one of the robots' home points, or, under
//! the visibility metric, a domain corner where a geodesic visibility path
//! ended.

use crate::geodesic::{GeodesicEngine, GeodesicError, GeodesicPath};
use crate::geometry::Point;
use crate::scalar::Scalar;
use crate::schedule::{AwakeningSchedule, Metric, MovementModel, RobotSet, TimedPoint};

/// Travel costs from every site to every robot.
#[derive(Debug, Clone)]
pub struct TravelTable<T> {
    metric: Metric,
    engine: GeodesicEngine<T>,
    sites: Vec<Point<T>>,
    robot_count: usize,
    cost: Vec<Vec<T>>,
    end: Vec<Vec<usize>>,
}

impl<T: Scalar> TravelTable<T> {
    pub fn new(robots: &[Point<T>], engine: GeodesicEngine<T>, metric: Metric) -> Result<Self, GeodesicError> {
        let n = robots.len();
        let mut sites = robots.to_vec();
        if metric == Metric::Visibility {
            sites.extend_from_slice(engine.corners());
        }
        let mut cost = vec![vec![T::zero(); n]; sites.len()];
        let mut end = vec![vec![0; n]; sites.len()];
        for (s, &from) in sites.iter().enumerate() {
            for (r, &to) in robots.iter().enumerate() {
                match metric {
                    Metric::Geodesic => {
                        if s != r {
                            cost[s][r] = engine.geodesic_path(from, to)?.length;
                        }
                        end[s][r] = r;
                    }
                    Metric::Visibility => {
                        let path = engine.gvp(from, to)?;
                        cost[s][r] = path.length;
                        end[s][r] = match path.last_corner() {
                            Some(c) if path.length > T::zero() => n + c,
                            _ => s,
                        };
                    }
                }
            }
        }
        Ok(TravelTable {
            metric,
            engine,
            sites,
            robot_count: n,
            cost,
            end,
        })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn robot_count(&self) -> usize {
        self.robot_count
    }

    pub fn site(&self, s: usize) -> Point<T> {
        self.sites[s]
    }

    /// Time to wake robot `r` from site `s`, and the site the waker ends at.
    #[inline]
    pub fn cost(&self, s: usize, r: usize) -> (T, usize) {
        (self.cost[s][r], self.end[s][r])
    }

    /// The path walked from site `s` to wake robot `r`.
    pub fn route(&self, s: usize, r: usize) -> GeodesicPath<T> {
        let (from, to) = (self.sites[s], self.sites[r]);
        match self.metric {
            Metric::Geodesic => self.engine.geodesic_path(from, to),
            Metric::Visibility => self.engine.gvp(from, to),
        }
        .expect("sites are inside the domain")
    }

    pub fn engine(&self) -> &GeodesicEngine<T> {
        &self.engine
    }
}

/// Rooted tree over a set of robots with per-parent wake order. Node `i`
/// stands for robot `labels[i]`; `children` holds node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct AwakeningTree<T> {
    pub labels: Vec<usize>,
    pub root: usize,
    pub children: Vec<Vec<usize>>,
    pub wake_times: Vec<T>,
    pub makespan: T,
    pub depth: usize,
}

impl<T: Scalar> AwakeningTree<T> {
    /// Builds a tree and prices it with [`evaluate_tree`].
    pub fn new(labels: Vec<usize>, root: usize, children: Vec<Vec<usize>>, table: &TravelTable<T>) -> Self {
        let mut tree = AwakeningTree {
            wake_times: vec![T::zero(); labels.len()],
            labels,
            root,
            children,
            makespan: T::zero(),
            depth: 0,
        };
        let (wake, makespan) = evaluate_tree(&tree, table);
        tree.wake_times = wake;
        tree.makespan = makespan;
        tree.depth = tree_depth(&tree.children, tree.root);
        tree
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Node indices parents-first.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            order.extend_from_slice(&self.children[order[i]]);
            i += 1;
        }
        order
    }

    /// `(parent, child)` robot-id pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.bfs_order()
            .into_iter()
            .flat_map(|v| self.children[v].iter().map(move |&c| (self.labels[v], self.labels[c])))
            .collect()
    }
}

pub(crate) fn tree_depth(children: &[Vec<usize>], root: usize) -> usize {
    let mut best = 0;
    let mut stack = vec![(root, 0)];
    while let Some((v, d)) = stack.pop() {
        best = best.max(d);
        stack.extend(children[v].iter().map(|&c| (c, d + 1)));
    }
    best
}

/// Wake times and makespan under the continue model: each waker leaves its
/// home at its wake time and visits its children in order, proceeding from
/// wherever it woke the previous one.
pub fn evaluate_tree<T: Scalar>(tree: &AwakeningTree<T>, table: &TravelTable<T>) -> (Vec<T>, T) {
    let mut wake = vec![T::zero(); tree.len()];
    let mut makespan = T::zero();
    for v in tree.bfs_order() {
        let mut t = wake[v];
        let mut pos = tree.labels[v];
        for &c in &tree.children[v] {
            let (cost, next) = table.cost(pos, tree.labels[c]);
            t = t + cost;
            pos = next;
            wake[c] = t;
            makespan = makespan.max(t);
        }
    }
    (wake, makespan)
}

/// Walks robot `robot`'s continue-model tour over `targets` starting at home
/// at time `start`, appending to `itinerary`. Returns each target's wake time.
pub(crate) fn walk_tour<T: Scalar>(
    table: &TravelTable<T>,
    robot: usize,
    start: T,
    targets: &[usize],
    itinerary: &mut Vec<TimedPoint<T>>,
) -> Vec<T> {
    let push = |it: &mut Vec<TimedPoint<T>>, p: TimedPoint<T>| {
        if it.last() != Some(&p) {
            it.push(p);
        }
    };
    let mut t = start;
    let mut pos = robot;
    push(
        itinerary,
        TimedPoint {
            t,
            point: table.site(robot),
        },
    );
    let mut wakes = Vec::with_capacity(targets.len());
    for &r in targets {
        let path = table.route(pos, r);
        for w in path.waypoints.windows(2) {
            t = t + w[0].dist(w[1]);
            push(itinerary, TimedPoint { t, point: w[1] });
        }
        pos = table.cost(pos, r).1;
        wakes.push(t);
    }
    wakes
}

/// Turns a tree over all robots of `robots` into a full schedule with
/// itineraries.
pub fn tree_schedule<T: Scalar>(
    tree: &AwakeningTree<T>,
    robots: &RobotSet<T>,
    table: &TravelTable<T>,
) -> AwakeningSchedule<T> {
    let n = robots.len();
    let mut wake = vec![T::zero(); n];
    let mut children = vec![Vec::new(); n];
    let mut itineraries = vec![Vec::new(); n];
    for v in tree.bfs_order() {
        let r = tree.labels[v];
        let kids: Vec<usize> = tree.children[v].iter().map(|&c| tree.labels[c]).collect();
        let wakes = walk_tour(table, r, wake[r], &kids, &mut itineraries[r]);
        for (&k, t) in kids.iter().zip(wakes) {
            wake[k] = t;
        }
        children[r] = kids;
    }
    let mut schedule = AwakeningSchedule {
        metric: table.metric(),
        model: MovementModel::Continue,
        source: robots.source(),
        children,
        wake_times: wake,
        itineraries,
        makespan_all: T::zero(),
        makespan_original: T::zero(),
    };
    schedule.update_makespans(robots);
    schedule
}
