//! Grid decomposition scheduler.
//!
//! The unit square is cut into an m x m grid. Each connected piece of the
//! domain inside a cell is a pixel with one representative robot. An
//! exhaustive search finds the best awakening tree over representatives,
//! and every representative, once awake, first wakes its own pixel with the
//! spanner strategy and then continues along the tree.

use geo::{BooleanOps, Coord, LineString, Polygon, Rect};
use thiserror::Error;

use crate::cfa::{cfa_schedule, cfa_schedule_with, CfaError};
use crate::geodesic::{GeodesicEngine, GeodesicError, GeodesicMetric, GeodesicPath};
use crate::geometry::{side, signed_area, Point, PolygonDomain};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::schedule::{AwakeningSchedule, Metric, MovementModel, RobotSet};
use crate::spanner::{greedy_spanner, theta_graph, SpannerError};
use crate::tree::{tree_depth, walk_tour, AwakeningTree, TravelTable};

/// Largest representative count `sbat_search` accepts by default.
pub const DEFAULT_SBAT_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PtasError {
    #[error("grid size must be at least 1")]
    ZeroGrid,
    #[error("robot {0} lies in no pixel")]
    Unassigned(usize),
    #[error("{count} representatives exceed the search cap of {cap}; use a coarser grid or raise the cap")]
    TooManyRepresentatives { count: usize, cap: usize },
    #[error("no tree satisfies depth cap {0}")]
    DepthCap(usize),
    #[error("representative list is empty or does not contain the root")]
    BadRoot,
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Spanner(#[from] SpannerError),
    #[error(transparent)]
    Cfa(#[from] CfaError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pixel<T> {
    pub cell: (usize, usize),
    pub region: PolygonDomain<T>,
    pub members: Vec<usize>,
    pub representative: Option<usize>,
}

impl<T: Scalar> Pixel<T> {
    pub fn diameter(&self) -> T {
        crate::geometry::ring_diameter(self.region.outer())
    }
}

fn to_geo<T: Scalar>(ring: &[Point<T>]) -> LineString<f64> {
    LineString::from(
        ring.iter()
            .map(|p| Coord {
                x: p.x.as_f64(),
                y: p.y.as_f64(),
            })
            .collect::<Vec<_>>(),
    )
}

// Open ring without repeated or collinear vertices, oriented by `ccw`.
fn clean_ring<T: Scalar>(ls: &LineString<f64>, ccw: bool) -> Vec<Point<T>> {
    let mut pts: Vec<Point<T>> = ls.coords().map(|c| Point::from_f64(c.x, c.y)).collect();
    if pts.len() > 1 && pts[0].coincides(pts[pts.len() - 1]) {
        pts.pop();
    }
    pts.dedup_by(|a, b| a.coincides(*b));
    loop {
        let n = pts.len();
        if n < 3 {
            break;
        }
        let drop = (0..n).find(|&i| side(pts[(i + n - 1) % n], pts[(i + 1) % n], pts[i]).abs() <= T::geom_eps());
        match drop {
            Some(i) => {
                pts.remove(i);
            }
            None => break,
        }
    }
    if (signed_area(&pts) > T::zero()) != ccw {
        pts.reverse();
    }
    pts
}

/// Clips the domain against the m x m grid over the unit square. Pixels come
/// out by cell `(i, j)` (column, row), then in clipping order.
pub fn pixelize<T: Scalar>(d: &PolygonDomain<T>, m: usize) -> Result<Vec<Pixel<T>>, PtasError> {
    if m == 0 {
        return Err(PtasError::ZeroGrid);
    }
    let poly = Polygon::new(to_geo(d.outer()), d.holes().iter().map(|h| to_geo(h)).collect());
    let step = 1.0 / m as f64;
    let mut pixels = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let cell = Rect::new(
                Coord {
                    x: i as f64 * step,
                    y: j as f64 * step,
                },
                Coord {
                    x: (i + 1) as f64 * step,
                    y: (j + 1) as f64 * step,
                },
            )
            .to_polygon();
            for piece in poly.intersection(&cell) {
                let outer = clean_ring::<T>(piece.exterior(), true);
                if outer.len() < 3 || signed_area(&outer).as_f64() <= 1e-12 {
                    continue;
                }
                let holes = piece
                    .interiors()
                    .iter()
                    .map(|h| clean_ring::<T>(h, false))
                    .filter(|h| h.len() >= 3)
                    .collect();
                pixels.push(Pixel {
                    cell: (i, j),
                    region: PolygonDomain::from_valid_rings(outer, holes),
                    members: Vec::new(),
                    representative: None,
                });
            }
        }
    }
    Ok(pixels)
}

/// Assigns every robot to the first pixel containing it (cells are ordered,
/// so boundary robots go to the smallest cell index) and picks the lowest
/// member id as representative, except that the source represents its own
/// pixel.
pub fn choose_representatives<T: Scalar>(pixels: &mut [Pixel<T>], s: &RobotSet<T>) -> Result<(), PtasError> {
    for p in pixels.iter_mut() {
        p.members.clear();
        p.representative = None;
    }
    for r in s.robots() {
        let pixel = pixels
            .iter_mut()
            .find(|p| p.region.contains(r.point))
            .ok_or(PtasError::Unassigned(r.id))?;
        pixel.members.push(r.id);
    }
    for p in pixels.iter_mut() {
        p.representative = if p.members.contains(&s.source()) {
            Some(s.source())
        } else {
            p.members.first().copied()
        };
    }
    Ok(())
}

struct Search<'a, T> {
    reps: &'a [usize],
    table: &'a TravelTable<T>,
    depth_cap: usize,
    children: Vec<Vec<usize>>,
    wake: Vec<T>,
    depth: Vec<usize>,
    assigned: Vec<bool>,
    queue: Vec<usize>,
    best: Option<(T, Vec<Vec<usize>>)>,
}

impl<T: Scalar> Search<'_, T> {
    // Every plane tree is produced once: nodes are handled in BFS order and
    // each picks its whole ordered child list before the next one starts.
    fn process(&mut self, q: usize, unassigned: usize) {
        if q == self.queue.len() {
            if unassigned == 0 {
                let makespan = self.wake.iter().fold(T::zero(), |a, &b| a.max(b));
                if self.best.as_ref().is_none_or(|(b, _)| makespan < *b) {
                    self.best = Some((makespan, self.children.clone()));
                }
            }
            return;
        }
        let v = self.queue[q];
        let (t, pos) = (self.wake[v], self.reps[v]);
        self.extend(q, v, t, pos, unassigned);
    }

    fn extend(&mut self, q: usize, v: usize, t: T, pos: usize, unassigned: usize) {
        self.process(q + 1, unassigned);
        if self.depth[v] >= self.depth_cap {
            return;
        }
        for u in 0..self.reps.len() {
            if self.assigned[u] {
                continue;
            }
            let (cost, next) = self.table.cost(pos, self.reps[u]);
            let tu = t + cost;
            self.assigned[u] = true;
            self.wake[u] = tu;
            self.depth[u] = self.depth[v] + 1;
            self.children[v].push(u);
            self.queue.push(u);
            self.extend(q, v, tu, next, unassigned - 1);
            self.queue.pop();
            self.children[v].pop();
            self.assigned[u] = false;
        }
    }
}

/// Minimum-makespan awakening tree over `reps` (robot ids into `table`)
/// rooted at `root`, under the continue model, by enumerating every rooted
/// tree with every child order. Ties keep the first tree found.
pub fn sbat_search<T: Scalar>(
    reps: &[usize],
    root: usize,
    table: &TravelTable<T>,
    depth_cap: Option<usize>,
    cap: usize,
) -> Result<AwakeningTree<T>, PtasError> {
    if reps.len() > cap {
        return Err(PtasError::TooManyRepresentatives { count: reps.len(), cap });
    }
    let r = reps.iter().position(|&x| x == root).ok_or(PtasError::BadRoot)?;
    let n = reps.len();
    let mut search = Search {
        reps,
        table,
        depth_cap: depth_cap.unwrap_or(usize::MAX),
        children: vec![Vec::new(); n],
        wake: vec![T::zero(); n],
        depth: vec![0; n],
        assigned: vec![false; n],
        queue: vec![r],
        best: None,
    };
    search.assigned[r] = true;
    search.process(0, n - 1);
    let (_, children) = search.best.ok_or(PtasError::DepthCap(depth_cap.unwrap_or(0)))?;
    let tree = AwakeningTree::new(reps.to_vec(), r, children, table);
    debug_assert_eq!(tree.depth, tree_depth(&tree.children, tree.root));
    Ok(tree)
}

/// Splices per-pixel spanner schedules into the representative tree.
///
/// A representative first wakes its pixel (return home), then walks its
/// tree children in order from home. Convex pixels use the theta graph with
/// `k` cones; other pixels use the greedy spanner over geodesic distances
/// and walk geodesic routes.
pub fn compose_ptas<T: Scalar>(
    tree: &AwakeningTree<T>,
    pixels: &[Pixel<T>],
    s: &RobotSet<T>,
    table: &TravelTable<T>,
    k: usize,
) -> Result<AwakeningSchedule<T>, PtasError> {
    let n = s.len();
    let metric = table.metric();
    let engine = table.engine();
    let mut wake = vec![T::zero(); n];
    let mut children = vec![Vec::new(); n];
    let mut itineraries = vec![Vec::new(); n];

    for v in tree.bfs_order() {
        let rep = tree.labels[v];
        let pixel = pixels
            .iter()
            .find(|p| p.representative == Some(rep))
            .ok_or(PtasError::Unassigned(rep))?;
        let local = s.subset(&pixel.members, rep);
        let sched = pixel_schedule(&local, &pixel.region, engine, metric, k)?;
        let tau = wake[rep];
        for (l, &id) in pixel.members.iter().enumerate() {
            if id != rep {
                wake[id] = tau + sched.wake_times[l];
            }
            children[id] = sched.children[l].iter().map(|&c| pixel.members[c]).collect();
            itineraries[id] = sched.itineraries[l]
                .iter()
                .map(|tp| crate::schedule::TimedPoint {
                    t: tau + tp.t,
                    point: tp.point,
                })
                .collect();
        }
        let lr = local.source();
        let busy = sched.itineraries[lr].last().map_or(T::zero(), |tp| tp.t);
        let kids: Vec<usize> = tree.children[v].iter().map(|&c| tree.labels[c]).collect();
        let wakes = walk_tour(table, rep, tau + busy, &kids, &mut itineraries[rep]);
        for (&c, t) in kids.iter().zip(wakes) {
            wake[c] = t;
            children[rep].push(c);
        }
    }
    let has_tree_edges = tree.children.iter().any(|c| !c.is_empty());
    let mut schedule = AwakeningSchedule {
        metric,
        model: if has_tree_edges {
            MovementModel::Continue
        } else {
            MovementModel::ReturnHome
        },
        source: s.source(),
        children,
        wake_times: wake,
        itineraries,
        makespan_all: T::zero(),
        makespan_original: T::zero(),
    };
    schedule.update_makespans(s);
    Ok(schedule)
}

fn pixel_schedule<T: Scalar>(
    local: &RobotSet<T>,
    region: &PolygonDomain<T>,
    engine: &GeodesicEngine<T>,
    metric: Metric,
    k: usize,
) -> Result<AwakeningSchedule<T>, PtasError> {
    let points = local.points();
    if region.is_convex() {
        let vt = theta_graph(&points, k)?;
        return Ok(cfa_schedule(local, &vt, metric)?);
    }
    let gm = GeodesicMetric::with_engine(&points, engine.clone())?;
    let mut base = WeightedGraph::from_points(&points);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            base.add_edge(i, j, gm.distance(i, j));
        }
    }
    let vt = greedy_spanner(&base, T::lit(6.0))?;
    let route = |p: usize, u: usize| -> GeodesicPath<T> {
        match metric {
            Metric::Geodesic => gm.path(p, u),
            Metric::Visibility => engine.gvp(points[p], points[u]).expect("members lie in the domain"),
        }
    };
    Ok(cfa_schedule_with(local, &vt, metric, route)?)
}

/// Everything the grid scheduler produces.
#[derive(Debug, Clone)]
pub struct PtasRun<T> {
    pub pixels: Vec<Pixel<T>>,
    pub tree: AwakeningTree<T>,
    pub schedule: AwakeningSchedule<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtasOptions {
    pub m: usize,
    pub k: usize,
    pub depth_cap: Option<usize>,
    pub rep_cap: usize,
}

impl Default for PtasOptions {
    fn default() -> Self {
        PtasOptions {
            m: 2,
            k: 9,
            depth_cap: None,
            rep_cap: DEFAULT_SBAT_CAP,
        }
    }
}

/// Full pipeline: pixelize, pick representatives, search, compose.
pub fn solve_ptas<T: Scalar>(
    d: &PolygonDomain<T>,
    s: &RobotSet<T>,
    metric: Metric,
    opts: PtasOptions,
) -> Result<PtasRun<T>, PtasError> {
    let mut pixels = pixelize(d, opts.m)?;
    choose_representatives(&mut pixels, s)?;
    let mut reps: Vec<usize> = pixels.iter().filter_map(|p| p.representative).collect();
    reps.sort_unstable();
    if reps.len() > opts.rep_cap {
        return Err(PtasError::TooManyRepresentatives {
            count: reps.len(),
            cap: opts.rep_cap,
        });
    }
    let table = TravelTable::new(&s.points(), GeodesicEngine::new(d), metric)?;
    let tree = sbat_search(&reps, s.source(), &table, opts.depth_cap, opts.rep_cap)?;
    let schedule = compose_ptas(&tree, &pixels, s, &table, opts.k)?;
    Ok(PtasRun { pixels, tree, schedule })
}
