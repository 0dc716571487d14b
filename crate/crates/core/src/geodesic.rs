//! Visibility graphs, geodesic shortest paths and geodesic visibility paths.
//!
//! Shortest obstacle-avoiding paths in a polygonal domain bend only at
//! reflex vertices of the outer ring and at hole vertices, so every geodesic
//! is a shortest path in the visibility graph over `{a, b}` plus those
//! corners. [`GeodesicEngine`] precomputes corner-to-corner visibility once
//! per domain and answers point-pair queries with Dijkstra.

use thiserror::Error;

use crate::geometry::{Point, PolygonDomain};
use crate::graph::{walk_back, Vertex, VertexKind, WeightedGraph};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeodesicError {
    #[error("point {0} lies outside the domain")]
    OutsideDomain(usize),
    #[error("no path between the query points; the domain geometry is inconsistent")]
    Disconnected,
    #[error("empty point set")]
    Empty,
}

/// Polyline `a, r'_1, ..., r'_l, b` through domain corners.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath<T> {
    pub waypoints: Vec<Point<T>>,
    /// Index into [`PolygonDomain::corners`] of each interior waypoint.
    pub corners: Vec<usize>,
    pub length: T,
}

impl<T: Scalar> GeodesicPath<T> {
    fn single(a: Point<T>) -> Self {
        GeodesicPath {
            waypoints: vec![a],
            corners: Vec::new(),
            length: T::zero(),
        }
    }

    pub fn start(&self) -> Point<T> {
        self.waypoints[0]
    }

    pub fn end(&self) -> Point<T> {
        *self.waypoints.last().expect("path has at least one waypoint")
    }

    /// Corner index of the last interior waypoint `r'_l`, if the path bends.
    pub fn last_corner(&self) -> Option<usize> {
        self.corners.last().copied()
    }

    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        let mut corners = self.corners.clone();
        corners.reverse();
        GeodesicPath {
            waypoints,
            corners,
            length: self.length,
        }
    }

    /// Sum of consecutive segment lengths, recomputed from the waypoints.
    pub fn polyline_length(&self) -> T {
        self.waypoints
            .windows(2)
            .fold(T::zero(), |acc, w| acc + w[0].dist(w[1]))
    }
}

/// Builds the visibility graph over `points`: an edge joins every mutually
/// visible pair and weighs their Euclidean distance.
pub fn build_visibility_graph<T: Scalar>(
    points: &[Point<T>],
    d: &PolygonDomain<T>,
) -> Result<WeightedGraph<T>, GeodesicError> {
    build_visibility_graph_of(WeightedGraph::from_points(points), d)
}

/// As [`build_visibility_graph`], keeping the caller's vertex kinds.
pub fn build_visibility_graph_of<T: Scalar>(
    mut g: WeightedGraph<T>,
    d: &PolygonDomain<T>,
) -> Result<WeightedGraph<T>, GeodesicError> {
    if let Some(i) = g.vertices().iter().position(|v| !d.contains(v.point)) {
        return Err(GeodesicError::OutsideDomain(i));
    }
    let n = g.len();
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (g.point(u), g.point(v));
            if d.sees(a, b) {
                g.add_edge(u, v, a.dist(b));
            }
        }
    }
    Ok(g)
}

/// Domain plus its precomputed corner visibility graph.
#[derive(Debug, Clone)]
pub struct GeodesicEngine<T> {
    domain: PolygonDomain<T>,
    corners: Vec<Point<T>>,
    corner_graph: WeightedGraph<T>,
}

impl<T: Scalar> GeodesicEngine<T> {
    pub fn new(domain: &PolygonDomain<T>) -> Self {
        let corners = domain.corners();
        let g = WeightedGraph::new(
            corners
                .iter()
                .map(|&point| Vertex {
                    point,
                    kind: VertexKind::SteinerSite,
                })
                .collect(),
        );
        let corner_graph = build_visibility_graph_of(g, domain).expect("domain corners lie on its boundary");
        GeodesicEngine {
            domain: domain.clone(),
            corners,
            corner_graph,
        }
    }

    pub fn domain(&self) -> &PolygonDomain<T> {
        &self.domain
    }

    /// R followed by V.
    pub fn corners(&self) -> &[Point<T>] {
        &self.corners
    }

    pub fn geodesic_path(&self, a: Point<T>, b: Point<T>) -> Result<GeodesicPath<T>, GeodesicError> {
        for (i, p) in [a, b].into_iter().enumerate() {
            if !self.domain.contains(p) {
                return Err(GeodesicError::OutsideDomain(i));
            }
        }
        if a.coincides(b) {
            return Ok(GeodesicPath::single(a));
        }
        if self.domain.sees(a, b) {
            return Ok(GeodesicPath {
                waypoints: vec![a, b],
                corners: Vec::new(),
                length: a.dist(b),
            });
        }
        // vertex 0 = a, 1 = b, 2.. = corners
        let mut g = WeightedGraph::new(
            [a, b]
                .iter()
                .map(|&point| Vertex {
                    point,
                    kind: VertexKind::Robot,
                })
                .chain(self.corner_graph.vertices().iter().cloned())
                .collect(),
        );
        for (u, v, w) in self.corner_graph.edges() {
            g.add_edge(u + 2, v + 2, w);
        }
        for (c, &cp) in self.corners.iter().enumerate() {
            for (q, &qp) in [a, b].iter().enumerate() {
                if self.domain.sees(qp, cp) {
                    g.add_edge(q, c + 2, qp.dist(cp));
                }
            }
        }
        let (dist, pred) = g.dijkstra(0);
        if !dist[1].is_finite() {
            return Err(GeodesicError::Disconnected);
        }
        let ids = walk_back(&pred, 1);
        let mut waypoints = vec![a];
        let mut corners = Vec::new();
        for &id in &ids[1..ids.len() - 1] {
            let p = g.point(id);
            if p.coincides(*waypoints.last().unwrap()) || p.coincides(b) {
                continue;
            }
            waypoints.push(p);
            corners.push(id - 2);
        }
        waypoints.push(b);
        Ok(GeodesicPath {
            waypoints,
            corners,
            length: dist[1],
        })
    }

    /// Shortest travel from `a` until `b` is visible: empty when already
    /// visible, otherwise the geodesic to `b` cut at its last corner.
    pub fn gvp(&self, a: Point<T>, b: Point<T>) -> Result<GeodesicPath<T>, GeodesicError> {
        for (i, p) in [a, b].into_iter().enumerate() {
            if !self.domain.contains(p) {
                return Err(GeodesicError::OutsideDomain(i));
            }
        }
        if self.domain.sees(a, b) {
            return Ok(GeodesicPath::single(a));
        }
        let mut path = self.geodesic_path(a, b)?;
        let last = path.waypoints.pop().expect("non-visible path has two ends");
        path.length = path.length - path.end().dist(last);
        if path.length < T::zero() {
            path.length = T::zero();
        }
        Ok(path)
    }
}

pub fn geodesic_path<T: Scalar>(
    a: Point<T>,
    b: Point<T>,
    d: &PolygonDomain<T>,
) -> Result<GeodesicPath<T>, GeodesicError> {
    GeodesicEngine::new(d).geodesic_path(a, b)
}

pub fn gvp<T: Scalar>(a: Point<T>, b: Point<T>, d: &PolygonDomain<T>) -> Result<GeodesicPath<T>, GeodesicError> {
    GeodesicEngine::new(d).gvp(a, b)
}

/// Largest pairwise geodesic distance.
pub fn diameter<T: Scalar>(points: &[Point<T>], d: &PolygonDomain<T>) -> Result<T, GeodesicError> {
    Ok(GeodesicMetric::new(points, d)?.diameter())
}

/// All-pairs geodesic distances over a fixed point set.
#[derive(Debug, Clone)]
pub struct GeodesicMetric<T> {
    engine: GeodesicEngine<T>,
    points: Vec<Point<T>>,
    dist: Vec<Vec<T>>,
}

impl<T: Scalar> GeodesicMetric<T> {
    pub fn new(points: &[Point<T>], d: &PolygonDomain<T>) -> Result<Self, GeodesicError> {
        Self::with_engine(points, GeodesicEngine::new(d))
    }

    pub fn with_engine(points: &[Point<T>], engine: GeodesicEngine<T>) -> Result<Self, GeodesicError> {
        if points.is_empty() {
            return Err(GeodesicError::Empty);
        }
        let n = points.len();
        let mut g = WeightedGraph::new(
            points
                .iter()
                .map(|&point| Vertex {
                    point,
                    kind: VertexKind::Robot,
                })
                .chain(engine.corner_graph.vertices().iter().cloned())
                .collect(),
        );
        if let Some(i) = points.iter().position(|p| !engine.domain.contains(*p)) {
            return Err(GeodesicError::OutsideDomain(i));
        }
        for (u, v, w) in engine.corner_graph.edges() {
            g.add_edge(u + n, v + n, w);
        }
        for u in 0..n {
            for v in u + 1..g.len() {
                let (a, b) = (g.point(u), g.point(v));
                if engine.domain.sees(a, b) {
                    g.add_edge(u, v, a.dist(b));
                }
            }
        }
        let mut dist = vec![vec![T::zero(); n]; n];
        for (u, row) in dist.iter_mut().enumerate() {
            let (du, _) = g.dijkstra(u);
            if du[..n].iter().any(|x| !x.is_finite()) {
                return Err(GeodesicError::Disconnected);
            }
            row.copy_from_slice(&du[..n]);
        }
        // symmetrize away round-off from different summation orders
        #[allow(clippy::needless_range_loop)]
        for u in 0..n {
            for v in u + 1..n {
                let m = dist[u][v].min(dist[v][u]);
                dist[u][v] = m;
                dist[v][u] = m;
            }
        }
        Ok(GeodesicMetric {
            engine,
            points: points.to_vec(),
            dist,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn engine(&self) -> &GeodesicEngine<T> {
        &self.engine
    }

    pub fn distance(&self, i: usize, j: usize) -> T {
        self.dist[i][j]
    }

    pub fn path(&self, i: usize, j: usize) -> GeodesicPath<T> {
        self.engine
            .geodesic_path(self.points[i], self.points[j])
            .expect("metric points are inside the domain")
    }

    pub fn diameter(&self) -> T {
        self.dist.iter().flatten().fold(T::zero(), |acc, &x| acc.max(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn lshape() -> PolygonDomain<f64> {
        PolygonDomain::new(
            vec![
                p(0.0, 0.0),
                p(2.0, 0.0),
                p(2.0, 1.0),
                p(1.0, 1.0),
                p(1.0, 2.0),
                p(0.0, 2.0),
            ],
            vec![],
        )
        .unwrap()
    }

    fn square() -> PolygonDomain<f64> {
        PolygonDomain::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)], vec![]).unwrap()
    }

    #[test]
    fn visibility_graph_small_cases() {
        let sq = square();
        let g = build_visibility_graph(&[p(0.1, 0.1), p(0.9, 0.2), p(0.5, 0.8)], &sq).unwrap();
        assert_eq!(g.edge_count(), 3);
        let single = build_visibility_graph(&[p(0.5, 0.5)], &sq).unwrap();
        assert_eq!((single.len(), single.edge_count()), (1, 0));
        let coincident = build_visibility_graph(&[p(0.5, 0.5), p(0.5, 0.5)], &sq).unwrap();
        assert_eq!(coincident.weight(0, 1), Some(0.0));
        assert_eq!(
            build_visibility_graph(&[p(0.5, 0.5), p(1.5, 0.5)], &sq),
            Err(GeodesicError::OutsideDomain(1))
        );
    }

    #[test]
    fn lshape_visibility_graph() {
        // a and b are hidden from each other; both see the reflex corner c.
        let l = lshape();
        let g = build_visibility_graph(&[p(1.5, 0.75), p(0.75, 1.5), p(1.0, 1.0)], &l).unwrap();
        assert!(!g.has_edge(0, 1));
        assert!(g.has_edge(0, 2) && g.has_edge(1, 2));
        // the grazing pair through the corner is visible
        let g = build_visibility_graph(&[p(1.5, 0.5), p(0.5, 1.5), p(1.0, 1.0)], &l).unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn geodesic_examples() {
        let sq = square();
        let path = geodesic_path(p(0.1, 0.2), p(0.7, 0.9), &sq).unwrap();
        assert_eq!(path.waypoints.len(), 2);
        assert!((path.length - p(0.1, 0.2).dist(p(0.7, 0.9))).abs() < 1e-15);
        let same = geodesic_path(p(0.3, 0.3), p(0.3, 0.3), &sq).unwrap();
        assert_eq!((same.waypoints.len(), same.length), (1, 0.0));

        let l = lshape();
        let path = geodesic_path(p(1.5, 0.75), p(0.75, 1.5), &l).unwrap();
        assert_eq!(path.waypoints, vec![p(1.5, 0.75), p(1.0, 1.0), p(0.75, 1.5)]);
        assert_eq!(path.corners, vec![0]);
        let expected = (0.25f64 + 0.0625).sqrt() * 2.0;
        assert!((path.length - expected).abs() < 1e-12);

        let graze = geodesic_path(p(1.5, 0.5), p(0.5, 1.5), &l).unwrap();
        assert!((graze.length - 2.0 * 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gvp_examples() {
        let l = lshape();
        let a = p(1.5, 0.75);
        let b = p(0.75, 1.5);
        let fwd = gvp(a, b, &l).unwrap();
        assert_eq!(fwd.waypoints, vec![a, p(1.0, 1.0)]);
        assert!((fwd.length - 0.3125f64.sqrt()).abs() < 1e-12);
        let back = gvp(b, a, &l).unwrap();
        assert_eq!(back.waypoints, vec![b, p(1.0, 1.0)]);
        // asymmetric pair
        let c = p(1.9, 0.1);
        let fwd = gvp(c, b, &l).unwrap();
        let back = gvp(b, c, &l).unwrap();
        assert!((fwd.length - c.dist(p(1.0, 1.0))).abs() < 1e-12);
        assert!((back.length - b.dist(p(1.0, 1.0))).abs() < 1e-12);
        assert!((fwd.length - back.length).abs() > 0.1);
        let vis = gvp(p(0.2, 0.2), p(0.5, 0.5), &l).unwrap();
        assert_eq!(vis.length, 0.0);
    }

    #[test]
    fn diameter_examples() {
        let sq = square();
        assert_eq!(diameter(&[p(0.5, 0.5)], &sq).unwrap(), 0.0);
        assert!((diameter(&[p(0.0, 0.0), p(0.3, 0.4)], &sq).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(diameter::<f64>(&[], &sq), Err(GeodesicError::Empty));
        let l = lshape();
        let dia = diameter(&[p(1.5, 0.5), p(0.5, 1.5), p(1.0, 1.0)], &l).unwrap();
        assert!((dia - 2.0 * 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn path_around_a_hole() {
        let d = PolygonDomain::new(
            vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)],
            vec![vec![p(0.4, 0.2), p(0.4, 0.8), p(0.6, 0.8), p(0.6, 0.2)]],
        )
        .unwrap();
        let path = geodesic_path(p(0.2, 0.5), p(0.8, 0.5), &d).unwrap();
        assert_eq!(path.corners.len(), 2);
        // symmetric detour around either short side
        let leg = p(0.2, 0.5).dist(p(0.4, 0.8));
        assert!((path.length - (2.0 * leg + 0.2)).abs() < 1e-12);
        assert!((path.polyline_length() - path.length).abs() < 1e-12);
    }
}
