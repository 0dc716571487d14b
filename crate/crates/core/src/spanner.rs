//! Bounded-degree spanners: the path-greedy spanner used domain-wide and the
//! cone-based theta-graph used inside convex pixels.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::geometry::Point;
use crate::graph::WeightedGraph;
use crate::scalar::{cmp_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpannerError {
    #[error("stretch target must exceed 1, got {0}")]
    InvalidStretch(f64),
    #[error("base graph is disconnected")]
    Disconnected,
    #[error("theta-graph needs at least 2 cones, got {0}")]
    TooFewCones(usize),
}

/// Subgraph of a base graph with its measured quality.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannerGraph<T> {
    pub graph: WeightedGraph<T>,
    pub t_target: T,
    pub t_measured: T,
    pub k_measured: usize,
    /// Per vertex, its neighbours by ascending edge weight (ties by id):
    /// `u_1(p), u_2(p), ...`.
    pub neighbor_order: Vec<Vec<usize>>,
}

impl<T: Scalar> SpannerGraph<T> {
    fn finish(graph: WeightedGraph<T>, t_target: T, base: &WeightedGraph<T>) -> Self {
        let neighbor_order = neighbor_order(&graph);
        let mut s = SpannerGraph {
            graph,
            t_target,
            t_measured: T::zero(),
            k_measured: 0,
            neighbor_order,
        };
        let report = verify_spanner(base, &s);
        s.t_measured = report.t_measured;
        s.k_measured = report.k_measured;
        s
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Stretch bound of the awakening analysis, `t * (2k - 1)`, with the
    /// measured degree.
    pub fn awakening_factor(&self) -> T {
        let k = T::from_usize(self.k_measured.max(1)).unwrap_or_else(T::infinity);
        self.t_target * (k + k - T::one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpannerReport<T> {
    pub t_measured: T,
    pub k_measured: usize,
    pub ok: bool,
}

fn neighbor_order<T: Scalar>(g: &WeightedGraph<T>) -> Vec<Vec<usize>> {
    (0..g.len())
        .map(|v| {
            let mut nb: Vec<(usize, T)> = g.neighbors(v).to_vec();
            nb.sort_by(|a, b| cmp_scalar(&a.1, &b.1).then(a.0.cmp(&b.0)));
            nb.into_iter().map(|(u, _)| u).collect()
        })
        .collect()
}

/// Path-greedy t-spanner: scan edges by ascending weight and keep one only
/// when the spanner built so far cannot connect its endpoints within
/// `t * weight`.
pub fn greedy_spanner<T: Scalar>(g: &WeightedGraph<T>, t: T) -> Result<SpannerGraph<T>, SpannerError> {
    if t.is_nan() || t <= T::one() {
        return Err(SpannerError::InvalidStretch(t.as_f64()));
    }
    if !g.is_connected() {
        return Err(SpannerError::Disconnected);
    }
    let mut edges: Vec<(usize, usize, T)> = g.edges().collect();
    edges.sort_by(|a, b| cmp_scalar(&a.2, &b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut h = g.empty_like();
    for (u, v, w) in edges {
        let budget = t * w;
        let (dist, _) = h.dijkstra_bounded(u, budget);
        if dist[v] > budget {
            h.add_edge(u, v, w);
        }
    }
    Ok(SpannerGraph::finish(h, t, g))
}

/// Classical stretch bound `1 / (1 - 2 sin(pi / k))` of the theta-graph,
/// valid for `k >= 7`.
pub fn theta_stretch_bound<T: Scalar>(k: usize) -> Option<T> {
    if k < 7 {
        return None;
    }
    let s = (std::f64::consts::PI / k as f64).sin();
    Some(T::lit(1.0 / (1.0 - 2.0 * s)))
}

/// Index of the cone around `p` containing `q`. Cone `j` spans angles
/// `(j * 2pi/k, (j + 1) * 2pi/k]` except cone 0 which also owns angle 0;
/// a point on a ray goes to the lower-indexed cone.
pub fn cone_index<T: Scalar>(p: Point<T>, q: Point<T>, k: usize) -> usize {
    let d = q - p;
    let mut angle = d.y.as_f64().atan2(d.x.as_f64());
    if angle < 0.0 {
        angle += TAU;
    }
    let width = TAU / k as f64;
    let c = angle / width;
    let j = c.round();
    if j >= 1.0 && (c - j).abs() < 1e-12 {
        return (j as usize - 1) % k;
    }
    (c.floor() as usize).min(k - 1)
}

/// Complete Euclidean graph over `points`.
pub fn complete_graph<T: Scalar>(points: &[Point<T>]) -> WeightedGraph<T> {
    let mut g = WeightedGraph::from_points(points);
    for u in 0..points.len() {
        for v in u + 1..points.len() {
            g.add_edge(u, v, points[u].dist(points[v]));
        }
    }
    g
}

/// Theta-graph: every point links to its nearest neighbour (ties by id) in
/// each of `k` cones. Meant for point sets that see each other pairwise.
pub fn theta_graph<T: Scalar>(points: &[Point<T>], k: usize) -> Result<SpannerGraph<T>, SpannerError> {
    if k < 2 {
        return Err(SpannerError::TooFewCones(k));
    }
    let mut g = WeightedGraph::from_points(points);
    for (i, &p) in points.iter().enumerate() {
        let mut best: Vec<Option<(T, usize)>> = vec![None; k];
        for (j, &q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let c = if p.coincides(q) { 0 } else { cone_index(p, q, k) };
            let d = p.dist(q);
            let better = match best[c] {
                None => true,
                Some((bd, bj)) => d < bd || (d == bd && j < bj),
            };
            if better {
                best[c] = Some((d, j));
            }
        }
        for (d, j) in best.into_iter().flatten() {
            g.add_edge(i, j, d);
        }
    }
    let target = theta_stretch_bound(k).unwrap_or_else(T::infinity);
    Ok(SpannerGraph::finish(g, target, &complete_graph(points)))
}

/// Measures the worst stretch over all vertex pairs connected in `base`
/// (0/0 counts as 1) and the maximum degree of `s`.
pub fn verify_spanner<T: Scalar>(base: &WeightedGraph<T>, s: &SpannerGraph<T>) -> SpannerReport<T> {
    let n = base.len();
    let mut worst = T::one();
    for u in 0..n {
        let (db, _) = base.dijkstra(u);
        let (ds, _) = s.graph.dijkstra(u);
        for v in u + 1..n {
            if !db[v].is_finite() {
                continue;
            }
            let ratio = if db[v] <= T::zero() {
                if ds[v] <= T::zero() {
                    T::one()
                } else {
                    T::infinity()
                }
            } else {
                ds[v] / db[v]
            };
            worst = worst.max(ratio);
        }
    }
    SpannerReport {
        t_measured: worst,
        k_measured: s.graph.max_degree(),
        ok: worst <= s.t_target + T::lit(1e-9),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    #[test]
    fn greedy_keeps_single_edge() {
        let g = complete_graph(&[p(0.0, 0.0), p(1.0, 0.0)]);
        let s = greedy_spanner(&g, 6.0).unwrap();
        assert_eq!(s.graph.edge_count(), 1);
        assert_eq!(s.t_measured, 1.0);
    }

    #[test]
    fn greedy_prunes_collinear_shortcut() {
        let g = complete_graph(&[p(0.0, 0.0), p(0.5, 0.0), p(1.0, 0.0)]);
        let s = greedy_spanner(&g, 6.0).unwrap();
        assert!(s.graph.has_edge(0, 1) && s.graph.has_edge(1, 2));
        assert!(!s.graph.has_edge(0, 2));
        let r = verify_spanner(&g, &s);
        assert!(r.ok);
        assert!((r.t_measured - 1.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_rejects_bad_input() {
        let g = complete_graph(&[p(0.0, 0.0), p(1.0, 0.0)]);
        assert!(matches!(greedy_spanner(&g, 1.0), Err(SpannerError::InvalidStretch(_))));
        let lonely = WeightedGraph::from_points(&[p(0.0, 0.0), p(1.0, 0.0)]);
        assert_eq!(greedy_spanner(&lonely, 2.0), Err(SpannerError::Disconnected));
    }

    #[test]
    fn tight_stretch_keeps_almost_everything() {
        let pts = [p(0.1, 0.2), p(0.8, 0.15), p(0.55, 0.9), p(0.3, 0.6)];
        let g = complete_graph(&pts);
        let s = greedy_spanner(&g, 1.0001).unwrap();
        // oracle: an edge survives iff no two-hop detour is within 1.0001 of it
        let mut expected = 0;
        for (u, v, w) in g.edges() {
            let detour = (0..4)
                .filter(|&x| x != u && x != v)
                .map(|x| pts[u].dist(pts[x]) + pts[x].dist(pts[v]))
                .fold(f64::INFINITY, f64::min);
            if detour > 1.0001 * w {
                expected += 1;
            }
        }
        assert_eq!(s.graph.edge_count(), expected);
        assert!(expected >= 5);
        assert!(s.t_measured <= 1.0001 + 1e-9);
    }

    #[test]
    fn verify_identity_and_tree() {
        let g = complete_graph(&[p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.75f64.sqrt())]);
        let whole = SpannerGraph::finish(g.clone(), 2.0, &g);
        assert_eq!(whole.t_measured, 1.0);
        let mut tree = g.empty_like();
        tree.add_edge(0, 1, 1.0);
        tree.add_edge(1, 2, 1.0);
        let s = SpannerGraph::finish(tree, 2.0, &g);
        assert!((s.t_measured - 2.0).abs() < 1e-12);
        assert_eq!(s.k_measured, 2);
        assert!(verify_spanner(&g, &s).ok);
    }

    #[test]
    fn cone_boundaries_go_to_lower_cone() {
        let o = p(0.0, 0.0);
        assert_eq!(cone_index(o, p(1.0, 0.0), 4), 0);
        assert_eq!(cone_index(o, p(1.0, 1.0), 4), 0);
        assert_eq!(cone_index(o, p(0.0, 1.0), 4), 0);
        assert_eq!(cone_index(o, p(-1.0, 0.5), 4), 1);
        assert_eq!(cone_index(o, p(-1.0, 0.0), 4), 1);
        assert_eq!(cone_index(o, p(0.5, -1.0), 4), 3);
    }

    #[test]
    fn theta_small_cases() {
        assert!(theta_graph(&[p(0.5, 0.5)], 9).unwrap().graph.edge_count() == 0);
        for k in [2, 3, 9] {
            let s = theta_graph(&[p(0.1, 0.1), p(0.7, 0.4)], k).unwrap();
            assert_eq!(s.graph.edge_count(), 1);
        }
        assert_eq!(theta_graph(&[p(0.1, 0.1)], 1), Err(SpannerError::TooFewCones(1)));
    }

    #[test]
    fn neighbor_order_ascends() {
        let pts = [p(0.0, 0.0), p(0.3, 0.0), p(0.0, 0.1), p(-0.2, 0.0)];
        let s = greedy_spanner(&complete_graph(&pts), 6.0).unwrap();
        for (v, order) in s.neighbor_order.iter().enumerate() {
            let ws: Vec<f64> = order.iter().map(|&u| s.graph.weight(v, u).unwrap()).collect();
            assert!(ws.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(order.len(), s.graph.degree(v));
        }
    }

    #[test]
    fn theta_bound_values() {
        assert_eq!(theta_stretch_bound::<f64>(6), None);
        let b9: f64 = theta_stretch_bound(9).unwrap();
        assert!((b9 - 1.0 / (1.0 - 2.0 * 20f64.to_radians().sin())).abs() < 1e-12);
    }
}
