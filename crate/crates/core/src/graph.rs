//! Undirected weighted graph shared by the visibility graph, spanners and
//! per-pixel graphs.

use std::collections::BinaryHeap;

use thiserror::Error;

use crate::geometry::Point;
use crate::scalar::{MinKey, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Robot,
    /// A reflex or hole corner with no robot on it.
    SteinerSite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex<T> {
    pub point: Point<T>,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertices {0} and {1} are disconnected")]
    Disconnected(usize, usize),
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
}

/// Adjacency lists are kept sorted by neighbour id, so iteration order is
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<T> {
    vertices: Vec<Vertex<T>>,
    adj: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> WeightedGraph<T> {
    pub fn new(vertices: Vec<Vertex<T>>) -> Self {
        let adj = vec![Vec::new(); vertices.len()];
        WeightedGraph { vertices, adj }
    }

    /// Same vertices, no edges.
    pub fn empty_like(&self) -> Self {
        WeightedGraph::new(self.vertices.clone())
    }

    pub fn from_points(points: &[Point<T>]) -> Self {
        WeightedGraph::new(
            points
                .iter()
                .map(|&point| Vertex {
                    point,
                    kind: VertexKind::Robot,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex<T>] {
        &self.vertices
    }

    pub fn point(&self, v: usize) -> Point<T> {
        self.vertices[v].point
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, T)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<T> {
        self.adj[u]
            .binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weight(u, v).is_some()
    }

    /// Inserts `{u, v}`; self-loops and existing edges are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize, w: T) {
        if u == v {
            return;
        }
        if let Err(i) = self.adj[u].binary_search_by_key(&v, |&(n, _)| n) {
            self.adj[u].insert(i, (v, w));
            let j = self.adj[v].binary_search_by_key(&u, |&(n, _)| n).unwrap_err();
            self.adj[v].insert(j, (u, w));
        }
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&(v, _)| u < v).map(move |&(v, w)| (u, v, w)))
    }

    /// Single-source distances and predecessors. Among equal-length paths the
    /// predecessor with the smaller id wins.
    pub fn dijkstra(&self, source: usize) -> (Vec<T>, Vec<Option<usize>>) {
        self.dijkstra_bounded(source, T::infinity())
    }

    /// Dijkstra that stops expanding once the frontier exceeds `limit`.
    pub fn dijkstra_bounded(&self, source: usize, limit: T) -> (Vec<T>, Vec<Option<usize>>) {
        let n = self.len();
        let mut dist = vec![T::infinity(); n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = T::zero();
        heap.push(MinKey {
            value: T::zero(),
            tie: source,
        });
        while let Some(MinKey { value, tie: u }) = heap.pop() {
            if done[u] || value > dist[u] {
                continue;
            }
            if value > limit {
                break;
            }
            done[u] = true;
            for &(v, w) in &self.adj[u] {
                if done[v] {
                    continue;
                }
                let nd = value + w;
                let better = nd < dist[v] || (nd == dist[v] && pred[v].is_some_and(|p| u < p));
                if better {
                    dist[v] = nd;
                    pred[v] = Some(u);
                    heap.push(MinKey { value: nd, tie: v });
                }
            }
        }
        (dist, pred)
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Minimum-weight path from `u` to `v`, including both endpoints
/// (`[u]` when `u == v`).
pub fn shortest_path_in_graph<T: Scalar>(
    g: &WeightedGraph<T>,
    u: usize,
    v: usize,
) -> Result<(Vec<usize>, T), GraphError> {
    for x in [u, v] {
        if x >= g.len() {
            return Err(GraphError::UnknownVertex(x));
        }
    }
    let (dist, pred) = g.dijkstra(u);
    if !dist[v].is_finite() {
        return Err(GraphError::Disconnected(u, v));
    }
    Ok((walk_back(&pred, v), dist[v]))
}

pub(crate) fn walk_back(pred: &[Option<usize>], v: usize) -> Vec<usize> {
    let mut path = vec![v];
    let mut cur = v;
    while let Some(p) = pred[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_graph(weights: &[(usize, usize, f64)], n: usize) -> WeightedGraph<f64> {
        let pts: Vec<Point<f64>> = (0..n).map(|i| Point::new(i as f64, 0.0)).collect();
        let mut g = WeightedGraph::from_points(&pts);
        for &(u, v, w) in weights {
            g.add_edge(u, v, w);
        }
        g
    }

    #[test]
    fn same_vertex_is_free() {
        let g = line_graph(&[(0, 1, 1.0)], 2);
        assert_eq!(shortest_path_in_graph(&g, 1, 1).unwrap(), (vec![1], 0.0));
    }

    #[test]
    fn direct_edge_when_cheapest() {
        let g = line_graph(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.5)], 3);
        assert_eq!(shortest_path_in_graph(&g, 0, 2).unwrap(), (vec![0, 2], 1.5));
    }

    #[test]
    fn triangle_takes_two_hops() {
        let g = line_graph(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)], 3);
        assert_eq!(shortest_path_in_graph(&g, 0, 2).unwrap(), (vec![0, 1, 2], 2.0));
    }

    #[test]
    fn reports_disconnection() {
        let g = line_graph(&[(0, 1, 1.0)], 3);
        assert_eq!(shortest_path_in_graph(&g, 0, 2), Err(GraphError::Disconnected(0, 2)));
        assert!(!g.is_connected());
        assert_eq!(shortest_path_in_graph(&g, 0, 7), Err(GraphError::UnknownVertex(7)));
    }

    #[test]
    fn ties_prefer_smaller_predecessor() {
        // 0-1-3 and 0-2-3 both length 2
        let g = line_graph(&[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)], 4);
        assert_eq!(shortest_path_in_graph(&g, 0, 3).unwrap().0, vec![0, 1, 3]);
    }

    #[test]
    fn edges_are_undirected_and_unique() {
        let mut g = line_graph(&[(0, 1, 1.0), (1, 0, 1.0), (2, 2, 0.0)], 3);
        g.add_edge(1, 2, 2.0);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(2, 1), Some(2.0));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0), (1, 2, 2.0)]);
    }
}
