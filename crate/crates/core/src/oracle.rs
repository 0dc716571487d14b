//! Exact optimum for small instances by branch and bound over agents.
//!
//! A search state is the set of awake robots, each with the time it is next
//! free and where it stands, plus the set still asleep. The earliest free
//! robot either wakes some sleeper next or stops for good. Every awakening
//! tree with child orders corresponds to exactly one such decision sequence.

use thiserror::Error;

use crate::geodesic::{build_visibility_graph, GeodesicEngine, GeodesicError};
use crate::geometry::PolygonDomain;
use crate::scalar::Scalar;
use crate::schedule::{Metric, RobotSet};
use crate::spanner::greedy_spanner;
use crate::tree::{AwakeningTree, TravelTable};

/// Largest robot count the oracle accepts.
pub const ORACLE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("size cap: {0} robots exceed the exact solver limit of {ORACLE_CAP}")]
    SizeCap(usize),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub optimal: T,
    pub witness: AwakeningTree<T>,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, Copy)]
struct Agent<T> {
    free_at: T,
    site: usize,
    robot: usize,
}

struct Bnb<'a, T> {
    table: &'a TravelTable<T>,
    use_bound: bool,
    agents: Vec<Agent<T>>,
    asleep: Vec<bool>,
    children: Vec<Vec<usize>>,
    best: T,
    witness: Option<Vec<Vec<usize>>>,
    nodes: u64,
}

impl<T: Scalar> Bnb<'_, T> {
    fn pruned(&self, bound: T) -> bool {
        if self.witness.is_some() {
            bound >= self.best
        } else {
            bound > self.best
        }
    }

    fn dfs(&mut self, partial: T, left: usize) {
        self.nodes += 1;
        if left == 0 {
            if !self.pruned(partial) {
                self.best = partial;
                self.witness = Some(self.children.clone());
            }
            return;
        }
        if self.agents.is_empty() {
            return;
        }
        let mut bound = partial;
        if self.use_bound {
            for y in (0..self.asleep.len()).filter(|&y| self.asleep[y]) {
                let reach = self
                    .agents
                    .iter()
                    .map(|a| a.free_at + self.table.cost(a.site, y).0)
                    .fold(T::infinity(), T::min);
                bound = bound.max(reach);
            }
        }
        if self.pruned(bound) {
            return;
        }
        let i = (0..self.agents.len())
            .min_by(|&a, &b| {
                let (x, y) = (&self.agents[a], &self.agents[b]);
                crate::scalar::cmp_scalar(&x.free_at, &y.free_at).then(x.robot.cmp(&y.robot))
            })
            .expect("agents is nonempty");
        let a = self.agents[i];
        for y in 0..self.asleep.len() {
            if !self.asleep[y] {
                continue;
            }
            let (cost, end) = self.table.cost(a.site, y);
            let t = a.free_at + cost;
            if self.pruned(partial.max(t)) {
                continue;
            }
            self.asleep[y] = false;
            self.children[a.robot].push(y);
            self.agents[i] = Agent {
                free_at: t,
                site: end,
                robot: a.robot,
            };
            self.agents.push(Agent {
                free_at: t,
                site: y,
                robot: y,
            });
            self.dfs(partial.max(t), left - 1);
            self.agents.pop();
            self.agents[i] = a;
            self.children[a.robot].pop();
            self.asleep[y] = true;
        }
        self.agents.swap_remove(i);
        self.dfs(partial, left);
        self.agents.push(a);
        let last = self.agents.len() - 1;
        self.agents.swap(i, last);
    }
}

// Starting upper bound: the greedy-spanner strategy's tree (or a star from
// the source when the visibility graph is disconnected), priced under the
// continue model.
fn incumbent<T: Scalar>(s: &RobotSet<T>, d: &PolygonDomain<T>, table: &TravelTable<T>) -> AwakeningTree<T> {
    let n = s.len();
    let labels: Vec<usize> = (0..n).collect();
    let star = || {
        let mut children = vec![Vec::new(); n];
        children[s.source()] = (0..n).filter(|&i| i != s.source()).collect();
        AwakeningTree::new(labels.clone(), s.source(), children, table)
    };
    let cfa = build_visibility_graph(&s.points(), d)
        .ok()
        .and_then(|g| greedy_spanner(&g, T::lit(6.0)).ok())
        .and_then(|vt| crate::cfa::cfa_schedule(s, &vt, table.metric()).ok())
        .map(|sch| AwakeningTree::new(labels.clone(), s.source(), sch.children, table));
    match cfa {
        Some(t) if t.makespan <= star().makespan => t,
        _ => star(),
    }
}

/// Minimum makespan over all awakening trees with child orders, continue
/// model. Geodesic: a waker relocates to its target. Visibility: it stops at
/// the end of the geodesic visibility path.
pub fn optimal_makespan<T: Scalar>(
    s: &RobotSet<T>,
    metric: Metric,
    d: &PolygonDomain<T>,
) -> Result<OracleResult<T>, OracleError> {
    if s.len() > ORACLE_CAP {
        return Err(OracleError::SizeCap(s.len()));
    }
    let table = TravelTable::new(&s.points(), GeodesicEngine::new(d), metric)?;
    optimal_with_table(s, d, &table)
}

pub(crate) fn optimal_with_table<T: Scalar>(
    s: &RobotSet<T>,
    d: &PolygonDomain<T>,
    table: &TravelTable<T>,
) -> Result<OracleResult<T>, OracleError> {
    let n = s.len();
    let start = incumbent(s, d, table);
    let src = s.source();
    let mut asleep = vec![true; n];
    asleep[src] = false;
    let mut bnb = Bnb {
        table,
        // Reaching y from an agent's spot is a lower bound on y's wake time
        // only when the travel cost obeys the triangle inequality.
        use_bound: table.metric() == Metric::Geodesic,
        agents: vec![Agent {
            free_at: T::zero(),
            site: src,
            robot: src,
        }],
        asleep,
        children: vec![Vec::new(); n],
        best: start.makespan,
        witness: None,
        nodes: 0,
    };
    bnb.dfs(T::zero(), n - 1);
    let children = bnb.witness.unwrap_or(start.children);
    let witness = AwakeningTree::new((0..n).collect(), src, children, table);
    Ok(OracleResult {
        optimal: witness.makespan,
        witness,
        nodes_explored: bnb.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::schedule::validate_schedule;
    use crate::tree::tree_schedule;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn square(side: f64) -> PolygonDomain<f64> {
        PolygonDomain::new(vec![p(0.0, 0.0), p(side, 0.0), p(side, side), p(0.0, side)], vec![]).unwrap()
    }

    fn lshape() -> PolygonDomain<f64> {
        let ring = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)];
        PolygonDomain::new(ring.iter().map(|&(x, y)| p(x, y)).collect(), vec![]).unwrap()
    }

    #[test]
    fn two_robots() {
        let s = RobotSet::new(&[p(0.5, 0.5), p(1.5, 2.5)], 0).unwrap();
        let r = optimal_makespan(&s, Metric::Geodesic, &square(3.0)).unwrap();
        assert!((r.optimal - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn chain_on_a_segment() {
        let s = RobotSet::new(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)], 0).unwrap();
        let r = optimal_makespan(&s, Metric::Geodesic, &square(3.0)).unwrap();
        assert_eq!(r.optimal, 2.0);
        assert_eq!(r.witness.edges().len(), 2);
    }

    #[test]
    fn visibility_all_visible_is_free() {
        let s = RobotSet::new(&[p(0.1, 0.1), p(1.0, 2.0), p(2.5, 0.3)], 0).unwrap();
        let r = optimal_makespan(&s, Metric::Visibility, &square(3.0)).unwrap();
        assert_eq!(r.optimal, 0.0);
    }

    #[test]
    fn visibility_around_the_corner() {
        let d = lshape();
        let s = RobotSet::new(&[p(1.5, 0.75), p(0.75, 1.5)], 0).unwrap();
        let r = optimal_makespan(&s, Metric::Visibility, &d).unwrap();
        assert!((r.optimal - 0.3125f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn size_cap() {
        let pts: Vec<_> = (0..9).map(|i| p(0.1 * i as f64, 0.5)).collect();
        let s = RobotSet::new(&pts, 0).unwrap();
        assert_eq!(
            optimal_makespan(&s, Metric::Geodesic, &square(1.0)),
            Err(OracleError::SizeCap(9))
        );
    }

    #[test]
    fn witness_is_a_valid_schedule() {
        let d = lshape();
        let pts = [
            p(0.2, 0.2),
            p(1.8, 0.5),
            p(0.5, 1.8),
            p(1.5, 0.9),
            p(0.9, 1.5),
            p(0.2, 1.2),
        ];
        let s = RobotSet::new(&pts, 0).unwrap();
        for metric in [Metric::Geodesic, Metric::Visibility] {
            let r = optimal_makespan(&s, metric, &d).unwrap();
            let table = TravelTable::new(&s.points(), GeodesicEngine::new(&d), metric).unwrap();
            let sch = tree_schedule(&r.witness, &s, &table);
            assert!(validate_schedule(&sch, &s, &d).is_empty(), "{metric}");
            assert!((sch.makespan_all - r.optimal).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_the_tree_search() {
        let d = lshape();
        let pts = [
            p(0.2, 0.2),
            p(1.8, 0.5),
            p(0.5, 1.8),
            p(1.5, 0.9),
            p(0.9, 1.5),
            p(0.2, 1.2),
        ];
        let s = RobotSet::new(&pts, 0).unwrap();
        for metric in [Metric::Geodesic, Metric::Visibility] {
            let table = TravelTable::new(&s.points(), GeodesicEngine::new(&d), metric).unwrap();
            let bnb = optimal_makespan(&s, metric, &d).unwrap();
            let ids: Vec<usize> = (0..6).collect();
            let full = crate::ptas::sbat_search(&ids, 0, &table, None, 8).unwrap();
            assert!((bnb.optimal - full.makespan).abs() < 1e-9, "{metric}");
        }
    }
}
