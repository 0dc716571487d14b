//! Robot sets, awakening schedules and the schedule validator.

use std::fmt;

use thiserror::Error;

use crate::geometry::{Point, PolygonDomain};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Original,
    Steiner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robot<T> {
    pub id: usize,
    pub point: Point<T>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RobotSetError {
    #[error("robot set is empty")]
    Empty,
    #[error("source index {0} out of range")]
    BadSource(usize),
}

/// Robots indexed by id (`robots[i].id == i`) with one awake source.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotSet<T> {
    robots: Vec<Robot<T>>,
    source: usize,
}

impl<T: Scalar> RobotSet<T> {
    /// All robots original.
    pub fn new(points: &[Point<T>], source: usize) -> Result<Self, RobotSetError> {
        if points.is_empty() {
            return Err(RobotSetError::Empty);
        }
        if source >= points.len() {
            return Err(RobotSetError::BadSource(source));
        }
        let robots = points
            .iter()
            .enumerate()
            .map(|(id, &point)| Robot {
                id,
                point,
                origin: Origin::Original,
            })
            .collect();
        Ok(RobotSet { robots, source })
    }

    pub fn robots(&self) -> &[Robot<T>] {
        &self.robots
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn point(&self, id: usize) -> Point<T> {
        self.robots[id].point
    }

    pub fn points(&self) -> Vec<Point<T>> {
        self.robots.iter().map(|r| r.point).collect()
    }

    pub fn is_original(&self, id: usize) -> bool {
        self.robots[id].origin == Origin::Original
    }

    pub fn steiner_count(&self) -> usize {
        self.robots.iter().filter(|r| r.origin == Origin::Steiner).count()
    }

    pub fn original_count(&self) -> usize {
        self.len() - self.steiner_count()
    }

    pub(crate) fn push_steiner(&mut self, point: Point<T>) {
        let id = self.robots.len();
        self.robots.push(Robot {
            id,
            point,
            origin: Origin::Steiner,
        });
    }

    /// The robots `ids` renumbered `0..ids.len()` in the given order, with
    /// `source` (a member of `ids`) as the new source.
    pub fn subset(&self, ids: &[usize], source: usize) -> RobotSet<T> {
        let robots = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| Robot {
                id: i,
                point: self.robots[id].point,
                origin: self.robots[id].origin,
            })
            .collect();
        let source = ids
            .iter()
            .position(|&id| id == source)
            .expect("subset source is a member");
        RobotSet { robots, source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Waking requires touching the sleeper.
    Geodesic,
    /// Waking requires seeing the sleeper.
    Visibility,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Geodesic => "geodesic",
            Metric::Visibility => "visibility",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MovementModel {
    /// A waker returns to its home point after every wake.
    ReturnHome,
    /// A waker proceeds from where it woke the last sleeper.
    Continue,
}

impl MovementModel {
    pub fn as_str(self) -> &'static str {
        match self {
            MovementModel::ReturnHome => "return-home",
            MovementModel::Continue => "continue",
        }
    }
}

impl fmt::Display for MovementModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPoint<T> {
    pub t: T,
    pub point: Point<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("robot {0} is not part of the schedule")]
    UnknownRobot(usize),
}

/// Rooted wake tree with times and unit-speed itineraries.
#[derive(Debug, Clone, PartialEq)]
pub struct AwakeningSchedule<T> {
    pub metric: Metric,
    pub model: MovementModel,
    pub source: usize,
    /// Per robot, the robots it woke, in wake order.
    pub children: Vec<Vec<usize>>,
    pub wake_times: Vec<T>,
    /// Per robot, its timed polyline from its own wake time on.
    pub itineraries: Vec<Vec<TimedPoint<T>>>,
    pub makespan_all: T,
    pub makespan_original: T,
}

impl<T: Scalar> AwakeningSchedule<T> {
    pub fn len(&self) -> usize {
        self.wake_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wake_times.is_empty()
    }

    /// Recomputes both makespans from the wake times.
    pub fn update_makespans(&mut self, robots: &RobotSet<T>) {
        let mut all = T::zero();
        let mut original = T::zero();
        for (id, &t) in self.wake_times.iter().enumerate() {
            all = all.max(t);
            if id < robots.len() && robots.is_original(id) {
                original = original.max(t);
            }
        }
        self.makespan_all = all;
        self.makespan_original = original;
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.len()];
        for (p, kids) in self.children.iter().enumerate() {
            for &c in kids {
                if c < parent.len() {
                    parent[c] = Some(p);
                }
            }
        }
        parent
    }

    /// `(parent, child)` pairs grouped by parent, children in wake order.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(p, kids)| kids.iter().map(move |&c| (p, c)))
            .collect()
    }

    /// Distance travelled from the source's start until `robot` wakes; with
    /// unit speed this is its wake time.
    pub fn awakedist(&self, robot: usize) -> Result<T, ScheduleError> {
        self.wake_times
            .get(robot)
            .copied()
            .ok_or(ScheduleError::UnknownRobot(robot))
    }

    /// Visibility-metric schedules whose every wake happens at time zero.
    /// This is what the return-home strategy yields over a spanner whose
    /// edges all join mutually visible robots.
    pub fn visibility_degenerate(&self) -> bool {
        self.metric == Metric::Visibility && self.len() > 1 && self.makespan_all == T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    /// Array lengths disagree with the robot set.
    Size,
    /// Source not at time zero or has a parent.
    Root,
    /// Some robot is not reached from the source.
    Spanning,
    /// A robot appears as a child more than once.
    DuplicateWake,
    /// A child wakes before its parent.
    Causality,
    /// Itinerary starts before its robot is awake or away from home.
    EarlyDeparture,
    /// Itinerary timing is not unit speed.
    Timing,
    /// An itinerary segment leaves the domain.
    Containment,
    /// The parent is not touching (or seeing) the child at its wake time.
    Contact,
    /// Reported makespans disagree with the wake times.
    Makespan,
}

impl ViolationKind {
    pub fn code(self) -> &'static str {
        match self {
            ViolationKind::Size => "size",
            ViolationKind::Root => "root",
            ViolationKind::Spanning => "spanning",
            ViolationKind::DuplicateWake => "duplicate-wake",
            ViolationKind::Causality => "causality",
            ViolationKind::EarlyDeparture => "early-departure",
            ViolationKind::Timing => "timing",
            ViolationKind::Containment => "containment",
            ViolationKind::Contact => "contact",
            ViolationKind::Makespan => "makespan",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub robot: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.robot {
            Some(r) => write!(f, "{} (robot {r}): {}", self.kind.code(), self.detail),
            None => write!(f, "{}: {}", self.kind.code(), self.detail),
        }
    }
}

/// Checks a schedule against its robots and domain. Empty means valid.
pub fn validate_schedule<T: Scalar>(
    schedule: &AwakeningSchedule<T>,
    robots: &RobotSet<T>,
    d: &PolygonDomain<T>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |kind, robot, detail: String| out.push(Violation { kind, robot, detail });
    let n = robots.len();
    if schedule.wake_times.len() != n
        || schedule.children.len() != n
        || schedule.itineraries.len() != n
        || schedule.source != robots.source()
    {
        flag(
            ViolationKind::Size,
            None,
            format!("schedule does not match the {n}-robot set"),
        );
        return out;
    }
    let tol = T::geom_eps() * (T::one() + schedule.makespan_all.abs());
    let src = schedule.source;
    if schedule.wake_times[src].abs() > tol {
        flag(ViolationKind::Root, Some(src), "source does not start awake".into());
    }

    let mut parent_count = vec![0usize; n];
    for (p, kids) in schedule.children.iter().enumerate() {
        for &c in kids {
            if c >= n {
                flag(ViolationKind::Size, Some(p), format!("child id {c} out of range"));
                continue;
            }
            parent_count[c] += 1;
            if schedule.wake_times[c] + tol < schedule.wake_times[p] {
                flag(
                    ViolationKind::Causality,
                    Some(c),
                    format!(
                        "woken at {} before parent {p} at {}",
                        schedule.wake_times[c], schedule.wake_times[p]
                    ),
                );
            }
        }
    }
    if parent_count[src] > 0 {
        flag(ViolationKind::Root, Some(src), "source has a parent".into());
    }
    for (r, &count) in parent_count.iter().enumerate() {
        if r != src && count > 1 {
            flag(ViolationKind::DuplicateWake, Some(r), format!("woken {count} times"));
        }
    }
    let mut reached = vec![false; n];
    let mut stack = vec![src];
    reached[src] = true;
    while let Some(u) = stack.pop() {
        for &c in &schedule.children[u] {
            if c < n && !reached[c] {
                reached[c] = true;
                stack.push(c);
            }
        }
    }
    for (r, ok) in reached.iter().enumerate() {
        if !ok {
            flag(ViolationKind::Spanning, Some(r), "not reachable from the source".into());
        }
    }

    for (r, it) in schedule.itineraries.iter().enumerate() {
        let Some(first) = it.first() else { continue };
        if first.t + tol < schedule.wake_times[r] {
            flag(
                ViolationKind::EarlyDeparture,
                Some(r),
                format!("moves at {} before waking at {}", first.t, schedule.wake_times[r]),
            );
        }
        if first.point.dist(robots.point(r)) > tol {
            flag(
                ViolationKind::EarlyDeparture,
                Some(r),
                "itinerary does not start at home".into(),
            );
        }
        for w in it.windows(2) {
            let len = w[0].point.dist(w[1].point);
            let dt = w[1].t - w[0].t;
            if (dt - len).abs() > tol {
                flag(
                    ViolationKind::Timing,
                    Some(r),
                    format!("segment of length {len} takes {dt}"),
                );
            }
            if !d.sees(w[0].point, w[1].point) {
                flag(
                    ViolationKind::Containment,
                    Some(r),
                    format!("segment {} -> {} leaves the domain", w[0].point, w[1].point),
                );
            }
        }
    }

    for (p, kids) in schedule.children.iter().enumerate() {
        for &c in kids.iter().filter(|&&c| c < n) {
            let target = robots.point(c);
            let at = schedule.wake_times[c];
            let touching = schedule.itineraries[p].iter().any(|w| {
                (w.t - at).abs() <= tol
                    && match schedule.metric {
                        Metric::Geodesic => w.point.dist(target) <= tol,
                        Metric::Visibility => d.sees(w.point, target),
                    }
            });
            if !touching {
                flag(
                    ViolationKind::Contact,
                    Some(c),
                    format!("parent {p} is not in contact at time {at}"),
                );
            }
        }
    }

    let mut expected = schedule.clone();
    expected.update_makespans(robots);
    if (expected.makespan_all - schedule.makespan_all).abs() > tol
        || (expected.makespan_original - schedule.makespan_original).abs() > tol
    {
        flag(
            ViolationKind::Makespan,
            None,
            "makespans disagree with wake times".into(),
        );
    }
    out
}
