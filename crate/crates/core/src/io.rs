//! JSON instance and schedule files.
//!
//! Instances are normalized on load: translated so the bounding box starts
//! at the origin and scaled so its longer side is 1, then every coordinate
//! is rounded to 12 significant digits. Saving a loaded instance and
//! loading it again gives back the same values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, PolygonDomain};
use crate::schedule::{AwakeningSchedule, Metric, MovementModel, Origin, RobotSet, TimedPoint};

pub const INSTANCE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub outer: Vec<[f64; 2]>,
    #[serde(default)]
    pub holes: Vec<Vec<[f64; 2]>>,
    pub robots: Vec<[f64; 2]>,
    pub source: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub domain: PolygonDomain<f64>,
    pub robots: RobotSet<f64>,
    pub metric: Option<Metric>,
}

/// One reason an instance was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceIssue {
    pub code: &'static str,
    pub field: String,
    pub message: String,
}

impl fmt::Display for InstanceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.code, self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<InstanceIssue>),
}

impl LoadError {
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::Io { .. } => "io",
            LoadError::Parse { .. } => "parse",
            LoadError::Invalid(_) => "validation",
        }
    }
}

pub fn parse_metric(s: &str) -> Option<Metric> {
    match s {
        "geodesic" => Some(Metric::Geodesic),
        "visibility" => Some(Metric::Visibility),
        _ => None,
    }
}

fn parse_model(s: &str) -> Option<MovementModel> {
    match s {
        "return-home" => Some(MovementModel::ReturnHome),
        "continue" => Some(MovementModel::Continue),
        _ => None,
    }
}

/// Rounds to 12 significant digits.
pub fn quantize(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let q: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    // Avoid writing -0.
    q + 0.0
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_err(e: serde_json::Error) -> LoadError {
    LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, LoadError> {
    parse_instance(&read_text(path)?)
}

pub fn parse_instance(text: &str) -> Result<Instance, LoadError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(parse_err)?;
    instance_from_file(&file)
}

/// Validates and normalizes a parsed file, reporting every problem found.
pub fn instance_from_file(file: &InstanceFile) -> Result<Instance, LoadError> {
    let mut issues = Vec::new();
    let mut issue = |code, field: String, message: String| issues.push(InstanceIssue { code, field, message });
    if file.version != INSTANCE_VERSION {
        issue(
            "bad-version",
            "version".into(),
            format!("expected {INSTANCE_VERSION}, got {}", file.version),
        );
    }
    let metric = match file.metric.as_deref() {
        None => None,
        Some(m) => {
            let parsed = parse_metric(m);
            if parsed.is_none() {
                issue("bad-metric", "metric".into(), format!("unknown metric {m:?}"));
            }
            parsed
        }
    };
    let all = file.outer.iter().chain(file.holes.iter().flatten()).chain(&file.robots);
    if all.clone().any(|c| !c[0].is_finite() || !c[1].is_finite()) {
        issue(
            "non-finite",
            "coordinates".into(),
            "coordinate is not a finite number".into(),
        );
        return Err(LoadError::Invalid(issues));
    }
    if file.outer.is_empty() {
        issue("too-few-vertices", "outer".into(), "outer ring is empty".into());
        return Err(LoadError::Invalid(issues));
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for c in &file.outer {
        for k in 0..2 {
            lo[k] = lo[k].min(c[k]);
            hi[k] = hi[k].max(c[k]);
        }
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let scale = if extent > 0.0 { extent } else { 1.0 };
    let norm = |c: &[f64; 2]| Point::new(quantize((c[0] - lo[0]) / scale), quantize((c[1] - lo[1]) / scale));
    let outer: Vec<_> = file.outer.iter().map(norm).collect();
    let holes: Vec<Vec<_>> = file.holes.iter().map(|h| h.iter().map(norm).collect()).collect();
    let points: Vec<_> = file.robots.iter().map(norm).collect();

    let domain = match PolygonDomain::new(outer, holes) {
        Ok(d) => Some(d),
        Err(e) => {
            for di in e.0 {
                issue(di.code(), "domain".into(), di.to_string());
            }
            None
        }
    };
    if points.is_empty() {
        issue("no-robots", "robots".into(), "at least one robot is required".into());
    }
    if file.source >= points.len() && !points.is_empty() {
        issue(
            "bad-source",
            "source".into(),
            format!("source {} out of range", file.source),
        );
    }
    for (i, &p) in points.iter().enumerate() {
        if let Some(j) = points[..i].iter().position(|q| q.coincides(p)) {
            issue(
                "duplicate-robot",
                format!("robots[{i}]"),
                format!("same position as robots[{j}]"),
            );
        }
        if let Some(d) = &domain {
            if !d.contains(p) {
                issue(
                    "robot-outside-domain",
                    format!("robots[{i}]"),
                    format!("robot outside domain at {p}"),
                );
            }
        }
    }
    if !issues.is_empty() {
        return Err(LoadError::Invalid(issues));
    }
    let robots = RobotSet::new(&points, file.source).expect("checked above");
    Ok(Instance {
        domain: domain.expect("checked above"),
        robots,
        metric,
    })
}

fn coord(p: Point<f64>) -> [f64; 2] {
    [quantize(p.x), quantize(p.y)]
}

pub fn instance_to_file(inst: &Instance) -> InstanceFile {
    InstanceFile {
        version: INSTANCE_VERSION,
        outer: inst.domain.outer().iter().map(|&p| coord(p)).collect(),
        holes: inst
            .domain
            .holes()
            .iter()
            .map(|h| h.iter().map(|&p| coord(p)).collect())
            .collect(),
        robots: inst
            .robots
            .robots()
            .iter()
            .filter(|r| r.origin == Origin::Original)
            .map(|r| coord(r.point))
            .collect(),
        source: inst.robots.source(),
        metric: inst.metric.map(|m| m.as_str().to_string()),
    }
}

pub fn instance_to_json(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_file(inst)).expect("instance serializes");
    s.push('\n');
    s
}

pub fn save_instance(inst: &Instance, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, instance_to_json(inst))
}

/// On-disk schedule. Robots beyond `original_count` are Steiner robots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub metric: String,
    pub model: String,
    pub source: usize,
    pub robots: Vec<[f64; 2]>,
    pub original_count: usize,
    pub wake_times: BTreeMap<usize, f64>,
    /// Parent-child pairs grouped by parent, children in wake order.
    pub tree: Vec<[usize; 2]>,
    pub itineraries: BTreeMap<usize, Vec<[f64; 3]>>,
    pub makespan_all: f64,
    pub makespan_original: f64,
    #[serde(default)]
    pub degenerate: bool,
}

pub fn schedule_to_file(schedule: &AwakeningSchedule<f64>, robots: &RobotSet<f64>) -> ScheduleFile {
    ScheduleFile {
        metric: schedule.metric.as_str().into(),
        model: schedule.model.as_str().into(),
        source: schedule.source,
        robots: robots.robots().iter().map(|r| [r.point.x, r.point.y]).collect(),
        original_count: robots.original_count(),
        wake_times: schedule.wake_times.iter().copied().enumerate().collect(),
        tree: schedule.tree_edges().into_iter().map(|(p, c)| [p, c]).collect(),
        itineraries: schedule
            .itineraries
            .iter()
            .enumerate()
            .map(|(i, it)| (i, it.iter().map(|tp| [tp.t, tp.point.x, tp.point.y]).collect()))
            .collect(),
        makespan_all: schedule.makespan_all,
        makespan_original: schedule.makespan_original,
        degenerate: schedule.visibility_degenerate(),
    }
}

pub fn schedule_to_json(schedule: &AwakeningSchedule<f64>, robots: &RobotSet<f64>) -> String {
    let mut s = serde_json::to_string_pretty(&schedule_to_file(schedule, robots)).expect("schedule serializes");
    s.push('\n');
    s
}

/// A schedule read back from disk, with the robot set it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSchedule {
    pub schedule: AwakeningSchedule<f64>,
    pub robots: RobotSet<f64>,
}

pub fn load_schedule(path: &Path) -> Result<LoadedSchedule, LoadError> {
    parse_schedule(&read_text(path)?)
}

pub fn parse_schedule(text: &str) -> Result<LoadedSchedule, LoadError> {
    let f: ScheduleFile = serde_json::from_str(text).map_err(parse_err)?;
    let mut issues = Vec::new();
    let mut issue = |code, field: &str, message: String| {
        issues.push(InstanceIssue {
            code,
            field: field.into(),
            message,
        })
    };
    let metric = parse_metric(&f.metric);
    if metric.is_none() {
        issue("bad-metric", "metric", format!("unknown metric {:?}", f.metric));
    }
    let model = parse_model(&f.model);
    if model.is_none() {
        issue("bad-model", "model", format!("unknown model {:?}", f.model));
    }
    let n = f.robots.len();
    if n == 0 || f.source >= n || f.original_count > n {
        issue(
            "bad-robots",
            "robots",
            "robot list, source and original_count disagree".into(),
        );
    }
    if f.tree.iter().flatten().any(|&i| i >= n) || f.wake_times.keys().chain(f.itineraries.keys()).any(|&i| i >= n) {
        issue("bad-id", "tree", "robot id out of range".into());
    }
    if !issues.is_empty() {
        return Err(LoadError::Invalid(issues));
    }
    let points: Vec<_> = f.robots.iter().map(|c| Point::new(c[0], c[1])).collect();
    let mut robots = RobotSet::new(&points[..f.original_count.max(1)], f.source).map_err(|e| {
        LoadError::Invalid(vec![InstanceIssue {
            code: "bad-robots",
            field: "robots".into(),
            message: e.to_string(),
        }])
    })?;
    for &p in &points[robots.len()..] {
        robots.push_steiner(p);
    }
    let mut children = vec![Vec::new(); n];
    for &[p, c] in &f.tree {
        children[p].push(c);
    }
    // Missing entries stay NaN so the validator reports them.
    let mut wake_times = vec![f64::NAN; n];
    for (&i, &t) in &f.wake_times {
        wake_times[i] = t;
    }
    let mut itineraries = vec![Vec::new(); n];
    for (&i, it) in &f.itineraries {
        itineraries[i] = it
            .iter()
            .map(|v| TimedPoint {
                t: v[0],
                point: Point::new(v[1], v[2]),
            })
            .collect();
    }
    Ok(LoadedSchedule {
        schedule: AwakeningSchedule {
            metric: metric.expect("checked"),
            model: model.expect("checked"),
            source: f.source,
            children,
            wake_times,
            itineraries,
            makespan_all: f.makespan_all,
            makespan_original: f.makespan_original,
        },
        robots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str =
        r#"{"version":1,"outer":[[0,0],[2,0],[2,2],[0,2]],"holes":[],"robots":[[0.5,0.5],[1.5,1.5]],"source":0}"#;

    #[test]
    fn minimal_square() {
        let inst = parse_instance(SQUARE).unwrap();
        assert!(inst.domain.reflex_vertices().is_empty());
        assert!(inst.domain.hole_vertices().is_empty());
        assert_eq!(inst.robots.point(1), Point::new(0.75, 0.75));
        assert_eq!(inst.domain.bounding_box().1, Point::new(1.0, 1.0));
    }

    fn codes(text: &str) -> Vec<&'static str> {
        match parse_instance(text) {
            Err(LoadError::Invalid(v)) => v.into_iter().map(|i| i.code).collect(),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn ccw_hole_rejected() {
        let text = r#"{"version":1,"outer":[[0,0],[4,0],[4,4],[0,4]],"holes":[[[1,1],[2,1],[2,2],[1,2]]],"robots":[[0.5,0.5]],"source":0}"#;
        assert_eq!(codes(text), vec!["hole-orientation"]);
    }

    #[test]
    fn robot_in_hole_rejected() {
        let text = r#"{"version":1,"outer":[[0,0],[4,0],[4,4],[0,4]],"holes":[[[1,1],[1,2],[2,2],[2,1]]],"robots":[[0.5,0.5],[1.5,1.5],[0.5,0.5]],"source":7}"#;
        assert_eq!(
            codes(text),
            vec!["bad-source", "robot-outside-domain", "duplicate-robot"]
        );
    }

    #[test]
    fn parse_error_has_position() {
        match parse_instance("{\n  \"version\": 1,\n  \"outer\": [[0,0],\n}") {
            Err(LoadError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let text = r#"{"version":1,"outer":[[0.3,0.1],[3.7,0.1],[3.7,2.9],[0.3,2.9]],"holes":[[[1.1,1.1],[1.1,1.7],[2.3,1.7],[2.3,1.1]]],"robots":[[0.4,0.2],[3.1,2.6],[0.31,1.3]],"source":1,"metric":"visibility"}"#;
        let a = parse_instance(text).unwrap();
        let b = parse_instance(&instance_to_json(&a)).unwrap();
        assert_eq!(a, b);
        assert_eq!(instance_to_json(&a), instance_to_json(&b));
    }

    #[test]
    fn quantize_is_idempotent() {
        for v in [1.0 / 3.0, 0.1 + 0.2, 123456.789012345, 1e-7 / 3.0, -2.5] {
            assert_eq!(quantize(quantize(v)), quantize(v));
        }
        assert_eq!(quantize(0.1 + 0.2), 0.3);
    }
}
