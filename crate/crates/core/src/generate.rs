//! Seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{point_in_ring, Point, PolygonDomain};
use crate::io::{instance_from_file, instance_to_file, Instance, InstanceFile, INSTANCE_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Convex polygon, no holes.
    Convex,
    /// L-shaped room with a random notch.
    LShape,
    /// Skyline-shaped orthogonal polygon.
    RandomOrthogonal,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Convex => "convex",
            Profile::LShape => "lshape",
            Profile::RandomOrthogonal => "random-orthogonal",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "convex" => Ok(Profile::Convex),
            "lshape" => Ok(Profile::LShape),
            "random-orthogonal" => Ok(Profile::RandomOrthogonal),
            _ => Err(GenError::UnknownProfile(s.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

const ATTEMPTS: usize = 10_000;
const GAP: f64 = 0.02;

type Rect = (f64, f64, f64, f64);

fn outer_ring(profile: Profile, rng: &mut ChaCha8Rng) -> Vec<Point<f64>> {
    match profile {
        Profile::Convex => {
            let k = rng.gen_range(3..=8);
            let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            angles.sort_by(f64::total_cmp);
            angles.dedup_by(|a, b| (*a - *b).abs() < 0.05);
            if angles.len() < 3 {
                angles = vec![0.3, 2.4, 4.4];
            }
            angles
                .iter()
                .map(|a| Point::new(0.5 + 0.5 * a.cos(), 0.5 + 0.5 * a.sin()))
                .collect()
        }
        Profile::LShape => {
            let a = rng.gen_range(0.3..0.7);
            let b = rng.gen_range(0.3..0.7);
            [(0.0, 0.0), (1.0, 0.0), (1.0, a), (b, a), (b, 1.0), (0.0, 1.0)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect()
        }
        Profile::RandomOrthogonal => {
            let cols = rng.gen_range(2..=4);
            let mut xs: Vec<f64> = (1..cols)
                .map(|i| i as f64 / cols as f64 + rng.gen_range(-0.08..0.08))
                .collect();
            xs.insert(0, 0.0);
            xs.push(1.0);
            let mut heights: Vec<f64> = (0..cols).map(|_| rng.gen_range(0.4..1.0)).collect();
            heights[rng.gen_range(0..cols)] = 1.0;
            let mut ring = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
            for c in (0..cols).rev() {
                ring.push(Point::new(xs[c + 1], heights[c]));
                ring.push(Point::new(xs[c], heights[c]));
            }
            ring.dedup_by(|a, b| a.coincides(*b));
            // Merge steps between columns of equal height.
            let n = ring.len();
            let keep: Vec<bool> = (0..n)
                .map(|i| {
                    let (a, b, c) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
                    (b - a).cross(c - b).abs() > 1e-12
                })
                .collect();
            ring.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect()
        }
    }
}

fn rect_inside(outer: &[Point<f64>], r: Rect, others: &[Rect]) -> bool {
    let g = (r.0 - GAP, r.1 - GAP, r.2 + GAP, r.3 + GAP);
    let corners = [(g.0, g.1), (g.2, g.1), (g.2, g.3), (g.0, g.3)];
    if !corners.iter().all(|&(x, y)| point_in_ring(Point::new(x, y), outer)) {
        return false;
    }
    if outer
        .iter()
        .any(|p| p.x >= g.0 && p.x <= g.2 && p.y >= g.1 && p.y <= g.3)
    {
        return false;
    }
    others
        .iter()
        .all(|o| o.2 + GAP < r.0 || r.2 + GAP < o.0 || o.3 + GAP < r.1 || r.3 + GAP < o.1)
}

/// Deterministic in `seed`. Robots are sampled uniformly in the domain by
/// rejection; robot 0 is the source.
pub fn generate_instance(
    seed: u64,
    n_robots: usize,
    n_holes: usize,
    profile: Profile,
) -> Result<InstanceFile, GenError> {
    if n_robots == 0 {
        return Err(GenError::Infeasible("need at least one robot".into()));
    }
    if profile == Profile::Convex && n_holes > 0 {
        return Err(GenError::Infeasible("the convex profile has no holes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer = outer_ring(profile, &mut rng);
    let mut rects: Vec<Rect> = Vec::new();
    for _ in 0..n_holes {
        let placed = (0..ATTEMPTS).find_map(|_| {
            let (w, h) = (rng.gen_range(0.05..0.2), rng.gen_range(0.05..0.2));
            let (x, y) = (rng.gen_range(0.0..1.0 - w), rng.gen_range(0.0..1.0 - h));
            let r = (x, y, x + w, y + h);
            rect_inside(&outer, r, &rects).then_some(r)
        });
        rects.push(placed.ok_or_else(|| GenError::Infeasible(format!("could not place {n_holes} holes")))?);
    }
    let holes: Vec<Vec<Point<f64>>> = rects
        .iter()
        .map(|r| {
            vec![
                Point::new(r.0, r.1),
                Point::new(r.0, r.3),
                Point::new(r.2, r.3),
                Point::new(r.2, r.1),
            ]
        })
        .collect();
    let domain = PolygonDomain::new(outer, holes).map_err(|e| GenError::Infeasible(e.to_string()))?;
    let (lo, hi) = domain.bounding_box();
    let mut robots: Vec<Point<f64>> = Vec::with_capacity(n_robots);
    for _ in 0..ATTEMPTS * n_robots {
        if robots.len() == n_robots {
            break;
        }
        let p = Point::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if domain.contains(p) && robots.iter().all(|q| q.dist(p) > 1e-6) {
            robots.push(p);
        }
    }
    if robots.len() < n_robots {
        return Err(GenError::Infeasible("could not place robots".into()));
    }
    let raw = InstanceFile {
        version: INSTANCE_VERSION,
        outer: domain.outer().iter().map(|p| [p.x, p.y]).collect(),
        holes: domain
            .holes()
            .iter()
            .map(|h| h.iter().map(|p| [p.x, p.y]).collect())
            .collect(),
        robots: robots.iter().map(|p| [p.x, p.y]).collect(),
        source: 0,
        metric: None,
    };
    let inst: Instance = instance_from_file(&raw).map_err(|e| GenError::Infeasible(e.to_string()))?;
    Ok(instance_to_file(&inst))
}
