//! Planar predicates and the polygon-with-holes domain.
//!
//! All predicates share one absolute tolerance, [`Scalar::geom_eps`], which is
//! meaningful because instances are normalized into the unit square on load.
//! The domain is closed: boundary points belong to it, and a segment that runs
//! along an edge or grazes a vertex is still inside.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn from_f64(x: f64, y: f64) -> Self {
        Point::new(T::lit(x), T::lit(y))
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Coincidence within the geometric tolerance.
    #[inline]
    pub fn coincides(self, o: Self) -> bool {
        self.dist(o) <= T::geom_eps()
    }

    #[inline]
    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Point<T>;
    #[inline]
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Point<T>;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Point<T>;
    #[inline]
    fn mul(self, s: T) -> Self {
        Point::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Signed distance of `c` from the directed line `a -> b`; positive on the left.
/// Falls back to the plain distance `|c - a|` when `a` and `b` coincide.
#[inline]
pub fn side<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    let ab = b - a;
    let len = ab.norm();
    if len <= T::epsilon() {
        return c.dist(a);
    }
    ab.cross(c - a) / len
}

/// -1, 0 or +1 with the geometric tolerance applied.
#[inline]
pub fn orientation<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> i8 {
    let s = side(a, b, c);
    if s > T::geom_eps() {
        1
    } else if s < -T::geom_eps() {
        -1
    } else {
        0
    }
}

pub fn dist_to_segment<T: Scalar>(p: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= T::epsilon() * T::epsilon() {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    p.dist(a + ab * t)
}

#[inline]
pub fn on_segment<T: Scalar>(p: Point<T>, a: Point<T>, b: Point<T>) -> bool {
    dist_to_segment(p, a, b) <= T::geom_eps()
}

/// Interiors cross at a single point with all four endpoints strictly off
/// the other segment's line.
pub fn segments_cross_properly<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Any contact at all, including shared endpoints and collinear overlap.
pub fn segments_touch<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    segments_cross_properly(a, b, c, d)
        || on_segment(a, c, d)
        || on_segment(b, c, d)
        || on_segment(c, a, b)
        || on_segment(d, a, b)
}

/// Shoelace area; positive for counterclockwise rings.
pub fn signed_area<T: Scalar>(ring: &[Point<T>]) -> T {
    let n = ring.len();
    let mut acc = T::zero();
    for i in 0..n {
        acc = acc + ring[i].cross(ring[(i + 1) % n]);
    }
    acc / T::lit(2.0)
}

/// Crossing-number test. Boundary points give an unspecified answer, so
/// callers check the boundary first.
pub fn point_in_ring<T: Scalar>(p: Point<T>, ring: &[Point<T>]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn on_ring_boundary<T: Scalar>(p: Point<T>, ring: &[Point<T>]) -> bool {
    ring_edges(ring).any(|(a, b)| on_segment(p, a, b))
}

pub fn ring_edges<T: Scalar>(ring: &[Point<T>]) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
    let n = ring.len();
    (0..n).map(move |i| (ring[i], ring[(i + 1) % n]))
}

/// True when every turn of the ring has the same orientation (collinear
/// turns ignored).
pub fn ring_is_convex<T: Scalar>(ring: &[Point<T>]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let mut sign = 0i8;
    for i in 0..n {
        let o = orientation(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
        if o == 0 {
            continue;
        }
        if sign == 0 {
            sign = o;
        } else if o != sign {
            return false;
        }
    }
    sign != 0
}

pub fn ring_diameter<T: Scalar>(ring: &[Point<T>]) -> T {
    let mut best = T::zero();
    for (i, a) in ring.iter().enumerate() {
        for b in &ring[i + 1..] {
            best = best.max(a.dist(*b));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingId {
    Outer,
    Hole(usize),
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingId::Outer => write!(f, "outer ring"),
            RingId::Hole(i) => write!(f, "hole {i}"),
        }
    }
}

/// One reason a domain was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainIssue {
    #[error("{0} has fewer than 3 vertices")]
    TooFewVertices(RingId),
    #[error("{ring} vertex {vertex} is not finite")]
    NonFinite { ring: RingId, vertex: usize },
    #[error("outer orientation: outer ring must be counterclockwise")]
    OuterOrientation,
    #[error("hole orientation: hole {0} must be clockwise")]
    HoleOrientation(usize),
    #[error("{ring} vertex {vertex} is degenerate (duplicate or collinear with its neighbours)")]
    Degenerate { ring: RingId, vertex: usize },
    #[error("{0} is not simple")]
    SelfIntersection(RingId),
    #[error("hole {0} is not strictly inside the outer ring")]
    HoleNotInside(usize),
    #[error("holes {0} and {1} are not disjoint")]
    HolesOverlap(usize, usize),
}

impl DomainIssue {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            DomainIssue::TooFewVertices(_) => "too-few-vertices",
            DomainIssue::NonFinite { .. } => "non-finite",
            DomainIssue::OuterOrientation => "outer-orientation",
            DomainIssue::HoleOrientation(_) => "hole-orientation",
            DomainIssue::Degenerate { .. } => "degenerate-ring",
            DomainIssue::SelfIntersection(_) => "self-intersection",
            DomainIssue::HoleNotInside(_) => "hole-outside",
            DomainIssue::HolesOverlap(..) => "holes-overlap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid polygon domain: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
pub struct DomainError(pub Vec<DomainIssue>);

/// Outer boundary (counterclockwise) minus disjoint holes (clockwise).
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonDomain<T> {
    outer: Vec<Point<T>>,
    holes: Vec<Vec<Point<T>>>,
    reflex: Vec<Point<T>>,
    hole_vertices: Vec<Point<T>>,
}

impl<T: Scalar> PolygonDomain<T> {
    /// Validates and builds a domain. Every violation found is reported.
    pub fn new(outer: Vec<Point<T>>, holes: Vec<Vec<Point<T>>>) -> Result<Self, DomainError> {
        let issues = validate_rings(&outer, &holes);
        if !issues.is_empty() {
            return Err(DomainError(issues));
        }
        Ok(Self::from_valid_rings(outer, holes))
    }

    pub(crate) fn from_valid_rings(outer: Vec<Point<T>>, holes: Vec<Vec<Point<T>>>) -> Self {
        let n = outer.len();
        let reflex = (0..n)
            .filter(|&i| {
                let prev = outer[(i + n - 1) % n];
                let next = outer[(i + 1) % n];
                (outer[i] - prev).cross(next - outer[i]) < T::zero()
            })
            .map(|i| outer[i])
            .collect();
        let hole_vertices = holes.iter().flatten().copied().collect();
        PolygonDomain {
            outer,
            holes,
            reflex,
            hole_vertices,
        }
    }

    pub fn outer(&self) -> &[Point<T>] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point<T>>] {
        &self.holes
    }

    /// R: outer-ring vertices with interior angle above pi, in ring order.
    pub fn reflex_vertices(&self) -> &[Point<T>] {
        &self.reflex
    }

    /// V: all hole vertices, hole by hole.
    pub fn hole_vertices(&self) -> &[Point<T>] {
        &self.hole_vertices
    }

    /// R followed by V. Geodesic paths bend only at these points.
    pub fn corners(&self) -> Vec<Point<T>> {
        self.reflex.iter().chain(self.hole_vertices.iter()).copied().collect()
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point<T>]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        self.rings().flat_map(|r| ring_edges(r))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point<T>> + '_ {
        self.rings().flat_map(|r| r.iter().copied())
    }

    pub fn is_convex(&self) -> bool {
        self.holes.is_empty() && self.reflex.is_empty()
    }

    /// Closed-domain membership.
    pub fn contains(&self, p: Point<T>) -> bool {
        if self.edges().any(|(a, b)| on_segment(p, a, b)) {
            return true;
        }
        point_in_ring(p, &self.outer) && !self.holes.iter().any(|h| point_in_ring(p, h))
    }

    /// Segment `pq` lies entirely in the closed domain.
    pub fn sees(&self, p: Point<T>, q: Point<T>) -> bool {
        if p.coincides(q) {
            return self.contains(p);
        }
        if !self.contains(p) || !self.contains(q) {
            return false;
        }
        if self.edges().any(|(a, b)| segments_cross_properly(p, q, a, b)) {
            return false;
        }
        // The open pieces between boundary contacts are either wholly inside
        // or wholly outside; probe each at its midpoint.
        let pq = q - p;
        let len2 = pq.dot(pq);
        let mut ts = vec![T::zero(), T::one()];
        for v in self.vertices() {
            if on_segment(v, p, q) {
                ts.push(((v - p).dot(pq) / len2).max(T::zero()).min(T::one()));
            }
        }
        ts.sort_by(crate::scalar::cmp_scalar);
        ts.windows(2)
            .filter(|w| w[1] > w[0])
            .all(|w| self.contains(p.lerp(q, (w[0] + w[1]) / T::lit(2.0))))
    }

    pub fn bounding_box(&self) -> (Point<T>, Point<T>) {
        let mut lo = self.outer[0];
        let mut hi = self.outer[0];
        for p in &self.outer {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Applies `p -> (p - offset) * scale` to every vertex.
    pub fn transformed(&self, offset: Point<T>, scale: T) -> Self {
        let f = |p: &Point<T>| (*p - offset) * scale;
        PolygonDomain {
            outer: self.outer.iter().map(f).collect(),
            holes: self.holes.iter().map(|h| h.iter().map(f).collect()).collect(),
            reflex: self.reflex.iter().map(f).collect(),
            hole_vertices: self.hole_vertices.iter().map(f).collect(),
        }
    }

    /// Applies an arbitrary per-coordinate map (used for decimal quantization).
    pub fn map_points(&self, f: impl Fn(Point<T>) -> Point<T>) -> Self {
        let g = |p: &Point<T>| f(*p);
        PolygonDomain {
            outer: self.outer.iter().map(g).collect(),
            holes: self.holes.iter().map(|h| h.iter().map(g).collect()).collect(),
            reflex: self.reflex.iter().map(g).collect(),
            hole_vertices: self.hole_vertices.iter().map(g).collect(),
        }
    }
}

pub fn point_in_domain<T: Scalar>(p: Point<T>, d: &PolygonDomain<T>) -> bool {
    d.contains(p)
}

pub fn is_visible<T: Scalar>(p: Point<T>, q: Point<T>, d: &PolygonDomain<T>) -> bool {
    d.sees(p, q)
}

pub fn reflex_vertices<T: Scalar>(d: &PolygonDomain<T>) -> Vec<Point<T>> {
    d.reflex_vertices().to_vec()
}

pub fn hole_vertices<T: Scalar>(d: &PolygonDomain<T>) -> Vec<Point<T>> {
    d.hole_vertices().to_vec()
}

fn ring_issues<T: Scalar>(ring: &[Point<T>], id: RingId, out: &mut Vec<DomainIssue>) -> bool {
    if ring.len() < 3 {
        out.push(DomainIssue::TooFewVertices(id));
        return false;
    }
    let before = out.len();
    for (i, p) in ring.iter().enumerate() {
        if !p.is_finite() {
            out.push(DomainIssue::NonFinite { ring: id, vertex: i });
        }
    }
    if out.len() > before {
        return false;
    }
    let n = ring.len();
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let next = ring[(i + 1) % n];
        let cur = ring[i];
        if cur.coincides(prev)
            || cur.coincides(next)
            || prev.coincides(next)
            || side(prev, next, cur).abs() <= T::geom_eps()
        {
            out.push(DomainIssue::Degenerate { ring: id, vertex: i });
        }
    }
    if out.len() > before {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            if segments_touch(a, b, c, d) {
                out.push(DomainIssue::SelfIntersection(id));
                return false;
            }
        }
    }
    true
}

fn rings_touch<T: Scalar>(a: &[Point<T>], b: &[Point<T>]) -> bool {
    ring_edges(a).any(|(p, q)| ring_edges(b).any(|(r, s)| segments_touch(p, q, r, s)))
}

fn validate_rings<T: Scalar>(outer: &[Point<T>], holes: &[Vec<Point<T>>]) -> Vec<DomainIssue> {
    let mut issues = Vec::new();
    let outer_ok = ring_issues(outer, RingId::Outer, &mut issues);
    if outer_ok && signed_area(outer) <= T::zero() {
        issues.push(DomainIssue::OuterOrientation);
    }
    let mut hole_ok = Vec::with_capacity(holes.len());
    for (h, ring) in holes.iter().enumerate() {
        let ok = ring_issues(ring, RingId::Hole(h), &mut issues);
        if ok && signed_area(ring) >= T::zero() {
            issues.push(DomainIssue::HoleOrientation(h));
        }
        hole_ok.push(ok);
    }
    if outer_ok {
        for (h, ring) in holes.iter().enumerate() {
            if hole_ok[h] && (rings_touch(outer, ring) || !point_in_ring(ring[0], outer)) {
                issues.push(DomainIssue::HoleNotInside(h));
            }
        }
    }
    for a in 0..holes.len() {
        for b in a + 1..holes.len() {
            if !(hole_ok[a] && hole_ok[b]) {
                continue;
            }
            let (ra, rb) = (&holes[a], &holes[b]);
            if rings_touch(ra, rb) || point_in_ring(ra[0], rb) || point_in_ring(rb[0], ra) {
                issues.push(DomainIssue::HolesOverlap(a, b));
            }
        }
    }
    issues
}
