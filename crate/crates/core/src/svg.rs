//! SVG pictures of instances, spanners, paths and schedules.

use std::fmt::Write;

use crate::geodesic::GeodesicPath;
use crate::geometry::{Point, PolygonDomain};
use crate::graph::WeightedGraph;
use crate::schedule::{AwakeningSchedule, Origin, RobotSet};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;

/// Optional layers drawn over the domain and robots.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overlay<'a> {
    pub schedule: Option<&'a AwakeningSchedule<f64>>,
    pub spanner: Option<&'a WeightedGraph<f64>>,
    pub paths: &'a [GeodesicPath<f64>],
}

struct Frame {
    lo: Point<f64>,
    scale: f64,
    height: f64,
}

impl Frame {
    fn x(&self, p: Point<f64>) -> f64 {
        MARGIN + (p.x - self.lo.x) * self.scale
    }

    fn y(&self, p: Point<f64>) -> f64 {
        self.height - MARGIN - (p.y - self.lo.y) * self.scale
    }

    fn pt(&self, p: Point<f64>) -> String {
        format!("{:.2},{:.2}", self.x(p), self.y(p))
    }

    fn ring_path(&self, ring: &[Point<f64>]) -> String {
        let mut d = String::new();
        for (i, &p) in ring.iter().enumerate() {
            d.push_str(if i == 0 { "M" } else { " L" });
            d.push_str(&self.pt(p));
        }
        d.push_str(" Z");
        d
    }
}

pub fn render_svg(d: &PolygonDomain<f64>, s: &RobotSet<f64>, overlay: Overlay<'_>) -> String {
    let (lo, hi) = d.bounding_box();
    let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / extent;
    let width = 2.0 * MARGIN + (hi.x - lo.x) * scale;
    let height = 2.0 * MARGIN + (hi.y - lo.y) * scale;
    let f = Frame { lo, scale, height };
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(
        w,
        r##"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="6" stroke="#555" stroke-width="1"/></pattern><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" fill="#c0392b"/></marker></defs>"##
    );
    let _ = writeln!(
        w,
        r##"<path class="outer" d="{}" fill="#fafafa" stroke="#222" stroke-width="1.5"/>"##,
        f.ring_path(d.outer())
    );
    for h in d.holes() {
        let _ = writeln!(
            w,
            r##"<path class="hole" d="{}" fill="url(#hatch)" stroke="#222" stroke-width="1"/>"##,
            f.ring_path(h)
        );
    }
    if let Some(g) = overlay.spanner {
        for (u, v, _) in g.edges() {
            let (a, b) = (g.point(u), g.point(v));
            let _ = writeln!(
                w,
                r##"<line class="spanner" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#2980b9" stroke-width="0.6"/>"##,
                f.x(a),
                f.y(a),
                f.x(b),
                f.y(b)
            );
        }
    }
    for path in overlay.paths {
        let pts: Vec<String> = path.waypoints.iter().map(|&p| f.pt(p)).collect();
        let _ = writeln!(
            w,
            r##"<polyline class="geodesic" points="{}" fill="none" stroke="#27ae60" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
            pts.join(" ")
        );
    }
    if let Some(sch) = overlay.schedule {
        for (p, c) in sch.tree_edges() {
            if p >= s.len() || c >= s.len() {
                continue;
            }
            let (a, b) = (s.point(p), s.point(c));
            let _ = writeln!(
                w,
                r##"<line class="tree" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.2" marker-end="url(#arrow)"/>"##,
                f.x(a),
                f.y(a),
                f.x(b),
                f.y(b)
            );
            let mid = a.lerp(b, 0.5);
            let _ = writeln!(
                w,
                r##"<text class="wake-time" x="{:.2}" y="{:.2}" font-size="10" fill="#c0392b">{:.3}</text>"##,
                f.x(mid) + 3.0,
                f.y(mid) - 3.0,
                sch.wake_times[c]
            );
        }
    }
    for r in s.robots() {
        let (class, fill, radius) = match (r.id == s.source(), r.origin) {
            (true, _) => ("robot source", "#f1c40f", 6.0),
            (false, Origin::Original) => ("robot", "#34495e", 4.0),
            (false, Origin::Steiner) => ("robot steiner", "#95a5a6", 3.5),
        };
        let _ = writeln!(
            w,
            r##"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{radius}" fill="{fill}" stroke="#000" stroke-width="0.8"/>"##,
            f.x(r.point),
            f.y(r.point)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfa::solve_cfa;
    use crate::schedule::Metric;

    fn lshape() -> PolygonDomain<f64> {
        let ring = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)];
        PolygonDomain::new(ring.iter().map(|&(x, y)| Point::new(x, y)).collect(), vec![]).unwrap()
    }

    #[test]
    fn domain_only() {
        let d = lshape();
        let s = RobotSet::new(&[Point::new(0.5, 0.5)], 0).unwrap();
        let svg = render_svg(&d, &s, Overlay::default());
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches(r#"class="outer""#).count(), 1);
        assert_eq!(svg.matches("<path").count(), 2); // outline plus the arrow marker
    }

    #[test]
    fn dashed_path() {
        let d = lshape();
        let s = RobotSet::new(&[Point::new(1.5, 0.5)], 0).unwrap();
        let path = crate::geodesic::geodesic_path(Point::new(1.5, 0.75), Point::new(0.75, 1.5), &d).unwrap();
        assert_eq!(path.waypoints.len(), 3);
        let svg = render_svg(
            &d,
            &s,
            Overlay {
                paths: std::slice::from_ref(&path),
                ..Default::default()
            },
        );
        let line = svg.lines().find(|l| l.contains("geodesic")).unwrap();
        assert!(line.contains("stroke-dasharray"));
        let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count() - 1, 2);
    }

    #[test]
    fn tree_edges_are_arrowed() {
        let d = lshape();
        let pts = [
            Point::new(0.2, 0.2),
            Point::new(1.8, 0.5),
            Point::new(0.5, 1.8),
            Point::new(0.6, 0.6),
        ];
        let s = RobotSet::new(&pts, 0).unwrap();
        let run = solve_cfa(&d, &s, 6.0, Metric::Geodesic).unwrap();
        let svg = render_svg(
            &d,
            &run.robots,
            Overlay {
                schedule: Some(&run.schedule),
                spanner: Some(&run.spanner.graph),
                ..Default::default()
            },
        );
        assert_eq!(svg.matches("marker-end=").count(), run.robots.len() - 1);
        assert_eq!(svg.matches("<circle").count(), run.robots.len());
    }
}
