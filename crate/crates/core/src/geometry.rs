//! Planar primitives: points, segments, circular arcs, circles, distances,
//! common tangents and closed-form clearance between linear motions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// Global tolerance for coincidence and degeneracy predicates.
pub const TAU: f64 = 1e-9;

pub const TWO_PI: f64 = 2.0 * PI;

/// Arcs with a smaller sweep are treated as points; a stored sweep that
/// rounds to zero would otherwise read back as a full circle.
pub const MIN_SWEEP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        Point::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; the zero vector maps to itself.
    pub fn normalized(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Polar angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn approx_eq(self, o: Point, tol: f64) -> bool {
        self.dist(o) <= tol
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.length() <= TAU
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    /// Unit direction from `a` to `b`.
    pub fn direction(&self) -> Point {
        (self.b - self.a).normalized()
    }

    /// Parameter in `[0, 1]` of the point of the segment closest to `p`.
    pub fn project(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let l2 = d.norm2();
        if l2 == 0.0 {
            0.0
        } else {
            ((p - self.a).dot(d) / l2).clamp(0.0, 1.0)
        }
    }

    pub fn dist_point(&self, p: Point) -> f64 {
        self.point_at(self.project(p)).dist(p)
    }

    pub fn reversed(&self) -> Segment {
        Segment::new(self.b, self.a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        }
    }

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub const fn new(center: Point, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn point_at_angle(&self, a: f64) -> Point {
        self.center + Point::polar(self.radius, a)
    }
}

/// Circular arc from `start_angle` to `end_angle`, swept in `orientation`.
/// Equal start and end angles denote a full circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub center: Point,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
    pub orientation: Orientation,
}

impl Arc {
    pub fn new(
        center: Point,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
        orientation: Orientation,
    ) -> Self {
        Arc {
            center,
            radius,
            start_angle: normalize_angle(start_angle),
            end_angle: normalize_angle(end_angle),
            orientation,
        }
    }

    /// Arc starting at `start_angle` and sweeping `sweep` radians (`0 < sweep ≤ 2π`).
    pub fn from_sweep(
        center: Point,
        radius: f64,
        start_angle: f64,
        sweep: f64,
        orientation: Orientation,
    ) -> Self {
        let end = start_angle + orientation.sign() * sweep;
        Arc::new(center, radius, start_angle, end, orientation)
    }

    pub fn full_circle(c: Circle, orientation: Orientation) -> Self {
        Arc::new(c.center, c.radius, 0.0, 0.0, orientation)
    }

    /// Angular extent in `(0, 2π]`.
    pub fn sweep(&self) -> f64 {
        let raw = match self.orientation {
            Orientation::Ccw => self.end_angle - self.start_angle,
            Orientation::Cw => self.start_angle - self.end_angle,
        };
        let s = normalize_angle(raw);
        if s == 0.0 {
            TWO_PI
        } else {
            s
        }
    }

    pub fn length(&self) -> f64 {
        self.radius * self.sweep()
    }

    pub fn circle(&self) -> Circle {
        Circle::new(self.center, self.radius)
    }

    pub fn angle_at(&self, s: f64) -> f64 {
        self.start_angle + self.orientation.sign() * s * self.sweep()
    }

    pub fn point_at(&self, s: f64) -> Point {
        self.center + Point::polar(self.radius, self.angle_at(s))
    }

    pub fn start_point(&self) -> Point {
        self.point_at(0.0)
    }

    pub fn end_point(&self) -> Point {
        self.point_at(1.0)
    }

    /// Unit tangent in the direction of travel at parameter `s`.
    pub fn tangent_at(&self, s: f64) -> Point {
        Point::polar(1.0, self.angle_at(s)).perp() * self.orientation.sign()
    }

    /// Parameter of angle `a` along the arc, if the angle lies on it
    /// (with angular slack `slack`). Values are clamped into `[0, 1]`.
    pub fn param_of_angle(&self, a: f64, slack: f64) -> Option<f64> {
        let sweep = self.sweep();
        let off = match self.orientation {
            Orientation::Ccw => normalize_angle(a - self.start_angle),
            Orientation::Cw => normalize_angle(self.start_angle - a),
        };
        if off <= sweep + slack {
            Some((off / sweep).clamp(0.0, 1.0))
        } else if off >= TWO_PI - slack {
            Some(0.0)
        } else {
            None
        }
    }

    pub fn contains_angle(&self, a: f64) -> bool {
        self.param_of_angle(a, TAU).is_some()
    }

    /// Sub-arc between parameters `s0 ≤ s1`.
    pub fn sub_arc(&self, s0: f64, s1: f64) -> Arc {
        let sweep = self.sweep();
        let a0 = self.angle_at(s0);
        Arc::from_sweep(
            self.center,
            self.radius,
            a0,
            (s1 - s0) * sweep,
            self.orientation,
        )
    }

    pub fn reversed(&self) -> Arc {
        let sweep = self.sweep();
        Arc::from_sweep(
            self.center,
            self.radius,
            self.end_angle,
            sweep,
            self.orientation.flipped(),
        )
    }
}

/// A curve piece: straight segment or circular arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Edge {
    Segment(Segment),
    Arc(Arc),
}

impl Edge {
    pub fn length(&self) -> f64 {
        match self {
            Edge::Segment(s) => s.length(),
            Edge::Arc(a) => a.length(),
        }
    }

    pub fn point_at(&self, s: f64) -> Point {
        match self {
            Edge::Segment(seg) => seg.point_at(s),
            Edge::Arc(a) => a.point_at(s),
        }
    }

    pub fn start(&self) -> Point {
        match self {
            Edge::Segment(s) => s.a,
            Edge::Arc(a) => a.start_point(),
        }
    }

    pub fn end(&self) -> Point {
        match self {
            Edge::Segment(s) => s.b,
            Edge::Arc(a) => a.end_point(),
        }
    }

    pub fn tangent_at(&self, s: f64) -> Point {
        match self {
            Edge::Segment(seg) => seg.direction(),
            Edge::Arc(a) => a.tangent_at(s),
        }
    }

    /// Piece between parameters `s0 ≤ s1`.
    pub fn sub_edge(&self, s0: f64, s1: f64) -> Edge {
        match self {
            Edge::Segment(seg) => Edge::Segment(Segment::new(seg.point_at(s0), seg.point_at(s1))),
            Edge::Arc(a) if (s1 - s0) * a.sweep() <= MIN_SWEEP => {
                let q = a.point_at(s0);
                Edge::Segment(Segment::new(q, q))
            }
            Edge::Arc(a) => Edge::Arc(a.sub_arc(s0, s1)),
        }
    }

    pub fn reversed(&self) -> Edge {
        match self {
            Edge::Segment(s) => Edge::Segment(s.reversed()),
            Edge::Arc(a) => Edge::Arc(a.reversed()),
        }
    }
}

/// Returns `max(0, 2 − ‖p − q‖)`, the overlap depth of two unit disks.
pub fn overlap(p: Point, q: Point) -> f64 {
    (2.0 - p.dist(q)).max(0.0)
}

/// Closest point of an edge to a query point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeProximity {
    pub distance: f64,
    pub closest: Point,
    /// Parameter of `closest` along the edge, in `[0, 1]`.
    pub param: f64,
    pub at_endpoint: bool,
}

/// Global minimum distance from `p` to the edge. Ties prefer the smaller parameter.
pub fn dist_point_edge(p: Point, e: &Edge) -> EdgeProximity {
    match e {
        Edge::Segment(seg) => {
            let t = seg.project(p);
            let closest = seg.point_at(t);
            let len = seg.length();
            EdgeProximity {
                distance: closest.dist(p),
                closest,
                param: t,
                at_endpoint: t * len <= TAU || (1.0 - t) * len <= TAU,
            }
        }
        Edge::Arc(arc) => dist_point_arc(p, arc),
    }
}

fn dist_point_arc(p: Point, arc: &Arc) -> EdgeProximity {
    let rel = p - arc.center;
    let r = rel.norm();
    let endpoint = |s: f64| {
        let q = arc.point_at(s);
        EdgeProximity {
            distance: q.dist(p),
            closest: q,
            param: s,
            at_endpoint: true,
        }
    };
    if r <= TAU {
        // every arc point is equidistant: the start wins the tie
        return endpoint(0.0);
    }
    let ang_slack = TAU / arc.radius.max(TAU);
    if let Some(s) = arc.param_of_angle(rel.angle(), 0.0) {
        let q = arc.center + rel * (arc.radius / r);
        let arc_len = arc.length();
        return EdgeProximity {
            distance: (r - arc.radius).abs(),
            closest: q,
            param: s,
            at_endpoint: s * arc_len <= TAU
                || (1.0 - s) * arc_len <= TAU
                || s * arc.sweep() <= ang_slack,
        };
    }
    let a = endpoint(0.0);
    let b = endpoint(1.0);
    if b.distance < a.distance - TAU {
        b
    } else {
        a
    }
}

/// All common tangent segments of two circles, touch point to touch point.
/// Outer tangents come first. Externally tangent circles contribute their
/// inner tangent as a degenerate segment at the contact point.
pub fn tangent_segments(c1: Circle, c2: Circle) -> Vec<Segment> {
    let d = c2.center - c1.center;
    let dist = d.norm();
    let mut out = Vec::new();
    if dist <= TAU {
        return out;
    }
    let u = d * (1.0 / dist);
    let mut solve = |h: f64, inner: bool| {
        let k = h / dist;
        if k.abs() > 1.0 + TAU / dist {
            return;
        }
        let k = k.clamp(-1.0, 1.0);
        let s = (1.0 - k * k).max(0.0).sqrt();
        let tangent_case = (1.0 - k.abs()) * dist <= TAU;
        let signs: &[f64] = if tangent_case { &[0.0] } else { &[1.0, -1.0] };
        for &sg in signs {
            let n = u * k + u.perp() * (sg * s);
            let p1 = c1.center - n * c1.radius;
            let p2 = if inner {
                c2.center + n * c2.radius
            } else {
                c2.center - n * c2.radius
            };
            out.push(Segment::new(p1, p2));
        }
    };
    solve(c2.radius - c1.radius, false);
    solve(-(c1.radius + c2.radius), true);
    out
}

/// Touch points of the tangents from `p` to the circle. A point on the
/// circle yields itself; a point strictly inside yields nothing.
pub fn point_tangents(p: Point, c: Circle) -> Vec<Point> {
    let rel = p - c.center;
    let d = rel.norm();
    if d < c.radius - TAU {
        return Vec::new();
    }
    if d <= c.radius + TAU {
        return vec![p];
    }
    let phi = rel.angle();
    let alpha = (c.radius / d).clamp(-1.0, 1.0).acos();
    vec![c.point_at_angle(phi + alpha), c.point_at_angle(phi - alpha)]
}

/// Minimum over `t ∈ [0,1]` of the distance between `a0 + t(a1 − a0)` and
/// `b0 + t(b1 − b0)`, with its smallest minimiser.
pub fn min_dist_linear_motions(a0: Point, a1: Point, b0: Point, b1: Point) -> (f64, f64) {
    let r0 = a0 - b0;
    let v = (a1 - a0) - (b1 - b0);
    let vv = v.norm2();
    let t = if vv <= f64::EPSILON * (1.0 + r0.norm2()) {
        0.0
    } else {
        (-r0.dot(v) / vv).clamp(0.0, 1.0)
    };
    ((r0 + v * t).norm(), t)
}

/// Intersection parameters `(s, t)` of two segments, if they cross or touch.
pub fn segment_intersection(p: &Segment, q: &Segment) -> Option<(f64, f64)> {
    let r = p.b - p.a;
    let s = q.b - q.a;
    let denom = r.cross(s);
    let qp = q.a - p.a;
    let scale = r.norm() * s.norm();
    if denom.abs() <= 1e-14 * scale.max(1e-300) {
        return None;
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    let e = 1e-12;
    if (-e..=1.0 + e).contains(&t) && (-e..=1.0 + e).contains(&u) {
        Some((t.clamp(0.0, 1.0), u.clamp(0.0, 1.0)))
    } else {
        None
    }
}

/// True if the closed segments share a point (including collinear overlap).
pub fn segments_touch(p: &Segment, q: &Segment) -> bool {
    segment_distance(p, q) <= TAU
}

/// Minimum distance between two segments.
pub fn segment_distance(p: &Segment, q: &Segment) -> f64 {
    if segment_intersection(p, q).is_some() {
        return 0.0;
    }
    p.dist_point(q.a)
        .min(p.dist_point(q.b))
        .min(q.dist_point(p.a))
        .min(q.dist_point(p.b))
}

/// Parameters along `seg` where it meets the circle.
pub fn segment_circle_params(seg: &Segment, c: Circle) -> Vec<f64> {
    let d = seg.b - seg.a;
    let f = seg.a - c.center;
    let a = d.norm2();
    if a == 0.0 {
        return Vec::new();
    }
    let b = 2.0 * f.dot(d);
    let cc = f.norm2() - c.radius * c.radius;
    let disc = b * b - 4.0 * a * cc;
    let mut out = Vec::new();
    if disc < 0.0 {
        // a grazing line can miss by rounding only
        let t = -b / (2.0 * a);
        let q = seg.point_at(t);
        if (q.dist(c.center) - c.radius).abs() <= TAU && (0.0..=1.0).contains(&t) {
            out.push(t);
        }
        return out;
    }
    let sq = disc.sqrt();
    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
        if (-1e-12..=1.0 + 1e-12).contains(&t) {
            out.push(t.clamp(0.0, 1.0));
        }
    }
    out
}

/// Minimum distance between an arc and a segment.
pub fn arc_segment_distance(arc: &Arc, seg: &Segment) -> f64 {
    let c = arc.circle();
    for t in segment_circle_params(seg, c) {
        let q = seg.point_at(t);
        if arc.contains_angle((q - c.center).angle()) {
            return 0.0;
        }
    }
    let mut best = seg
        .dist_point(arc.start_point())
        .min(seg.dist_point(arc.end_point()));
    best = best
        .min(dist_point_arc(seg.a, arc).distance)
        .min(dist_point_arc(seg.b, arc).distance);
    let t = seg.project(c.center);
    if t > 0.0 && t < 1.0 {
        let foot = seg.point_at(t);
        let rel = foot - c.center;
        let r = rel.norm();
        if r > 0.0 && arc.contains_angle(rel.angle()) {
            best = best.min((r - c.radius).abs());
        }
    }
    best
}

/// Angles at which two circles meet (on the first circle), if any.
pub fn circle_circle_angles(c1: Circle, c2: Circle) -> Vec<f64> {
    let d = c2.center - c1.center;
    let dist = d.norm();
    if dist <= TAU {
        return Vec::new();
    }
    let sum = c1.radius + c2.radius;
    let diff = (c1.radius - c2.radius).abs();
    if dist > sum + TAU || dist < diff - TAU {
        return Vec::new();
    }
    let base = d.angle();
    let cosv = ((c1.radius * c1.radius + dist * dist - c2.radius * c2.radius)
        / (2.0 * c1.radius * dist))
        .clamp(-1.0, 1.0);
    let alpha = cosv.acos();
    if alpha * c1.radius <= TAU {
        vec![normalize_angle(base)]
    } else if (PI - alpha) * c1.radius <= TAU {
        vec![normalize_angle(base + PI)]
    } else {
        vec![normalize_angle(base + alpha), normalize_angle(base - alpha)]
    }
}

/// Signed area of a closed polygon (positive for counter-clockwise order).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// Even-odd point-in-polygon test; boundary points may fall either way.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True if no two non-adjacent edges of the closed polygon touch and no
/// two adjacent edges fold back onto each other.
pub fn polygon_is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let edges: Vec<Segment> = (0..n)
        .map(|i| Segment::new(poly[i], poly[(i + 1) % n]))
        .collect();
    if edges.iter().any(|e| e.is_degenerate()) {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                let (e, f) = if j == i + 1 {
                    (&edges[i], &edges[j])
                } else {
                    (&edges[j], &edges[i])
                };
                let u = e.b - e.a;
                let v = f.b - f.a;
                if u.cross(v).abs() <= 1e-12 * u.norm() * v.norm() && u.dot(v) < 0.0 {
                    return false;
                }
                continue;
            }
            if segments_touch(&edges[i], &edges[j]) {
                return false;
            }
        }
    }
    true
}
