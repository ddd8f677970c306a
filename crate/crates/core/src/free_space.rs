//! The workspace and its unit-disk erosion, the free space `F`.
//!
//! `F` is closed: a point belongs to it when its distance to the obstacle
//! space is at least 1 (up to [`TAU`]). The boundary is assembled by offsetting
//! every workspace edge, adding unit arcs at reflex vertices and radius-`r+1`
//! circles around carved disks, then trimming each piece against all others.
//! Trimming is pairwise, so construction is quadratic in the number of pieces.

use crate::error::{Error, Result};
use crate::geodesics::{self, TangentGraph};
use crate::geometry::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub outer: Vec<Point>,
    #[serde(default)]
    pub holes: Vec<Vec<Point>>,
    #[serde(default)]
    pub carved_disks: Vec<Circle>,
}

impl Workspace {
    pub fn polygon(outer: Vec<Point>) -> Self {
        Workspace {
            outer,
            holes: Vec::new(),
            carved_disks: Vec::new(),
        }
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Workspace::polygon(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn is_simple_polygon(&self) -> bool {
        self.holes.is_empty() && self.carved_disks.is_empty()
    }

    /// Checks simplicity and nesting, and returns a copy with the outer
    /// boundary counter-clockwise and every hole clockwise.
    pub fn normalized(&self) -> Result<Workspace> {
        let bad = |m: &str| Err(Error::InvalidWorkspace(m.to_string()));
        let finite = |poly: &[Point]| poly.iter().all(|p| p.is_finite());
        if !finite(&self.outer) || !self.holes.iter().all(|h| finite(h)) {
            return bad("non-finite coordinate");
        }
        if !polygon_is_simple(&self.outer) {
            return bad("outer boundary is not a simple polygon");
        }
        let mut outer = self.outer.clone();
        if signed_area(&outer) < 0.0 {
            outer.reverse();
        }
        let mut holes = Vec::with_capacity(self.holes.len());
        for h in &self.holes {
            if !polygon_is_simple(h) {
                return bad("hole is not a simple polygon");
            }
            if !h.iter().all(|&p| point_in_polygon(p, &outer)) {
                return bad("hole is not inside the outer boundary");
            }
            let mut h = h.clone();
            if signed_area(&h) > 0.0 {
                h.reverse();
            }
            holes.push(h);
        }
        let all: Vec<&Vec<Point>> = std::iter::once(&outer).chain(holes.iter()).collect();
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                for e in ring_edges(all[i]) {
                    if ring_edges(all[j]).any(|f| segments_touch(&e, &f)) {
                        return bad("boundary components touch");
                    }
                }
            }
        }
        for i in 1..holes.len() {
            for j in 0..i {
                if point_in_polygon(holes[i][0], &holes[j])
                    || point_in_polygon(holes[j][0], &holes[i])
                {
                    return bad("nested holes");
                }
            }
        }
        for d in &self.carved_disks {
            if !(d.radius >= 0.0) || !d.center.is_finite() {
                return bad("invalid carved disk");
            }
        }
        Ok(Workspace {
            outer,
            holes,
            carved_disks: self.carved_disks.clone(),
        })
    }

    /// Boundary edges oriented so that the workspace lies on their left
    /// (assuming a normalized workspace).
    pub fn edges(&self) -> Vec<Segment> {
        let mut out: Vec<Segment> = ring_edges(&self.outer).collect();
        for h in &self.holes {
            out.extend(ring_edges(h));
        }
        out
    }

    /// Vertices where the workspace interior angle exceeds π.
    pub fn reflex_vertices(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for ring in std::iter::once(&self.outer).chain(self.holes.iter()) {
            let n = ring.len();
            for i in 0..n {
                let (u, v, w) = (ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
                if (v - u).cross(w - v) < 0.0 {
                    out.push(v);
                }
            }
        }
        out
    }

    /// True if `p` lies inside the polygon with holes (carved disks ignored).
    pub fn inside_polygon(&self, p: Point) -> bool {
        point_in_polygon(p, &self.outer) && !self.holes.iter().any(|h| point_in_polygon(p, h))
    }

    /// Distance from `p` to the obstacle space; negative when `p` is inside it.
    pub fn clearance(&self, p: Point) -> f64 {
        let mut d = self
            .edges()
            .iter()
            .map(|e| e.dist_point(p))
            .fold(f64::INFINITY, f64::min);
        if !self.inside_polygon(p) {
            d = -d;
        }
        for c in &self.carved_disks {
            d = d.min(p.dist(c.center) - c.radius);
        }
        d
    }

    /// Minimum distance from a segment to the obstacle boundary. The caller
    /// must know one point of the segment lies inside the workspace.
    pub fn segment_clearance(&self, s: &Segment) -> f64 {
        let mut d = f64::INFINITY;
        for e in self.edges() {
            d = d.min(segment_distance(s, &e));
        }
        for c in &self.carved_disks {
            d = d.min(s.dist_point(c.center) - c.radius);
        }
        d
    }

    /// Minimum distance from an arc to the obstacle boundary.
    pub fn arc_clearance(&self, a: &Arc) -> f64 {
        let mut d = f64::INFINITY;
        for e in self.edges() {
            d = d.min(arc_segment_distance(a, &e));
        }
        for c in &self.carved_disks {
            d = d.min(dist_point_edge(c.center, &Edge::Arc(*a)).distance - c.radius);
        }
        d
    }

    pub fn edge_clearance(&self, e: &Edge) -> f64 {
        match e {
            Edge::Segment(s) => self.segment_clearance(s),
            Edge::Arc(a) => self.arc_clearance(a),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(Vec::len).sum::<usize>()
    }
}

fn ring_edges(ring: &[Point]) -> impl Iterator<Item = Segment> + '_ {
    let n = ring.len();
    (0..n).map(move |i| Segment::new(ring[i], ring[(i + 1) % n]))
}

/// The free space of a workspace.
#[derive(Clone, Debug)]
pub struct FreeSpace {
    /// Closed chains with `F` on their left.
    pub boundary_loops: Vec<Vec<Edge>>,
    /// Normalized copy of the input workspace.
    pub source: Workspace,
    pub(crate) graph: TangentGraph,
}

impl FreeSpace {
    pub fn is_empty(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.boundary_loops
            .iter()
            .flatten()
            .filter(|e| matches!(e, Edge::Arc(_)))
            .count()
    }

    pub fn segment_count(&self) -> usize {
        self.boundary_loops
            .iter()
            .flatten()
            .filter(|e| matches!(e, Edge::Segment(_)))
            .count()
    }
}

/// Distance at which a point still counts as lying on a boundary piece.
const LINK_TOL: f64 = 1e-7;

pub fn build_free_space(w: &Workspace) -> Result<FreeSpace> {
    let ws = w.normalized()?;
    let pieces = candidate_pieces(&ws);
    let mut kept = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        let mut cuts = vec![0.0, 1.0];
        for (j, other) in pieces.iter().enumerate() {
            if i != j {
                cuts.extend(intersection_params(piece, other));
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        for pair in cuts.windows(2) {
            let (s0, s1) = (pair[0], pair[1]);
            let sub = piece.sub_edge(s0, s1);
            if sub.length() <= TAU {
                continue;
            }
            if ws.clearance(sub.point_at(0.5)) >= 1.0 - LINK_TOL {
                kept.push(sub);
            }
        }
    }
    let boundary_loops = link_loops(kept);
    let graph = geodesics::build_tangent_graph(&ws);
    Ok(FreeSpace {
        boundary_loops,
        source: ws,
        graph,
    })
}

fn candidate_pieces(ws: &Workspace) -> Vec<Edge> {
    let mut out = Vec::new();
    for e in ws.edges() {
        let n = e.direction().perp();
        out.push(Edge::Segment(Segment::new(e.a + n, e.b + n)));
    }
    for ring in std::iter::once(&ws.outer).chain(ws.holes.iter()) {
        let k = ring.len();
        for i in 0..k {
            let (u, v, x) = (ring[(i + k - 1) % k], ring[i], ring[(i + 1) % k]);
            if (v - u).cross(x - v) < 0.0 {
                let n1 = (v - u).normalized().perp();
                let n2 = (x - v).normalized().perp();
                out.push(Edge::Arc(Arc::new(
                    v,
                    1.0,
                    n1.angle(),
                    n2.angle(),
                    Orientation::Cw,
                )));
            }
        }
    }
    for c in &ws.carved_disks {
        if c.radius > TAU {
            out.push(Edge::Arc(Arc::full_circle(
                Circle::new(c.center, c.radius + 1.0),
                Orientation::Cw,
            )));
        }
    }
    out
}

/// Parameters along `a` where it meets `b`.
fn intersection_params(a: &Edge, b: &Edge) -> Vec<f64> {
    let mut out = Vec::new();
    match (a, b) {
        (Edge::Segment(s), Edge::Segment(t)) => {
            if let Some((u, _)) = segment_intersection(s, t) {
                out.push(u);
            }
        }
        (Edge::Segment(s), Edge::Arc(arc)) => {
            for u in segment_circle_params(s, arc.circle()) {
                if arc.contains_angle((s.point_at(u) - arc.center).angle()) {
                    out.push(u);
                }
            }
        }
        (Edge::Arc(arc), Edge::Segment(s)) => {
            for u in segment_circle_params(s, arc.circle()) {
                let q = s.point_at(u);
                if let Some(p) = arc.param_of_angle((q - arc.center).angle(), TAU) {
                    out.push(p);
                }
            }
        }
        (Edge::Arc(x), Edge::Arc(y)) => {
            for ang in circle_circle_angles(x.circle(), y.circle()) {
                let q = x.circle().point_at_angle(ang);
                if y.contains_angle((q - y.center).angle()) {
                    if let Some(p) = x.param_of_angle(ang, TAU) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn link_loops(mut pieces: Vec<Edge>) -> Vec<Vec<Edge>> {
    let mut loops = Vec::new();
    let mut used = vec![false; pieces.len()];
    // deterministic order: lexicographic by start point
    pieces.sort_by(|a, b| {
        let (p, q) = (a.start(), b.start());
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
    });
    for first in 0..pieces.len() {
        if used[first] {
            continue;
        }
        used[first] = true;
        let mut chain = vec![pieces[first]];
        let origin = pieces[first].start();
        loop {
            let end = chain.last().unwrap().end();
            if end.dist(origin) <= LINK_TOL && chain.len() > 1
                || chain.len() == 1 && is_closed(&chain[0])
            {
                break;
            }
            let next =
                (0..pieces.len()).find(|&k| !used[k] && pieces[k].start().dist(end) <= LINK_TOL);
            match next {
                Some(k) => {
                    used[k] = true;
                    chain.push(pieces[k]);
                }
                None => break,
            }
        }
        loops.push(chain);
    }
    loops
}

fn is_closed(e: &Edge) -> bool {
    e.start().dist(e.end()) <= LINK_TOL && e.length() > LINK_TOL
}

/// Closed membership test: `dist(p, O) ≥ 1 − τ`.
pub fn contains_free(f: &FreeSpace, p: Point) -> bool {
    f.source.clearance(p) >= 1.0 - TAU
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentCount {
    pub component_id: usize,
    pub starts: usize,
    pub targets: usize,
    /// Indices into the start list.
    pub start_indices: Vec<usize>,
    /// Indices into the target list.
    pub target_indices: Vec<usize>,
}

/// Groups starts and targets by the connected component of `F` they lie in.
/// Two points share a component exactly when a geodesic joins them.
pub fn components_with_counts(
    f: &FreeSpace,
    starts: &[Point],
    targets: &[Point],
) -> Result<Vec<ComponentCount>> {
    let pts: Vec<Point> = starts.iter().chain(targets.iter()).copied().collect();
    for p in &pts {
        if !contains_free(f, *p) {
            return Err(Error::PositionOutsideFreeSpace(p.x, p.y));
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut comp = vec![0usize; pts.len()];
    for (i, &p) in pts.iter().enumerate() {
        let mut found = None;
        for (c, &r) in reps.iter().enumerate() {
            if geodesics::connected(f, pts[r], p)? {
                found = Some(c);
                break;
            }
        }
        comp[i] = found.unwrap_or_else(|| {
            reps.push(i);
            reps.len() - 1
        });
    }
    let mut out: Vec<ComponentCount> = (0..reps.len())
        .map(|c| ComponentCount {
            component_id: c,
            starts: 0,
            targets: 0,
            start_indices: vec![],
            target_indices: vec![],
        })
        .collect();
    for (i, &c) in comp.iter().enumerate() {
        if i < starts.len() {
            out[c].starts += 1;
            out[c].start_indices.push(i);
        } else {
            out[c].targets += 1;
            out[c].target_indices.push(i - starts.len());
        }
    }
    Ok(out)
}

/// Returns the workspace with `D_radius(center)` removed. A zero radius is a
/// no-op (the open disk is empty), and re-carving an identical disk changes nothing.
pub fn carve_disk(w: &Workspace, center: Point, radius: f64) -> Workspace {
    let mut out = w.clone();
    if radius <= TAU {
        return out;
    }
    let dup = out
        .carved_disks
        .iter()
        .any(|d| d.center.dist(center) <= TAU && (d.radius - radius).abs() <= TAU);
    if !dup {
        out.carved_disks.push(Circle::new(center, radius));
    }
    out
}
