//! Shortest paths in the free space and queries along them.
//!
//! Geodesics in `F` are chains of straight segments and arcs of the boundary
//! circles (unit circles at reflex vertices, radius `r+1` circles around carved
//! disks). We search a tangent graph: nodes are the query points and tangent
//! points on those circles; edges are free tangent segments and free arcs
//! between angularly adjacent tangent points. Freeness is decided with exact
//! segment/arc distances to the obstacle boundary rather than sampling.

use crate::error::{Error, Result};
use crate::free_space::{contains_free, FreeSpace, Workspace};
use crate::geometry::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Slack on the unit clearance for an edge of the tangent graph.
pub(crate) const FEAS_TOL: f64 = 1e-9;
const ANGLE_MERGE: f64 = 1e-11;

/// Obstacle boundary in a form suited to repeated distance queries.
#[derive(Clone, Debug)]
pub(crate) struct Obstacles {
    pub edges: Vec<Segment>,
    pub disks: Vec<Circle>,
    outer: Vec<Point>,
    holes: Vec<Vec<Point>>,
}

impl Obstacles {
    pub fn new(ws: &Workspace) -> Self {
        Obstacles {
            edges: ws.edges(),
            disks: ws
                .carved_disks
                .iter()
                .copied()
                .filter(|d| d.radius > TAU)
                .collect(),
            outer: ws.outer.clone(),
            holes: ws.holes.clone(),
        }
    }

    pub fn inside_polygon(&self, p: Point) -> bool {
        point_in_polygon(p, &self.outer) && !self.holes.iter().any(|h| point_in_polygon(p, h))
    }

    pub fn segment_free(&self, s: &Segment) -> bool {
        let lim = 1.0 - FEAS_TOL;
        if self.edges.iter().any(|e| segment_distance(s, e) < lim) {
            return false;
        }
        if self
            .disks
            .iter()
            .any(|d| s.dist_point(d.center) < d.radius + lim)
        {
            return false;
        }
        self.inside_polygon(s.point_at(0.5))
    }

    pub fn arc_free(&self, a: &Arc) -> bool {
        let lim = 1.0 - FEAS_TOL;
        if self.edges.iter().any(|e| arc_segment_distance(a, e) < lim) {
            return false;
        }
        let edge = Edge::Arc(*a);
        if self
            .disks
            .iter()
            .any(|d| dist_point_edge(d.center, &edge).distance < d.radius + lim)
        {
            return false;
        }
        self.inside_polygon(a.point_at(0.5))
    }

    /// Smallest `t > 0` at which `p + t·d` (with `d` a unit vector) enters
    /// the obstacle space grown by a unit disk.
    pub fn ray_exit(&self, p: Point, d: Point) -> f64 {
        let r = 1.0 - FEAS_TOL;
        let mut best = f64::INFINITY;
        let mut take = |iv: Option<(f64, f64)>| {
            if let Some((t0, t1)) = iv {
                if t1 > TAU && t0 < t1 {
                    best = best.min(t0.max(0.0));
                }
            }
        };
        for e in &self.edges {
            take(ray_disk(p, d, e.a, r));
            take(ray_disk(p, d, e.b, r));
            take(ray_slab(p, d, e, r));
        }
        for c in &self.disks {
            take(ray_disk(p, d, c.center, c.radius + r));
        }
        best
    }
}

fn ray_disk(p: Point, d: Point, c: Point, r: f64) -> Option<(f64, f64)> {
    let f = p - c;
    let b = f.dot(d);
    let cc = f.norm2() - r * r;
    let disc = b * b - cc;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    Some((-b - sq, -b + sq))
}

fn ray_slab(p: Point, d: Point, e: &Segment, r: f64) -> Option<(f64, f64)> {
    let len = e.length();
    if len <= TAU {
        return None;
    }
    let u = e.direction();
    let n = u.perp();
    let rel = p - e.a;
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (x0, v, a, b) in [
        (rel.dot(u), d.dot(u), 0.0, len),
        (rel.dot(n), d.dot(n), -r, r),
    ] {
        if v.abs() < 1e-15 {
            if x0 <= a || x0 >= b {
                return None;
            }
        } else {
            let (t0, t1) = ((a - x0) / v, (b - x0) / v);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
    }
    (lo < hi).then_some((lo, hi))
}

#[derive(Clone, Copy, Debug)]
struct GNode {
    point: Point,
    circle: Option<usize>,
    angle: f64,
}

/// Query-independent part of the tangent graph of a free space.
#[derive(Clone, Debug)]
pub(crate) struct TangentGraph {
    pub obstacles: Obstacles,
    pub circles: Vec<Circle>,
    nodes: Vec<GNode>,
    seg_adj: Vec<Vec<(usize, f64)>>,
    /// Per circle, static node ids sorted by angle.
    rings: Vec<Vec<usize>>,
    /// Per circle, whether the counter-clockwise arc from ring node `k` to `k+1` is free.
    ring_free: Vec<Vec<bool>>,
}

pub(crate) fn build_tangent_graph(ws: &Workspace) -> TangentGraph {
    let obstacles = Obstacles::new(ws);
    let mut circles: Vec<Circle> = ws
        .reflex_vertices()
        .into_iter()
        .map(|v| Circle::new(v, 1.0))
        .collect();
    circles.extend(
        obstacles
            .disks
            .iter()
            .map(|d| Circle::new(d.center, d.radius + 1.0)),
    );
    let mut nodes: Vec<GNode> = Vec::new();
    let mut per_circle: Vec<Vec<usize>> = vec![Vec::new(); circles.len()];
    let mut seg_adj: Vec<Vec<(usize, f64)>> = Vec::new();
    for i in 0..circles.len() {
        for j in (i + 1)..circles.len() {
            for seg in tangent_segments(circles[i], circles[j]) {
                if !obstacles.segment_free(&seg) {
                    continue;
                }
                let u = ring_node(
                    &mut nodes,
                    &mut per_circle,
                    &mut seg_adj,
                    &circles,
                    i,
                    seg.a,
                );
                let v = ring_node(
                    &mut nodes,
                    &mut per_circle,
                    &mut seg_adj,
                    &circles,
                    j,
                    seg.b,
                );
                let len = seg.length();
                seg_adj[u].push((v, len));
                seg_adj[v].push((u, len));
            }
        }
    }
    let mut rings = Vec::with_capacity(circles.len());
    let mut ring_free = Vec::with_capacity(circles.len());
    for (c, ids) in per_circle.into_iter().enumerate() {
        let mut ids = ids;
        ids.sort_by(|&a, &b| nodes[a].angle.total_cmp(&nodes[b].angle));
        let k = ids.len();
        let free: Vec<bool> = (0..k)
            .map(|q| {
                let (a0, a1) = (nodes[ids[q]].angle, nodes[ids[(q + 1) % k]].angle);
                let arc = Arc::new(
                    circles[c].center,
                    circles[c].radius,
                    a0,
                    a1,
                    Orientation::Ccw,
                );
                obstacles.arc_free(&arc)
            })
            .collect();
        rings.push(ids);
        ring_free.push(free);
    }
    TangentGraph {
        obstacles,
        circles,
        nodes,
        seg_adj,
        rings,
        ring_free,
    }
}

fn ring_node(
    nodes: &mut Vec<GNode>,
    per_circle: &mut [Vec<usize>],
    adj: &mut Vec<Vec<(usize, f64)>>,
    circles: &[Circle],
    c: usize,
    p: Point,
) -> usize {
    let angle = (p - circles[c].center).angle();
    for &id in &per_circle[c] {
        if angle_gap(nodes[id].angle, angle) <= ANGLE_MERGE {
            return id;
        }
    }
    nodes.push(GNode {
        point: circles[c].point_at_angle(angle),
        circle: Some(c),
        angle,
    });
    adj.push(Vec::new());
    per_circle[c].push(nodes.len() - 1);
    nodes.len() - 1
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TWO_PI - d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Step {
    Seg,
    Ccw,
    Cw,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Geodesics from `a` to every point in `targets`; `None` where unreachable.
pub fn shortest_paths_from(
    f: &FreeSpace,
    a: Point,
    targets: &[Point],
) -> Result<Vec<Option<GeodesicPath>>> {
    for p in std::iter::once(&a).chain(targets) {
        if !contains_free(f, *p) {
            return Err(Error::PositionOutsideFreeSpace(p.x, p.y));
        }
    }
    let g = &f.graph;
    let obs = &g.obstacles;
    let mut nodes = g.nodes.clone();
    let n_static = nodes.len();
    let src = nodes.len();
    nodes.push(GNode {
        point: a,
        circle: None,
        angle: 0.0,
    });
    let first_target = nodes.len();
    for t in targets {
        nodes.push(GNode {
            point: *t,
            circle: None,
            angle: 0.0,
        });
    }
    let mut extra_rings: Vec<Vec<usize>> = vec![Vec::new(); g.circles.len()];
    let mut extra: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nodes.len()];

    let mut tangent_node =
        |nodes: &mut Vec<GNode>, extra: &mut Vec<Vec<(usize, f64)>>, c: usize, p: Point| -> usize {
            let angle = (p - g.circles[c].center).angle();
            for &id in g.rings[c].iter().chain(extra_rings[c].iter()) {
                if angle_gap(nodes[id].angle, angle) <= ANGLE_MERGE {
                    return id;
                }
            }
            nodes.push(GNode {
                point: g.circles[c].point_at_angle(angle),
                circle: Some(c),
                angle,
            });
            extra.push(Vec::new());
            extra_rings[c].push(nodes.len() - 1);
            nodes.len() - 1
        };

    for (c, circle) in g.circles.iter().enumerate() {
        for tp in point_tangents(a, *circle) {
            let seg = Segment::new(a, tp);
            if obs.segment_free(&seg) {
                let id = tangent_node(&mut nodes, &mut extra, c, tp);
                extra[src].push((id, seg.length()));
            }
        }
    }
    for (k, t) in targets.iter().enumerate() {
        let tid = first_target + k;
        let direct = Segment::new(a, *t);
        if obs.segment_free(&direct) {
            extra[src].push((tid, direct.length()));
        }
        for (c, circle) in g.circles.iter().enumerate() {
            for tp in point_tangents(*t, *circle) {
                let seg = Segment::new(tp, *t);
                if obs.segment_free(&seg) {
                    let id = tangent_node(&mut nodes, &mut extra, c, tp);
                    extra[id].push((tid, seg.length()));
                }
            }
        }
    }

    // arc neighbours: (ccw next, length) and (cw next, length)
    let mut arc_next: Vec<Option<(usize, f64)>> = vec![None; nodes.len()];
    let mut arc_prev: Vec<Option<(usize, f64)>> = vec![None; nodes.len()];
    for c in 0..g.circles.len() {
        let circle = g.circles[c];
        let stat = &g.rings[c];
        let mut merged: Vec<usize> = stat.iter().chain(extra_rings[c].iter()).copied().collect();
        if merged.len() < 2 {
            continue;
        }
        merged.sort_by(|&x, &y| nodes[x].angle.total_cmp(&nodes[y].angle));
        let k = merged.len();
        // index into the static ring of the last static node at or before merged[q]
        let mut last_static: Vec<Option<usize>> = vec![None; k];
        let mut cur = if stat.is_empty() {
            None
        } else {
            Some(stat.len() - 1)
        };
        let mut si = 0;
        for q in 0..k {
            if si < stat.len() && merged[q] == stat[si] {
                cur = Some(si);
                si += 1;
            }
            last_static[q] = cur;
        }
        for q in 0..k {
            let (u, v) = (merged[q], merged[(q + 1) % k]);
            let arc = Arc::new(
                circle.center,
                circle.radius,
                nodes[u].angle,
                nodes[v].angle,
                Orientation::Ccw,
            );
            let free = match last_static[q] {
                Some(s) if g.ring_free[c][s] => true,
                _ => obs.arc_free(&arc),
            };
            if free {
                let len = arc.length();
                arc_next[u] = Some((v, len));
                arc_prev[v] = Some((u, len));
            }
        }
    }

    let total = nodes.len();
    let mut dist = vec![f64::INFINITY; total];
    let mut pred: Vec<Option<(usize, Step)>> = vec![None; total];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(HeapItem(0.0, src));
    let is_target = |x: usize| x >= first_target && x < first_target + targets.len();
    while let Some(HeapItem(d, x)) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        if is_target(x) {
            continue;
        }
        let mut relax = |y: usize, w: f64, step: Step, heap: &mut BinaryHeap<HeapItem>| {
            let nd = d + w;
            if nd < dist[y] {
                dist[y] = nd;
                pred[y] = Some((x, step));
                heap.push(HeapItem(nd, y));
            }
        };
        if x < n_static {
            for &(y, w) in &g.seg_adj[x] {
                relax(y, w, Step::Seg, &mut heap);
            }
        }
        for &(y, w) in &extra[x] {
            relax(y, w, Step::Seg, &mut heap);
        }
        if let Some((y, w)) = arc_next[x] {
            relax(y, w, Step::Ccw, &mut heap);
        }
        if let Some((y, w)) = arc_prev[x] {
            relax(y, w, Step::Cw, &mut heap);
        }
    }

    let mut out = Vec::with_capacity(targets.len());
    for k in 0..targets.len() {
        let tid = first_target + k;
        if !dist[tid].is_finite() {
            out.push(None);
            continue;
        }
        let mut steps = Vec::new();
        let mut cur = tid;
        while let Some((prev, step)) = pred[cur] {
            steps.push((prev, cur, step));
            cur = prev;
        }
        steps.reverse();
        let mut edges: Vec<Edge> = Vec::new();
        for (u, v, step) in steps {
            let (nu, nv) = (nodes[u], nodes[v]);
            match step {
                Step::Seg => edges.push(Edge::Segment(Segment::new(nu.point, nv.point))),
                Step::Ccw | Step::Cw => {
                    let c = g.circles[nu.circle.expect("arc step on a circle node")];
                    let o = if step == Step::Ccw {
                        Orientation::Ccw
                    } else {
                        Orientation::Cw
                    };
                    edges.push(Edge::Arc(Arc::new(
                        c.center, c.radius, nu.angle, nv.angle, o,
                    )));
                }
            }
        }
        out.push(Some(GeodesicPath::from_raw_edges(edges, a)));
    }
    Ok(out)
}

/// Geodesic from `a` to `b`, or `None` when they lie in different components.
pub fn shortest_path(f: &FreeSpace, a: Point, b: Point) -> Result<Option<GeodesicPath>> {
    Ok(shortest_paths_from(f, a, &[b])?.pop().flatten())
}

pub fn connected(f: &FreeSpace, a: Point, b: Point) -> Result<bool> {
    Ok(shortest_path(f, a, b)?.is_some())
}

/// A path parameterized by normalized arc length over `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "PathRepr", into = "PathRepr")]
pub struct GeodesicPath {
    edges: Vec<Edge>,
    /// `cumulative[k]` is the length before edge `k`; one entry more than `edges`.
    cumulative: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PathRepr {
    edges: Vec<Edge>,
}

impl From<PathRepr> for GeodesicPath {
    fn from(r: PathRepr) -> Self {
        GeodesicPath::new(r.edges)
    }
}

impl From<GeodesicPath> for PathRepr {
    fn from(p: GeodesicPath) -> Self {
        PathRepr { edges: p.edges }
    }
}

impl GeodesicPath {
    /// Wraps an edge chain as given. An empty chain is not a path; use [`GeodesicPath::point`].
    pub fn new(edges: Vec<Edge>) -> Self {
        assert!(!edges.is_empty(), "a path needs at least one edge");
        let mut cumulative = Vec::with_capacity(edges.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for e in &edges {
            acc += e.length();
            cumulative.push(acc);
        }
        GeodesicPath { edges, cumulative }
    }

    pub fn point(p: Point) -> Self {
        GeodesicPath::new(vec![Edge::Segment(Segment::new(p, p))])
    }

    pub fn segment(a: Point, b: Point) -> Self {
        GeodesicPath::new(vec![Edge::Segment(Segment::new(a, b))])
    }

    /// Drops zero-length pieces and fuses consecutive arcs of one circle.
    fn from_raw_edges(raw: Vec<Edge>, start: Point) -> Self {
        let mut edges: Vec<Edge> = Vec::new();
        for e in raw {
            if e.length() <= 1e-14 {
                continue;
            }
            if let (Some(Edge::Arc(prev)), Edge::Arc(cur)) = (edges.last().copied(), e) {
                if prev.center == cur.center
                    && prev.radius == cur.radius
                    && prev.orientation == cur.orientation
                {
                    let sweep = prev.sweep() + cur.sweep();
                    if sweep < TWO_PI {
                        *edges.last_mut().unwrap() = Edge::Arc(Arc::from_sweep(
                            prev.center,
                            prev.radius,
                            prev.start_angle,
                            sweep,
                            prev.orientation,
                        ));
                        continue;
                    }
                }
            }
            edges.push(e);
        }
        if edges.is_empty() {
            return GeodesicPath::point(start);
        }
        GeodesicPath::new(edges)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Arc length before edge `k`.
    pub fn offset_of_edge(&self, k: usize) -> f64 {
        self.cumulative[k]
    }

    pub fn start(&self) -> Point {
        self.edges[0].start()
    }

    pub fn end(&self) -> Point {
        self.edges.last().unwrap().end()
    }

    /// Edge index and local parameter of the point at normalized length `w`.
    pub fn locate(&self, w: f64) -> (usize, f64) {
        let total = self.total_length();
        if total <= 0.0 {
            return (0, 0.0);
        }
        let l = w.clamp(0.0, 1.0) * total;
        let n = self.edges.len();
        let mut k = match self.cumulative[1..].binary_search_by(|c| c.total_cmp(&l)) {
            Ok(i) | Err(i) => i.min(n - 1),
        };
        while k + 1 < n && self.edges[k].length() <= 0.0 {
            k += 1;
        }
        let len = self.edges[k].length();
        let s = if len > 0.0 {
            ((l - self.cumulative[k]) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (k, s)
    }

    pub fn point_at(&self, w: f64) -> Point {
        if w <= 0.0 {
            return self.start();
        }
        if w >= 1.0 {
            return self.end();
        }
        let (k, s) = self.locate(w);
        self.edges[k].point_at(s)
    }

    /// Unit direction of travel at `w`.
    pub fn tangent_at(&self, w: f64) -> Point {
        let (k, s) = self.locate(w);
        self.edges[k].tangent_at(s)
    }

    /// Normalized parameter of local parameter `s` on edge `k`.
    pub fn param_of(&self, k: usize, s: f64) -> f64 {
        let total = self.total_length();
        if total <= 0.0 {
            return 0.0;
        }
        ((self.cumulative[k] + s * self.edges[k].length()) / total).clamp(0.0, 1.0)
    }

    /// Restriction to `[w1, w2]`, reparameterized over `[0, 1]`.
    pub fn sub_path(&self, w1: f64, w2: f64) -> GeodesicPath {
        let total = self.total_length();
        let (l1, l2) = (w1.clamp(0.0, 1.0) * total, w2.clamp(0.0, 1.0) * total);
        if l2 - l1 <= 0.0 {
            return GeodesicPath::point(self.point_at(w1));
        }
        let mut out = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            let (c0, c1) = (self.cumulative[k], self.cumulative[k + 1]);
            let len = c1 - c0;
            if c1 <= l1 || c0 >= l2 || len <= 0.0 {
                continue;
            }
            let s0 = ((l1 - c0) / len).max(0.0);
            let s1 = ((l2 - c0) / len).min(1.0);
            let piece = e.sub_edge(s0, s1);
            if piece.length() > 0.0 {
                out.push(piece);
            }
        }
        if out.is_empty() {
            return GeodesicPath::point(self.point_at(w1));
        }
        GeodesicPath::new(out)
    }

    /// `self` followed by `other`; zero-length pieces are dropped.
    pub fn concat(&self, other: &GeodesicPath) -> GeodesicPath {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .chain(other.edges.iter())
            .filter(|e| e.length() > 0.0)
            .copied()
            .collect();
        if edges.is_empty() {
            return GeodesicPath::point(self.start());
        }
        GeodesicPath::new(edges)
    }

    pub fn reversed(&self) -> GeodesicPath {
        GeodesicPath::new(self.edges.iter().rev().map(Edge::reversed).collect())
    }

    /// Minimum distance from `p` to the trace, with the smallest parameter realizing it.
    pub fn distance_to_point(&self, p: Point) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        for (k, e) in self.edges.iter().enumerate() {
            let prox = dist_point_edge(p, e);
            if prox.distance < best.0 {
                best = (prox.distance, self.param_of(k, prox.param));
            }
        }
        best
    }

    /// Sampled membership check: `n + 1` evenly spaced parameters lie in `F`.
    pub fn contained_in(&self, f: &FreeSpace, n: usize) -> bool {
        (0..=n).all(|i| contains_free(f, self.point_at(i as f64 / n as f64)))
    }

    /// Largest deviation between consecutive edge endpoints.
    pub fn max_joint_gap(&self) -> f64 {
        self.edges
            .windows(2)
            .map(|w| w[0].end().dist(w[1].start()))
            .fold(0.0, f64::max)
    }
}

/// Length of `γ` restricted to `[w1, w2]`.
pub fn path_length(g: &GeodesicPath, w1: f64, w2: f64) -> f64 {
    (w2 - w1).max(0.0) * g.total_length()
}

/// A geodesic prolonged along its first and last segments until `∂F`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedPath {
    pub base: GeodesicPath,
    pub pre_extension: Segment,
    pub post_extension: Segment,
}

impl ExtendedPath {
    /// The full curve `γ̂`, from the start of `pre_extension` to the end of `post_extension`.
    pub fn full(&self) -> GeodesicPath {
        let mut edges = Vec::new();
        if !self.pre_extension.is_degenerate() {
            edges.push(Edge::Segment(self.pre_extension));
        }
        edges.extend(self.base.edges().iter().copied());
        if !self.post_extension.is_degenerate() {
            edges.push(Edge::Segment(self.post_extension));
        }
        GeodesicPath::new(edges)
    }

    /// Parameter in the full curve of base parameter `w`.
    pub fn full_param(&self, w: f64) -> f64 {
        let pre = self.pre_extension.length();
        let total = pre + self.base.total_length() + self.post_extension.length();
        if total <= 0.0 {
            return 0.0;
        }
        (pre + w * self.base.total_length()) / total
    }
}

pub fn extend_to_boundary(f: &FreeSpace, g: &GeodesicPath) -> Result<ExtendedPath> {
    let obs = &f.graph.obstacles;
    let edges = g.edges();
    let first = match edges.first() {
        Some(Edge::Segment(s)) if !s.is_degenerate() => *s,
        _ => {
            return Err(Error::ExtensionBlocked(
                "path does not start with a segment".into(),
            ))
        }
    };
    let last = match edges.last() {
        Some(Edge::Segment(s)) if !s.is_degenerate() => *s,
        _ => {
            return Err(Error::ExtensionBlocked(
                "path does not end with a segment".into(),
            ))
        }
    };
    let back = -first.direction();
    let t0 = obs.ray_exit(first.a, back);
    let fwd = last.direction();
    let t1 = obs.ray_exit(last.b, fwd);
    if !t0.is_finite() || !t1.is_finite() {
        return Err(Error::ExtensionBlocked(
            "ray does not meet the boundary".into(),
        ));
    }
    Ok(ExtendedPath {
        base: g.clone(),
        pre_extension: Segment::new(first.a + back * t0, first.a),
        post_extension: Segment::new(last.b, last.b + fwd * t1),
    })
}

/// A local minimum of `w ↦ ‖γ(w) − p‖`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalClosest {
    pub w: f64,
    pub point: Point,
    pub distance: f64,
    pub is_endpoint: bool,
}

/// Derivative sign of the distance to `p` when moving along `tangent` at `x`.
fn slope(x: Point, p: Point, tangent: Point) -> f64 {
    let r = x - p;
    let n = r.norm();
    if n <= TAU {
        return 0.0;
    }
    r.dot(tangent) / n
}

const SLOPE_TOL: f64 = 1e-12;

pub fn locally_closest_points(g: &GeodesicPath, p: Point) -> Vec<LocalClosest> {
    let edges = g.edges();
    let live: Vec<usize> = (0..edges.len())
        .filter(|&k| edges[k].length() > 0.0)
        .collect();
    let mut out: Vec<LocalClosest> = Vec::new();
    let mut push = |w: f64, x: Point| {
        out.push(LocalClosest {
            w,
            point: x,
            distance: x.dist(p),
            is_endpoint: w <= 0.0 || w >= 1.0,
        });
    };
    if live.is_empty() {
        push(0.0, g.start());
        return out;
    }
    for (idx, &k) in live.iter().enumerate() {
        let e = &edges[k];
        // interior minimum
        match e {
            Edge::Segment(s) => {
                let t = s.project(p);
                if t > 0.0 && t < 1.0 {
                    push(g.param_of(k, t), s.point_at(t));
                }
            }
            Edge::Arc(a) => {
                let rel = p - a.center;
                if rel.norm() <= TAU {
                    // plateau: report its last point if it is not followed by a descent
                    let next_ok = match live.get(idx + 1) {
                        Some(&k2) => {
                            slope(edges[k2].start(), p, edges[k2].tangent_at(0.0)) >= -SLOPE_TOL
                        }
                        None => true,
                    };
                    if next_ok {
                        push(g.param_of(k, 1.0), a.end_point());
                    }
                    continue;
                }
                if let Some(s) = a.param_of_angle(rel.angle(), 0.0) {
                    if s > 0.0 && s < 1.0 {
                        push(g.param_of(k, s), a.point_at(s));
                    }
                }
            }
        }
        // junction at the start of this edge
        let x = e.start();
        let right = slope(x, p, e.tangent_at(0.0));
        let left = if idx == 0 {
            -1.0
        } else {
            let prev = &edges[live[idx - 1]];
            slope(prev.end(), p, prev.tangent_at(1.0))
        };
        if x.dist(p) <= TAU || (left <= SLOPE_TOL && right >= -SLOPE_TOL) {
            push(g.param_of(k, 0.0), x);
        }
    }
    let last = &edges[*live.last().unwrap()];
    let x = last.end();
    if x.dist(p) <= TAU || slope(x, p, last.tangent_at(1.0)) <= SLOPE_TOL {
        push(1.0, x);
    }
    out.sort_by(|a, b| a.w.total_cmp(&b.w));
    let mut merged: Vec<LocalClosest> = Vec::new();
    for c in out {
        match merged.last_mut() {
            Some(m) if c.w - m.w <= TAU => {
                let keep_endpoint = m.is_endpoint || c.is_endpoint;
                *m = LocalClosest {
                    is_endpoint: keep_endpoint,
                    ..c
                };
            }
            _ => merged.push(c),
        }
    }
    merged
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    Blocking,
    Interrupting,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockClassification {
    pub kind: BlockKind,
    pub max_overlap: f64,
    /// Locally closest approaches closer than 2, as `(w, distance)`.
    pub witnesses: Vec<(f64, f64)>,
}

/// Blocking iff the overlap exceeds `ε` by more than [`TAU`].
pub fn classify_position(g: &GeodesicPath, p: Point, eps: f64) -> BlockClassification {
    let (d, _) = g.distance_to_point(p);
    let max_overlap = (2.0 - d).max(0.0);
    let witnesses = locally_closest_points(g, p)
        .into_iter()
        .filter(|c| c.distance < 2.0)
        .map(|c| (c.w, c.distance))
        .collect();
    let kind = if max_overlap > eps + TAU {
        BlockKind::Blocking
    } else {
        BlockKind::Interrupting
    };
    BlockClassification {
        kind,
        max_overlap,
        witnesses,
    }
}

/// The blocker whose last close approach has the largest parameter, as
/// `(index into positions, w)`. Ties go to the lower index.
pub fn last_blocker(
    g: &GeodesicPath,
    positions: &[Point],
    eps: f64,
) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in positions.iter().enumerate() {
        if classify_position(g, s, eps).kind != BlockKind::Blocking {
            continue;
        }
        let w = locally_closest_points(g, s)
            .into_iter()
            .filter(|c| c.distance < 2.0 - eps - TAU)
            .map(|c| c.w)
            .fold(f64::NEG_INFINITY, f64::max);
        if !w.is_finite() {
            continue;
        }
        if w >= 1.0 - TAU {
            return Err(Error::BlockerAtPathEnd(w));
        }
        if best.map_or(true, |(_, bw)| w > bw) {
            best = Some((i, w));
        }
    }
    Ok(best)
}

/// Maximal parameter intervals, one per edge piece, where `‖γ(w) − p‖ < radius`.
pub fn proximity_pieces(g: &GeodesicPath, p: Point, radius: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (k, e) in g.edges().iter().enumerate() {
        if e.length() <= 0.0 {
            continue;
        }
        for (s0, s1) in edge_windows(e, p, radius) {
            if s1 > s0 {
                out.push((g.param_of(k, s0), g.param_of(k, s1)));
            }
        }
    }
    out
}

/// Merged parameter intervals where `‖γ(w) − p‖ < radius`.
pub fn proximity_windows(g: &GeodesicPath, p: Point, radius: f64) -> Vec<(f64, f64)> {
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in proximity_pieces(g, p, radius) {
        match merged.last_mut() {
            Some(m) if a <= m.1 + 1e-15 => m.1 = m.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged
}

fn edge_windows(e: &Edge, p: Point, radius: f64) -> Vec<(f64, f64)> {
    match e {
        Edge::Segment(s) => {
            let d = s.b - s.a;
            let f = s.a - p;
            let a = d.norm2();
            let b = 2.0 * f.dot(d);
            let c = f.norm2() - radius * radius;
            let disc = b * b - 4.0 * a * c;
            if a == 0.0 || disc <= 0.0 {
                return Vec::new();
            }
            let sq = disc.sqrt();
            let (t0, t1) = (
                ((-b - sq) / (2.0 * a)).max(0.0),
                ((-b + sq) / (2.0 * a)).min(1.0),
            );
            if t0 < t1 {
                vec![(t0, t1)]
            } else {
                Vec::new()
            }
        }
        Edge::Arc(arc) => {
            let rel = p - arc.center;
            let r = rel.norm();
            let big_r = arc.radius;
            if r <= TAU {
                return if big_r < radius {
                    vec![(0.0, 1.0)]
                } else {
                    Vec::new()
                };
            }
            let kappa = (big_r * big_r + r * r - radius * radius) / (2.0 * big_r * r);
            if kappa >= 1.0 {
                return Vec::new();
            }
            if kappa < -1.0 {
                return vec![(0.0, 1.0)];
            }
            let alpha = kappa.acos();
            let sweep = arc.sweep();
            let oc = match arc.orientation {
                Orientation::Ccw => normalize_angle(rel.angle() - arc.start_angle),
                Orientation::Cw => normalize_angle(arc.start_angle - rel.angle()),
            };
            let mut out = Vec::new();
            for shift in [-TWO_PI, 0.0, TWO_PI] {
                let (lo, hi) = (
                    (oc - alpha + shift).max(0.0),
                    (oc + alpha + shift).min(sweep),
                );
                if lo < hi {
                    out.push((lo / sweep, hi / sweep));
                }
            }
            out.sort_by(|a, b| a.0.total_cmp(&b.0));
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_space::build_free_space;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn square_with_hole() -> Workspace {
        Workspace {
            outer: vec![p(0.0, 0.0), p(10.0, 0.0), p(10.0, 10.0), p(0.0, 10.0)],
            holes: vec![vec![p(4.0, 4.0), p(4.0, 6.0), p(6.0, 6.0), p(6.0, 4.0)]],
            carved_disks: vec![],
        }
    }

    fn polyline(pts: &[Point]) -> GeodesicPath {
        GeodesicPath::new(
            pts.windows(2)
                .map(|w| Edge::Segment(Segment::new(w[0], w[1])))
                .collect(),
        )
    }

    #[test]
    fn straight_in_convex_free_space() {
        let f = build_free_space(&Workspace::rectangle(0.0, 0.0, 10.0, 10.0)).unwrap();
        let g = shortest_path(&f, p(2.0, 2.0), p(8.0, 2.0))
            .unwrap()
            .unwrap();
        assert_eq!(g.edges().len(), 1);
        assert!((g.total_length() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn wall_separates() {
        let w = Workspace::polygon(vec![
            p(0.0, 0.0),
            p(10.0, 0.0),
            p(10.0, 10.0),
            p(0.0, 10.0),
            p(0.0, 6.0),
            p(8.5, 6.0),
            p(8.5, 4.0),
            p(0.0, 4.0),
        ]);
        // the notch leaves a 1.5-wide gap at x ∈ [8.5, 10]
        let f = build_free_space(&w).unwrap();
        assert!(shortest_path(&f, p(2.0, 2.0), p(2.0, 8.0))
            .unwrap()
            .is_none());
    }

    #[test]
    fn around_hole_is_symmetric_and_tangent() {
        let f = build_free_space(&square_with_hole()).unwrap();
        let (a, b) = (p(2.0, 5.0), p(8.0, 5.0));
        let g = shortest_path(&f, a, b).unwrap().unwrap();
        let h = shortest_path(&f, b, a).unwrap().unwrap();
        assert!((g.total_length() - h.total_length()).abs() < 1e-9);
        assert!(g.total_length() > 6.0);
        assert!(g.max_joint_gap() < 1e-9);
        for w in g.edges().windows(2) {
            let t0 = w[0].tangent_at(1.0);
            let t1 = w[1].tangent_at(0.0);
            assert!(t0.dist(t1) < 1e-7, "kink between {:?} and {:?}", w[0], w[1]);
        }
        assert!(g.contained_in(&f, 1000));
        assert!(g.start().approx_eq(a, 1e-12) && g.end().approx_eq(b, 1e-12));
    }

    #[test]
    fn path_length_examples() {
        let g = GeodesicPath::segment(p(0.0, 0.0), p(6.0, 0.0));
        assert!((path_length(&g, 0.25, 0.75) - 3.0).abs() < 1e-12);
        assert_eq!(path_length(&g, 0.4, 0.4), 0.0);
        let half = GeodesicPath::new(vec![Edge::Arc(Arc::new(
            p(0.0, 0.0),
            1.0,
            0.0,
            PI,
            Orientation::Ccw,
        ))]);
        assert!((path_length(&half, 0.0, 1.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn sub_path_and_concat_preserve_length() {
        let g = polyline(&[p(0.0, 0.0), p(3.0, 0.0), p(3.0, 4.0)]);
        let a = g.sub_path(0.0, 0.3);
        let b = g.sub_path(0.3, 1.0);
        assert!((a.total_length() + b.total_length() - 7.0).abs() < 1e-12);
        let c = a.concat(&b);
        assert!((c.total_length() - 7.0).abs() < 1e-12);
        assert!(c.point_at(0.5).approx_eq(g.point_at(0.5), 1e-12));
    }

    #[test]
    fn extension_examples() {
        let f = build_free_space(&Workspace::rectangle(0.0, 0.0, 10.0, 10.0)).unwrap();
        let g = GeodesicPath::segment(p(3.0, 5.0), p(7.0, 5.0));
        let e = extend_to_boundary(&f, &g).unwrap();
        assert!(e.pre_extension.a.approx_eq(p(1.0, 5.0), 1e-8));
        assert!(e.post_extension.b.approx_eq(p(9.0, 5.0), 1e-8));

        // towards the corner (9, 9) of F
        let g = GeodesicPath::segment(p(3.0, 3.0), p(7.0, 7.0));
        let e = extend_to_boundary(&f, &g).unwrap();
        assert!(e.post_extension.b.approx_eq(p(9.0, 9.0), 1e-8));

        // already on ∂F
        let g = GeodesicPath::segment(p(5.0, 5.0), p(9.0, 5.0));
        let e = extend_to_boundary(&f, &g).unwrap();
        assert!(e.post_extension.length() < 1e-8);

        let arc = GeodesicPath::new(vec![Edge::Arc(Arc::new(
            p(5.0, 5.0),
            1.0,
            0.0,
            1.0,
            Orientation::Ccw,
        ))]);
        assert!(matches!(
            extend_to_boundary(&f, &arc),
            Err(Error::ExtensionBlocked(_))
        ));
    }

    #[test]
    fn extension_hits_oblique_corner() {
        // the ray's first boundary contact is checked against a brute-force march
        let f = build_free_space(&square_with_hole()).unwrap();
        let g = GeodesicPath::segment(p(2.0, 2.0), p(2.5, 1.5));
        let e = extend_to_boundary(&f, &g).unwrap();
        let d = g.edges()[0].tangent_at(0.0);
        let mut t = 0.0;
        while contains_free(&f, p(2.5, 1.5) + d * (t + 1e-6)) {
            t += 1e-6;
        }
        assert!((e.post_extension.length() - t).abs() < 1e-5);
    }

    #[test]
    fn locally_closest_examples() {
        let g = GeodesicPath::segment(p(-5.0, 0.0), p(5.0, 0.0));
        let lc = locally_closest_points(&g, p(0.0, 1.0));
        assert_eq!(lc.len(), 1);
        assert!(
            (lc[0].w - 0.5).abs() < 1e-12
                && (lc[0].distance - 1.0).abs() < 1e-12
                && !lc[0].is_endpoint
        );

        let s = polyline(&[
            p(-4.0, 0.0),
            p(0.0, 1.5),
            p(4.0, 0.0),
            p(4.0, 3.0),
            p(0.0, 3.0),
        ]);
        let q = p(0.0, 2.2);
        let lc: Vec<_> = locally_closest_points(&s, q)
            .into_iter()
            .filter(|c| c.distance < 2.0)
            .collect();
        assert_eq!(lc.len(), 2);
        let sampled_mins = sampled_local_minima(&s, q, 200_000);
        assert_eq!(sampled_mins.iter().filter(|(_, d)| *d < 2.0).count(), 2);

        let lc = locally_closest_points(&g, p(7.0, 0.0));
        assert_eq!(lc.len(), 1);
        assert!(lc[0].is_endpoint && lc[0].w == 1.0);
    }

    fn sampled_local_minima(g: &GeodesicPath, q: Point, n: usize) -> Vec<(f64, f64)> {
        let d: Vec<f64> = (0..=n)
            .map(|i| g.point_at(i as f64 / n as f64).dist(q))
            .collect();
        let mut out = Vec::new();
        for i in 0..=n {
            let l = if i == 0 { f64::INFINITY } else { d[i - 1] };
            let r = if i == n { f64::INFINITY } else { d[i + 1] };
            if d[i] <= l && d[i] < r {
                out.push((i as f64 / n as f64, d[i]));
            }
        }
        out
    }

    #[test]
    fn plateau_reports_largest_w() {
        let g = GeodesicPath::new(vec![
            Edge::Segment(Segment::new(p(-3.0, 1.0), p(0.0, 1.0))),
            Edge::Arc(Arc::new(p(0.0, 0.0), 1.0, PI / 2.0, 0.0, Orientation::Cw)),
            Edge::Segment(Segment::new(p(1.0, 0.0), p(1.0, -3.0))),
        ]);
        let lc = locally_closest_points(&g, p(0.0, 0.0));
        let w_arc_end = g.param_of(1, 1.0);
        assert!(lc.iter().any(|c| (c.w - w_arc_end).abs() < 1e-12));
        assert!(!lc.iter().any(|c| c.w > 0.0 && c.w < w_arc_end - 1e-9));
    }

    #[test]
    fn classification_examples() {
        let g = GeodesicPath::segment(p(-5.0, 0.0), p(5.0, 0.0));
        let eps = 0.3;
        let c = classify_position(&g, p(0.0, 2.0), eps);
        assert_eq!(c.kind, BlockKind::Interrupting);
        assert_eq!(c.max_overlap, 0.0);
        let c = classify_position(&g, p(0.0, 2.0 - eps), eps);
        assert_eq!(c.kind, BlockKind::Interrupting);
        let c = classify_position(&g, p(0.0, 2.0 - eps - 0.1), eps);
        assert_eq!(c.kind, BlockKind::Blocking);
        assert!((c.max_overlap - (eps + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn last_blocker_examples() {
        let g = GeodesicPath::segment(p(0.0, 0.0), p(10.0, 0.0));
        let s = [p(3.0, 1.0), p(7.0, -1.0), p(5.0, 6.0)];
        let (i, w) = last_blocker(&g, &s, 0.0).unwrap().unwrap();
        assert_eq!(i, 1);
        assert!((w - 0.7).abs() < 1e-12);
        assert_eq!(last_blocker(&g, &s[2..], 0.0).unwrap(), None);
        let zig = polyline(&[
            p(0.0, 0.0),
            p(2.0, 1.0),
            p(4.0, 0.0),
            p(6.0, 1.0),
            p(10.0, 0.0),
            p(20.0, 0.0),
        ]);
        let (i, w) = last_blocker(&zig, &[p(4.0, 1.5)], 0.0).unwrap().unwrap();
        assert_eq!(i, 0);
        let lc = locally_closest_points(&zig, p(4.0, 1.5));
        let qualifying: Vec<f64> = lc
            .iter()
            .filter(|c| c.distance < 2.0)
            .map(|c| c.w)
            .collect();
        assert!(qualifying.len() >= 2);
        assert_eq!(w, qualifying.iter().copied().fold(f64::MIN, f64::max));
    }

    #[test]
    fn blocker_at_end_is_rejected() {
        let g = GeodesicPath::segment(p(0.0, 0.0), p(10.0, 0.0));
        assert!(matches!(
            last_blocker(&g, &[p(11.0, 0.0)], 0.0),
            Err(Error::BlockerAtPathEnd(_))
        ));
    }

    #[test]
    fn windows_match_sampling() {
        let g = GeodesicPath::new(vec![
            Edge::Segment(Segment::new(p(-3.0, 1.0), p(0.0, 1.0))),
            Edge::Arc(Arc::new(p(0.0, 0.0), 1.0, PI / 2.0, 0.0, Orientation::Cw)),
            Edge::Segment(Segment::new(p(1.0, 0.0), p(1.0, -3.0))),
        ]);
        let q = p(1.5, 1.5);
        let win = proximity_windows(&g, q, 2.0);
        for i in 0..=10_000 {
            let w = i as f64 / 10_000.0;
            let inside = g.point_at(w).dist(q) < 2.0;
            let claimed = win.iter().any(|&(a, b)| w > a - 1e-9 && w < b + 1e-9);
            assert!(!inside || claimed, "w={w}");
            let strictly = win.iter().any(|&(a, b)| w > a + 1e-9 && w < b - 1e-9);
            assert!(!strictly || inside, "w={w}");
        }
    }

    #[test]
    fn serde_round_trip() {
        let g = GeodesicPath::new(vec![
            Edge::Segment(Segment::new(p(-3.0, 1.0), p(0.0, 1.0))),
            Edge::Arc(Arc::new(p(0.0, 0.0), 1.0, PI / 2.0, 0.0, Orientation::Cw)),
        ]);
        let s = serde_json::to_string(&g).unwrap();
        let back: GeodesicPath = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    fn random_free_point(f: &FreeSpace, seed: u64) -> Option<Point> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (x0, x1, y0, y1) = crate::fixtures::bounds(&f.source.outer);
        for _ in 0..1000 {
            let q = p(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
            if contains_free(f, q) {
                return Some(q);
            }
        }
        None
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn geodesic_properties(seed in 0u64..10_000) {
            let w = crate::fixtures::random_workspace(seed, 3, true);
            let f = build_free_space(&w).unwrap();
            let a = random_free_point(&f, seed ^ 1);
            let b = random_free_point(&f, seed ^ 2);
            prop_assume!(a.is_some() && b.is_some());
            let (a, b) = (a.unwrap(), b.unwrap());
            let g = shortest_path(&f, a, b).unwrap();
            let h = shortest_path(&f, b, a).unwrap();
            prop_assert_eq!(g.is_some(), h.is_some());
            if let (Some(g), Some(h)) = (g, h) {
                prop_assert!((g.total_length() - h.total_length()).abs() < 1e-9);
                prop_assert!(g.total_length() >= a.dist(b) - 1e-12);
                prop_assert!(g.contained_in(&f, 1000));
                prop_assert!(g.max_joint_gap() < 1e-9);
            }
        }

        #[test]
        fn classification_monotone_in_eps(px in -3.0..3.0f64, py in -3.0..3.0f64, e1 in 0.0..1.0f64, e2 in 0.0..1.0f64) {
            let g = GeodesicPath::new(vec![
                Edge::Segment(Segment::new(p(-3.0, 1.0), p(0.0, 1.0))),
                Edge::Arc(Arc::new(p(0.0, 0.0), 1.0, PI / 2.0, 0.0, Orientation::Cw)),
                Edge::Segment(Segment::new(p(1.0, 0.0), p(1.0, -3.0))),
            ]);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let q = p(px, py);
            if classify_position(&g, q, lo).kind == BlockKind::Interrupting {
                prop_assert_eq!(classify_position(&g, q, hi).kind, BlockKind::Interrupting);
            }
        }

        #[test]
        fn locally_closest_matches_sampling(px in -4.0..4.0f64, py in -4.0..4.0f64) {
            let g = GeodesicPath::new(vec![
                Edge::Segment(Segment::new(p(-3.0, 1.0), p(0.0, 1.0))),
                Edge::Arc(Arc::new(p(0.0, 0.0), 1.0, PI / 2.0, 0.0, Orientation::Cw)),
                Edge::Segment(Segment::new(p(1.0, 0.0), p(1.0, -3.0))),
            ]);
            let q = p(px, py);
            prop_assume!(q.dist(p(0.0, 0.0)) > 1e-3);
            let lc = locally_closest_points(&g, q);
            // the global minimum is among the local minima
            let (d, _) = g.distance_to_point(q);
            prop_assert!(lc.iter().any(|c| (c.distance - d).abs() < 1e-12));
            // every sampled strict local minimum is near a reported one
            for (w, _) in sampled_local_minima(&g, q, 20_000) {
                prop_assert!(lc.iter().any(|c| (c.w - w).abs() < 1e-3), "missing minimum near w={}", w);
            }
        }
    }
}
