//! The corridor-opening planner for simple polygons.
//!
//! Robots are routed one target at a time along a fixed set of geodesics.
//! Before each route is driven, every other robot steps 2 units away from the
//! route, perpendicular to the straight piece of the route its cell is based
//! on; after the drive all of them step back. The route is extended to the
//! free-space boundary at both ends, and the regions on either side of it are
//! split into cells by the bisector rays at the reflex vertices it bends
//! around.

use crate::assignment::assignment_path_set;
use crate::error::{Error, Result};
use crate::free_space::{build_free_space, components_with_counts, FreeSpace};
use crate::geodesics::{extend_to_boundary, shortest_path, ExtendedPath, GeodesicPath, Obstacles};
use crate::geometry::*;
use crate::instance::Instance;
use crate::validator::{measure_separation, MotionPlan, Phase, PhaseKind, Primitive, RobotMotion};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point,
    pub direction: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExodusCell {
    /// 1 for the left of the extended path, 2 for the right.
    pub pocket_side: u8,
    /// Pockets on one side are numbered along the path; a new pocket starts
    /// after each arc whose reflex vertex lies on that side.
    pub pocket_index: usize,
    /// Bisector rays at the ends of the base edge, at most two.
    pub bisectors: Vec<Ray>,
    /// Straight piece of the path the cell is based on; zero length between
    /// two arcs that meet without a segment.
    pub base_edge: Segment,
    /// Unit normal of the base edge pointing into the cell.
    pub direction: Point,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Run {
    a: Point,
    b: Point,
    dir: Point,
}

/// Runs and arcs of a path, alternating: arc `k` lies between runs `k` and `k + 1`.
#[derive(Clone, Debug, PartialEq)]
struct Skeleton {
    runs: Vec<Run>,
    arcs: Vec<Arc>,
    /// Piece of each path edge; `None` for degenerate segments.
    edge_piece: Vec<Option<Piece>>,
    cells: Vec<ExodusCell>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Piece {
    Run(usize),
    Arc(usize),
}

/// A closed boundary chain of the free space with arc-length offsets.
#[derive(Clone, Debug)]
struct BoundaryLoop {
    edges: Vec<Edge>,
    offsets: Vec<f64>,
    length: f64,
}

impl BoundaryLoop {
    fn new(edges: &[Edge]) -> Self {
        let mut offsets = Vec::with_capacity(edges.len());
        let mut length = 0.0;
        for e in edges {
            offsets.push(length);
            length += e.length();
        }
        BoundaryLoop {
            edges: edges.to_vec(),
            offsets,
            length,
        }
    }

    /// Arc-length position of the loop point nearest to `p`, and its distance.
    fn locate(&self, p: Point) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        for (e, off) in self.edges.iter().zip(&self.offsets) {
            let prox = dist_point_edge(p, e);
            if prox.distance < best.0 {
                best = (prox.distance, off + prox.param * e.length());
            }
        }
        (best.1, best.0)
    }
}

/// Where a point sits relative to the corridor partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellLocation {
    Cell(usize),
    /// A free-space component the extended path does not enter.
    OtherComponent,
}

/// Cells of an extended path and the data used to locate points in them.
///
/// Each side of the path is split into pockets by the arcs whose reflex
/// vertex lies on that side, and pockets are split into cells by chords
/// running from the midpoint of every other arc, along its bisector, to the
/// free-space boundary. Each cell belongs to exactly one straight run.
#[derive(Clone, Debug)]
pub struct CellDecomposition {
    pub path: GeodesicPath,
    /// Two cells per straight run: left at `2r`, right at `2r + 1`.
    pub cells: Vec<ExodusCell>,
    skeleton: Skeleton,
    /// Chord of arc `k`, on its outer side.
    chords: Vec<Segment>,
    obstacles: Obstacles,
    loops: Vec<BoundaryLoop>,
    main_loop: usize,
    start_pos: f64,
    end_pos: f64,
    /// Boundary offsets of the arc markers on each side, in the order the
    /// loop meets them: side 1 measured from the path end, side 2 from the
    /// path start.
    markers: [Vec<f64>; 2],
}

impl PartialEq for CellDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.path == other.path && self.cells == other.cells
    }
}

fn outer_side(arc: &Arc) -> u8 {
    match arc.orientation {
        Orientation::Ccw => 2,
        Orientation::Cw => 1,
    }
}

fn side_normal(dir: Point, side: u8) -> Point {
    if side == 1 {
        dir.perp()
    } else {
        -dir.perp()
    }
}

fn skeleton(path: &GeodesicPath) -> Skeleton {
    let mut runs: Vec<Run> = Vec::new();
    let mut arcs: Vec<Arc> = Vec::new();
    let mut edge_piece = Vec::with_capacity(path.edges().len());
    // whether the last piece is a run that may still grow
    let mut open_run = false;
    for e in path.edges() {
        match e {
            Edge::Segment(s) => {
                if s.is_degenerate() {
                    edge_piece.push(None);
                    continue;
                }
                if open_run {
                    runs.last_mut().unwrap().b = s.b;
                } else {
                    runs.push(Run {
                        a: s.a,
                        b: s.b,
                        dir: s.direction(),
                    });
                    open_run = true;
                }
                edge_piece.push(Some(Piece::Run(runs.len() - 1)));
            }
            Edge::Arc(arc) => {
                if !open_run {
                    let p = arc.start_point();
                    runs.push(Run {
                        a: p,
                        b: p,
                        dir: arc.tangent_at(0.0),
                    });
                }
                arcs.push(*arc);
                edge_piece.push(Some(Piece::Arc(arcs.len() - 1)));
                open_run = false;
            }
        }
    }
    if !open_run {
        let (p, dir) = match arcs.last() {
            Some(a) => (a.end_point(), a.tangent_at(1.0)),
            None => (path.end(), Point::new(1.0, 0.0)),
        };
        runs.push(Run { a: p, b: p, dir });
    }
    for r in &mut runs {
        if r.a.dist(r.b) > TAU {
            r.dir = (r.b - r.a).normalized();
        }
    }

    let mut cells = Vec::with_capacity(2 * runs.len());
    let mut pocket = [0usize; 2];
    for (r, run) in runs.iter().enumerate() {
        let before = r.checked_sub(1).map(|k| arcs[k]);
        let after = arcs.get(r).copied();
        if let Some(a) = before {
            // the reflex vertex sits on the inner side and splits that side's pocket
            let inner = 3 - outer_side(&a);
            pocket[inner as usize - 1] += 1;
        }
        for side in [1u8, 2u8] {
            let bisectors = [before, after]
                .into_iter()
                .flatten()
                .filter(|a| outer_side(a) == side)
                .map(|a| Ray {
                    origin: a.center,
                    direction: (a.point_at(0.5) - a.center).normalized(),
                })
                .collect();
            cells.push(ExodusCell {
                pocket_side: side,
                pocket_index: pocket[side as usize - 1],
                bisectors,
                base_edge: Segment::new(run.a, run.b),
                direction: side_normal(run.dir, side),
            });
        }
    }
    Skeleton {
        runs,
        arcs,
        edge_piece,
        cells,
    }
}

/// First crossing of `seg` with the path: `(t along seg, edge, param on edge)`.
fn first_path_hit(
    path: &GeodesicPath,
    pieces: &[Option<Piece>],
    seg: &Segment,
) -> Option<(f64, usize, f64)> {
    let mut best: Option<(f64, usize, f64)> = None;
    let mut take = |t: f64, j: usize, u: f64| {
        if best.map_or(true, |b| t < b.0) {
            best = Some((t, j, u));
        }
    };
    for (j, e) in path.edges().iter().enumerate() {
        if pieces[j].is_none() {
            continue;
        }
        match e {
            Edge::Segment(s) => {
                if let Some((t, u)) = segment_intersection(seg, s) {
                    take(t, j, u);
                }
            }
            Edge::Arc(a) => {
                for t in segment_circle_params(seg, a.circle()) {
                    let x = seg.point_at(t);
                    if let Some(u) = a.param_of_angle((x - a.center).angle(), 1e-12) {
                        take(t, j, u);
                    }
                }
            }
        }
    }
    best
}

pub fn build_pockets_and_cells(
    f: &FreeSpace,
    extended: &ExtendedPath,
) -> Result<CellDecomposition> {
    if !f.source.is_simple_polygon() {
        return Err(Error::NotSimplePolygon);
    }
    let path = extended.full();
    let sk = skeleton(&path);
    let obstacles = f.graph.obstacles.clone();
    let inconsistent = |what: &str| Error::PlanningFailure(format!("corridor partition: {what}"));

    let mut chords = Vec::with_capacity(sk.arcs.len());
    for a in &sk.arcs {
        let m = a.point_at(0.5);
        let d = (m - a.center).normalized();
        let t = obstacles.ray_exit(m, d);
        if !t.is_finite() {
            return Err(inconsistent("bisector does not meet the boundary"));
        }
        let chord = Segment::new(m, m + d * t);
        let probe = Segment::new(m + d * (t * 1e-6).min(1e-6), chord.b);
        if t > 1e-6 && first_path_hit(&path, &sk.edge_piece, &probe).is_some() {
            return Err(inconsistent("bisector crosses the path"));
        }
        chords.push(chord);
    }

    let loops: Vec<BoundaryLoop> = f
        .boundary_loops
        .iter()
        .map(|l| BoundaryLoop::new(l))
        .collect();
    let nearest_loop = |p: Point| {
        loops
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let (pos, d) = l.locate(p);
                (i, pos, d)
            })
            .min_by(|a, b| a.2.total_cmp(&b.2))
    };
    let (main_loop, start_pos, _) =
        nearest_loop(path.start()).ok_or_else(|| inconsistent("empty free space"))?;
    let boundary = &loops[main_loop];
    let end_pos = boundary.locate(path.end()).0;
    let len = boundary.length;
    let mut markers: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (k, a) in sk.arcs.iter().enumerate() {
        let outer = outer_side(a);
        let touch = boundary.locate(a.point_at(0.5)).0;
        let chord_end = boundary.locate(chords[k].b).0;
        let (on1, on2) = if outer == 1 {
            (chord_end, touch)
        } else {
            (touch, chord_end)
        };
        markers[0].push((on1 - end_pos).rem_euclid(len));
        markers[1].push((on2 - start_pos).rem_euclid(len));
    }
    markers[0].reverse();
    let spans = [
        (start_pos - end_pos).rem_euclid(len),
        (end_pos - start_pos).rem_euclid(len),
    ];
    for s in 0..2 {
        let ordered = markers[s].windows(2).all(|w| w[0] < w[1]);
        if !ordered || markers[s].last().is_some_and(|&x| x >= spans[s]) {
            return Err(inconsistent("boundary markers out of order"));
        }
    }

    Ok(CellDecomposition {
        path,
        cells: sk.cells.clone(),
        skeleton: sk,
        chords,
        obstacles,
        loops,
        main_loop,
        start_pos,
        end_pos,
        markers,
    })
}

/// Cell containing `q`.
///
/// A ray from `q` towards the nearest point of the path stops at the first
/// point where it meets the path or the free-space boundary. That point
/// fixes a cell: by the side of the path it is approached from, or by its
/// position along the boundary between the arc markers. Walking back to
/// `q`, every chord crossed moves one cell along the pocket.
pub fn cell_index_for(cells: &CellDecomposition, q: Point) -> Result<CellLocation> {
    let sk = &cells.skeleton;
    let inconsistent =
        || Error::PlanningFailure("corridor partition: inconsistent point location".into());
    let (dx, w) = cells.path.distance_to_point(q);
    if dx < TAU || cells.chords.iter().any(|c| c.dist_point(q) < TAU) {
        return Err(Error::AmbiguousCell);
    }
    let d = (cells.path.point_at(w) - q) * (1.0 / dx);
    let tf = cells.obstacles.ray_exit(q, d);
    if !tf.is_finite() || tf <= 0.0 {
        return Err(inconsistent());
    }
    let reach = Segment::new(q, q + d * tf);

    let (mut run, side, land) = match first_path_hit(&cells.path, &sk.edge_piece, &reach) {
        Some((t, j, u)) => {
            let y = reach.point_at(t);
            match sk.edge_piece[j].expect("hits skip degenerate edges") {
                Piece::Run(r) => {
                    let c = sk.runs[r].dir.cross(-d);
                    if c.abs() < 1e-9 {
                        return Err(Error::AmbiguousCell);
                    }
                    (r, if c > 0.0 { 1 } else { 2 }, y)
                }
                Piece::Arc(k) => {
                    let a = &sk.arcs[k];
                    if (u - 0.5).abs() * a.sweep() < TAU {
                        return Err(Error::AmbiguousCell);
                    }
                    let side = if q.dist(a.center) > a.radius {
                        outer_side(a)
                    } else {
                        3 - outer_side(a)
                    };
                    (if u < 0.5 { k } else { k + 1 }, side, y)
                }
            }
        }
        None => {
            let b = reach.b;
            let (li, pos, _) = cells
                .loops
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let (pos, d) = l.locate(b);
                    (i, pos, d)
                })
                .min_by(|a, b| a.2.total_cmp(&b.2))
                .ok_or_else(inconsistent)?;
            if li != cells.main_loop {
                return Ok(CellLocation::OtherComponent);
            }
            let len = cells.loops[li].length;
            let from_start = (pos - cells.start_pos).rem_euclid(len);
            let from_end = (pos - cells.end_pos).rem_euclid(len);
            let span = (cells.end_pos - cells.start_pos).rem_euclid(len);
            let near = |x: f64, y: f64| (x - y).abs() < TAU;
            if near(from_start, 0.0)
                || near(from_end, 0.0)
                || near(from_start, len)
                || near(from_end, len)
            {
                return Err(Error::AmbiguousCell);
            }
            let (side, delta) = if from_start < span {
                (2u8, from_start)
            } else {
                (1u8, from_end)
            };
            let marks = &cells.markers[side as usize - 1];
            if marks.iter().any(|&m| near(m, delta)) {
                return Err(Error::AmbiguousCell);
            }
            let before = marks.iter().filter(|&&m| m < delta).count();
            let run = if side == 2 {
                before
            } else {
                sk.runs.len() - 1 - before
            };
            (run, side, b)
        }
    };

    let walk = Segment::new(q, land);
    let mut crossings: Vec<(f64, usize)> = cells
        .chords
        .iter()
        .enumerate()
        .filter_map(|(k, c)| segment_intersection(&walk, c).map(|(t, _)| (t, k)))
        .filter(|&(t, _)| t < 1.0 - 1e-9)
        .collect();
    crossings.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (_, k) in crossings {
        if outer_side(&sk.arcs[k]) != side {
            return Err(inconsistent());
        }
        run = if run == k {
            k + 1
        } else if run == k + 1 {
            k
        } else {
            return Err(inconsistent());
        };
    }
    Ok(CellLocation::Cell(2 * run + side as usize - 1))
}

/// Opening direction at `q`. Robots in a component the path does not enter
/// all share one fixed direction.
pub fn cell_direction_for(cells: &CellDecomposition, q: Point) -> Result<Point> {
    Ok(match cell_index_for(cells, q)? {
        CellLocation::Cell(k) => cells.cells[k].direction,
        CellLocation::OtherComponent => Point::new(1.0, 0.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorridorMove {
    pub anchor: Point,
    /// `None` for a robot that stays put.
    pub displacement: Option<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorridorMotion {
    pub kind: PhaseKind,
    /// One entry per occupied position, in input order.
    pub moves: Vec<CorridorMove>,
}

impl CorridorMotion {
    fn motions(&self) -> Vec<RobotMotion> {
        self.moves
            .iter()
            .enumerate()
            .map(|(robot, mv)| RobotMotion {
                robot,
                primitive: match mv.displacement {
                    Some(v) => Primitive::LinearDisplace {
                        anchor: mv.anchor,
                        vector: v,
                    },
                    None => Primitive::Stay { anchor: mv.anchor },
                },
            })
            .collect()
    }

    /// Position of every robot once the motion completes.
    pub fn final_positions(&self) -> Vec<Point> {
        self.moves
            .iter()
            .map(|mv| mv.displacement.map_or(mv.anchor, |v| mv.anchor + v))
            .collect()
    }
}

/// The opening displacement of every robot but the driver and its reversal.
pub fn corridor_motion(
    occupied: &[Point],
    driver_index: usize,
    cells: &CellDecomposition,
) -> Result<(CorridorMotion, CorridorMotion)> {
    for i in 0..occupied.len() {
        for j in (i + 1)..occupied.len() {
            if occupied[i].dist(occupied[j]) < 2.0 - TAU {
                return Err(Error::SeparationViolation(format!(
                    "robots {i} and {j} overlap"
                )));
            }
        }
    }
    let mut open = Vec::with_capacity(occupied.len());
    let mut close = Vec::with_capacity(occupied.len());
    for (i, &q) in occupied.iter().enumerate() {
        if i == driver_index {
            open.push(CorridorMove {
                anchor: q,
                displacement: None,
            });
            close.push(CorridorMove {
                anchor: q,
                displacement: None,
            });
            continue;
        }
        let v = cell_direction_for(cells, q)? * 2.0;
        open.push(CorridorMove {
            anchor: q,
            displacement: Some(v),
        });
        close.push(CorridorMove {
            anchor: q + v,
            displacement: Some(-v),
        });
    }
    Ok((
        CorridorMotion {
            kind: PhaseKind::Open,
            moves: open,
        },
        CorridorMotion {
            kind: PhaseKind::Close,
            moves: close,
        },
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExodusIteration {
    pub target: usize,
    pub driver: usize,
    pub path: GeodesicPath,
    pub cells: CellDecomposition,
    pub open: CorridorMotion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExodusPlan {
    pub plan: MotionPlan,
    /// Total length of the routes: the optimal assignment, or the sum of
    /// the per-pair geodesics when labeled.
    pub assignment_total: f64,
    pub iterations: Vec<ExodusIteration>,
}

impl ExodusPlan {
    /// `L + 4m² − 4m`.
    pub fn length_bound(&self) -> f64 {
        let m = self.iterations.len() as f64;
        self.assignment_total + 4.0 * m * m - 4.0 * m
    }
}

pub fn plan_exodus(instance: &Instance, labeled: bool) -> Result<ExodusPlan> {
    instance.check_shape()?;
    if !instance.workspace.is_simple_polygon() {
        return Err(Error::NotSimplePolygon);
    }
    let ws = instance.workspace.normalized()?;
    let sep = measure_separation(instance);
    if sep.rho() < 2.0 {
        return Err(Error::SeparationViolation(format!(
            "robot separation {:.6} below 2",
            sep.rho()
        )));
    }
    if sep.omega < 3.0 {
        return Err(Error::SeparationViolation(format!(
            "obstacle separation {:.6} below 3",
            sep.omega
        )));
    }
    let f = build_free_space(&ws)?;
    let m = instance.m();

    // routes[target] = (robot, path)
    let mut routes: Vec<Option<(usize, GeodesicPath)>> = vec![None; m];
    let assignment_total;
    if labeled {
        let mut total = 0.0;
        for i in 0..m {
            let path =
                shortest_path(&f, instance.starts[i], instance.targets[i])?.ok_or_else(|| {
                    Error::InfeasibleInstance(format!("start {i} cannot reach its target"))
                })?;
            total += path.total_length();
            routes[i] = Some((i, path));
        }
        assignment_total = total;
    } else {
        if components_with_counts(&f, &instance.starts, &instance.targets)?
            .iter()
            .any(|c| c.starts != c.targets)
        {
            return Err(Error::InfeasibleInstance(
                "a free-space component holds unequal numbers of starts and targets".into(),
            ));
        }
        let set =
            assignment_path_set(&f, &instance.starts, &instance.targets).map_err(|e| match e {
                Error::InfeasibleMatching => {
                    Error::InfeasibleInstance("no perfect matching".into())
                }
                e => e,
            })?;
        assignment_total = set.total_length;
        for p in set.pairs {
            routes[p.target_index] = Some((p.start_index, p.path));
        }
    }

    let mut position = instance.starts.clone();
    let mut phases = Vec::with_capacity(3 * m);
    let mut iterations = Vec::with_capacity(m);
    for (target, route) in routes.into_iter().enumerate() {
        let (driver, path) = route.expect("every target is routed");
        let extended = extend_to_boundary(&f, &path)?;
        let cells = build_pockets_and_cells(&f, &extended)?;
        let (open, close) = corridor_motion(&position, driver, &cells)?;
        let displaced = open.final_positions();
        phases.push(Phase {
            kind: PhaseKind::Open,
            motions: open.motions(),
        });
        let traverse = (0..m)
            .map(|r| RobotMotion {
                robot: r,
                primitive: if r == driver {
                    Primitive::TraversePath { path: path.clone() }
                } else {
                    Primitive::Stay {
                        anchor: displaced[r],
                    }
                },
            })
            .collect();
        phases.push(Phase {
            kind: PhaseKind::Traverse,
            motions: traverse,
        });
        position[driver] = instance.targets[target];
        let mut close_motions = close.motions();
        close_motions[driver].primitive = Primitive::Stay {
            anchor: position[driver],
        };
        phases.push(Phase {
            kind: PhaseKind::Close,
            motions: close_motions,
        });
        iterations.push(ExodusIteration {
            target,
            driver,
            path,
            cells,
            open,
        });
    }
    Ok(ExodusPlan {
        plan: MotionPlan { phases },
        assignment_total,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_space::Workspace;
    use crate::validator::{plan_total_length, validate_plan};
    use std::f64::consts::PI;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn l_shape() -> Workspace {
        Workspace::polygon(vec![
            p(0.0, 0.0),
            p(20.0, 0.0),
            p(20.0, 20.0),
            p(10.0, 20.0),
            p(10.0, 10.0),
            p(0.0, 10.0),
        ])
    }

    fn decomposition(ws: &Workspace, s: Point, t: Point) -> CellDecomposition {
        let f = build_free_space(ws).unwrap();
        let g = shortest_path(&f, s, t).unwrap().unwrap();
        build_pockets_and_cells(&f, &extend_to_boundary(&f, &g).unwrap()).unwrap()
    }

    #[test]
    fn straight_path_has_one_cell_per_side() {
        let d = decomposition(
            &Workspace::rectangle(0.0, 0.0, 20.0, 10.0),
            p(4.0, 5.0),
            p(15.0, 5.0),
        );
        assert_eq!(d.cells.len(), 2);
        assert!(d
            .cells
            .iter()
            .all(|c| c.bisectors.is_empty() && c.pocket_index == 0));
        assert!(d.cells[0].direction.approx_eq(p(0.0, 1.0), 1e-15));
        assert!(d.cells[1].direction.approx_eq(p(0.0, -1.0), 1e-15));
        assert!(d.cells[0].base_edge.a.approx_eq(p(1.0, 5.0), 1e-8));
        assert!(d.cells[0].base_edge.b.approx_eq(p(19.0, 5.0), 1e-8));
        assert!(cell_direction_for(&d, p(8.0, 7.5))
            .unwrap()
            .approx_eq(p(0.0, 1.0), 1e-15));
    }

    #[test]
    fn bend_splits_the_outer_pocket_by_a_bisector() {
        let d = decomposition(&l_shape(), p(3.0, 5.0), p(15.0, 17.0));
        assert_eq!(d.cells.len(), 4);
        // the path turns left around (10, 10): the outer side is the right
        let right: Vec<&ExodusCell> = d.cells.iter().filter(|c| c.pocket_side == 2).collect();
        assert!(right
            .iter()
            .all(|c| c.pocket_index == 0 && c.bisectors.len() == 1));
        let ray = right[0].bisectors[0];
        assert!(ray.origin.approx_eq(p(10.0, 10.0), 1e-12));
        assert_eq!(right[0].bisectors, right[1].bisectors);
        let left: Vec<&ExodusCell> = d.cells.iter().filter(|c| c.pocket_side == 1).collect();
        assert_eq!(
            left.iter().map(|c| c.pocket_index).collect::<Vec<_>>(),
            vec![0, 1]
        );
        assert!(left.iter().all(|c| c.bisectors.is_empty()));
        // the bisector halves the angle between the two runs
        let (u0, u1) = (
            right[0].base_edge.direction(),
            right[1].base_edge.direction(),
        );
        let a0 = ray.direction.dot(-right[0].direction);
        let a1 = ray.direction.dot(-right[1].direction);
        assert!((a0 - a1).abs() < 1e-12, "{u0:?} {u1:?}");
    }

    #[test]
    fn start_cell_has_one_bisector() {
        let d = decomposition(&l_shape(), p(3.0, 5.0), p(15.0, 17.0));
        let start = p(3.0, 5.0) + p(0.3, -1.0);
        assert_eq!(cell_index_for(&d, start).unwrap(), CellLocation::Cell(1));
        let k = 1;
        assert_eq!(d.cells[k].bisectors.len(), 1);
    }

    #[test]
    fn wedge_points_follow_the_bisector() {
        let d = decomposition(&l_shape(), p(3.0, 5.0), p(15.0, 17.0));
        let ray = d.cells[1].bisectors[0];
        let ang = ray.direction.angle();
        let before = ray.origin + Point::polar(3.0, ang - 0.1);
        let after = ray.origin + Point::polar(3.0, ang + 0.1);
        assert_eq!(
            cell_direction_for(&d, before).unwrap(),
            d.cells[1].direction
        );
        assert_eq!(cell_direction_for(&d, after).unwrap(), d.cells[3].direction);
        assert_eq!(
            cell_direction_for(&d, ray.origin + ray.direction * 3.0),
            Err(Error::AmbiguousCell)
        );
    }

    #[test]
    fn robots_in_one_cell_share_a_direction() {
        let d = decomposition(
            &Workspace::rectangle(0.0, 0.0, 20.0, 10.0),
            p(4.0, 5.0),
            p(15.0, 5.0),
        );
        assert_eq!(
            cell_direction_for(&d, p(6.0, 7.0)).unwrap(),
            cell_direction_for(&d, p(12.0, 8.5)).unwrap()
        );
        assert_eq!(
            cell_direction_for(&d, p(6.0, 5.0)),
            Err(Error::AmbiguousCell)
        );
    }

    #[test]
    fn corridor_examples() {
        let d = decomposition(
            &Workspace::rectangle(0.0, 0.0, 30.0, 14.0),
            p(4.0, 7.0),
            p(25.0, 7.0),
        );
        let occupied = [p(4.0, 7.0), p(10.0, 9.5), p(13.0, 5.5)];
        let (open, close) = corridor_motion(&occupied, 0, &d).unwrap();
        assert_eq!(open.moves[0].displacement, None);
        assert_eq!(open.final_positions()[1], p(10.0, 11.5));
        assert_eq!(close.final_positions()[1], p(10.0, 9.5));
        for (o, c) in open.moves.iter().zip(&close.moves) {
            if let (Some(a), Some(b)) = (o.displacement, c.displacement) {
                assert_eq!(a, -b);
            }
        }
        // opposite sides: the gap grows throughout
        let (a0, a1) = (occupied[1], open.final_positions()[1]);
        let (b0, b1) = (occupied[2], open.final_positions()[2]);
        let mut prev = 0.0;
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let d = a0.lerp(a1, t).dist(b0.lerp(b1, t));
            assert!(d > prev);
            prev = d;
        }
        assert!(matches!(
            corridor_motion(&[p(5.0, 9.0), p(6.0, 9.0)], 0, &d),
            Err(Error::SeparationViolation(_))
        ));
    }

    #[test]
    fn pair_straddling_a_bisector_spreads_apart() {
        let d = decomposition(&l_shape(), p(3.0, 5.0), p(15.0, 17.0));
        let ray = d.cells[1].bisectors[0];
        let ang = ray.direction.angle();
        let a = ray.origin + Point::polar(4.0, ang - 0.3);
        let b = ray.origin + Point::polar(4.0, ang + 0.3);
        let (open, _) = corridor_motion(&[p(3.0, 5.0), a, b], 0, &d).unwrap();
        let across = ray.direction.perp();
        let q = open.final_positions();
        assert!((q[2] - q[1]).dot(across).abs() > (b - a).dot(across).abs());
        assert!(((q[2] - q[1]).dot(ray.direction) - (b - a).dot(ray.direction)).abs() < 1e-12);
    }

    #[test]
    fn single_robot_has_no_auxiliary_motion() {
        let inst = Instance::new(l_shape(), vec![p(4.0, 5.0)], vec![p(15.0, 16.0)], false);
        let plan = plan_exodus(&inst, false).unwrap();
        let len = plan_total_length(&plan.plan);
        assert_eq!(len.auxiliary, 0.0);
        assert!((len.total - plan.assignment_total).abs() < 1e-12);
        assert!(validate_plan(&inst, &plan.plan, 1e-6).unwrap().ok);
    }

    #[test]
    fn two_robots_move_eight_units() {
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 30.0, 14.0),
            vec![p(4.0, 7.0), p(14.0, 8.0)],
            vec![p(25.0, 7.0), p(20.0, 4.0)],
            false,
        );
        let plan = plan_exodus(&inst, false).unwrap();
        assert_eq!(plan.plan.phases.len(), 6);
        let len = plan_total_length(&plan.plan);
        assert!((len.auxiliary - 8.0).abs() < 1e-12);
        assert!(len.total <= plan.length_bound() + 1e-6);
        let r = validate_plan(&inst, &plan.plan, 1e-6).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn labeled_robots_reach_their_own_targets() {
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 40.0, 10.0),
            vec![p(25.0, 4.5), p(15.0, 5.5)],
            vec![p(5.0, 4.5), p(35.0, 5.5)],
            true,
        );
        let plan = plan_exodus(&inst, true).unwrap();
        let r = validate_plan(&inst, &plan.plan, 1e-6).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn restrictions_are_enforced() {
        let mut ws = Workspace::rectangle(0.0, 0.0, 30.0, 30.0);
        ws.holes.push(vec![
            p(12.0, 12.0),
            p(12.0, 18.0),
            p(18.0, 18.0),
            p(18.0, 12.0),
        ]);
        let inst = Instance::new(ws, vec![p(4.0, 4.0)], vec![p(25.0, 25.0)], false);
        assert_eq!(plan_exodus(&inst, false), Err(Error::NotSimplePolygon));
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 30.0, 30.0),
            vec![p(2.5, 4.0)],
            vec![p(25.0, 25.0)],
            false,
        );
        assert!(matches!(
            plan_exodus(&inst, false),
            Err(Error::SeparationViolation(_))
        ));
    }

    #[test]
    fn virtual_run_between_touching_arcs() {
        let a1 = Arc::from_sweep(p(0.0, 1.0), 1.0, -PI / 2.0, PI / 2.0, Orientation::Ccw);
        let a2 = Arc::from_sweep(p(2.0, 1.0), 1.0, PI, PI / 2.0, Orientation::Cw);
        let path = GeodesicPath::new(vec![
            Edge::Segment(Segment::new(p(-5.0, 0.0), p(0.0, 0.0))),
            Edge::Arc(a1),
            Edge::Arc(a2),
            Edge::Segment(Segment::new(p(2.0, 2.0), p(7.0, 2.0))),
        ]);
        let d = skeleton(&path);
        assert_eq!(d.runs.len(), 3);
        assert_eq!(d.runs[1].a, d.runs[1].b);
        assert!(d.cells[2].direction.approx_eq(p(-1.0, 0.0), 1e-12));
    }
}
