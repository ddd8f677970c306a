//! Motion plans and their independent verification.
//!
//! A plan is a list of phases over normalized time `[0, 1]`; in each phase
//! every robot follows one primitive. The validator recomputes distances from
//! geometry alone. Pairs whose motions admit a closed form (static robots,
//! simultaneous linear motions, a static robot against a path) are checked
//! exactly; everything else is checked by conservative advancement, stepping
//! by the largest interval in which the speed bounds rule out contact.

use crate::error::{Error, Result};
use crate::geodesics::{proximity_windows, GeodesicPath, Obstacles};
use crate::geometry::*;
use crate::instance::Instance;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Primitive {
    Stay {
        anchor: Point,
    },
    /// Constant-speed traversal of the whole path over the phase.
    TraversePath {
        path: GeodesicPath,
    },
    /// Evasion keeping distance 2 from the robot `driver` while it is closer
    /// than 2 to `anchor`; see [`clearance_position`].
    PolarClearance {
        anchor: Point,
        driver: usize,
    },
    LinearDisplace {
        anchor: Point,
        vector: Point,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Eps,
    Open,
    Traverse,
    Close,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotMotion {
    pub robot: usize,
    pub primitive: Primitive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub kind: PhaseKind,
    pub motions: Vec<RobotMotion>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MotionPlan {
    pub phases: Vec<Phase>,
}

impl MotionPlan {
    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans always serialize")
    }
}

/// Position of a robot anchored at `anchor` that evades a driver at `driver`:
/// the anchor itself when the driver is at least 2 away, otherwise the point
/// at distance exactly 2 from the driver on the ray from the driver through
/// the anchor.
pub fn clearance_position(anchor: Point, driver: Point) -> Point {
    let rel = anchor - driver;
    let r = rel.norm();
    if r >= 2.0 || r <= 0.0 {
        return anchor;
    }
    anchor + rel * ((2.0 - r) / r)
}

impl Primitive {
    pub fn anchor(&self) -> Point {
        match self {
            Primitive::Stay { anchor }
            | Primitive::PolarClearance { anchor, .. }
            | Primitive::LinearDisplace { anchor, .. } => *anchor,
            Primitive::TraversePath { path } => path.start(),
        }
    }
}

/// A phase with primitives indexed by robot.
struct PhaseView<'a> {
    prims: Vec<&'a Primitive>,
}

impl<'a> PhaseView<'a> {
    fn new(phase: &'a Phase, m: usize) -> Result<Self> {
        let mut slots: Vec<Option<&Primitive>> = vec![None; m];
        for mo in &phase.motions {
            if mo.robot >= m {
                return Err(Error::MalformedPlan(format!(
                    "robot index {} out of range",
                    mo.robot
                )));
            }
            if slots[mo.robot].replace(&mo.primitive).is_some() {
                return Err(Error::MalformedPlan(format!(
                    "robot {} has two primitives in one phase",
                    mo.robot
                )));
            }
        }
        let prims: Vec<&Primitive> = slots
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| Error::MalformedPlan(format!("robot {i} has no primitive")))
            })
            .collect::<Result<_>>()?;
        for p in &prims {
            if let Primitive::PolarClearance { driver, .. } = p {
                if !matches!(prims.get(*driver), Some(Primitive::TraversePath { .. })) {
                    return Err(Error::MalformedPlan(format!(
                        "clearance refers to robot {driver}, which is not traversing"
                    )));
                }
            }
            let finite = match p {
                Primitive::Stay { anchor } | Primitive::PolarClearance { anchor, .. } => {
                    anchor.is_finite()
                }
                Primitive::LinearDisplace { anchor, vector } => {
                    anchor.is_finite() && vector.is_finite()
                }
                Primitive::TraversePath { path } => path.total_length().is_finite(),
            };
            if !finite {
                return Err(Error::MalformedPlan("non-finite coordinate".into()));
            }
        }
        Ok(PhaseView { prims })
    }

    fn driver_path(&self, driver: usize) -> &GeodesicPath {
        match self.prims[driver] {
            Primitive::TraversePath { path } => path,
            _ => unreachable!("checked on construction"),
        }
    }

    fn position(&self, robot: usize, t: f64) -> Point {
        match self.prims[robot] {
            Primitive::Stay { anchor } => *anchor,
            Primitive::TraversePath { path } => path.point_at(t),
            Primitive::LinearDisplace { anchor, vector } => {
                if t >= 1.0 {
                    *anchor + *vector
                } else {
                    *anchor + *vector * t
                }
            }
            Primitive::PolarClearance { anchor, driver } => {
                clearance_position(*anchor, self.driver_path(*driver).point_at(t))
            }
        }
    }

    /// Closest approach of the driver path to a clearance anchor.
    fn polar_reach(&self, robot: usize) -> Option<(Point, f64, &GeodesicPath)> {
        match self.prims[robot] {
            Primitive::PolarClearance { anchor, driver } => {
                let g = self.driver_path(*driver);
                Some((*anchor, g.distance_to_point(*anchor).0, g))
            }
            _ => None,
        }
    }

    /// Upper bound on the speed of `robot` (per unit phase time).
    fn speed(&self, robot: usize) -> f64 {
        match self.prims[robot] {
            Primitive::Stay { .. } => 0.0,
            Primitive::TraversePath { path } => path.total_length(),
            Primitive::LinearDisplace { vector, .. } => vector.norm(),
            Primitive::PolarClearance { .. } => {
                let (_, r_min, g) = self.polar_reach(robot).unwrap();
                if r_min >= 2.0 {
                    0.0
                } else {
                    // the tangential component of the driver's velocity is scaled by 2/r − 1
                    g.total_length() * (2.0 / r_min.max(1e-12) - 1.0).max(1.0)
                }
            }
        }
    }

    /// Largest distance from the anchor reached during the phase.
    fn max_displacement(&self, robot: usize) -> f64 {
        match self.prims[robot] {
            Primitive::Stay { .. } => 0.0,
            Primitive::LinearDisplace { vector, .. } => vector.norm(),
            Primitive::TraversePath { .. } => f64::INFINITY,
            Primitive::PolarClearance { .. } => {
                let (_, r_min, _) = self.polar_reach(robot).unwrap();
                (2.0 - r_min).max(0.0)
            }
        }
    }

    /// Time intervals in which `robot` may move.
    fn active(&self, robot: usize) -> Vec<(f64, f64)> {
        match self.prims[robot] {
            Primitive::Stay { .. } => vec![],
            Primitive::TraversePath { .. } => vec![(0.0, 1.0)],
            Primitive::LinearDisplace { vector, .. } => {
                if vector.norm() > 0.0 {
                    vec![(0.0, 1.0)]
                } else {
                    vec![]
                }
            }
            Primitive::PolarClearance { .. } => {
                let (anchor, _, g) = self.polar_reach(robot).unwrap();
                proximity_windows(g, anchor, 2.0)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub min_robot_robot: f64,
    /// Robots realizing `min_robot_robot`.
    pub closest_pair: Option<(usize, usize)>,
    pub min_robot_obstacle: f64,
    pub closest_to_obstacle: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub min_robot_robot: f64,
    pub min_robot_obstacle: f64,
    pub endpoint_check: bool,
    pub phases: Vec<PhaseReport>,
    pub messages: Vec<String>,
}

/// Gap allowed between consecutive phases and at the plan's ends.
const JOINT_TOL: f64 = 1e-9;

pub fn validate_plan(instance: &Instance, plan: &MotionPlan, tol: f64) -> Result<ValidationReport> {
    instance
        .check_shape()
        .map_err(|e| Error::MalformedPlan(e.to_string()))?;
    if !(tol > 0.0) {
        return Err(Error::MalformedPlan("tolerance must be positive".into()));
    }
    let m = instance.m();
    let ws = instance
        .workspace
        .normalized()
        .map_err(|e| Error::MalformedPlan(e.to_string()))?;
    let obs = Obstacles::new(&ws);
    let views: Vec<PhaseView> = plan
        .phases
        .iter()
        .map(|p| PhaseView::new(p, m))
        .collect::<Result<_>>()?;
    let mut messages = Vec::new();

    let mut endpoint_check = true;
    let mut current: Vec<Point> = instance.starts.clone();
    for (k, v) in views.iter().enumerate() {
        for i in 0..m {
            let p0 = v.position(i, 0.0);
            if p0.dist(current[i]) > JOINT_TOL {
                endpoint_check = false;
                messages.push(format!(
                    "phase {k}: robot {i} jumps by {:.3e}",
                    p0.dist(current[i])
                ));
            }
            current[i] = v.position(i, 1.0);
        }
    }
    if instance.labeled {
        for i in 0..m {
            if current[i].dist(instance.targets[i]) > TAU {
                endpoint_check = false;
                messages.push(format!(
                    "robot {i} ends {:.3e} away from its target",
                    current[i].dist(instance.targets[i])
                ));
            }
        }
    } else {
        let mut used = vec![false; m];
        for (i, p) in current.iter().enumerate() {
            let hit = (0..m).find(|&j| !used[j] && p.dist(instance.targets[j]) <= TAU);
            match hit {
                Some(j) => used[j] = true,
                None => {
                    endpoint_check = false;
                    messages.push(format!("robot {i} ends at no free target"));
                }
            }
        }
    }

    let mut phases = Vec::with_capacity(views.len());
    for v in &views {
        let mut rep = PhaseReport {
            min_robot_robot: f64::INFINITY,
            closest_pair: None,
            min_robot_obstacle: f64::INFINITY,
            closest_to_obstacle: None,
        };
        for i in 0..m {
            let d = robot_obstacle(&obs, v, i, tol);
            if d < rep.min_robot_obstacle {
                rep.min_robot_obstacle = d;
                rep.closest_to_obstacle = Some(i);
            }
            for j in (i + 1)..m {
                let d = robot_robot(v, i, j, tol);
                if d < rep.min_robot_robot {
                    rep.min_robot_robot = d;
                    rep.closest_pair = Some((i, j));
                }
            }
        }
        phases.push(rep);
    }
    let min_robot_robot = phases
        .iter()
        .map(|p| p.min_robot_robot)
        .fold(f64::INFINITY, f64::min);
    let min_robot_obstacle = phases
        .iter()
        .map(|p| p.min_robot_obstacle)
        .fold(f64::INFINITY, f64::min);
    let ok = min_robot_robot >= 2.0 - tol && min_robot_obstacle >= 1.0 - tol && endpoint_check;
    Ok(ValidationReport {
        ok,
        min_robot_robot,
        min_robot_obstacle,
        endpoint_check,
        phases,
        messages,
    })
}

fn signed_clearance(obs: &Obstacles, p: Point) -> f64 {
    let mut d = obs
        .edges
        .iter()
        .map(|e| e.dist_point(p))
        .fold(f64::INFINITY, f64::min);
    if !obs.inside_polygon(p) {
        d = -d;
    }
    for c in &obs.disks {
        d = d.min(p.dist(c.center) - c.radius);
    }
    d
}

fn edge_clearance(obs: &Obstacles, e: &Edge) -> f64 {
    let mut d = f64::INFINITY;
    for s in &obs.edges {
        d = d.min(match e {
            Edge::Segment(x) => segment_distance(x, s),
            Edge::Arc(a) => arc_segment_distance(a, s),
        });
    }
    if !obs.inside_polygon(e.start()) {
        d = -d;
    }
    for c in &obs.disks {
        d = d.min(dist_point_edge(c.center, e).distance - c.radius);
    }
    d
}

fn robot_obstacle(obs: &Obstacles, v: &PhaseView, i: usize, tol: f64) -> f64 {
    match v.prims[i] {
        Primitive::Stay { anchor } => signed_clearance(obs, *anchor),
        Primitive::TraversePath { path } => path
            .edges()
            .iter()
            .map(|e| edge_clearance(obs, e))
            .fold(f64::INFINITY, f64::min),
        Primitive::LinearDisplace { anchor, vector } => edge_clearance(
            obs,
            &Edge::Segment(Segment::new(*anchor, *anchor + *vector)),
        ),
        Primitive::PolarClearance { anchor, .. } => {
            let base = signed_clearance(obs, *anchor);
            let windows = v.active(i);
            let sampled = sample_windows(&windows, 256)
                .map(|t| signed_clearance(obs, v.position(i, t)))
                .fold(base, f64::min);
            if base - v.max_displacement(i) >= 1.0 - tol {
                return sampled;
            }
            let speed = v.speed(i);
            let mut best = sampled;
            for &(a, b) in &windows {
                let mut t = a;
                loop {
                    let d = signed_clearance(obs, v.position(i, t));
                    best = best.min(d);
                    if t >= b {
                        break;
                    }
                    let dt = ((d - 1.0) / speed).max(tol / (2.0 * speed));
                    t = (t + dt).min(b);
                }
            }
            best
        }
    }
}

fn sample_windows(windows: &[(f64, f64)], n: usize) -> impl Iterator<Item = f64> + '_ {
    windows
        .iter()
        .flat_map(move |&(a, b)| (0..=n).map(move |k| a + (b - a) * k as f64 / n as f64))
}

fn robot_robot(v: &PhaseView, i: usize, j: usize, tol: f64) -> f64 {
    use Primitive::*;
    let (pi, pj) = (v.prims[i], v.prims[j]);
    match (pi, pj) {
        (Stay { anchor: a }, Stay { anchor: b }) => a.dist(*b),
        (
            Stay { anchor: a },
            LinearDisplace {
                anchor: b,
                vector: u,
            },
        )
        | (
            LinearDisplace {
                anchor: b,
                vector: u,
            },
            Stay { anchor: a },
        ) => min_dist_linear_motions(*a, *a, *b, *b + *u).0,
        (
            LinearDisplace {
                anchor: a,
                vector: u,
            },
            LinearDisplace {
                anchor: b,
                vector: w,
            },
        ) => min_dist_linear_motions(*a, *a + *u, *b, *b + *w).0,
        (Stay { anchor: a }, TraversePath { path })
        | (TraversePath { path }, Stay { anchor: a }) => path.distance_to_point(*a).0,
        (PolarClearance { anchor, driver }, TraversePath { path }) if *driver == j => {
            polar_vs_own_driver(v, i, *anchor, path)
        }
        (TraversePath { path }, PolarClearance { anchor, driver }) if *driver == i => {
            polar_vs_own_driver(v, j, *anchor, path)
        }
        _ => {
            // a certified lower bound from the displacement radii avoids stepping when the pair is far apart
            let (ai, aj) = (pi.anchor(), pj.anchor());
            let sampled = pair_samples(v, i, j);
            let bound = ai.dist(aj) - v.max_displacement(i) - v.max_displacement(j);
            if bound >= 2.0 - tol {
                return sampled;
            }
            sampled.min(advance_pair(v, i, j, tol))
        }
    }
}

/// The clearance robot stays exactly 2 away from its own driver inside the
/// windows and at its anchor elsewhere.
fn polar_vs_own_driver(v: &PhaseView, robot: usize, anchor: Point, path: &GeodesicPath) -> f64 {
    let (d, _) = path.distance_to_point(anchor);
    if d >= 2.0 {
        return d;
    }
    let driver_pos = |t: f64| path.point_at(t);
    sample_windows(&v.active(robot), 256)
        .map(|t| v.position(robot, t).dist(driver_pos(t)))
        .fold(2.0, f64::min)
}

fn pair_samples(v: &PhaseView, i: usize, j: usize) -> f64 {
    let mut windows = v.active(i);
    windows.extend(v.active(j));
    let mut best = v
        .position(i, 0.0)
        .dist(v.position(j, 0.0))
        .min(v.position(i, 1.0).dist(v.position(j, 1.0)));
    for t in sample_windows(&windows, 64) {
        best = best.min(v.position(i, t).dist(v.position(j, t)));
    }
    best
}

/// Conservative advancement over the union of both robots' active intervals.
fn advance_pair(v: &PhaseView, i: usize, j: usize, tol: f64) -> f64 {
    let (vi, vj) = (v.speed(i), v.speed(j));
    let vmax = vi.max(vj);
    let mut best = v.position(i, 0.0).dist(v.position(j, 0.0));
    if vmax <= 0.0 {
        return best;
    }
    let mut windows = v.active(i);
    windows.extend(v.active(j));
    windows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in windows {
        match merged.last_mut() {
            Some(m) if a <= m.1 => m.1 = m.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let floor = tol / (2.0 * vmax);
    for (a, b) in merged {
        let mut t = a;
        loop {
            let d = v.position(i, t).dist(v.position(j, t));
            best = best.min(d);
            if t >= b {
                break;
            }
            t = (t + ((d - 2.0) / (vi + vj)).max(floor)).min(b);
        }
    }
    best
}

/// Minimum separations of an instance's starts and targets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    /// Minimum over pairs of starts and pairs of targets.
    pub rho_mono: f64,
    /// Minimum over start–target pairs.
    pub rho_bi: f64,
    /// Minimum distance from a start or target to the obstacle space.
    pub omega: f64,
}

impl Separation {
    pub fn rho(&self) -> f64 {
        self.rho_mono.min(self.rho_bi)
    }
}

pub fn measure_separation(instance: &Instance) -> Separation {
    let pair_min = |a: &[Point], b: &[Point], same: bool| {
        let mut best = f64::INFINITY;
        for (i, p) in a.iter().enumerate() {
            for (j, q) in b.iter().enumerate() {
                if !same || i < j {
                    best = best.min(p.dist(*q));
                }
            }
        }
        best
    };
    let (s, t) = (&instance.starts, &instance.targets);
    let rho_mono = pair_min(s, s, true).min(pair_min(t, t, true));
    let rho_bi = pair_min(s, t, false);
    let omega = s
        .iter()
        .chain(t)
        .map(|&p| instance.workspace.clearance(p))
        .fold(f64::INFINITY, f64::min);
    Separation {
        rho_mono,
        rho_bi,
        omega,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthReport {
    pub driver: f64,
    pub auxiliary: f64,
    pub total: f64,
}

/// Steps of the coarse polyline in the clearance-length estimate.
pub const CLEARANCE_STEPS: usize = 1000;

pub fn plan_total_length(plan: &MotionPlan) -> LengthReport {
    let mut driver = 0.0;
    let mut auxiliary = 0.0;
    for phase in &plan.phases {
        for mo in &phase.motions {
            match &mo.primitive {
                Primitive::Stay { .. } => {}
                Primitive::TraversePath { path } => driver += path.total_length(),
                Primitive::LinearDisplace { vector, .. } => auxiliary += vector.norm(),
                Primitive::PolarClearance { anchor, driver: d } => {
                    let path = phase.motions.iter().find_map(|x| match &x.primitive {
                        Primitive::TraversePath { path } if x.robot == *d => Some(path),
                        _ => None,
                    });
                    if let Some(path) = path {
                        auxiliary += clearance_length(path, *anchor, 0.0, 1.0);
                    }
                }
            }
        }
    }
    LengthReport {
        driver,
        auxiliary,
        total: driver + auxiliary,
    }
}

/// Length of the clearance curve for `anchor` while the driver covers
/// `[w1, w2]` of `path`: polyline integration per edge window at `N` and
/// `2N` steps, combined by Richardson extrapolation.
pub fn clearance_length(path: &GeodesicPath, anchor: Point, w1: f64, w2: f64) -> f64 {
    let mut total = 0.0;
    for (a, b) in crate::geodesics::proximity_pieces(path, anchor, 2.0) {
        let (a, b) = (a.max(w1), b.min(w2));
        if b <= a {
            continue;
        }
        let poly = |n: usize| {
            let mut len = 0.0;
            let mut prev = clearance_position(anchor, path.point_at(a));
            for k in 1..=n {
                let q =
                    clearance_position(anchor, path.point_at(a + (b - a) * k as f64 / n as f64));
                len += q.dist(prev);
                prev = q;
            }
            len
        };
        let (l1, l2) = (poly(CLEARANCE_STEPS), poly(2 * CLEARANCE_STEPS));
        total += (4.0 * l2 - l1) / 3.0;
    }
    total
}
