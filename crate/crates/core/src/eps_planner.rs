//! The ε-overlap planner for unlabeled robots.
//!
//! Each iteration computes an optimal-assignment path set in the current free
//! space, picks a target that blocks no other path, and moves one robot to
//! it. If that path is blocked by another start, the last blocker takes over
//! the tail of the path instead. Robots the driver passes within distance 2
//! of step aside along the ray away from it and return. The settled target is
//! then carved out so that later paths keep their distance from it.

use crate::assignment::{assignment_path_set, AssignmentPathSet};
use crate::error::{Error, Result};
use crate::free_space::{build_free_space, carve_disk, components_with_counts, Workspace};
use crate::geodesics::{
    classify_position, last_blocker, proximity_windows, BlockKind, GeodesicPath,
};
use crate::geometry::*;
use crate::instance::Instance;
use crate::validator::{
    clearance_length, clearance_position, measure_separation, MotionPlan, Phase, PhaseKind,
    Primitive, RobotMotion,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest target index among the candidates.
    LowestIndex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub epsilon: f64,
    pub tol: f64,
    /// Amount by which measured separations may fall short of the constraints.
    pub constraint_slack: f64,
    pub tie_break: TieBreak,
    /// Packing bound on interrupters used in the length guarantee.
    pub max_interrupters: usize,
}

impl PlannerConfig {
    pub fn new(epsilon: f64) -> Self {
        PlannerConfig {
            epsilon,
            tol: TAU,
            constraint_slack: 0.0,
            tie_break: TieBreak::LowestIndex,
            max_interrupters: 6,
        }
    }

    fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::ConstraintViolation(format!(
                "epsilon {} outside [0, 1]",
                self.epsilon
            )));
        }
        if self.max_interrupters < 1 || !(self.tol >= 0.0) || !(self.constraint_slack >= 0.0) {
            return Err(Error::ConstraintViolation(
                "invalid planner configuration".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Omega,
    Rho,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    /// Constraint number, 1 to 5.
    pub id: u8,
    pub quantity: Quantity,
    pub required: f64,
    pub measured: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub epsilon: f64,
    pub rho: f64,
    pub omega: f64,
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn failures(&self) -> Vec<&ConstraintCheck> {
        self.checks.iter().filter(|c| !c.satisfied).collect()
    }

    fn describe_failures(&self) -> String {
        self.failures()
            .iter()
            .map(|c| {
                format!(
                    "constraint {}: {:?} {:.6} < {:.6}",
                    c.id, c.quantity, c.measured, c.required
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// The five separation requirements at overlap `eps`, in order.
pub fn required_bounds(eps: f64) -> [(Quantity, f64); 5] {
    let s3 = 3f64.sqrt();
    [
        (Quantity::Omega, ((3.0 - s3 - eps).powi(2) + 1.0).sqrt()),
        (
            Quantity::Rho,
            (0.25 + (3.0 - s3 / 2.0 - eps).powi(2)).sqrt(),
        ),
        (Quantity::Rho, 4.0 - 2.0 * eps),
        (Quantity::Omega, 1.0 + eps),
        (Quantity::Rho, 2.0 + eps),
    ]
}

pub fn omega_bound(eps: f64) -> f64 {
    required_bounds(eps)
        .iter()
        .filter(|b| b.0 == Quantity::Omega)
        .map(|b| b.1)
        .fold(0.0, f64::max)
}

pub fn rho_bound(eps: f64) -> f64 {
    required_bounds(eps)
        .iter()
        .filter(|b| b.0 == Quantity::Rho)
        .map(|b| b.1)
        .fold(0.0, f64::max)
}

pub fn check_constraints(instance: &Instance, eps: f64) -> ConstraintReport {
    check_constraints_with_slack(instance, eps, 0.0)
}

pub fn check_constraints_with_slack(instance: &Instance, eps: f64, slack: f64) -> ConstraintReport {
    let sep = measure_separation(instance);
    let (rho, omega) = (sep.rho(), sep.omega);
    let checks = required_bounds(eps)
        .iter()
        .enumerate()
        .map(|(k, &(quantity, required))| {
            let measured = match quantity {
                Quantity::Omega => omega,
                Quantity::Rho => rho,
            };
            ConstraintCheck {
                id: k as u8 + 1,
                quantity,
                required,
                measured,
                satisfied: measured >= required - slack,
            }
        })
        .collect();
    ConstraintReport {
        epsilon: eps,
        rho,
        omega,
        checks,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonGoal {
    MinOmega,
    MinRho,
    Monotone,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonChoice {
    pub goal: EpsilonGoal,
    pub epsilon: f64,
    pub omega_bound: f64,
    pub rho_bound: f64,
}

pub fn choose_epsilon(goal: EpsilonGoal) -> EpsilonChoice {
    let epsilon = match goal {
        EpsilonGoal::Monotone => 0.0,
        // 1 + ε = √((3 − √3 − ε)² + 1) squared out is linear in ε
        EpsilonGoal::MinOmega => (15.0 - 6.0 * 3f64.sqrt()) / 13.0,
        // 4 − 2ε = 2 + ε
        EpsilonGoal::MinRho => 2.0 / 3.0,
    };
    EpsilonChoice {
        goal,
        epsilon,
        omega_bound: omega_bound(epsilon),
        rho_bound: rho_bound(epsilon),
    }
}

/// Edges `(a, b)` of the blocking digraph, by target index: target `a`
/// ε-blocks the path that ends at target `b`.
pub fn blocking_digraph(gamma: &AssignmentPathSet, eps: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in &gamma.pairs {
        let ta = a.path.end();
        for b in &gamma.pairs {
            if a.target_index != b.target_index
                && classify_position(&b.path, ta, eps).kind == BlockKind::Blocking
            {
                edges.push((a.target_index, b.target_index));
            }
        }
    }
    edges
}

/// A target that ε-blocks no other path of `gamma` (lowest index among them).
pub fn find_interrupting_target(gamma: &AssignmentPathSet, eps: f64) -> Result<usize> {
    let edges = blocking_digraph(gamma, eps);
    let mut targets: Vec<usize> = gamma.pairs.iter().map(|p| p.target_index).collect();
    targets.sort_unstable();
    targets
        .into_iter()
        .find(|t| !edges.iter().any(|e| e.0 == *t))
        .ok_or(Error::NoInterruptingTarget)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchPaths {
    /// The blocked robot's new path: its old path up to `w`, then to `s_k`, then `s_k`'s old path.
    pub gamma_i: GeodesicPath,
    /// The blocker's new path: straight to `γᵢ(w)`, then the rest of `γᵢ`.
    pub gamma_k: GeodesicPath,
    pub connector: Segment,
}

pub fn build_switch_paths(
    gamma_i: &GeodesicPath,
    gamma_k: &GeodesicPath,
    s_k: Point,
    w: f64,
    eps: f64,
) -> Result<SwitchPaths> {
    let q = gamma_i.point_at(w);
    let d = s_k.dist(q);
    if d >= 2.0 - eps {
        return Err(Error::InvalidSwitch(d));
    }
    let connector = Segment::new(s_k, q);
    let conn = GeodesicPath::segment(s_k, q);
    let tail = gamma_i.sub_path(w, 1.0);
    let head = gamma_i.sub_path(0.0, w);
    Ok(SwitchPaths {
        gamma_i: head.concat(&conn.reversed()).concat(gamma_k),
        gamma_k: conn.concat(&tail),
        connector,
    })
}

/// The evasive motion of a robot anchored at `anchor` while a driver follows `driver`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClearancePath {
    pub anchor: Point,
    pub driver: GeodesicPath,
    /// Driver parameter intervals where the anchor is closer than 2.
    pub windows: Vec<(f64, f64)>,
}

impl ClearancePath {
    pub fn position(&self, w: f64) -> Point {
        clearance_position(self.anchor, self.driver.point_at(w))
    }

    pub fn max_displacement(&self) -> f64 {
        (2.0 - self.driver.distance_to_point(self.anchor).0).max(0.0)
    }

    /// Length while the driver covers `[w1, w2]`.
    pub fn length(&self, w1: f64, w2: f64) -> f64 {
        clearance_length(&self.driver, self.anchor, w1, w2)
    }
}

pub fn build_clearance_path(driver: &GeodesicPath, p: Point, eps: f64) -> Result<ClearancePath> {
    let c = classify_position(driver, p, eps);
    if c.kind == BlockKind::Blocking {
        return Err(Error::NotInterrupting(c.max_overlap));
    }
    Ok(ClearancePath {
        anchor: p,
        driver: driver.clone(),
        windows: proximity_windows(driver, p, 2.0),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchTrace {
    /// Robot whose path was blocked.
    pub blocked: usize,
    pub w: f64,
    pub connector: Segment,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    /// Workspace the iteration planned in (carved by all earlier targets).
    pub workspace: Workspace,
    pub assignment_total: f64,
    pub target: usize,
    pub driver: usize,
    pub switch: Option<SwitchTrace>,
    pub driver_path: GeodesicPath,
    /// Robots that step aside during the phase.
    pub interrupters: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsPlan {
    pub plan: MotionPlan,
    pub epsilon: f64,
    /// Optimal-assignment total in the uncarved free space.
    pub first_assignment_total: f64,
    pub iterations: Vec<IterationTrace>,
}

impl EpsPlan {
    /// `(1 + c)(L + (4 − 2ε)m)` with `L` the first assignment total.
    pub fn length_bound(&self, c: usize) -> f64 {
        let m = self.iterations.len() as f64;
        (1.0 + c as f64) * (self.first_assignment_total + (4.0 - 2.0 * self.epsilon) * m)
    }
}

pub fn plan_eps(instance: &Instance, config: &PlannerConfig) -> Result<EpsPlan> {
    config.check()?;
    instance.check_shape()?;
    if instance.labeled {
        return Err(Error::InfeasibleInstance(
            "the ε planner handles unlabeled instances only".into(),
        ));
    }
    let eps = config.epsilon;
    let report = check_constraints_with_slack(instance, eps, config.constraint_slack);
    if !report.satisfied() {
        return Err(Error::ConstraintViolation(report.describe_failures()));
    }
    let mut ws = instance.workspace.normalized()?;
    let f0 = build_free_space(&ws)?;
    if components_with_counts(&f0, &instance.starts, &instance.targets)?
        .iter()
        .any(|c| c.starts != c.targets)
    {
        return Err(Error::InfeasibleInstance(
            "a free-space component holds unequal numbers of starts and targets".into(),
        ));
    }

    let m = instance.m();
    let mut position = instance.starts.clone();
    let mut unsettled: Vec<usize> = (0..m).collect();
    let mut open_targets: Vec<usize> = (0..m).collect();
    let mut phases = Vec::with_capacity(m);
    let mut iterations = Vec::with_capacity(m);
    let mut first_total = None;
    let mut f = Some(f0);

    while !unsettled.is_empty() {
        let free = match f.take() {
            Some(f) => f,
            None => build_free_space(&ws)?,
        };
        let starts: Vec<Point> = unsettled.iter().map(|&r| position[r]).collect();
        let targets: Vec<Point> = open_targets.iter().map(|&t| instance.targets[t]).collect();
        let gamma = assignment_path_set(&free, &starts, &targets).map_err(|e| match e {
            Error::InfeasibleMatching => {
                Error::InfeasibleInstance("no perfect matching in the carved free space".into())
            }
            e => e,
        })?;
        first_total.get_or_insert(gamma.total_length);

        let t_local = find_interrupting_target(&gamma, eps)?;
        let pair_i = gamma
            .pairs
            .iter()
            .find(|p| p.target_index == t_local)
            .expect("target is matched");
        let i_local = pair_i.start_index;
        let others: Vec<usize> = (0..unsettled.len()).filter(|&k| k != i_local).collect();
        let other_pos: Vec<Point> = others.iter().map(|&k| starts[k]).collect();
        let (driver_local, driver_path, switch) = match last_blocker(&pair_i.path, &other_pos, eps)?
        {
            None => (i_local, pair_i.path.clone(), None),
            Some((idx, w)) => {
                let k_local = others[idx];
                let gamma_k = &gamma.pairs[k_local].path;
                let sw = build_switch_paths(&pair_i.path, gamma_k, starts[k_local], w, eps)?;
                let trace = SwitchTrace {
                    blocked: unsettled[i_local],
                    w,
                    connector: sw.connector,
                };
                (k_local, sw.gamma_k, Some(trace))
            }
        };
        let driver = unsettled[driver_local];
        let target = open_targets[t_local];

        let mut motions = Vec::with_capacity(m);
        let mut interrupters = Vec::new();
        for r in 0..m {
            let primitive = if r == driver {
                Primitive::TraversePath {
                    path: driver_path.clone(),
                }
            } else {
                let anchor = position[r];
                let c = classify_position(&driver_path, anchor, eps);
                if c.kind == BlockKind::Blocking {
                    return Err(Error::PlanningFailure(format!(
                        "robot {r} blocks the driver path with overlap {:.3e}",
                        c.max_overlap
                    )));
                }
                if c.max_overlap <= TAU {
                    Primitive::Stay { anchor }
                } else {
                    interrupters.push(r);
                    Primitive::PolarClearance { anchor, driver }
                }
            };
            motions.push(RobotMotion {
                robot: r,
                primitive,
            });
        }
        phases.push(Phase {
            kind: PhaseKind::Eps,
            motions,
        });
        iterations.push(IterationTrace {
            workspace: ws.clone(),
            assignment_total: gamma.total_length,
            target,
            driver,
            switch,
            driver_path,
            interrupters,
        });

        position[driver] = instance.targets[target];
        unsettled.remove(driver_local);
        open_targets.remove(t_local);
        ws = carve_disk(&ws, instance.targets[target], 1.0 - eps);
    }

    Ok(EpsPlan {
        plan: MotionPlan { phases },
        epsilon: eps,
        first_assignment_total: first_total.unwrap_or(0.0),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::AssignedPath;
    use crate::validator::{plan_total_length, validate_plan};
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn set(paths: Vec<GeodesicPath>) -> AssignmentPathSet {
        let total_length = paths.iter().map(GeodesicPath::total_length).sum();
        let pairs = paths
            .into_iter()
            .enumerate()
            .map(|(k, path)| AssignedPath {
                start_index: k,
                target_index: k,
                path,
            })
            .collect();
        AssignmentPathSet {
            pairs,
            total_length,
        }
    }

    #[test]
    fn constraint_closed_forms() {
        let s3 = 3f64.sqrt();
        assert!((required_bounds(0.0)[0].1 - (13.0 - 6.0 * s3).sqrt()).abs() < 1e-12);
        assert!((required_bounds(0.0)[0].1 - 1.614836).abs() < 1e-6);
        assert!((omega_bound(2.0 / 3.0) - 5.0 / 3.0).abs() < 1e-12);
        assert!((rho_bound(2.0 / 3.0) - 8.0 / 3.0).abs() < 1e-12);
        assert!((required_bounds(1.0)[0].1 - 1.03528).abs() < 1e-5);
    }

    #[test]
    fn epsilon_choices() {
        let c = choose_epsilon(EpsilonGoal::MinOmega);
        assert!((c.epsilon - 0.35444).abs() < 1e-5);
        assert!((c.omega_bound - 1.35444).abs() < 1e-5);
        assert!((c.rho_bound - 3.29112).abs() < 1e-5);
        let c = choose_epsilon(EpsilonGoal::MinRho);
        assert!(
            (c.omega_bound - 5.0 / 3.0).abs() < 1e-12 && (c.rho_bound - 8.0 / 3.0).abs() < 1e-12
        );
        let c = choose_epsilon(EpsilonGoal::Monotone);
        assert_eq!((c.epsilon, c.rho_bound), (0.0, 4.0));
    }

    #[test]
    fn report_measures_instance() {
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 20.0, 20.0),
            vec![p(3.0, 3.0)],
            vec![p(10.0, 3.0)],
            false,
        );
        let r = check_constraints(&inst, 0.0);
        assert_eq!(r.omega, 3.0);
        assert_eq!(r.rho, 7.0);
        assert!(r.satisfied());
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 20.0, 20.0),
            vec![p(1.5, 3.0)],
            vec![p(10.0, 3.0)],
            false,
        );
        let r = check_constraints(&inst, 0.0);
        assert_eq!(
            r.failures().iter().map(|c| c.id).collect::<Vec<_>>(),
            vec![1]
        );
    }

    #[test]
    fn interrupting_target_examples() {
        let one = set(vec![GeodesicPath::segment(p(0.0, 0.0), p(5.0, 0.0))]);
        assert_eq!(find_interrupting_target(&one, 0.0).unwrap(), 0);
        let parallel = set(vec![
            GeodesicPath::segment(p(0.0, 0.0), p(8.0, 0.0)),
            GeodesicPath::segment(p(0.0, 10.0), p(8.0, 10.0)),
        ]);
        assert_eq!(find_interrupting_target(&parallel, 0.0).unwrap(), 0);
        // t0 sits 2 − ε − 0.05 from γ1
        let eps = 0.3;
        let crossing = set(vec![
            GeodesicPath::segment(p(-6.0, 8.0), p(5.0, 2.0 - eps - 0.05)),
            GeodesicPath::segment(p(0.0, 0.0), p(10.0, 0.0)),
        ]);
        assert_eq!(
            classify_position(&crossing.pairs[1].path, crossing.pairs[0].path.end(), eps).kind,
            BlockKind::Blocking
        );
        assert_eq!(blocking_digraph(&crossing, eps), vec![(0, 1)]);
        assert_eq!(find_interrupting_target(&crossing, eps).unwrap(), 1);
    }

    #[test]
    fn mutual_blocking_has_no_interrupting_target() {
        let g = set(vec![
            GeodesicPath::segment(p(0.0, 0.0), p(10.0, 0.0)),
            GeodesicPath::segment(p(10.0, 1.0), p(0.0, 1.0)),
        ]);
        assert_eq!(
            find_interrupting_target(&g, 0.0),
            Err(Error::NoInterruptingTarget)
        );
    }

    #[test]
    fn switch_example() {
        let gi = GeodesicPath::segment(p(0.0, 0.0), p(10.0, 0.0));
        let gk = GeodesicPath::segment(p(5.0, 1.8), p(5.0, 9.0));
        let sw = build_switch_paths(&gi, &gk, p(5.0, 1.8), 0.5, 0.0).unwrap();
        assert!((sw.connector.length() - 1.8).abs() < 1e-12);
        let before = gi.total_length() + gk.total_length();
        let after = sw.gamma_i.total_length() + sw.gamma_k.total_length();
        assert!((after - before - 3.6).abs() < 1e-12);
        assert!(sw.gamma_k.end().approx_eq(p(10.0, 0.0), 1e-12));
        assert!(sw.gamma_i.end().approx_eq(p(5.0, 9.0), 1e-12));

        let gk_on = GeodesicPath::segment(p(5.0, 0.0), p(5.0, 9.0));
        let on = build_switch_paths(&gi, &gk_on, p(5.0, 0.0), 0.5, 0.0).unwrap();
        assert_eq!(on.connector.length(), 0.0);
        let before_on = gi.total_length() + gk_on.total_length();
        assert!((on.gamma_i.total_length() + on.gamma_k.total_length() - before_on).abs() < 1e-12);

        assert!(matches!(
            build_switch_paths(&gi, &gk, p(5.0, 2.5), 0.5, 0.0),
            Err(Error::InvalidSwitch(_))
        ));
    }

    #[test]
    fn clearance_example() {
        let g = GeodesicPath::segment(p(-3.0, 0.0), p(3.0, 0.0));
        let c = build_clearance_path(&g, p(0.0, 1.5), 0.5).unwrap();
        assert!(c.position(0.5).approx_eq(p(0.0, 2.0), 1e-15));
        assert!((c.max_displacement() - 0.5).abs() < 1e-15);
        assert!((c.position(0.5).dist(g.point_at(0.5)) - 2.0).abs() < 1e-15);
        let far = build_clearance_path(&g, p(0.0, 2.5), 0.0).unwrap();
        assert!(far.windows.is_empty());
        assert_eq!(far.position(0.5), p(0.0, 2.5));
        assert!(matches!(
            build_clearance_path(&g, p(0.0, 1.5), 0.2),
            Err(Error::NotInterrupting(_))
        ));
    }

    #[test]
    fn single_robot_plan() {
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 20.0, 20.0),
            vec![p(3.0, 3.0)],
            vec![p(15.0, 12.0)],
            false,
        );
        let plan = plan_eps(&inst, &PlannerConfig::new(0.0)).unwrap();
        assert_eq!(plan.plan.phases.len(), 1);
        let len = plan_total_length(&plan.plan);
        assert!((len.total - 15.0).abs() < 1e-12);
        assert!(validate_plan(&inst, &plan.plan, 1e-6).unwrap().ok);
    }

    #[test]
    fn disjoint_pairs_plan() {
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 30.0, 30.0),
            vec![p(3.0, 3.0), p(3.0, 25.0)],
            vec![p(12.0, 3.0), p(12.0, 25.0)],
            false,
        );
        let plan = plan_eps(&inst, &PlannerConfig::new(0.0)).unwrap();
        assert_eq!(plan.plan.phases.len(), 2);
        assert!((plan_total_length(&plan.plan).total - 18.0).abs() < 1e-9);
        assert!(validate_plan(&inst, &plan.plan, 1e-6).unwrap().ok);
    }

    #[test]
    fn robot_beside_route_validates() {
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 40.0, 20.0),
            vec![p(3.0, 10.0), p(20.0, 11.5)],
            vec![p(35.0, 10.0), p(35.0, 16.0)],
            false,
        );
        let eps = 0.0;
        let plan = plan_eps(&inst, &PlannerConfig::new(eps)).unwrap();
        let report = validate_plan(&inst, &plan.plan, 1e-6).unwrap();
        assert!(report.ok, "{report:?}");
        assert!(
            plan_total_length(&plan.plan).total <= plan.first_assignment_total + 4.0 * 2.0 + 1e-6
        );
    }

    #[test]
    fn violations_are_reported() {
        let inst = Instance::new(
            Workspace::rectangle(0.0, 0.0, 20.0, 20.0),
            vec![p(1.2, 3.0)],
            vec![p(15.0, 12.0)],
            false,
        );
        assert!(matches!(
            plan_eps(&inst, &PlannerConfig::new(0.0)),
            Err(Error::ConstraintViolation(_))
        ));
        assert!(matches!(
            plan_eps(&inst, &PlannerConfig::new(1.5)),
            Err(Error::ConstraintViolation(_))
        ));
        let labeled = Instance::new(
            Workspace::rectangle(0.0, 0.0, 20.0, 20.0),
            vec![p(3.0, 3.0)],
            vec![p(15.0, 12.0)],
            true,
        );
        assert!(matches!(
            plan_eps(&labeled, &PlannerConfig::new(0.0)),
            Err(Error::InfeasibleInstance(_))
        ));
    }

    #[test]
    fn unbalanced_components_are_infeasible() {
        let split = Workspace::polygon(vec![
            p(0.0, 0.0),
            p(20.0, 0.0),
            p(20.0, 20.0),
            p(0.0, 20.0),
            p(0.0, 11.0),
            p(19.5, 11.0),
            p(19.5, 9.0),
            p(0.0, 9.0),
        ]);
        let inst = Instance::new(split, vec![p(4.0, 4.0)], vec![p(4.0, 16.0)], false);
        assert!(matches!(
            plan_eps(&inst, &PlannerConfig::new(0.0)),
            Err(Error::InfeasibleInstance(_))
        ));
    }

    proptest! {
        #[test]
        fn bounds_dominate_every_constraint(eps in 0.0f64..=1.0) {
            for (q, r) in required_bounds(eps) {
                match q {
                    Quantity::Omega => prop_assert!(omega_bound(eps) >= r),
                    Quantity::Rho => prop_assert!(rho_bound(eps) >= r),
                }
            }
            prop_assert_eq!(rho_bound(eps), (4.0 - 2.0 * eps).max(2.0 + eps));
        }

        #[test]
        fn minimizers_are_minimal(eps in 0.0f64..=1.0) {
            prop_assert!(omega_bound(eps) >= choose_epsilon(EpsilonGoal::MinOmega).omega_bound - 1e-12);
            prop_assert!(rho_bound(eps) >= choose_epsilon(EpsilonGoal::MinRho).rho_bound - 1e-12);
        }

        #[test]
        fn switch_length_identity(x in 1.0f64..9.0, y in -1.9f64..1.9, gx in -5.0f64..5.0, gy in 3.0f64..9.0) {
            let gi = GeodesicPath::segment(p(0.0, 0.0), p(10.0, 0.0));
            let sk = p(x, y);
            let gk = GeodesicPath::segment(sk, p(gx, gy));
            let w = x / 10.0;
            let sw = build_switch_paths(&gi, &gk, sk, w, 0.0).unwrap();
            let lhs = sw.gamma_i.total_length() + sw.gamma_k.total_length();
            let rhs = gi.total_length() + gk.total_length() + 2.0 * y.abs();
            prop_assert!((lhs - rhs).abs() < 1e-9);
            prop_assert!(lhs < gi.total_length() + gk.total_length() + 4.0);
        }

        #[test]
        fn clearance_displacement_within_eps(eps in 0.0f64..=1.0, h in 0.0f64..1.0, ax in -2.0f64..2.0) {
            let g = GeodesicPath::segment(p(-5.0, 0.0), p(5.0, 0.0));
            let anchor = p(ax, 2.0 - eps * h);
            let c = build_clearance_path(&g, anchor, eps).unwrap();
            for k in 0..=200 {
                let w = k as f64 / 200.0;
                let q = c.position(w);
                prop_assert!(q.dist(anchor) <= eps + 1e-9);
                prop_assert!(q.dist(g.point_at(w)) >= 2.0 - 1e-9);
            }
        }
    }
}
