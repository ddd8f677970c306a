//! Named lower-bound constructions and seeded random instances.

use crate::error::{Error, Result};
use crate::free_space::{build_free_space, components_with_counts, Workspace};
use crate::geometry::*;
use crate::instance::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FixtureSpec {
    Hourglass { eps_fig: f64 },
    Strip { eps_fig: f64 },
    MonotoneLb { delta: f64 },
    WeaklyMonotoneLb { delta: f64 },
    Random(RandomSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub m: usize,
    /// Minimum pairwise distance among all starts and targets.
    pub rho: f64,
    /// Minimum distance from every start and target to the obstacles.
    pub omega: f64,
    pub seed: u64,
    /// Allow interior holes (never used for simple-polygon instances).
    #[serde(default)]
    pub holes: bool,
    /// Number of rectangular teeth cut into the top and bottom walls.
    #[serde(default = "default_teeth")]
    pub teeth: usize,
    /// Alternate deep teeth between the walls so that the box becomes a
    /// winding corridor.
    #[serde(default)]
    pub deep_teeth: bool,
}

fn default_teeth() -> usize {
    3
}

pub fn gen_fixture(spec: &FixtureSpec) -> Result<Instance> {
    match spec {
        FixtureSpec::Hourglass { eps_fig } => Ok(hourglass(*eps_fig)),
        FixtureSpec::Strip { eps_fig } => Ok(strip(*eps_fig)),
        FixtureSpec::MonotoneLb { delta } => Ok(monotone_lb(*delta)),
        FixtureSpec::WeaklyMonotoneLb { delta } => Ok(weakly_monotone_lb(*delta)),
        FixtureSpec::Random(r) => random_instance(r),
    }
}

/// `(x_min, x_max, y_min, y_max)` of a vertex list.
pub fn bounds(poly: &[Point]) -> (f64, f64, f64, f64) {
    poly.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
    )
}

/// Two rooms joined by a passage of width 2 between `v1 = (-1, 0)` and `v2 = (1, 0)`.
/// The starts sit `1.5 − eps_fig` above the floor, directly over `v1` and `v2`.
pub fn hourglass(eps_fig: f64) -> Instance {
    hourglass_with_gap(eps_fig, 1.0)
}

/// The hourglass with the passage between `(-half_gap, 0)` and `(half_gap, 0)`.
pub fn hourglass_with_gap(eps_fig: f64, half_gap: f64) -> Instance {
    let r = 4.0 - eps_fig;
    let (c1, c2) = (Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
    // upper room: upper half of the lens D_r(c1) ∩ D_r(c2), with inscribed chords
    let x_right = c1.x + r;
    let top = Point::new(0.0, (r * r - 1.0).sqrt());
    let a_right = (top - c1).angle();
    let a_left = (top - c2).angle();
    let chords = 48;
    let mut outer = vec![
        Point::new(-5.0, -7.0),
        Point::new(5.0, -7.0),
        Point::new(5.0, -1.0),
        Point::new(half_gap, -1.0),
        Point::new(half_gap, 0.0),
        Point::new(x_right, 0.0),
    ];
    for i in 1..chords {
        outer.push(c1 + Point::polar(r, a_right * i as f64 / chords as f64));
    }
    outer.push(top);
    for i in 1..chords {
        let a = a_left + (PI - a_left) * i as f64 / chords as f64;
        outer.push(c2 + Point::polar(r, a));
    }
    outer.push(Point::new(-x_right, 0.0));
    outer.push(Point::new(-half_gap, 0.0));
    outer.push(Point::new(-half_gap, -1.0));
    outer.push(Point::new(-5.0, -1.0));
    let h = 1.5 - eps_fig;
    Instance::new(
        Workspace::polygon(outer),
        vec![Point::new(-1.0, h), Point::new(1.0, h)],
        vec![Point::new(-2.0, -4.0), Point::new(2.0, -4.0)],
        false,
    )
}

/// Labeled strip of width `4 − eps_fig` with positions ordered `t1, s2, s1, t2`
/// at height `2 − eps_fig` above the lower wall.
pub fn strip(eps_fig: f64) -> Instance {
    let width = 4.0 - eps_fig;
    let y = 2.0 - eps_fig;
    let outer = vec![
        Point::new(0.0, 0.0),
        Point::new(12.0, 0.0),
        Point::new(12.0, width),
        Point::new(0.0, width),
    ];
    let at = |x: f64| Point::new(x, y);
    Instance::new(
        Workspace::polygon(outer),
        vec![at(7.0), at(5.0)],
        vec![at(3.0), at(9.0)],
        true,
    )
}

/// Gadget around the target `t1 = (0, -2 + t_offset)` below the vertex
/// `v1 = (0, 1)`, with `v2, v3` on `∂D_2(v1)` rotated `delta` radians below
/// the points `(±1, 1 − √3)`. A mirrored copy holds `t2`.
fn gadget_instance(t_offset: f64, delta: f64) -> Instance {
    let v1 = Point::new(0.0, 1.0);
    let ang = -PI / 3.0 - delta;
    let v3 = v1 + Point::polar(2.0, ang);
    let v2 = Point::new(-v3.x, v3.y);
    let spike_half = 0.15;
    // mirror about y = -6
    let mirror = |p: Point| Point::new(p.x, -12.0 - p.y);
    let (x0, x1, y0, y1) = (-8.0, 8.0, -16.0, 4.0);
    let mut outer = vec![Point::new(x0, y0)];
    // floor spike up to the mirrored v1
    outer.push(Point::new(-spike_half, y0));
    outer.push(mirror(v1));
    outer.push(Point::new(spike_half, y0));
    outer.push(Point::new(x1, y0));
    // right wall spikes to mirrored v3 and v3
    outer.push(Point::new(x1, mirror(v3).y - spike_half));
    outer.push(mirror(v3));
    outer.push(Point::new(x1, mirror(v3).y + spike_half));
    outer.push(Point::new(x1, v3.y - spike_half));
    outer.push(v3);
    outer.push(Point::new(x1, v3.y + spike_half));
    outer.push(Point::new(x1, y1));
    // ceiling spike down to v1
    outer.push(Point::new(spike_half, y1));
    outer.push(v1);
    outer.push(Point::new(-spike_half, y1));
    outer.push(Point::new(x0, y1));
    outer.push(Point::new(x0, v2.y + spike_half));
    outer.push(v2);
    outer.push(Point::new(x0, v2.y - spike_half));
    outer.push(Point::new(x0, mirror(v2).y + spike_half));
    outer.push(mirror(v2));
    outer.push(Point::new(x0, mirror(v2).y - spike_half));
    let t1 = Point::new(0.0, -2.0 + t_offset);
    Instance::new(
        Workspace::polygon(outer),
        vec![Point::new(-4.0, -6.0), Point::new(4.0, -6.0)],
        vec![t1, mirror(t1)],
        false,
    )
}

/// Monotone lower-bound gadget with `t1 = (0, -2 + delta)`.
pub fn monotone_lb(delta: f64) -> Instance {
    gadget_instance(delta, delta)
}

/// Weakly-monotone gadget with `t1 = (0, -2 + ε*)`, `ε* = (15 − 6√3)/13`.
pub fn weakly_monotone_lb(delta: f64) -> Instance {
    gadget_instance((15.0 - 6.0 * 3f64.sqrt()) / 13.0, delta)
}

/// Box with rectangular teeth cut into its top and bottom walls and, when
/// `holes` is set, up to two interior rectangular holes.
pub fn random_workspace(seed: u64, teeth: usize, holes: bool) -> Workspace {
    random_workspace_with(seed, teeth, holes, false)
}

/// As [`random_workspace`]; with `deep` the teeth alternate between the
/// bottom and top walls and reach 45–70% of the height.
pub fn random_workspace_with(seed: u64, teeth: usize, holes: bool, deep: bool) -> Workspace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let w = build_random_workspace(&mut rng, teeth, holes, deep);
        if w.normalized().is_ok() {
            return w;
        }
    }
    Workspace::rectangle(0.0, 0.0, 20.0, 20.0)
}

fn build_random_workspace(
    rng: &mut ChaCha8Rng,
    teeth: usize,
    holes: bool,
    deep: bool,
) -> Workspace {
    let width: f64 = rng.gen_range(18.0..26.0);
    let height: f64 = rng.gen_range(16.0..24.0);
    if deep {
        return deep_comb(rng, width, height, teeth.max(1));
    }
    let n_bottom = if teeth == 0 {
        0
    } else {
        rng.gen_range(0..=teeth)
    };
    let n_top = teeth - n_bottom;
    let tooth_row = |rng: &mut ChaCha8Rng, k: usize| -> Vec<(f64, f64, f64)> {
        if k == 0 {
            return Vec::new();
        }
        let slot = width / k as f64;
        (0..k)
            .map(|i| {
                let w = rng.gen_range(1.0..(slot - 1.0).clamp(1.01, 4.0));
                let a = i as f64 * slot + rng.gen_range(0.5..(slot - w - 0.5).max(0.51));
                let d = rng.gen_range(1.5..(height * 0.35));
                (a, a + w, d)
            })
            .collect()
    };
    let bottom = tooth_row(rng, n_bottom);
    let top = tooth_row(rng, n_top);
    let mut outer = vec![Point::new(0.0, 0.0)];
    for &(a, b, d) in &bottom {
        outer.extend([
            Point::new(a, 0.0),
            Point::new(a, d),
            Point::new(b, d),
            Point::new(b, 0.0),
        ]);
    }
    outer.push(Point::new(width, 0.0));
    outer.push(Point::new(width, height));
    for &(a, b, d) in top.iter().rev() {
        outer.extend([
            Point::new(b, height),
            Point::new(b, height - d),
            Point::new(a, height - d),
            Point::new(a, height),
        ]);
    }
    outer.push(Point::new(0.0, height));
    let mut hole_list = Vec::new();
    if holes {
        let k = rng.gen_range(0..=2);
        for _ in 0..k {
            let (hw, hh) = (rng.gen_range(1.0..3.0), rng.gen_range(1.0..3.0));
            let cx = rng.gen_range(width * 0.25..width * 0.75);
            let cy = rng.gen_range(height * 0.4..height * 0.6);
            let rect = vec![
                Point::new(cx - hw, cy - hh),
                Point::new(cx - hw, cy + hh),
                Point::new(cx + hw, cy + hh),
                Point::new(cx + hw, cy - hh),
            ];
            let clear_of_others = hole_list.iter().all(|h: &Vec<Point>| {
                let (a0, a1, b0, b1) = bounds(h);
                cx + hw + 2.5 < a0 || cx - hw - 2.5 > a1 || cy + hh + 2.5 < b0 || cy - hh - 2.5 > b1
            });
            if clear_of_others {
                hole_list.push(rect);
            }
        }
    }
    Workspace {
        outer,
        holes: hole_list,
        carved_disks: Vec::new(),
    }
}

/// Random instance meeting the requested separations, with every free-space
/// component holding as many starts as targets.
pub fn random_instance(spec: &RandomSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _attempt in 0..40 {
        let ws_seed: u64 = rng.gen();
        let ws = random_workspace_with(ws_seed, spec.teeth, spec.holes, spec.deep_teeth);
        let Some(points) = sample_positions(&mut rng, &ws, 2 * spec.m, spec.rho, spec.omega) else {
            continue;
        };
        let (starts, targets) = points.split_at(spec.m);
        let inst = Instance::new(ws, starts.to_vec(), targets.to_vec(), false);
        let Ok(f) = build_free_space(&inst.workspace) else {
            continue;
        };
        let Ok(comps) = components_with_counts(&f, &inst.starts, &inst.targets) else {
            continue;
        };
        if comps.iter().all(|c| c.starts == c.targets) {
            return Ok(inst);
        }
    }
    Err(Error::GenerationFailed(format!(
        "no instance with m={} rho={} omega={} found",
        spec.m, spec.rho, spec.omega
    )))
}

fn deep_comb(rng: &mut ChaCha8Rng, width: f64, height: f64, k: usize) -> Workspace {
    let width = width.max(7.0 * k as f64);
    let slot = width / k as f64;
    let mut bottom = Vec::new();
    let mut top = Vec::new();
    for i in 0..k {
        let w = rng.gen_range(1.0..2.0);
        let a = i as f64 * slot + rng.gen_range(2.5..(slot - w - 2.5));
        let d = rng.gen_range(0.45..0.7) * height;
        if i % 2 == 0 {
            bottom.push((a, a + w, d));
        } else {
            top.push((a, a + w, d));
        }
    }
    let mut outer = vec![Point::new(0.0, 0.0)];
    for &(a, b, d) in &bottom {
        outer.extend([
            Point::new(a, 0.0),
            Point::new(a, d),
            Point::new(b, d),
            Point::new(b, 0.0),
        ]);
    }
    outer.push(Point::new(width, 0.0));
    outer.push(Point::new(width, height));
    for &(a, b, d) in top.iter().rev() {
        outer.extend([
            Point::new(b, height),
            Point::new(b, height - d),
            Point::new(a, height - d),
            Point::new(a, height),
        ]);
    }
    outer.push(Point::new(0.0, height));
    Workspace::polygon(outer)
}

fn sample_positions(
    rng: &mut ChaCha8Rng,
    ws: &Workspace,
    k: usize,
    rho: f64,
    omega: f64,
) -> Option<Vec<Point>> {
    let (x0, x1, y0, y1) = bounds(&ws.outer);
    let mut pts: Vec<Point> = Vec::with_capacity(k);
    let mut tries = 0;
    while pts.len() < k {
        tries += 1;
        if tries > 20_000 {
            return None;
        }
        let q = Point::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
        if ws.clearance(q) >= omega && pts.iter().all(|p| p.dist(q) >= rho) {
            pts.push(q);
        }
    }
    Some(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega(inst: &Instance) -> f64 {
        inst.positions()
            .iter()
            .map(|&p| inst.workspace.clearance(p))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn hourglass_metrics() {
        let inst = hourglass(0.05);
        assert!((omega(&inst) - 1.45).abs() < 1e-9);
        assert!(inst.workspace.normalized().is_ok());
        assert!(!inst.labeled);
        assert_eq!(inst.starts[0].dist(inst.starts[1]), 2.0);
    }

    #[test]
    fn strip_metrics() {
        let inst = strip(0.1);
        assert!((omega(&inst) - 1.9).abs() < 1e-9);
        assert!(inst.labeled);
        let xs = [
            inst.targets[0].x,
            inst.starts[1].x,
            inst.starts[0].x,
            inst.targets[1].x,
        ];
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gadget_metrics() {
        let rho0 = (13.0 - 6.0 * 3f64.sqrt()).sqrt();
        let inst = monotone_lb(1e-3);
        assert!(inst.workspace.normalized().is_ok());
        let t1 = inst.targets[0];
        let w = inst.workspace.clearance(t1);
        assert!(w < rho0 && w > rho0 - 0.01, "omega at t1 = {w}");
        let v1 = Point::new(0.0, 1.0);
        let v3 = v1 + Point::polar(2.0, -PI / 3.0 - 1e-3);
        assert!((v1.dist(v3) - 2.0).abs() < 1e-12);
        assert!(2.0 * v3.x < 2.0);

        let eps = (15.0 - 6.0 * 3f64.sqrt()) / 13.0;
        let orange = Point::new(1.0, 1.0 - 3f64.sqrt());
        let t = Point::new(0.0, -2.0 + eps);
        assert!((t.dist(orange) - (1.0 + eps)).abs() < 1e-12);
        let inst = weakly_monotone_lb(1e-3);
        let w = inst.workspace.clearance(inst.targets[0]);
        assert!(w < 1.0 + eps && w > 1.0 + eps - 0.01, "omega at t1 = {w}");
    }

    #[test]
    fn random_is_deterministic_and_separated() {
        let spec = RandomSpec {
            m: 4,
            rho: 4.0,
            omega: 1.7,
            seed: 7,
            holes: true,
            teeth: 3,
            deep_teeth: false,
        };
        let a = random_instance(&spec).unwrap();
        let b = random_instance(&spec).unwrap();
        assert_eq!(a, b);
        assert!(omega(&a) >= 1.7);
        let pts = a.positions();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                assert!(pts[i].dist(pts[j]) >= 4.0);
            }
        }
    }

    #[test]
    fn random_workspace_is_valid() {
        for seed in 0..30 {
            let w = random_workspace(seed, 4, true);
            assert!(w.normalized().is_ok());
            assert!(w.vertex_count() <= 40);
        }
    }
}
