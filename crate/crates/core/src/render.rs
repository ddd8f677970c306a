//! SVG pictures of instances and plans.
//!
//! Obstacles are gray, the free-space boundary is drawn in black, and each
//! robot gets one color for its start, target, routes and unit-disk trace.
//! Opening displacements are drawn as arrows.

use crate::free_space::build_free_space;
use crate::geodesics::GeodesicPath;
use crate::geometry::{Edge, Point};
use crate::instance::Instance;
use crate::validator::{clearance_position, MotionPlan, PhaseKind, Primitive};
use std::f64::consts::PI;
use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];
const POLAR_SAMPLES: usize = 64;

fn color(robot: usize) -> &'static str {
    PALETTE[robot % PALETTE.len()]
}

fn xy(p: Point) -> String {
    format!("{:.4},{:.4}", p.x, p.y)
}

fn ring_d(ring: &[Point]) -> String {
    let mut d = String::new();
    for (k, p) in ring.iter().enumerate() {
        let _ = write!(d, "{}{} ", if k == 0 { "M" } else { "L" }, xy(*p));
    }
    d.push('Z');
    d
}

/// Path data for a chain of edges. The picture is flipped so that `y` points
/// up, which makes SVG's positive sweep flag the counter-clockwise one.
fn edges_d(edges: &[Edge]) -> String {
    let mut d = String::new();
    let mut at: Option<Point> = None;
    for e in edges {
        let start = e.start();
        if at.map_or(true, |p| !p.approx_eq(start, 1e-9)) {
            let _ = write!(d, "M{} ", xy(start));
        }
        match e {
            Edge::Segment(s) => {
                let _ = write!(d, "L{} ", xy(s.b));
            }
            Edge::Arc(a) => {
                let sweep = a.sweep();
                let flag = u8::from(a.orientation.sign() > 0.0);
                // a full circle needs two half arcs
                if sweep > 2.0 * PI - 1e-9 {
                    let _ = write!(
                        d,
                        "A{r:.4},{r:.4} 0 0 {flag} {} ",
                        xy(a.point_at(0.5)),
                        r = a.radius
                    );
                }
                let large = u8::from(sweep > PI && sweep <= 2.0 * PI - 1e-9);
                let _ = write!(
                    d,
                    "A{r:.4},{r:.4} 0 {large} {flag} {} ",
                    xy(a.end_point()),
                    r = a.radius
                );
            }
        }
        at = Some(e.end());
    }
    d.trim_end().to_string()
}

fn route(out: &mut String, path: &GeodesicPath, robot: usize) {
    let d = edges_d(path.edges());
    let c = color(robot);
    let _ = writeln!(
        out,
        r#"<path d="{d}" fill="none" stroke="{c}" stroke-opacity="0.5" stroke-width="2" stroke-linecap="round" stroke-linejoin="round"/>"#
    );
    let _ = writeln!(
        out,
        r#"<path d="{d}" fill="none" stroke="{c}" stroke-width="0.08"/>"#
    );
}

pub fn render_svg(instance: &Instance, plan: Option<&MotionPlan>) -> String {
    let ws = &instance.workspace;
    let (x0, x1, y0, y1) = crate::fixtures::bounds(&ws.outer);
    let pad = 1.0;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.4} {:.4} {w:.4} {h:.4}" width="{:.0}" height="{:.0}">"#,
        x0 - pad,
        -(y1 + pad),
        w * 20.0,
        h * 20.0
    );
    out.push_str("<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M0,0 L10,5 L0,10 Z\" fill=\"#333\"/></marker></defs>\n");
    out.push_str("<g transform=\"scale(1,-1)\">\n");

    let _ = writeln!(
        out,
        r##"<rect x="{:.4}" y="{:.4}" width="{w:.4}" height="{h:.4}" fill="#9e9e9e"/>"##,
        x0 - pad,
        y0 - pad
    );
    let mut room = ring_d(&ws.outer);
    for hole in &ws.holes {
        room.push(' ');
        room.push_str(&ring_d(hole));
    }
    let _ = writeln!(
        out,
        r##"<path d="{room}" fill="#ffffff" fill-rule="evenodd" stroke="#616161" stroke-width="0.05"/>"##
    );
    for c in &ws.carved_disks {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="#9e9e9e"/>"##,
            c.center.x, c.center.y, c.radius
        );
    }
    if let Ok(f) = ws.normalized().and_then(|n| build_free_space(&n)) {
        for lp in &f.boundary_loops {
            let _ = writeln!(
                out,
                r#"<path d="{} Z" fill="none" stroke="black" stroke-width="0.05"/>"#,
                edges_d(lp)
            );
        }
    }

    if let Some(plan) = plan {
        for phase in &plan.phases {
            for mv in &phase.motions {
                match &mv.primitive {
                    Primitive::TraversePath { path } => route(&mut out, path, mv.robot),
                    Primitive::PolarClearance { anchor, driver } => {
                        let driver_path = phase.motions.iter().find_map(|o| match &o.primitive {
                            Primitive::TraversePath { path } if o.robot == *driver => Some(path),
                            _ => None,
                        });
                        if let Some(g) = driver_path {
                            let pts: Vec<String> = (0..=POLAR_SAMPLES)
                                .map(|k| {
                                    xy(clearance_position(
                                        *anchor,
                                        g.point_at(k as f64 / POLAR_SAMPLES as f64),
                                    ))
                                })
                                .collect();
                            let _ = writeln!(
                                out,
                                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="0.08" stroke-dasharray="0.2,0.1"/>"#,
                                pts.join(" "),
                                color(mv.robot)
                            );
                        }
                    }
                    Primitive::LinearDisplace { anchor, vector }
                        if phase.kind == PhaseKind::Open =>
                    {
                        let b = *anchor + *vector;
                        let _ = writeln!(
                            out,
                            r##"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}" stroke="#333" stroke-width="0.06" marker-end="url(#arrow)"/>"##,
                            anchor.x, anchor.y, b.x, b.y
                        );
                    }
                    _ => {}
                }
            }
        }
    }

    for (i, (s, t)) in instance.starts.iter().zip(&instance.targets).enumerate() {
        let c = color(i);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.4}" cy="{:.4}" r="1" fill="{c}" fill-opacity="0.35" stroke="{c}" stroke-width="0.06"/>"#,
            s.x, s.y
        );
        let _ = writeln!(
            out,
            r#"<circle cx="{:.4}" cy="{:.4}" r="1" fill="none" stroke="{c}" stroke-width="0.06" stroke-dasharray="0.15,0.1"/>"#,
            t.x, t.y
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
