//! Phase portraits as standalone SVG on a 600×600 canvas.

use std::fmt::Write;

use crate::dynamics::Trajectory;
use crate::game::{BimatrixGame, State2D};
use crate::geometry::{Line, Point};
use crate::linear2d::{linearize, Manifold, TrappingPolygon};

pub const CANVAS: f64 = 600.0;

fn px(p: Point) -> (f64, f64) {
    (p.x * CANVAS, (1.0 - p.y) * CANVAS)
}

/// Part of `line` inside the unit square.
fn clip_line(line: &Line) -> Option<(Point, Point)> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (o, d) in [(line.origin.x, line.dir.x), (line.origin.y, line.dir.y)] {
        if d == 0.0 {
            if !(0.0..=1.0).contains(&o) {
                return None;
            }
            continue;
        }
        let (a, b) = ((0.0 - o) / d, (1.0 - o) / d);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t0 < t1).then(|| {
        (
            line.origin + line.dir.scale(t0),
            line.origin + line.dir.scale(t1),
        )
    })
}

fn segment(out: &mut String, a: Point, b: Point, style: &str) {
    let ((x1, y1), (x2, y2)) = (px(a), px(b));
    let _ = writeln!(
        out,
        r#"    <line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" {style}/>"#
    );
}

/// Renders the given layers; every argument is optional so a polygon can be
/// drawn without a trajectory and vice versa.
pub fn emit_phase_svg(
    traj: Option<&Trajectory<State2D>>,
    polygon: Option<&TrappingPolygon>,
    games: &[BimatrixGame],
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(
        out,
        r#"  <g id="frame"><rect x="0" y="0" width="{c}" height="{c}" fill="white" stroke="black" stroke-width="2"/></g>"#,
        c = CANVAS
    );

    out.push_str("  <g id=\"nullclines\">\n");
    for g in games {
        let style = r#"stroke="gray" stroke-dasharray="4 4""#;
        if g.p() != 0.0 {
            let y = g.q() / g.p();
            if y > 0.0 && y < 1.0 {
                segment(&mut out, Point::new(0.0, y), Point::new(1.0, y), style);
            }
        }
        if g.u() != 0.0 {
            let x = g.v() / g.u();
            if x > 0.0 && x < 1.0 {
                segment(&mut out, Point::new(x, 0.0), Point::new(x, 1.0), style);
            }
        }
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"manifolds\">\n");
    for g in games {
        let Ok(lin) = linearize(g) else { continue };
        if !lin.is_saddle() {
            continue;
        }
        for (m, color) in [(Manifold::Stable, "steelblue"), (Manifold::Unstable, "firebrick")] {
            if let Some((a, b)) = lin.manifold_line(m).ok().as_ref().and_then(clip_line) {
                segment(&mut out, a, b, &format!(r#"stroke="{color}""#));
            }
        }
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"polygon\">\n");
    if let Some(poly) = polygon {
        let pts: Vec<String> = poly
            .vertices
            .iter()
            .map(|v| {
                let (x, y) = px(*v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"    <polygon points="{}" fill="palegreen" fill-opacity="0.5" stroke="darkgreen"/>"#,
            pts.join(" ")
        );
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"trajectory\">\n");
    if let Some(tr) = traj {
        let pts: Vec<(f64, f64)> = tr.samples.iter().map(|s| px(s.state.into())).collect();
        if pts.len() == 1 || pts.windows(2).all(|w| w[0] == w[1]) {
            let (x, y) = pts[0];
            let _ = writeln!(out, r#"    <circle cx="{x:.3}" cy="{y:.3}" r="3" fill="magenta"/>"#);
        } else {
            let mut d = String::new();
            for (i, (x, y)) in pts.iter().enumerate() {
                let _ = write!(d, "{}{x:.3} {y:.3}", if i == 0 { "M" } else { " L" });
            }
            let _ = writeln!(
                out,
                r#"    <path d="{d}" fill="none" stroke="magenta" stroke-width="1.5"/>"#
            );
        }
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"switches\">\n");
    if let Some(tr) = traj {
        for sw in &tr.switches {
            if let Some(s) = tr.samples.iter().find(|s| s.t == sw.t) {
                let (x, y) = px(s.state.into());
                let _ = writeln!(
                    out,
                    r#"    <circle cx="{x:.3}" cy="{y:.3}" r="4" fill="none" stroke="black"/>"#
                );
            }
        }
    }
    out.push_str("  </g>\n</svg>\n");
    out
}
