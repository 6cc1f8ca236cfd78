//! Linearization at an interior saddle, the configuration of two saddles
//! relative to each other's eigen-directions, and the trapping polygon of
//! the linearized switched system.
//!
//! Near `(b*, a*)` the replicator system is `z' = [[0, α], [β, 0]](z - c)`
//! with `α = b*(1-b*)p` and `β = a*(1-a*)u`. When `αβ > 0` the eigenvalues
//! are `±√(αβ)` and the eigenvector slopes are `±√(β/α)`: the unstable
//! direction is `(α, √(αβ))`, the stable one `(α, -√(αβ))`.

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::game::{interior_fixed_point, BimatrixGame, Env, State2D};
use crate::geometry::{self, Line, Point};

/// Relative band used to decide that the segment slope equals an
/// eigen-slope.
pub const SLOPE_REL_TOL: f64 = 1e-9;

/// Tolerance on the sine of the angle below which two lines count as
/// parallel.
pub const PARALLEL_TOL: f64 = 1e-12;

const ON_LINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearKind {
    Saddle,
    /// `αβ < 0`: purely imaginary eigenvalues.
    Center,
    /// `αβ = 0`.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleLinearization {
    pub center: State2D,
    pub alpha: f64,
    pub beta: f64,
    pub kind: LinearKind,
    /// `√(αβ)` for a saddle.
    pub eigenvalue: Option<f64>,
    /// `√(β/α)` for a saddle; the eigenvector slopes are `±slope`.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manifold {
    Stable,
    Unstable,
}

impl Manifold {
    pub fn other(self) -> Manifold {
        match self {
            Manifold::Stable => Manifold::Unstable,
            Manifold::Unstable => Manifold::Stable,
        }
    }
}

impl SaddleLinearization {
    pub fn is_saddle(&self) -> bool {
        self.kind == LinearKind::Saddle
    }

    fn require_saddle(&self) -> Result<f64> {
        match (self.kind, self.eigenvalue) {
            (LinearKind::Saddle, Some(l)) => Ok(l),
            _ => Err(precondition(format!(
                "linearization at ({}, {}) is not a saddle (alpha = {}, beta = {})",
                self.center.x, self.center.y, self.alpha, self.beta
            ))),
        }
    }

    /// Signed slope of the given eigen-direction.
    pub fn manifold_slope(&self, m: Manifold) -> Result<f64> {
        let l = self.require_saddle()?;
        Ok(match m {
            Manifold::Unstable => l / self.alpha,
            Manifold::Stable => -l / self.alpha,
        })
    }

    /// Straight stable or unstable manifold of the linear system.
    pub fn manifold_line(&self, m: Manifold) -> Result<Line> {
        let l = self.require_saddle()?;
        let dir = match m {
            Manifold::Unstable => Point::new(self.alpha, l),
            Manifold::Stable => Point::new(self.alpha, -l),
        };
        Ok(Line::new(self.center.into(), dir))
    }

    /// Eigenvectors scaled as `(√α, ±√β)` (with signs carried by `α` when
    /// `α, β < 0`).
    fn eigenvectors(&self) -> Result<(Point, Point)> {
        let l = self.require_saddle()?;
        let k = 1.0 / self.alpha.abs().sqrt();
        Ok((
            Point::new(self.alpha * k, l * k),
            Point::new(self.alpha * k, -l * k),
        ))
    }
}

/// Linearizes the replicator system at its interior fixed point.
pub fn linearize(game: &BimatrixGame) -> Result<SaddleLinearization> {
    let center = interior_fixed_point(game)
        .ok_or_else(|| precondition("game has no interior fixed point to linearize at"))?;
    let alpha = center.x * (1.0 - center.x) * game.p();
    let beta = center.y * (1.0 - center.y) * game.u();
    let prod = alpha * beta;
    let (kind, eigenvalue, slope) = if prod > 0.0 {
        (
            LinearKind::Saddle,
            Some(prod.sqrt()),
            Some((beta / alpha).sqrt()),
        )
    } else if prod < 0.0 {
        (LinearKind::Center, None, None)
    } else {
        (LinearKind::Degenerate, None, None)
    };
    Ok(SaddleLinearization {
        center,
        alpha,
        beta,
        kind,
        eigenvalue,
        slope,
    })
}

/// Closed-form solution of the linear system:
/// `c + c1·e^{λt}·v_u + c2·e^{-λt}·v_s`.
pub fn linear_solution(lin: &SaddleLinearization, c1: f64, c2: f64, t: f64) -> Result<Point> {
    let l = lin.require_saddle()?;
    let (vu, vs) = lin.eigenvectors()?;
    let grow = c1 * (l * t).exp();
    let decay = c2 * (-l * t).exp();
    Ok(Point::from(lin.center) + vu.scale(grow) + vs.scale(decay))
}

/// Relative position of two saddles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigurationKind {
    LeftRight,
    UpDown,
    SharedStableManifold,
    SharedUnstableManifold,
    Mixed,
}

/// Which of the two saddles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    First,
    Second,
}

impl Which {
    pub fn env(self) -> Env {
        match self {
            Which::First => Env::I,
            Which::Second => Env::II,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub kind: ConfigurationKind,
    /// `|Δy| / |Δx|` between the centers; `+∞` for a vertical segment.
    pub segment_slope: f64,
    /// `Δy / Δx` with its sign.
    pub signed_segment_slope: f64,
    pub slope_first: f64,
    pub slope_second: f64,
    /// For the shared-manifold kinds: the saddle whose manifold passes
    /// through the other center.
    pub host: Option<Which>,
}

fn within_band(s: f64, m: f64) -> bool {
    s.is_finite() && (s - m).abs() <= SLOPE_REL_TOL * m
}

/// Classifies the pair by comparing the slope of the segment joining the
/// centers against both eigen-slopes.
pub fn classify_pair(
    first: &SaddleLinearization,
    second: &SaddleLinearization,
) -> Result<Configuration> {
    first.require_saddle()?;
    second.require_saddle()?;
    let (m1, m2) = (first.slope.unwrap(), second.slope.unwrap());
    let dx = second.center.x - first.center.x;
    let dy = second.center.y - first.center.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(precondition("the two saddles share the same center"));
    }
    let (s, signed) = if dx == 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        ((dy / dx).abs(), dy / dx)
    };

    let shared_kind = |host: &SaddleLinearization| -> ConfigurationKind {
        let unstable = host.manifold_slope(Manifold::Unstable).unwrap();
        if unstable.signum() == signed.signum() {
            ConfigurationKind::SharedUnstableManifold
        } else {
            ConfigurationKind::SharedStableManifold
        }
    };

    let (kind, host) = if within_band(s, m1) {
        (shared_kind(first), Some(Which::First))
    } else if within_band(s, m2) {
        (shared_kind(second), Some(Which::Second))
    } else if s < m1.min(m2) {
        (ConfigurationKind::LeftRight, None)
    } else if s > m1.max(m2) {
        (ConfigurationKind::UpDown, None)
    } else {
        (ConfigurationKind::Mixed, None)
    };
    Ok(Configuration {
        kind,
        segment_slope: s,
        signed_segment_slope: signed,
        slope_first: m1,
        slope_second: m2,
        host,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolygonKind {
    Quadrilateral,
    Triangle,
    /// Degenerate region: the segment between the two centers.
    Segment,
    /// Band between two parallel stable lines, clipped to the unit square.
    Strip,
    /// Outer boundary of the figure-eight region of the mixed configuration.
    ButterflyComposite,
}

/// The manifold line an edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub env: Env,
    pub manifold: Manifold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrappingPolygon {
    pub kind: PolygonKind,
    pub configuration: ConfigurationKind,
    /// Counter-clockwise ring (two points for [`PolygonKind::Segment`]).
    pub vertices: Vec<Point>,
    /// Label of edge `i` (from vertex `i` to `i + 1`); `None` for edges on
    /// the unit-square boundary.
    pub edges: Vec<Option<EdgeLabel>>,
    /// True when the construction was cut back to the unit square.
    pub clipped: bool,
}

impl TrappingPolygon {
    /// The ring scaled about its centroid by `factor` (e.g. `1.1` inflates
    /// by 10%). Not clipped.
    pub fn inflated(&self, factor: f64) -> Vec<Point> {
        let c = geometry::centroid(&self.vertices);
        self.vertices
            .iter()
            .map(|&v| c + (v - c).scale(factor))
            .collect()
    }

    pub fn centroid(&self) -> Point {
        geometry::centroid(&self.vertices)
    }
}

struct Labeled {
    line: Line,
    label: EdgeLabel,
}

fn labeled_lines(
    first: &SaddleLinearization,
    second: &SaddleLinearization,
) -> Result<Vec<Labeled>> {
    let mut out = Vec::with_capacity(4);
    for (lin, env) in [(first, Env::I), (second, Env::II)] {
        for m in [Manifold::Stable, Manifold::Unstable] {
            out.push(Labeled {
                line: lin.manifold_line(m)?,
                label: EdgeLabel { env, manifold: m },
            });
        }
    }
    Ok(out)
}

fn line_name(l: &EdgeLabel) -> String {
    format!("{:?} manifold of environment {}", l.manifold, l.env).to_lowercase()
}

fn label_edges(ring: &[Point], lines: &[Labeled]) -> Vec<Option<EdgeLabel>> {
    let n = ring.len();
    let edges = if n == 2 { 1 } else { n };
    (0..edges)
        .map(|i| {
            let (p, q) = (ring[i], ring[(i + 1) % n]);
            lines
                .iter()
                .find(|l| l.line.distance(p) <= ON_LINE_TOL && l.line.distance(q) <= ON_LINE_TOL)
                .map(|l| l.label)
        })
        .collect()
}

fn intersect_or_err(a: &Labeled, b: &Labeled) -> Result<Point> {
    a.line.intersect(&b.line, PARALLEL_TOL).ok_or_else(|| {
        Error::Geometry(format!(
            "{} and {} are parallel",
            line_name(&a.label),
            line_name(&b.label)
        ))
    })
}

fn ccw(mut ring: Vec<Point>) -> Vec<Point> {
    if ring.len() > 2 && geometry::signed_area2(&ring) < 0.0 {
        ring.reverse();
    }
    ring
}

fn finish(
    kind: PolygonKind,
    configuration: ConfigurationKind,
    ring: Vec<Point>,
    lines: &[Labeled],
) -> TrappingPolygon {
    let ring = ccw(ring);
    let (vertices, clipped) = if ring.len() == 2 {
        (ring, false)
    } else {
        let clipped_ring = geometry::clip_to_unit_square(&ring);
        let changed = clipped_ring.len() != ring.len()
            || clipped_ring
                .iter()
                .zip(&ring)
                .any(|(a, b)| a.dist(*b) > 1e-12);
        (clipped_ring, changed)
    };
    let edges = label_edges(&vertices, lines);
    TrappingPolygon {
        kind,
        configuration,
        vertices,
        edges,
        clipped,
    }
}

/// Cell of the four-line arrangement containing the midpoint of the two
/// centers, with each vertex snapped to the exact intersection of the two
/// lines it lies on.
fn midpoint_cell(
    first: &SaddleLinearization,
    second: &SaddleLinearization,
    lines: &[Labeled],
) -> Result<Vec<Point>> {
    let e1: Point = first.center.into();
    let e2: Point = second.center.into();
    let mid = e1.midpoint(e2);
    const BOX: f64 = 1e3;
    let mut cell = vec![
        Point::new(-BOX, -BOX),
        Point::new(BOX, -BOX),
        Point::new(BOX, BOX),
        Point::new(-BOX, BOX),
    ];
    for l in lines {
        let sign = l.line.side(mid).signum();
        cell = geometry::clip_half_plane(&cell, &l.line, sign);
    }
    let cell = geometry::dedup_ring(cell, 1e-9);
    let on_box = |p: &Point| p.x.abs() >= BOX * (1.0 - 1e-9) || p.y.abs() >= BOX * (1.0 - 1e-9);
    if cell.iter().any(on_box) {
        let mut parallel = Vec::new();
        for a in &lines[..2] {
            for b in &lines[2..] {
                if a.line.intersect(&b.line, PARALLEL_TOL).is_none() {
                    parallel.push(format!("{} / {}", line_name(&a.label), line_name(&b.label)));
                }
            }
        }
        return Err(Error::Geometry(format!(
            "region around the midpoint is unbounded; parallel pairs: [{}]",
            parallel.join(", ")
        )));
    }
    cell.into_iter()
        .map(|v| {
            let mut near: Vec<(f64, usize)> = lines
                .iter()
                .enumerate()
                .map(|(i, l)| (l.line.distance(v), i))
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (i, j) = (near[0].1, near[1].1);
            if i / 2 == j / 2 {
                // both lines of the same saddle meet at its center
                Ok(if i / 2 == 0 { e1 } else { e2 })
            } else {
                intersect_or_err(&lines[i], &lines[j])
            }
        })
        .collect()
}

fn line_of(lines: &[Labeled], env: Env, m: Manifold) -> &Labeled {
    lines
        .iter()
        .find(|l| l.label.env == env && l.label.manifold == m)
        .expect("four manifold lines")
}

/// Builds the trapping region of the linearized switched system.
///
/// * left-right / up-down: the convex cell bounded by all four manifold
///   lines that contains the midpoint of the centers;
/// * one center on a manifold of the other (the host) with the remaining
///   lines parallel: the segment between the centers (stable) or the band
///   between the two stable lines (unstable);
/// * the same without parallel lines: the triangle formed by both centers
///   and the crossing of the host's other line with the guest's line of the
///   shared type;
/// * mixed: two triangular ears joined through a central cell, emitted as
///   the outer boundary.
pub fn trapping_polygon(
    first: &SaddleLinearization,
    second: &SaddleLinearization,
) -> Result<TrappingPolygon> {
    let config = classify_pair(first, second)?;
    let lines = labeled_lines(first, second)?;
    let e1: Point = first.center.into();
    let e2: Point = second.center.into();

    match config.kind {
        ConfigurationKind::LeftRight | ConfigurationKind::UpDown => {
            let ring = midpoint_cell(first, second, &lines)?;
            Ok(finish(
                PolygonKind::Quadrilateral,
                config.kind,
                ring,
                &lines,
            ))
        }
        ConfigurationKind::SharedStableManifold | ConfigurationKind::SharedUnstableManifold => {
            let host = config.host.expect("shared kinds carry a host");
            let (host_lin, guest_lin, host_pt, guest_pt) = match host {
                Which::First => (first, second, e1, e2),
                Which::Second => (second, first, e2, e1),
            };
            let shared = if config.kind == ConfigurationKind::SharedStableManifold {
                Manifold::Stable
            } else {
                Manifold::Unstable
            };
            let host_env = host.env();
            let guest_env = host_env.other();
            let guest_shared_slope = guest_lin.manifold_slope(shared)?;
            let host_shared_slope = host_lin.manifold_slope(shared)?;
            let coincide = (guest_shared_slope - host_shared_slope).abs()
                <= SLOPE_REL_TOL * host_shared_slope.abs().max(1.0);
            if coincide {
                match shared {
                    Manifold::Stable => Ok(finish(
                        PolygonKind::Segment,
                        config.kind,
                        vec![e1, e2],
                        &lines,
                    )),
                    Manifold::Unstable => {
                        let hs = line_of(&lines, host_env, Manifold::Stable);
                        let gs = line_of(&lines, guest_env, Manifold::Stable);
                        let mut band = geometry::unit_square();
                        band = geometry::clip_half_plane(
                            &band,
                            &hs.line,
                            hs.line.side(guest_pt).signum(),
                        );
                        band = geometry::clip_half_plane(
                            &band,
                            &gs.line,
                            gs.line.side(host_pt).signum(),
                        );
                        let band = ccw(geometry::dedup_ring(band, 1e-12));
                        let edges = label_edges(&band, &lines);
                        Ok(TrappingPolygon {
                            kind: PolygonKind::Strip,
                            configuration: config.kind,
                            vertices: band,
                            edges,
                            clipped: true,
                        })
                    }
                }
            } else {
                let host_other = line_of(&lines, host_env, shared.other());
                let guest_same = line_of(&lines, guest_env, shared);
                let apex = intersect_or_err(host_other, guest_same)?;
                Ok(finish(
                    PolygonKind::Triangle,
                    config.kind,
                    vec![e1, e2, apex],
                    &lines,
                ))
            }
        }
        ConfigurationKind::Mixed => {
            // "near" lines lean the same way as the segment between centers.
            let sign = config.signed_segment_slope.signum();
            let pick = |lin: &SaddleLinearization, env: Env, near: bool| -> Result<&Labeled> {
                let u = lin.manifold_slope(Manifold::Unstable)?;
                let m = if (u.signum() == sign) == near {
                    Manifold::Unstable
                } else {
                    Manifold::Stable
                };
                Ok(line_of(&lines, env, m))
            };
            let n1 = pick(first, Env::I, true)?;
            let f1 = pick(first, Env::I, false)?;
            let n2 = pick(second, Env::II, true)?;
            let f2 = pick(second, Env::II, false)?;
            let waist = intersect_or_err(n1, n2)?;
            let ear1 = intersect_or_err(f1, n2)?;
            let ear2 = intersect_or_err(n1, f2)?;
            let far = intersect_or_err(f1, f2)?;
            Ok(finish(
                PolygonKind::ButterflyComposite,
                config.kind,
                vec![e1, ear1, far, ear2, e2, waist],
                &lines,
            ))
        }
    }
}
