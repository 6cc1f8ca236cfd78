//! Payoff data model and the replicator vector field of a 2×2 bimatrix game.
//!
//! With `x` the probability that player 1 plays its first strategy and `y`
//! the probability that player 2 plays its first strategy, the replicator
//! system is
//!
//! ```text
//! dx/dt = x(1-x)(p·y - q)
//! dy/dt = y(1-y)(u·x - v)
//! ```
//!
//! where `p, q` come from player 1's payoffs and `u, v` from player 2's.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Result};

/// Absolute tolerance used when checking `A = Bᵀ`.
pub const TRANSPOSE_TOL: f64 = 1e-12;

/// Identifier of one of the two environments of a switched system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Env {
    I,
    II,
}

impl Env {
    pub fn other(self) -> Env {
        match self {
            Env::I => Env::II,
            Env::II => Env::I,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Env::I => "I",
            Env::II => "II",
        }
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A pair of 2×2 payoff matrices: `a` pays player 1, `b` pays player 2.
///
/// `a[i][j]` is player 1's payoff when player 1 plays strategy `i` and
/// player 2 plays strategy `j`; `b[i][j]` is player 2's payoff for the same
/// strategy pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimatrixGame {
    #[serde(rename = "A")]
    pub a: [[f64; 2]; 2],
    #[serde(rename = "B")]
    pub b: [[f64; 2]; 2],
}

impl BimatrixGame {
    pub fn new(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> Result<Self> {
        let game = BimatrixGame { a, b };
        game.validate()?;
        Ok(game)
    }

    /// Builds a game realizing the given replicator coefficients, with zero
    /// off-diagonal payoffs: `A = diag(p - q, q)`, `B = diag(u - v, v)`.
    pub fn from_coefficients(p: f64, q: f64, u: f64, v: f64) -> Result<Self> {
        Self::new([[p - q, 0.0], [0.0, q]], [[u - v, 0.0], [0.0, v]])
    }

    /// A symmetric-population game with `B = Aᵀ`.
    pub fn symmetric(a: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(a, [[a[0][0], a[1][0]], [a[0][1], a[1][1]]])
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("A", &self.a), ("B", &self.b)] {
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(domain(format!(
                            "payoff {}{}{} is not finite ({v})",
                            name.to_lowercase(),
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `p = a11 + a22 - a12 - a21`.
    ///
    /// Summed as `(a11 + a22) - (a12 + a21)` so that `p` and `u` are
    /// bit-identical whenever `B = Aᵀ`.
    pub fn p(&self) -> f64 {
        (self.a[0][0] + self.a[1][1]) - (self.a[0][1] + self.a[1][0])
    }

    /// `q = a22 - a12`.
    pub fn q(&self) -> f64 {
        self.a[1][1] - self.a[0][1]
    }

    /// `u = b11 + b22 - b12 - b21`.
    pub fn u(&self) -> f64 {
        (self.b[0][0] + self.b[1][1]) - (self.b[0][1] + self.b[1][0])
    }

    /// `v = b22 - b21`.
    pub fn v(&self) -> f64 {
        self.b[1][1] - self.b[1][0]
    }

    /// Raw replicator velocity, without checks. Used by the integrators,
    /// whose intermediate stages may sit marginally outside the unit square.
    #[inline]
    pub fn velocity(&self, x: f64, y: f64) -> (f64, f64) {
        (
            x * (1.0 - x) * (self.p() * y - self.q()),
            y * (1.0 - y) * (self.u() * x - self.v()),
        )
    }

    /// Adds `c` to every entry of both payoff matrices.
    pub fn shifted(&self, c: f64) -> BimatrixGame {
        let mut g = *self;
        for m in [&mut g.a, &mut g.b] {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v += c;
                }
            }
        }
        g
    }

    /// Multiplies every entry of both payoff matrices by `k`.
    pub fn scaled(&self, k: f64) -> BimatrixGame {
        let mut g = *self;
        for m in [&mut g.a, &mut g.b] {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v *= k;
                }
            }
        }
        g
    }
}

/// Mixed-strategy state: `x` for player 1, `y` for player 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State2D {
    pub x: f64,
    pub y: f64,
}

impl State2D {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let s = State2D { x, y };
        s.check_unit_square()?;
        Ok(s)
    }

    pub fn check_unit_square(&self) -> Result<()> {
        self.check_finite()?;
        if !(0.0..=1.0).contains(&self.x) || !(0.0..=1.0).contains(&self.y) {
            return Err(domain(format!(
                "state ({}, {}) lies outside the unit square",
                self.x, self.y
            )));
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        if !self.x.is_finite() || !self.y.is_finite() {
            return Err(domain(format!(
                "state ({}, {}) is not finite",
                self.x, self.y
            )));
        }
        Ok(())
    }

    pub fn is_interior(&self) -> bool {
        self.x > 0.0 && self.x < 1.0 && self.y > 0.0 && self.y < 1.0
    }
}

/// Coefficients of the one-dimensional replicator equation
/// `dx/dt = x(1-x)(a·x - b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reduced1D {
    pub a: f64,
    pub b: f64,
}

impl Reduced1D {
    pub fn new(a: f64, b: f64) -> Self {
        Reduced1D { a, b }
    }

    #[inline]
    pub fn velocity(&self, x: f64) -> f64 {
        x * (1.0 - x) * (self.a * x - self.b)
    }
}

/// Two environments between which the dynamics switch.
///
/// `F` is the per-environment vector field: a [`BimatrixGame`] for the
/// planar system or a [`Reduced1D`] for the scalar reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchedSystem<F = BimatrixGame> {
    pub env_i: F,
    pub env_ii: F,
}

impl<F: PartialEq> SwitchedSystem<F> {
    pub fn new(env_i: F, env_ii: F) -> Self {
        SwitchedSystem { env_i, env_ii }
    }

    pub fn field(&self, env: Env) -> &F {
        match env {
            Env::I => &self.env_i,
            Env::II => &self.env_ii,
        }
    }

    /// True when both environments are identical, in which case switching
    /// has no effect on the dynamics.
    pub fn is_vacuous(&self) -> bool {
        self.env_i == self.env_ii
    }
}

/// Velocity `(dx/dt, dy/dt)` of the replicator system at `s`.
///
/// Components vanish exactly on the matching boundary edges of the unit
/// square.
pub fn replicator_rhs(game: &BimatrixGame, s: State2D) -> Result<(f64, f64)> {
    s.check_finite()?;
    Ok(game.velocity(s.x, s.y))
}

/// Interior fixed point `(b*, a*)` with `b* = v/u` and `a* = q/p`, present
/// only when both coordinates lie strictly inside `(0, 1)`.
pub fn interior_fixed_point(game: &BimatrixGame) -> Option<State2D> {
    let (p, q, u, v) = (game.p(), game.q(), game.u(), game.v());
    if p == 0.0 || u == 0.0 {
        return None;
    }
    let x = v / u;
    let y = q / p;
    let open = |c: f64| c > 0.0 && c < 1.0;
    (open(x) && open(y)).then_some(State2D { x, y })
}

/// Local character of an equilibrium, read from its Jacobian eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    StableNode,
    UnstableNode,
    Saddle,
    /// Purely imaginary eigenvalues (zero trace, positive determinant).
    Center,
    /// At least one zero eigenvalue.
    NonHyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub state: State2D,
    pub kind: EquilibriumKind,
    /// Real parts of the two Jacobian eigenvalues.
    pub eigen_real: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    /// Corners in the order (0,0), (1,0), (0,1), (1,1).
    pub corners: [Equilibrium; 4],
    pub interior: Option<Equilibrium>,
}

fn classify_diagonal(d1: f64, d2: f64) -> EquilibriumKind {
    if d1 == 0.0 || d2 == 0.0 {
        EquilibriumKind::NonHyperbolic
    } else if d1 < 0.0 && d2 < 0.0 {
        EquilibriumKind::StableNode
    } else if d1 > 0.0 && d2 > 0.0 {
        EquilibriumKind::UnstableNode
    } else {
        EquilibriumKind::Saddle
    }
}

/// Labels the four corners and, when it exists, the interior fixed point.
///
/// At a corner the Jacobian is diagonal. At the interior point it is
/// `[[0, α], [β, 0]]` with `α = b*(1-b*)p`, `β = a*(1-a*)u`, so the sign of
/// `αβ` decides between saddle and center.
pub fn classify_equilibria(game: &BimatrixGame) -> EquilibriumReport {
    let (p, q, u, v) = (game.p(), game.q(), game.u(), game.v());
    // Diagonal Jacobian entries (∂ẋ/∂x, ∂ẏ/∂y) at each corner.
    let corner = |x: f64, y: f64, d1: f64, d2: f64| Equilibrium {
        state: State2D { x, y },
        kind: classify_diagonal(d1, d2),
        eigen_real: [d1, d2],
    };
    let corners = [
        corner(0.0, 0.0, -q, -v),
        corner(1.0, 0.0, q, u - v),
        corner(0.0, 1.0, p - q, v),
        corner(1.0, 1.0, -(p - q), -(u - v)),
    ];
    let interior = interior_fixed_point(game).map(|c| {
        let alpha = c.x * (1.0 - c.x) * p;
        let beta = c.y * (1.0 - c.y) * u;
        let prod = alpha * beta;
        let (kind, re) = if prod > 0.0 {
            let l = prod.sqrt();
            (EquilibriumKind::Saddle, [l, -l])
        } else if prod < 0.0 {
            (EquilibriumKind::Center, [0.0, 0.0])
        } else {
            (EquilibriumKind::NonHyperbolic, [0.0, 0.0])
        };
        Equilibrium {
            state: c,
            kind,
            eigen_real: re,
        }
    });
    EquilibriumReport { corners, interior }
}

/// Reduces a game with `A = Bᵀ` to the scalar equation with `a = p`, `b = q`.
pub fn reduce_to_1d(game: &BimatrixGame) -> Result<Reduced1D> {
    let mut worst = (0.0_f64, 0, 0);
    for i in 0..2 {
        for j in 0..2 {
            let dev = (game.a[i][j] - game.b[j][i]).abs();
            if dev > worst.0 || dev.is_nan() {
                worst = (dev, i, j);
            }
        }
    }
    let (dev, i, j) = worst;
    if dev > TRANSPOSE_TOL || dev.is_nan() {
        return Err(precondition(format!(
            "A != B^T: a{}{} = {} differs from b{}{} = {} by {dev:e}",
            i + 1,
            j + 1,
            game.a[i][j],
            j + 1,
            i + 1,
            game.b[j][i]
        )));
    }
    Ok(Reduced1D {
        a: game.p(),
        b: game.q(),
    })
}

/// Sign conditions under which the interior point is a center:
/// `a11 < a21`, `a22 < a12`, `b11 > b12`, `b22 > b21`, and the interior
/// point exists.
pub fn oscillation_condition(game: &BimatrixGame) -> bool {
    let (a, b) = (&game.a, &game.b);
    a[0][0] < a[1][0]
        && a[1][1] < a[0][1]
        && b[0][0] > b[0][1]
        && b[1][1] > b[1][0]
        && interior_fixed_point(game).is_some()
}
