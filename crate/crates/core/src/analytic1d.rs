//! Closed-form switch times for the scalar switched replicator equation.
//!
//! Each environment follows `dx/dt = x(1-x)(a·x - b)` with `a > b > 0`, so
//! its interior equilibrium `b/a` is unstable. Alternating between a lower
//! equilibrium `a₁*` and an upper equilibrium `a₂*` traps `x` inside the
//! window `[a₁* + ε, a₂* - δ]` when each environment is held for exactly the
//! time it takes to cross the window.

use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Result};
use crate::game::{Env, Reduced1D};

/// Offsets of the trapping window from the two interior equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapWindow1D {
    /// Distance above the lower equilibrium.
    pub eps: f64,
    /// Distance below the upper equilibrium.
    pub delta: f64,
}

impl TrapWindow1D {
    pub fn new(eps: f64, delta: f64) -> Self {
        TrapWindow1D { eps, delta }
    }

    /// Lower threshold `a₁* + ε`.
    pub fn lower(&self, r1: &Reduced1D) -> f64 {
        r1.b / r1.a + self.eps
    }

    /// Upper threshold `a₂* - δ`.
    pub fn upper(&self, r2: &Reduced1D) -> f64 {
        r2.b / r2.a - self.delta
    }

    /// Checks every inequality the closed forms rely on.
    pub fn validate(&self, r1: &Reduced1D, r2: &Reduced1D) -> Result<()> {
        for (name, r) in [("r1", r1), ("r2", r2)] {
            if !(r.a.is_finite() && r.b.is_finite()) {
                return Err(domain(format!("{name} coefficients are not finite")));
            }
            if !(r.a > r.b) {
                return Err(precondition(format!(
                    "{name}: a > b violated (a = {}, b = {})",
                    r.a, r.b
                )));
            }
            if !(r.b > 0.0) {
                return Err(precondition(format!("{name}: b > 0 violated (b = {})", r.b)));
            }
        }
        let lo = r1.b / r1.a;
        let hi = r2.b / r2.a;
        if !(lo < hi) {
            return Err(precondition(format!(
                "a1* < a2* violated (a1* = {lo}, a2* = {hi})"
            )));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(precondition(format!("eps > 0 violated (eps = {})", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(precondition(format!(
                "delta > 0 violated (delta = {})",
                self.delta
            )));
        }
        if !(self.eps + self.delta < hi - lo) {
            return Err(precondition(format!(
                "eps + delta < a2* - a1* violated ({} + {} >= {})",
                self.eps,
                self.delta,
                hi - lo
            )));
        }
        Ok(())
    }
}

/// One constant-environment stretch of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phase {
    pub env: Env,
    pub duration: f64,
}

/// Piecewise-constant environment indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub phases: Vec<Phase>,
    /// Restart from the first phase after the last one ends.
    pub repeat: bool,
}

impl Schedule {
    pub fn new(phases: Vec<Phase>, repeat: bool) -> Result<Self> {
        let s = Schedule { phases, repeat };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.phases.is_empty() {
            return Err(precondition("schedule needs at least one phase"));
        }
        for (i, ph) in self.phases.iter().enumerate() {
            if !(ph.duration > 0.0 && ph.duration.is_finite()) {
                return Err(precondition(format!(
                    "phase {i} duration must be positive and finite (got {})",
                    ph.duration
                )));
            }
        }
        Ok(())
    }

    /// Length of one pass through all phases.
    pub fn cycle_length(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }

    /// Environment active at time `t >= 0`; switches take effect at the
    /// start of each phase. Past the end of a non-repeating schedule the
    /// last phase stays active.
    pub fn env_at(&self, t: f64) -> Env {
        let cycle = self.cycle_length();
        let mut local = if self.repeat { t.rem_euclid(cycle) } else { t };
        for ph in &self.phases {
            if local < ph.duration {
                return ph.env;
            }
            local -= ph.duration;
        }
        self.phases.last().map(|p| p.env).unwrap_or(Env::I)
    }
}

/// Which threshold the trajectory starts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartSide {
    /// `x(0) = a₁* + ε` under environment I.
    #[default]
    Lower,
    /// `x(0) = a₂* - δ` under environment II.
    Upper,
}

impl StartSide {
    pub fn initial_x(self, r1: &Reduced1D, r2: &Reduced1D, w: &TrapWindow1D) -> f64 {
        match self {
            StartSide::Lower => w.lower(r1),
            StartSide::Upper => w.upper(r2),
        }
    }

    pub fn initial_env(self) -> Env {
        match self {
            StartSide::Lower => Env::I,
            StartSide::Upper => Env::II,
        }
    }
}

/// `b/a`.
pub fn interior_eq_1d(r: &Reduced1D) -> Result<f64> {
    if r.a == 0.0 {
        return Err(domain("interior equilibrium undefined for a = 0"));
    }
    Ok(r.b / r.a)
}

/// Integrated travel time given the endpoints and `|a·x - b|` at each.
fn log_travel(r: &Reduced1D, from: f64, to: f64, gap_from: f64, gap_to: f64) -> f64 {
    let (a, b) = (r.a, r.b);
    (a * (gap_to.ln() - gap_from.ln())
        + (a - b) * (from.ln() - to.ln())
        + b * ((1.0 - from).ln() - (1.0 - to).ln()))
        / (b * (a - b))
}

/// Time for `dx/dt = x(1-x)(a·x - b)` to carry `x` from `from` to `to`.
///
/// Requires `a > b > 0` and both points on the same side of `b/a`, moving
/// away from it: `b/a < from < to < 1` or `0 < to < from < b/a`.
pub fn travel_time(r: &Reduced1D, from: f64, to: f64) -> Result<f64> {
    if !(r.a > r.b && r.b > 0.0) {
        return Err(precondition(format!(
            "a > b > 0 violated (a = {}, b = {})",
            r.a, r.b
        )));
    }
    let eq = r.b / r.a;
    if eq < from && from < to && to < 1.0 {
        Ok(log_travel(r, from, to, r.a * from - r.b, r.a * to - r.b))
    } else if 0.0 < to && to < from && from < eq {
        Ok(log_travel(r, from, to, r.b - r.a * from, r.b - r.a * to))
    } else {
        Err(precondition(format!(
            "no monotone path from {from} to {to} away from the equilibrium {eq}"
        )))
    }
}

/// Time spent in environment I while `x` rises from `a₁* + ε` to `a₂* - δ`.
pub fn switch_time_left(r1: &Reduced1D, r2: &Reduced1D, w: &TrapWindow1D) -> Result<f64> {
    w.validate(r1, r2)?;
    let from = w.lower(r1);
    let to = w.upper(r2);
    let gap_to = r1.a * to - r1.b;
    Ok(log_travel(r1, from, to, r1.a * w.eps, gap_to))
}

/// Time spent in environment II while `x` falls from `a₂* - δ` to `a₁* + ε`.
pub fn switch_time_right(r1: &Reduced1D, r2: &Reduced1D, w: &TrapWindow1D) -> Result<f64> {
    w.validate(r1, r2)?;
    let from = w.upper(r2);
    let to = w.lower(r1);
    let gap_to = r2.b - r2.a * to;
    Ok(log_travel(r2, from, to, r2.a * w.delta, gap_to))
}

/// Dwell time per environment for the symmetric pair `3x - 1` / `3x - 2`
/// with the window `(1/3 + ε, 2/3 - ε)`.
///
/// Equals both [`switch_time_left`] and [`switch_time_right`] of that pair
/// with `δ = ε`. Tends to `+∞` as `ε → 0⁺` and to `0` as `ε → 1/6`.
pub fn symmetric_period(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0 / 6.0) {
        return Err(domain(format!("eps must lie in (0, 1/6), got {eps}")));
    }
    Ok(0.5
        * (3.0 * ((1.0 - 3.0 * eps).ln() - (3.0 * eps).ln()) + (1.0 / 3.0 + eps).ln()
            - (2.0 / 3.0 - eps).ln()))
}

/// Periodic two-phase schedule that traps `x` in the window.
///
/// Starting on [`StartSide::Lower`] gives `[(I, t_l), (II, t_r)]` and expects
/// `x(0) = a₁* + ε`; [`StartSide::Upper`] gives `[(II, t_r), (I, t_l)]` and
/// expects `x(0) = a₂* - δ`.
pub fn synthesize_schedule_1d(
    r1: &Reduced1D,
    r2: &Reduced1D,
    w: &TrapWindow1D,
    start: StartSide,
) -> Result<Schedule> {
    let tl = switch_time_left(r1, r2, w)?;
    let tr = switch_time_right(r1, r2, w)?;
    let left = Phase {
        env: Env::I,
        duration: tl,
    };
    let right = Phase {
        env: Env::II,
        duration: tr,
    };
    let phases = match start {
        StartSide::Lower => vec![left, right],
        StartSide::Upper => vec![right, left],
    };
    Schedule::new(phases, true)
}

/// Whether a slowly varying equilibrium `b(t)/a(t)` keeps pushing `x` back
/// toward the window: `(a·x - b)(b'·a - a'·b) >= 0`.
pub fn continuous_trap_condition(a_t: f64, b_t: f64, da_t: f64, db_t: f64, x: f64) -> Result<bool> {
    if !(a_t > b_t && b_t > 0.0) {
        return Err(precondition(format!(
            "a(t) > b(t) > 0 violated (a = {a_t}, b = {b_t})"
        )));
    }
    Ok((a_t * x - b_t) * (db_t * a_t - da_t * b_t) >= 0.0)
}
