//! Fixed-step fourth-order Runge–Kutta integration of constant and switched
//! replicator systems, threshold-crossing location, and the constant of
//! motion of a constant environment.
//!
//! Every step is followed by a componentwise clamp to `[0, 1]`. The
//! boundary is invariant for the exact flow, so the clamp only removes
//! overshoot; its largest magnitude is recorded on the trajectory.

use serde::{Deserialize, Serialize};

use crate::analytic1d::Schedule;
use crate::error::{domain, precondition, Error, Result};
use crate::game::{BimatrixGame, Env, Reduced1D, State2D, SwitchedSystem};

/// Clamp magnitude above which a trajectory is flagged.
pub const CLAMP_WARN: f64 = 1e-9;

/// State coordinate selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    #[default]
    X,
    Y,
}

/// A point of the phase space the integrators can advance.
pub trait PhaseState: Copy + std::fmt::Debug + PartialEq {
    /// `self + h·k`.
    fn axpy(self, h: f64, k: Self) -> Self;
    /// Classic RK4 update `self + h/6 (k1 + 2k2 + 2k3 + k4)`.
    fn rk4_update(self, h: f64, k: [Self; 4]) -> Self;
    /// Projects into the closed unit box, returning the largest correction.
    fn clamp_unit(self) -> (Self, f64);
    fn is_finite(&self) -> bool;
    fn in_unit(&self) -> bool;
    fn coord(&self, c: Coordinate) -> f64;
    fn coords(&self) -> Vec<f64>;
}

impl PhaseState for f64 {
    fn axpy(self, h: f64, k: Self) -> Self {
        self + h * k
    }

    fn rk4_update(self, h: f64, k: [Self; 4]) -> Self {
        self + h / 6.0 * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3])
    }

    fn clamp_unit(self) -> (Self, f64) {
        let c = self.clamp(0.0, 1.0);
        (c, (c - self).abs())
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn in_unit(&self) -> bool {
        (0.0..=1.0).contains(self)
    }

    fn coord(&self, _c: Coordinate) -> f64 {
        *self
    }

    fn coords(&self) -> Vec<f64> {
        vec![*self]
    }
}

impl PhaseState for State2D {
    fn axpy(self, h: f64, k: Self) -> Self {
        State2D {
            x: self.x + h * k.x,
            y: self.y + h * k.y,
        }
    }

    fn rk4_update(self, h: f64, k: [Self; 4]) -> Self {
        State2D {
            x: self.x.rk4_update(h, [k[0].x, k[1].x, k[2].x, k[3].x]),
            y: self.y.rk4_update(h, [k[0].y, k[1].y, k[2].y, k[3].y]),
        }
    }

    fn clamp_unit(self) -> (Self, f64) {
        let (x, cx) = self.x.clamp_unit();
        let (y, cy) = self.y.clamp_unit();
        (State2D { x, y }, cx.max(cy))
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn in_unit(&self) -> bool {
        self.x.in_unit() && self.y.in_unit()
    }

    fn coord(&self, c: Coordinate) -> f64 {
        match c {
            Coordinate::X => self.x,
            Coordinate::Y => self.y,
        }
    }

    fn coords(&self) -> Vec<f64> {
        vec![self.x, self.y]
    }
}

/// Autonomous vector field over states `S`.
pub trait VectorField<S> {
    fn rhs(&self, s: S) -> S;
}

impl VectorField<State2D> for BimatrixGame {
    fn rhs(&self, s: State2D) -> State2D {
        let (x, y) = self.velocity(s.x, s.y);
        State2D { x, y }
    }
}

impl VectorField<f64> for Reduced1D {
    fn rhs(&self, x: f64) -> f64 {
        self.velocity(x)
    }
}

impl<S, F: VectorField<S>> VectorField<S> for &F {
    fn rhs(&self, s: S) -> S {
        (*self).rhs(s)
    }
}

/// The time-reversed field `-f`.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<F>(pub F);

impl<S: PhaseState, F: VectorField<S>> VectorField<S> for Reversed<F> {
    fn rhs(&self, s: S) -> S {
        let v = self.0.rhs(s);
        v.axpy(-2.0, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub step: f64,
    pub event_tolerance: f64,
    /// Safety horizon for event searches.
    pub max_time: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step: 1e-3,
            event_tolerance: 1e-10,
            max_time: 1e6,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step(step: f64) -> Self {
        IntegratorConfig {
            step,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(precondition(format!("step must be positive, got {}", self.step)));
        }
        if !(self.event_tolerance > 0.0 && self.event_tolerance < self.step) {
            return Err(precondition(format!(
                "event tolerance must lie in (0, step), got {}",
                self.event_tolerance
            )));
        }
        if !(self.max_time > 0.0) {
            return Err(precondition(format!(
                "max time must be positive, got {}",
                self.max_time
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample<S> {
    pub t: f64,
    pub state: S,
    pub env: Env,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub t: f64,
    pub from: Env,
    pub to: Env,
}

/// Time-stamped states with the environment active on the step that led to
/// each sample. At a switch the sample carries the environment being left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub samples: Vec<Sample<S>>,
    pub switches: Vec<SwitchEvent>,
    pub step: f64,
    /// Largest clamp correction applied over the run.
    pub max_clamp: f64,
    /// Set when `max_clamp` exceeds [`CLAMP_WARN`].
    pub clamp_warning: bool,
}

impl<S: PhaseState> Trajectory<S> {
    fn start(s0: S, env: Env, step: f64) -> Self {
        Trajectory {
            samples: vec![Sample {
                t: 0.0,
                state: s0,
                env,
            }],
            switches: Vec::new(),
            step,
            max_clamp: 0.0,
            clamp_warning: false,
        }
    }

    pub fn last(&self) -> &Sample<S> {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn final_state(&self) -> S {
        self.last().state
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn note_clamp(&mut self, c: f64) {
        if c > self.max_clamp {
            self.max_clamp = c;
            self.clamp_warning = c > CLAMP_WARN;
        }
    }

    fn push(&mut self, t: f64, state: S, env: Env) {
        self.samples.push(Sample { t, state, env });
    }

    fn record_switch(&mut self, to: Env) {
        let last = *self.last();
        self.switches.push(SwitchEvent {
            t: last.t,
            from: last.env,
            to,
        });
    }
}

/// One clamped RK4 step.
pub fn rk4_step<S: PhaseState, F: VectorField<S>>(field: &F, s: S, h: f64) -> (S, f64) {
    let k1 = field.rhs(s);
    let k2 = field.rhs(s.axpy(0.5 * h, k1));
    let k3 = field.rhs(s.axpy(0.5 * h, k2));
    let k4 = field.rhs(s.axpy(h, k3));
    s.rk4_update(h, [k1, k2, k3, k4]).clamp_unit()
}

fn integration_error<S: PhaseState>(traj: &Trajectory<S>, t: f64) -> Error {
    let last = traj.last();
    Error::Integration {
        t,
        reason: "non-finite state".into(),
        last_valid: Some((last.t, last.state.coords())),
    }
}

/// Number of steps covering `span` at step `h`, absorbing round-off so that
/// e.g. `6.15 / 0.001` counts as 6150 steps.
fn step_count(span: f64, h: f64) -> usize {
    ((span / h) - 1e-9).ceil().max(1.0) as usize
}

/// Integrates `[t0, t1]` under one field, appending samples (not `t0`).
fn run_segment<S: PhaseState, F: VectorField<S>>(
    field: &F,
    env: Env,
    t0: f64,
    t1: f64,
    h: f64,
    traj: &mut Trajectory<S>,
) -> Result<()> {
    let n = step_count(t1 - t0, h);
    let mut s = traj.final_state();
    let mut t_prev = t0;
    for k in 1..=n {
        let t = if k == n { t1 } else { t0 + k as f64 * h };
        let (next, clamp) = rk4_step(field, s, t - t_prev);
        if !next.is_finite() {
            return Err(integration_error(traj, t));
        }
        traj.note_clamp(clamp);
        traj.push(t, next, env);
        s = next;
        t_prev = t;
    }
    Ok(())
}

fn check_start<S: PhaseState>(s0: &S, t_end: f64, cfg: &IntegratorConfig) -> Result<()> {
    cfg.validate()?;
    if !s0.is_finite() || !s0.in_unit() {
        return Err(domain(format!("initial state {s0:?} outside the unit square")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(precondition(format!("horizon must be finite and >= 0, got {t_end}")));
    }
    Ok(())
}

/// Integrates a single environment over `[0, t_end]`; the last sample sits
/// exactly at `t_end`.
pub fn integrate_constant<S: PhaseState, F: VectorField<S>>(
    field: &F,
    s0: S,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S>> {
    check_start(&s0, t_end, cfg)?;
    let mut traj = Trajectory::start(s0, Env::I, cfg.step);
    if t_end > 0.0 {
        run_segment(field, Env::I, 0.0, t_end, cfg.step, &mut traj)?;
    }
    Ok(traj)
}

/// Integrates phase by phase, changing the active field exactly at phase
/// boundaries. A sample is emitted at each boundary.
pub fn integrate_switched<S, F>(
    sys: &SwitchedSystem<F>,
    sched: &Schedule,
    s0: S,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S>>
where
    S: PhaseState,
    F: VectorField<S> + PartialEq,
{
    check_start(&s0, t_end, cfg)?;
    sched.validate()?;
    let mut env = sched.phases[0].env;
    let mut traj = Trajectory::start(s0, env, cfg.step);
    let mut t = 0.0;
    let mut idx = 0usize;
    let n = sched.phases.len();
    while t < t_end {
        let phase = sched.phases[idx % n];
        let is_last = !sched.repeat && idx + 1 >= n;
        let end = t + phase.duration;
        // a boundary within rounding of the horizon is the horizon
        let boundary = if is_last || end >= t_end - 1e-9 * cfg.step {
            t_end
        } else {
            end
        };
        if phase.env != env {
            traj.record_switch(phase.env);
            env = phase.env;
        }
        run_segment(sys.field(env), env, t, boundary, cfg.step, &mut traj)?;
        t = boundary;
        idx += 1;
    }
    Ok(traj)
}

/// Threshold `coordinate = value` for event location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub coordinate: Coordinate,
    pub value: f64,
}

impl Threshold {
    pub fn x(value: f64) -> Self {
        Threshold {
            coordinate: Coordinate::X,
            value,
        }
    }

    pub fn y(value: f64) -> Self {
        Threshold {
            coordinate: Coordinate::Y,
            value,
        }
    }

    fn gap<S: PhaseState>(&self, s: &S) -> f64 {
        s.coord(self.coordinate) - self.value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing<S> {
    pub t: f64,
    pub state: S,
}

/// Locates a crossing inside a single step from `s` by bisecting the step
/// length. `crossed` tells whether a state is past the threshold.
/// Returns the step fraction `τ` (within `tol`) and the state at `τ`.
pub(crate) fn bisect_step<S, F>(
    field: &F,
    s: S,
    h: f64,
    tol: f64,
    gap: impl Fn(&S) -> f64,
) -> (f64, S, f64)
where
    S: PhaseState,
    F: VectorField<S>,
{
    // `gap` is positive before the event and non-positive once it has fired
    let (mut lo, mut hi) = (0.0, h);
    let mut gap_lo = gap(&s);
    let (mut at_hi, mut clamp_hi) = rk4_step(field, s, h);
    let mut gap_hi = gap(&at_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (sm, cm) = rk4_step(field, s, mid);
        let gm = gap(&sm);
        if gm <= 0.0 {
            (hi, at_hi, clamp_hi, gap_hi) = (mid, sm, cm, gm);
        } else {
            (lo, gap_lo) = (mid, gm);
        }
    }
    // secant inside the final bracket lands on the guard to rounding
    if gap_lo > 0.0 && gap_hi < 0.0 {
        let tau = lo + (hi - lo) * gap_lo / (gap_lo - gap_hi);
        if tau > lo && tau < hi {
            let (st, ct) = rk4_step(field, s, tau);
            return (tau, st, ct);
        }
    }
    (hi, at_hi, clamp_hi)
}

/// First time the given coordinate reaches `threshold.value`, located to
/// within the configured event tolerance.
pub fn integrate_until<S: PhaseState, F: VectorField<S>>(
    field: &F,
    s0: S,
    threshold: Threshold,
    cfg: &IntegratorConfig,
) -> Result<Crossing<S>> {
    check_start(&s0, 0.0, cfg)?;
    let g0 = threshold.gap(&s0);
    if g0 == 0.0 {
        return Err(precondition(format!(
            "threshold {} is already met at the start",
            threshold.value
        )));
    }
    let side = g0.signum();
    let gap = |s: &S| threshold.gap(s) * side;
    let crossed = |s: &S| gap(s) <= 0.0;
    let h = cfg.step;
    let mut s = s0;
    let mut k = 0u64;
    loop {
        let t = k as f64 * h;
        if t >= cfg.max_time {
            return Err(Error::Timeout {
                horizon: cfg.max_time,
            });
        }
        let (next, _) = rk4_step(field, s, h);
        if !next.is_finite() {
            return Err(Error::Integration {
                t: t + h,
                reason: "non-finite state".into(),
                last_valid: Some((t, s.coords())),
            });
        }
        if crossed(&next) {
            let (tau, state, _) = bisect_step(field, s, h, cfg.event_tolerance, gap);
            return Ok(Crossing { t: t + tau, state });
        }
        s = next;
        k += 1;
    }
}

/// `V(x, y) = x^v (1-x)^(u-v) y^(-q) (1-y)^(q-p)`, invariant along orbits
/// of a constant environment.
pub fn constant_of_motion(game: &BimatrixGame, s: State2D) -> Result<f64> {
    s.check_finite()?;
    if !s.is_interior() {
        return Err(domain(format!(
            "constant of motion needs an interior state, got ({}, {})",
            s.x, s.y
        )));
    }
    let (p, q, u, v) = (game.p(), game.q(), game.u(), game.v());
    Ok(s.x.powf(v) * (1.0 - s.x).powf(u - v) * s.y.powf(-q) * (1.0 - s.y).powf(q - p))
}

/// Largest relative deviation of `V` from its initial value along a
/// constant-environment trajectory.
pub fn conservation_drift(game: &BimatrixGame, traj: &Trajectory<State2D>) -> Result<f64> {
    if !traj.switches.is_empty() {
        return Err(precondition(
            "trajectory spans environment switches; V is only conserved under one environment",
        ));
    }
    let first = traj
        .samples
        .first()
        .ok_or_else(|| precondition("empty trajectory"))?;
    if traj.samples.iter().any(|s| s.env != first.env) {
        return Err(precondition("trajectory mixes environments"));
    }
    let v0 = constant_of_motion(game, first.state)?;
    let mut worst = 0.0_f64;
    for s in &traj.samples {
        let v = constant_of_motion(game, s.state)?;
        worst = worst.max((v - v0).abs() / v0.abs());
    }
    Ok(worst)
}
