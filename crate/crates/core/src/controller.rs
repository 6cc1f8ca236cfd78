//! Switching policies and trapping verification.
//!
//! A time policy replays a fixed [`Schedule`]. An event policy watches one
//! coordinate and switches environment whenever it reaches a guard, with the
//! crossing located by bisection inside the step.

use serde::{Deserialize, Serialize};

use crate::analytic1d::Schedule;
use crate::dynamics::{
    bisect_step, integrate_switched, rk4_step, Coordinate, IntegratorConfig, PhaseState, Sample,
    SwitchEvent, Trajectory, VectorField,
};
use crate::error::{domain, precondition, Error, Result};
use crate::game::{Env, State2D, SwitchedSystem};
use crate::geometry::{boundary_distance, contains, Point};
use crate::linear2d::TrappingPolygon;

/// Tolerance used when testing polygon membership.
const MEMBERSHIP_TOL: f64 = 1e-12;

/// Bang-bang rule on one coordinate: run `env_rising` until the coordinate
/// reaches `high`, then `env_falling` until it reaches `low`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventPolicy {
    #[serde(default)]
    pub coordinate: Coordinate,
    pub low: f64,
    pub high: f64,
    #[serde(default = "rising_default")]
    pub env_rising: Env,
    #[serde(default = "falling_default")]
    pub env_falling: Env,
    #[serde(default = "rising_default")]
    pub initial_env: Env,
}

fn rising_default() -> Env {
    Env::I
}

fn falling_default() -> Env {
    Env::II
}

impl EventPolicy {
    /// Guards on `x` with environment I driving the state up.
    pub fn on_x(low: f64, high: f64) -> Self {
        EventPolicy {
            coordinate: Coordinate::X,
            low,
            high,
            env_rising: Env::I,
            env_falling: Env::II,
            initial_env: Env::I,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.low.is_finite() && self.high.is_finite()) {
            return Err(precondition("guards must be finite"));
        }
        if !(self.low < self.high) {
            return Err(precondition(format!(
                "guard low {} must be below guard high {}",
                self.low, self.high
            )));
        }
        if !(self.low > 0.0 && self.high < 1.0) {
            return Err(precondition("guards must lie strictly inside (0, 1)"));
        }
        if self.env_rising == self.env_falling {
            return Err(precondition("rising and falling environments must differ"));
        }
        if self.initial_env != self.env_rising && self.initial_env != self.env_falling {
            return Err(precondition("initial environment is neither rising nor falling"));
        }
        Ok(())
    }

    fn target_reached(&self, env: Env, value: f64) -> bool {
        self.guard_gap(env, value) <= 0.0
    }

    /// Signed distance to the active guard, positive before it fires.
    fn guard_gap(&self, env: Env, value: f64) -> f64 {
        if env == self.env_rising {
            self.high - value
        } else {
            value - self.low
        }
    }

    fn next_env(&self, env: Env) -> Env {
        if env == self.env_rising {
            self.env_falling
        } else {
            self.env_rising
        }
    }
}

/// Outcome of checking a trajectory against a permitted region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    pub trapped: bool,
    /// Smallest signed distance from a sample to the region boundary;
    /// negative when some sample lies outside.
    pub min_margin: f64,
    /// Time and coordinates of the first sample outside the region.
    pub first_violation: Option<(f64, Vec<f64>)>,
    pub switch_count: usize,
}

/// A closed set that can report signed distance to its boundary
/// (non-negative inside).
pub trait Region<S> {
    fn margin(&self, s: &S) -> f64;
}

/// `lo <= coordinate <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    #[serde(default)]
    pub coordinate: Coordinate,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval {
            coordinate: Coordinate::X,
            lo,
            hi,
        }
    }

    pub fn on(coordinate: Coordinate, lo: f64, hi: f64) -> Self {
        Interval { coordinate, lo, hi }
    }
}

impl<S: PhaseState> Region<S> for Interval {
    fn margin(&self, s: &S) -> f64 {
        let v = s.coord(self.coordinate);
        (v - self.lo).min(self.hi - v)
    }
}

/// A closed polygon given by its vertex ring.
impl Region<State2D> for [Point] {
    fn margin(&self, s: &State2D) -> f64 {
        let p = Point::from(*s);
        let d = boundary_distance(p, self);
        if contains(self, p, MEMBERSHIP_TOL) {
            d
        } else {
            -d
        }
    }
}

impl Region<State2D> for TrappingPolygon {
    fn margin(&self, s: &State2D) -> f64 {
        self.vertices[..].margin(s)
    }
}

impl<S, R: Region<S> + ?Sized> Region<S> for &R {
    fn margin(&self, s: &S) -> f64 {
        (**self).margin(s)
    }
}

/// Checks every sample against `region`; the boundary counts as inside.
pub fn verify_trapping<S: PhaseState, R: Region<S> + ?Sized>(
    traj: &Trajectory<S>,
    region: &R,
) -> TrapReport {
    let mut min_margin = f64::INFINITY;
    let mut first_violation = None;
    for s in &traj.samples {
        let m = region.margin(&s.state);
        min_margin = min_margin.min(m);
        if m < 0.0 && first_violation.is_none() {
            first_violation = Some((s.t, s.state.coords()));
        }
    }
    TrapReport {
        trapped: first_violation.is_none(),
        min_margin,
        first_violation,
        switch_count: traj.switches.len(),
    }
}

/// Replays `sched` over `[0, t_end]`. A zero horizon yields the start
/// sample alone.
pub fn run_time_policy<S, F>(
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
    integrate_switched(sys, sched, s0, t_end, cfg)
}

/// Runs the guard policy over `[0, t_end]`, switching at located guard
/// crossings, and checks the guarded coordinate against the guard band
/// widened by the largest overshoot bisection can leave.
pub fn run_event_policy<S, F>(
    sys: &SwitchedSystem<F>,
    pol: &EventPolicy,
    s0: S,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<(Trajectory<S>, TrapReport)>
where
    S: PhaseState,
    F: VectorField<S> + PartialEq,
{
    pol.validate()?;
    cfg.validate()?;
    if !s0.is_finite() || !s0.in_unit() {
        return Err(domain(format!("initial state {s0:?} outside the unit square")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(precondition(format!("horizon must be finite and >= 0, got {t_end}")));
    }
    let c = pol.coordinate;
    let v0 = s0.coord(c);
    if v0 < pol.low || v0 > pol.high {
        return Err(precondition(format!(
            "start {v0} is outside the guard band [{}, {}]",
            pol.low, pol.high
        )));
    }

    let mut env = pol.initial_env;
    let mut traj = Trajectory {
        samples: vec![Sample {
            t: 0.0,
            state: s0,
            env,
        }],
        switches: Vec::new(),
        step: cfg.step,
        max_clamp: 0.0,
        clamp_warning: false,
    };
    let mut speed = 0.0_f64;
    let mut s = s0;
    let mut t = 0.0;
    // times are anchor + k·h so long dwells do not accumulate rounding
    let (mut anchor, mut k) = (0.0, 0u64);
    if pol.target_reached(env, v0) {
        let to = pol.next_env(env);
        traj.switches.push(SwitchEvent { t, from: env, to });
        env = to;
    }
    while t < t_end {
        let field = sys.field(env);
        speed = speed.max(field.rhs(s).coord(c).abs());
        let grid = anchor + (k + 1) as f64 * cfg.step;
        let last = grid >= t_end;
        let h = if last { t_end - t } else { grid - t };
        let (next, clamp) = rk4_step(field, s, h);
        if !next.is_finite() {
            return Err(Error::Integration {
                t: t + h,
                reason: "non-finite state".into(),
                last_valid: Some((t, s.coords())),
            });
        }
        let gap = |st: &S| pol.guard_gap(env, st.coord(c));
        let (t_next, state, clamp, switched) = if gap(&next) <= 0.0 {
            let (tau, at, cl) = bisect_step(field, s, h, cfg.event_tolerance, gap);
            (t + tau, at, cl, true)
        } else {
            (if last { t_end } else { grid }, next, clamp, false)
        };
        note_clamp(&mut traj, clamp);
        traj.samples.push(Sample {
            t: t_next,
            state,
            env,
        });
        s = state;
        t = t_next;
        k += 1;
        if switched {
            (anchor, k) = (t, 0);
            if t < t_end {
                let to = pol.next_env(env);
                traj.switches.push(SwitchEvent { t, from: env, to });
                env = to;
            }
        }
    }

    let slack = 2.0 * speed * cfg.event_tolerance + f64::EPSILON;
    let band = Interval::on(c, pol.low - slack, pol.high + slack);
    let report = verify_trapping(&traj, &band);
    Ok((traj, report))
}

fn note_clamp<S>(traj: &mut Trajectory<S>, c: f64) {
    if c > traj.max_clamp {
        traj.max_clamp = c;
        traj.clamp_warning = c > crate::dynamics::CLAMP_WARN;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic1d::{
        switch_time_left, switch_time_right, synthesize_schedule_1d, StartSide, TrapWindow1D,
    };
    use crate::game::{BimatrixGame, Reduced1D};
    use crate::linear2d::{linearize, trapping_polygon};

    fn pair() -> SwitchedSystem<Reduced1D> {
        SwitchedSystem::new(Reduced1D::new(4.0, 1.0), Reduced1D::new(3.0, 2.0))
    }

    fn window() -> TrapWindow1D {
        TrapWindow1D::new(1.0 / 12.0, 1.0 / 6.0)
    }

    #[test]
    fn open_loop_schedule_holds_for_a_few_periods() {
        let sys = pair();
        let sched =
            synthesize_schedule_1d(&sys.env_i, &sys.env_ii, &window(), StartSide::Lower).unwrap();
        let period = sched.cycle_length();
        let cfg = IntegratorConfig::default();
        let tr = run_time_policy(&sys, &sched, 1.0 / 3.0, 5.0 * period, &cfg).unwrap();
        let rep = verify_trapping(&tr, &Interval::new(1.0 / 3.0 - 1e-6, 0.5 + 1e-6));
        assert!(rep.trapped, "{rep:?}");
        assert_eq!(rep.switch_count, 9);
    }

    #[test]
    fn open_loop_error_grows_sixfold_per_period() {
        // The periodic orbit is unstable: the return map has slope
        // f1(1/2) f2(1/3) / (f1(1/3) f2(1/2)) = 6.
        let (r1, r2) = (Reduced1D::new(4.0, 1.0), Reduced1D::new(3.0, 2.0));
        let slope = r1.velocity(0.5) * r2.velocity(1.0 / 3.0)
            / (r1.velocity(1.0 / 3.0) * r2.velocity(0.5));
        assert!((slope - 6.0).abs() < 1e-12);
        let sys = pair();
        let sched = synthesize_schedule_1d(&r1, &r2, &window(), StartSide::Lower).unwrap();
        let period = sched.cycle_length();
        let x0 = 1.0 / 3.0 + 1e-9;
        let tr = run_time_policy(&sys, &sched, x0, period, &IntegratorConfig::default()).unwrap();
        let gain = (tr.final_state() - 1.0 / 3.0) / 1e-9;
        assert!((gain - 6.0).abs() < 1e-2, "{gain}");
    }

    #[test]
    fn empty_horizon_single_sample() {
        let sys = pair();
        let sched = synthesize_schedule_1d(&sys.env_i, &sys.env_ii, &window(), StartSide::Lower)
            .unwrap();
        let tr = run_time_policy(&sys, &sched, 0.4, 0.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.len(), 1);
    }

    #[test]
    fn event_policy_traps_and_counts_switches() {
        let sys = pair();
        let pol = EventPolicy::on_x(1.0 / 3.0, 0.5);
        let cfg = IntegratorConfig::default();
        let period = switch_time_left(&sys.env_i, &sys.env_ii, &window()).unwrap()
            + switch_time_right(&sys.env_i, &sys.env_ii, &window()).unwrap();
        let (_, short) = run_event_policy(&sys, &pol, 1.0 / 3.0, 10.0 * period, &cfg).unwrap();
        let (tr, long) = run_event_policy(&sys, &pol, 1.0 / 3.0, 40.0 * period, &cfg).unwrap();
        assert!(short.trapped && long.trapped);
        assert!(long.min_margin >= 0.0);
        // two switches per cycle, growing linearly with the horizon
        assert!((long.switch_count as i64 - 4 * short.switch_count as i64).abs() <= 4);
        assert!(long.switch_count >= 78);
        let lo = tr.samples.iter().map(|s| s.state).fold(1.0, f64::min);
        let hi = tr.samples.iter().map(|s| s.state).fold(0.0, f64::max);
        assert!(lo >= 1.0 / 3.0 - 1e-9 && hi <= 0.5 + 1e-9, "{lo} {hi}");
    }

    #[test]
    fn switches_alternate() {
        let (tr, _) = run_event_policy(
            &pair(),
            &EventPolicy::on_x(1.0 / 3.0, 0.5),
            0.4,
            20.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        for w in tr.switches.windows(2) {
            assert_eq!(w[0].to, w[1].from);
            assert!(w[1].t > w[0].t);
        }
        for sw in &tr.switches {
            assert!(tr.samples.iter().any(|s| s.t == sw.t));
        }
    }

    #[test]
    fn misplaced_guard_escapes() {
        // low guard below the rising environment's equilibrium 1/4
        let pol = EventPolicy::on_x(0.2, 0.5);
        let (tr, rep) =
            run_event_policy(&pair(), &pol, 0.4, 40.0, &IntegratorConfig::default()).unwrap();
        assert!(!rep.trapped);
        assert!(rep.first_violation.is_some());
        assert!(rep.switch_count >= 2);
        assert!(tr.final_state() < 1e-3);
    }

    #[test]
    fn start_on_guard_switches_immediately() {
        let pol = EventPolicy::on_x(1.0 / 3.0, 0.5);
        let (tr, rep) =
            run_event_policy(&pair(), &pol, 0.5, 1.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.switches[0].t, 0.0);
        assert_eq!(tr.switches[0].to, Env::II);
        assert!(tr.samples[1].state < 0.5);
        assert!(rep.trapped);
    }

    #[test]
    fn event_policy_preconditions() {
        let cfg = IntegratorConfig::default();
        assert!(run_event_policy(&pair(), &EventPolicy::on_x(0.5, 0.3), 0.4, 1.0, &cfg).is_err());
        assert!(run_event_policy(&pair(), &EventPolicy::on_x(0.0, 0.5), 0.4, 1.0, &cfg).is_err());
        assert!(run_event_policy(&pair(), &EventPolicy::on_x(0.3, 0.5), 0.6, 1.0, &cfg).is_err());
    }

    #[test]
    fn centroid_run_is_trapped_with_centroid_margin() {
        let g1 = BimatrixGame::from_coefficients(2.0, 1.0, 4.0, 3.0).unwrap();
        let g2 = BimatrixGame::from_coefficients(2.0, 1.0, 4.0, 1.0).unwrap();
        let poly = trapping_polygon(&linearize(&g1).unwrap(), &linearize(&g2).unwrap()).unwrap();
        let c = poly.centroid();
        let s = State2D { x: c.x, y: c.y };
        let zero = BimatrixGame::new([[0.0; 2]; 2], [[0.0; 2]; 2]).unwrap();
        let tr = crate::dynamics::integrate_constant(&zero, s, 1.0, &IntegratorConfig::default())
            .unwrap();
        let rep = verify_trapping(&tr, &poly);
        assert!(rep.trapped);
        let expect = boundary_distance(c, &poly.vertices);
        assert_eq!(rep.min_margin, expect);
    }

    #[test]
    fn one_outside_sample_is_reported() {
        let mut tr = crate::dynamics::integrate_constant(
            &Reduced1D::new(4.0, 1.0),
            0.4,
            0.01,
            &IntegratorConfig::default(),
        )
        .unwrap();
        tr.samples[5].state = 0.9;
        let rep = verify_trapping(&tr, &Interval::new(0.3, 0.5));
        assert!(!rep.trapped);
        let (t, s) = rep.first_violation.unwrap();
        assert_eq!(t, tr.samples[5].t);
        assert_eq!(s, vec![0.9]);
        assert!(rep.min_margin < 0.0);
    }
}
