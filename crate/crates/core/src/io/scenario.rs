//! Executes a parsed [`ScenarioConfig`].

use serde::Serialize;

use super::config::{Initial, Mode, Model, RegionSpec, ScenarioConfig};
use crate::analytic1d::{synthesize_schedule_1d, Schedule};
use crate::controller::{run_event_policy, run_time_policy, verify_trapping, TrapReport};
use crate::dynamics::{integrate_constant, IntegratorConfig, PhaseState, Trajectory, VectorField};
use crate::error::{Error, Result};
use crate::game::{BimatrixGame, Env, Reduced1D, State2D, SwitchedSystem};
use crate::linear2d::{linearize, trapping_polygon, TrappingPolygon};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RunTrajectory {
    Scalar(Trajectory<f64>),
    Planar(Trajectory<State2D>),
}

impl RunTrajectory {
    pub fn len(&self) -> usize {
        match self {
            RunTrajectory::Scalar(t) => t.len(),
            RunTrajectory::Planar(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn switch_count(&self) -> usize {
        match self {
            RunTrajectory::Scalar(t) => t.switches.len(),
            RunTrajectory::Planar(t) => t.switches.len(),
        }
    }

    pub fn csv(&self) -> String {
        match self {
            RunTrajectory::Scalar(t) => super::emit_trajectory_csv(t),
            RunTrajectory::Planar(t) => super::emit_trajectory_csv(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRun {
    pub trajectory: RunTrajectory,
    /// Guard-band report of an event policy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy_report: Option<TrapReport>,
    /// Result of the configured trapping assertion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<TrapReport>,
    /// Linear trapping polygon of the two games, when it exists.
    #[serde(skip)]
    pub polygon: Option<TrappingPolygon>,
    #[serde(skip)]
    pub games: Vec<BimatrixGame>,
}

impl ScenarioRun {
    /// `false` only when an assertion was configured and failed.
    pub fn passed(&self) -> bool {
        self.verification.as_ref().is_none_or(|r| r.trapped)
    }
}

fn pair<F: Copy>(fs: &[F]) -> SwitchedSystem<F> {
    SwitchedSystem {
        env_i: fs[0],
        env_ii: *fs.get(1).unwrap_or(&fs[0]),
    }
}

/// Trajectory plus optional event report for one model type.
fn drive<S, F>(
    sys: &SwitchedSystem<F>,
    mode: &Mode,
    s0: S,
    horizon: f64,
    cfg: &IntegratorConfig,
    window_schedule: Option<Schedule>,
) -> Result<(Trajectory<S>, Option<TrapReport>)>
where
    S: PhaseState,
    F: VectorField<S> + PartialEq,
{
    match mode {
        Mode::Constant { env } => {
            let mut tr = integrate_constant(sys.field(*env), s0, horizon, cfg)?;
            for s in &mut tr.samples {
                s.env = *env;
            }
            Ok((tr, None))
        }
        Mode::TimeSchedule {
            phases, repeat, ..
        } => {
            let sched = match (phases, window_schedule) {
                (Some(ph), _) => Schedule::new(ph.clone(), *repeat)?,
                (None, Some(s)) => s,
                (None, None) => unreachable!("validated config has a schedule"),
            };
            Ok((run_time_policy(sys, &sched, s0, horizon, cfg)?, None))
        }
        Mode::EventPolicy { policy } => {
            let (tr, rep) = run_event_policy(sys, policy, s0, horizon, cfg)?;
            Ok((tr, Some(rep)))
        }
    }
}

fn linear_polygon(games: &[BimatrixGame]) -> Result<TrappingPolygon> {
    match games {
        [g1, g2] => trapping_polygon(&linearize(g1)?, &linearize(g2)?),
        _ => Err(Error::Precondition("a trapping polygon needs two games".into())),
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let ic = &cfg.integrator;
    match &cfg.model {
        Model::Reduced(rs) => {
            let sys = pair::<Reduced1D>(rs);
            let (s0, window_schedule) = match (&cfg.mode, cfg.initial) {
                (Mode::TimeSchedule { window: Some(w), start, .. }, init) => {
                    let sched = synthesize_schedule_1d(&rs[0], &rs[1], w, *start)?;
                    let x0 = match init {
                        Some(Initial::Scalar(x)) => x,
                        _ => start.initial_x(&rs[0], &rs[1], w),
                    };
                    (x0, Some(sched))
                }
                (_, Some(Initial::Scalar(x))) => (x, None),
                _ => unreachable!("validated config has a scalar start"),
            };
            let (tr, policy_report) = drive(&sys, &cfg.mode, s0, cfg.horizon, ic, window_schedule)?;
            let verification = match &cfg.assert_trapped {
                Some(RegionSpec::Interval(iv)) => Some(verify_trapping(&tr, iv)),
                Some(RegionSpec::LinearPolygon { .. }) => {
                    return Err(Error::Config {
                        path: "assert_trapped".into(),
                        message: "a linear polygon needs the planar model".into(),
                    })
                }
                None => None,
            };
            Ok(ScenarioRun {
                trajectory: RunTrajectory::Scalar(tr),
                policy_report,
                verification,
                polygon: None,
                games: Vec::new(),
            })
        }
        Model::Games(gs) => {
            let sys = pair::<BimatrixGame>(gs);
            let Some(Initial::Pair([x, y])) = cfg.initial else {
                unreachable!("validated config has a planar start")
            };
            let s0 = State2D { x, y };
            let (tr, policy_report) = drive(&sys, &cfg.mode, s0, cfg.horizon, ic, None)?;
            let polygon = linear_polygon(gs).ok();
            let verification = match &cfg.assert_trapped {
                Some(RegionSpec::Interval(iv)) => Some(verify_trapping(&tr, iv)),
                Some(RegionSpec::LinearPolygon { inflation }) => {
                    let poly = linear_polygon(gs)?;
                    Some(verify_trapping(&tr, &poly.inflated(*inflation)[..]))
                }
                None => None,
            };
            Ok(ScenarioRun {
                trajectory: RunTrajectory::Planar(tr),
                policy_report,
                verification,
                polygon,
                games: gs.clone(),
            })
        }
    }
}

/// The environment a constant-mode scenario runs in.
pub fn constant_env(cfg: &ScenarioConfig) -> Option<Env> {
    match cfg.mode {
        Mode::Constant { env } => Some(env),
        _ => None,
    }
}
