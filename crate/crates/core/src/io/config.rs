//! JSON scenario configuration.

use serde::{Deserialize, Serialize};

use crate::analytic1d::{Phase, Schedule, StartSide, TrapWindow1D};
use crate::controller::{EventPolicy, Interval};
use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::game::{BimatrixGame, Env, Reduced1D};

/// The environments of a scenario: payoff matrices for the planar system,
/// or coefficient pairs for the scalar reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Model {
    Games(Vec<BimatrixGame>),
    Reduced(Vec<Reduced1D>),
}

impl Model {
    pub fn len(&self) -> usize {
        match self {
            Model::Games(g) => g.len(),
            Model::Reduced(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dimension(&self) -> usize {
        match self {
            Model::Games(_) => 2,
            Model::Reduced(_) => 1,
        }
    }
}

/// How the environment is chosen over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Mode {
    Constant {
        #[serde(default = "env_i")]
        env: Env,
    },
    /// Either explicit phases, or a window from which the scalar schedule
    /// is synthesized.
    TimeSchedule {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phases: Option<Vec<Phase>>,
        #[serde(default)]
        repeat: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<TrapWindow1D>,
        #[serde(default)]
        start: StartSide,
    },
    EventPolicy {
        policy: EventPolicy,
    },
}

fn env_i() -> Env {
    Env::I
}

/// Initial state: a scalar for the reduction, a pair for the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    Scalar(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

/// Region every sample must stay in for the run to pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionSpec {
    Interval(Interval),
    /// The linear trapping polygon of the two games, scaled about its
    /// centroid.
    LinearPolygon {
        #[serde(default = "unit")]
        inflation: f64,
    },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: Model,
    pub mode: Mode,
    /// Optional when a window schedule supplies the start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
    pub horizon: f64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub outputs: Vec<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assert_trapped: Option<RegionSpec>,
}

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Re-labels a library error as a config error at `path`.
fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } => e,
        Error::Domain(m) | Error::Precondition(m) | Error::Geometry(m) => config_err(path, m),
        other => config_err(path, other.to_string()),
    }
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(config_err(path, format!("expected a finite number, got {v}")))
    }
}

impl ScenarioConfig {
    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<()> {
        let n = self.model.len();
        if !(1..=2).contains(&n) {
            return Err(config_err("model", format!("expected one or two environments, got {n}")));
        }
        match &self.model {
            Model::Games(gs) => {
                for (i, g) in gs.iter().enumerate() {
                    g.validate().map_err(at(&format!("model.games[{i}]")))?;
                }
            }
            Model::Reduced(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    finite(&format!("model.reduced[{i}].a"), r.a)?;
                    finite(&format!("model.reduced[{i}].b"), r.b)?;
                }
            }
        }
        finite("horizon", self.horizon)?;
        if self.horizon < 0.0 {
            return Err(config_err("horizon", "horizon must be >= 0"));
        }
        self.integrator.validate().map_err(at("integrator"))?;

        let needs_two = |what: &str| -> Result<()> {
            if n < 2 {
                Err(config_err("model", format!("{what} needs two environments")))
            } else {
                Ok(())
            }
        };
        match &self.mode {
            Mode::Constant { env } => {
                if *env == Env::II {
                    needs_two("environment II")?;
                }
            }
            Mode::TimeSchedule {
                phases,
                repeat,
                window,
                start: _,
            } => match (phases, window) {
                (Some(ph), None) => {
                    for (i, p) in ph.iter().enumerate() {
                        if !(p.duration.is_finite() && p.duration > 0.0) {
                            return Err(config_err(
                                &format!("mode.time-schedule.phases[{i}].duration"),
                                format!("duration must be positive and finite (got {})", p.duration),
                            ));
                        }
                    }
                    Schedule::new(ph.clone(), *repeat).map_err(at("mode.time-schedule.phases"))?;
                    if ph.iter().any(|p| p.env == Env::II) {
                        needs_two("a phase in environment II")?;
                    }
                }
                (None, Some(w)) => {
                    needs_two("a window schedule")?;
                    let Model::Reduced(rs) = &self.model else {
                        return Err(config_err(
                            "mode.time-schedule.window",
                            "window schedules apply to the reduced model",
                        ));
                    };
                    w.validate(&rs[0], &rs[1]).map_err(at("mode.time-schedule.window"))?;
                }
                _ => {
                    return Err(config_err(
                        "mode",
                        "time-schedule needs exactly one of `phases` or `window`",
                    ))
                }
            },
            Mode::EventPolicy { policy } => {
                needs_two("an event policy")?;
                policy.validate().map_err(at("mode.event-policy.policy"))?;
            }
        }

        match (&self.initial, self.model.dimension()) {
            (None, _) if matches!(self.mode, Mode::TimeSchedule { window: Some(_), .. }) => {}
            (None, _) => return Err(config_err("initial", "initial state is required")),
            (Some(Initial::Scalar(x)), 1) => {
                finite("initial", *x)?;
                if !(0.0..=1.0).contains(x) {
                    return Err(config_err("initial", "initial state must lie in [0, 1]"));
                }
            }
            (Some(Initial::Pair(p)), 2) => {
                for v in p {
                    finite("initial", *v)?;
                    if !(0.0..=1.0).contains(v) {
                        return Err(config_err("initial", "initial state must lie in [0, 1]^2"));
                    }
                }
            }
            (Some(_), d) => {
                return Err(config_err(
                    "initial",
                    format!("initial state does not match the model dimension {d}"),
                ))
            }
        }

        if let Some(r) = &self.assert_trapped {
            match r {
                RegionSpec::Interval(iv) => {
                    finite("assert_trapped.interval.lo", iv.lo)?;
                    finite("assert_trapped.interval.hi", iv.hi)?;
                    if iv.lo > iv.hi {
                        return Err(config_err("assert_trapped.interval", "lo > hi"));
                    }
                }
                RegionSpec::LinearPolygon { inflation } => {
                    if !(inflation.is_finite() && *inflation > 0.0) {
                        return Err(config_err(
                            "assert_trapped.linear-polygon.inflation",
                            "inflation must be positive",
                        ));
                    }
                    if !matches!(self.model, Model::Games(ref g) if g.len() == 2) {
                        return Err(config_err(
                            "assert_trapped",
                            "a linear polygon needs two games",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a scenario. Schema errors carry the path of the
/// offending field.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        config_err(&path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}
