use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use replitrap::analytic1d::{
    switch_time_left, switch_time_right, synthesize_schedule_1d, StartSide, TrapWindow1D,
};
use replitrap::dynamics::{
    conservation_drift, constant_of_motion, integrate_constant, integrate_until, IntegratorConfig,
    Threshold,
};
use replitrap::io::config::{Initial, Mode, Model};
use replitrap::io::scenario::{constant_env, RunTrajectory};
use replitrap::io::{emit_phase_svg, parse_config, run_scenario, OutputFormat, ScenarioConfig};
use replitrap::linear2d::{classify_pair, linearize, trapping_polygon};
use replitrap::{Error, Reduced1D, State2D};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_UNTRAPPED: u8 = 4;

#[derive(Parser)]
#[command(name = "replitrap", version, about = "Switching control for replicator dynamics")]
struct Cli {
    /// Directory for written outputs.
    #[arg(long, global = true, display_order = 100, env = "REPLITRAP_OUT", default_value = ".")]
    out_dir: PathBuf,
    /// Overrides the integration step of the scenario.
    #[arg(long, global = true, display_order = 100)]
    step: Option<f64>,
    /// Seed for randomized runs.
    #[arg(long, global = true, display_order = 100, default_value_t = 0)]
    seed: u64,
    /// Output formats; repeat for several.
    #[arg(long, global = true, display_order = 100, value_enum)]
    format: Vec<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write the requested outputs.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the synthesized scalar schedule.
    Schedule(PairArgs),
    /// Print the configuration of two saddles and their linearizations.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the linear trapping polygon of two games.
    Region {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a constant-environment scenario and report drift of the
    /// constant of motion.
    Conserve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare located crossing times with the closed-form switch times.
    Oracle {
        #[command(flatten)]
        pair: PairArgs,
        /// Check this many random admissible instances instead.
        #[arg(long)]
        random: Option<usize>,
    },
}

/// A scalar environment pair and window, from a scenario or from flags.
#[derive(Args)]
struct PairArgs {
    /// Scenario with a reduced model and a windowed time schedule.
    #[arg(long, conflicts_with_all = ["a1", "b1", "a2", "b2", "eps", "delta"])]
    config: Option<PathBuf>,
    /// Coefficients of `x(1-x)(a x - b)` in environment I.
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    b1: Option<f64>,
    /// Coefficients in environment II.
    #[arg(long)]
    a2: Option<f64>,
    #[arg(long)]
    b2: Option<f64>,
    /// Window offsets from the two equilibria.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Side::Lower)]
    start: Side,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Lower,
    Upper,
}

enum Failure {
    Lib(Error),
    Untrapped(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<Value, Failure>;

fn config_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn load(path: &Path, step: Option<f64>) -> Result<ScenarioConfig, Error> {
    let text = fs::read_to_string(path).map_err(|e| config_error(path, e.to_string()))?;
    let mut cfg = parse_config(&text)?;
    if let Some(h) = step {
        cfg.integrator.step = h;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<String, Error> {
    fs::create_dir_all(dir).map_err(|e| config_error(dir, e.to_string()))?;
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| config_error(&path, e.to_string()))?;
    Ok(path.display().to_string())
}

fn simulate(cli: &Cli, config: &Path) -> Outcome {
    let cfg = load(config, cli.step)?;
    let run = run_scenario(&cfg)?;
    let formats = if !cli.format.is_empty() {
        cli.format.clone()
    } else if !cfg.outputs.is_empty() {
        cfg.outputs.clone()
    } else {
        vec![OutputFormat::Csv]
    };
    let mut files = Vec::new();
    for f in formats {
        match f {
            OutputFormat::Csv => {
                files.push(write_file(&cli.out_dir, "trajectory.csv", &run.trajectory.csv())?)
            }
            OutputFormat::Json => {
                let body = serde_json::to_string_pretty(&run).expect("run serializes");
                files.push(write_file(&cli.out_dir, "trajectory.json", &body)?)
            }
            OutputFormat::Svg => {
                let RunTrajectory::Planar(tr) = &run.trajectory else {
                    return Err(config_error(config, "SVG portraits need the planar model").into());
                };
                let svg = emit_phase_svg(Some(tr), run.polygon.as_ref(), &run.games);
                files.push(write_file(&cli.out_dir, "portrait.svg", &svg)?)
            }
        }
    }
    let final_state = match &run.trajectory {
        RunTrajectory::Scalar(t) => json!(t.final_state()),
        RunTrajectory::Planar(t) => json!(t.final_state()),
    };
    let summary = json!({
        "samples": run.trajectory.len(),
        "switches": run.trajectory.switch_count(),
        "final_state": final_state,
        "policy_report": run.policy_report,
        "verification": run.verification,
        "files": files,
    });
    if run.passed() {
        Ok(summary)
    } else {
        Err(Failure::Untrapped(summary))
    }
}

fn pair_from(args: &PairArgs) -> Result<(Reduced1D, Reduced1D, TrapWindow1D, StartSide), Error> {
    let start = match args.start {
        Side::Lower => StartSide::Lower,
        Side::Upper => StartSide::Upper,
    };
    if let Some(path) = &args.config {
        let cfg = load(path, None)?;
        let Model::Reduced(rs) = &cfg.model else {
            return Err(config_error(path, "expected the reduced model"));
        };
        let Mode::TimeSchedule { window: Some(w), start, .. } = cfg.mode else {
            return Err(config_error(path, "expected a time-schedule with a window"));
        };
        return Ok((rs[0], rs[1], w, start));
    }
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::Config {
            path: format!("--{name}"),
            message: "required without --config".into(),
        })
    };
    let r1 = Reduced1D::new(need(args.a1, "a1")?, need(args.b1, "b1")?);
    let r2 = Reduced1D::new(need(args.a2, "a2")?, need(args.b2, "b2")?);
    let w = TrapWindow1D::new(need(args.eps, "eps")?, need(args.delta, "delta")?);
    w.validate(&r1, &r2).map_err(|e| Error::Config {
        path: "window".into(),
        message: e.to_string(),
    })?;
    Ok((r1, r2, w, start))
}

fn schedule(args: &PairArgs) -> Outcome {
    let (r1, r2, w, start) = pair_from(args)?;
    let tl = switch_time_left(&r1, &r2, &w)?;
    let tr = switch_time_right(&r1, &r2, &w)?;
    let sched = synthesize_schedule_1d(&r1, &r2, &w, start)?;
    Ok(json!({
        "t_left": tl,
        "t_right": tr,
        "period": tl + tr,
        "lower": w.lower(&r1),
        "upper": w.upper(&r2),
        "start": start,
        "initial_x": start.initial_x(&r1, &r2, &w),
        "schedule": sched,
    }))
}

fn two_games(path: &Path) -> Result<[replitrap::BimatrixGame; 2], Error> {
    let cfg = load(path, None)?;
    match cfg.model {
        Model::Games(g) if g.len() == 2 => Ok([g[0], g[1]]),
        _ => Err(config_error(path, "expected two games")),
    }
}

fn classify(config: &Path) -> Outcome {
    let [g1, g2] = two_games(config)?;
    let (l1, l2) = (linearize(&g1)?, linearize(&g2)?);
    let c = classify_pair(&l1, &l2)?;
    Ok(json!({ "configuration": c, "first": l1, "second": l2 }))
}

fn region(cli: &Cli, config: &Path) -> Result<Option<Value>, Failure> {
    let [g1, g2] = two_games(config)?;
    let poly = trapping_polygon(&linearize(&g1)?, &linearize(&g2)?)?;
    if cli.format.contains(&OutputFormat::Svg) {
        emit(&emit_phase_svg(None, Some(&poly), &[g1, g2]));
        return Ok(None);
    }
    Ok(Some(serde_json::to_value(&poly).expect("polygon serializes")))
}

fn conserve(cli: &Cli, config: &Path) -> Outcome {
    let cfg = load(config, cli.step)?;
    let Some(env) = constant_env(&cfg) else {
        return Err(config_error(config, "conserve needs a constant-mode scenario").into());
    };
    let (Model::Games(gs), Some(Initial::Pair([x, y]))) = (&cfg.model, cfg.initial) else {
        return Err(config_error(config, "conserve needs the planar model").into());
    };
    let game = if env == replitrap::Env::II { gs[1] } else { gs[0] };
    let s0 = State2D { x, y };
    let tr = integrate_constant(&game, s0, cfg.horizon, &cfg.integrator)?;
    let drift = conservation_drift(&game, &tr)?;
    Ok(json!({
        "v0": constant_of_motion(&game, s0)?,
        "drift": drift,
        "samples": tr.len(),
        "step": cfg.integrator.step,
    }))
}

fn oracle_one(r1: &Reduced1D, r2: &Reduced1D, w: &TrapWindow1D, step: f64) -> Result<Value, Error> {
    let cfg = IntegratorConfig {
        step,
        ..Default::default()
    };
    let (lo, hi) = (w.lower(r1), w.upper(r2));
    let tl = switch_time_left(r1, r2, w)?;
    let tr = switch_time_right(r1, r2, w)?;
    let nl = integrate_until(r1, lo, Threshold::x(hi), &cfg)?.t;
    let nr = integrate_until(r2, hi, Threshold::x(lo), &cfg)?.t;
    let entry = |closed: f64, num: f64| {
        json!({
            "closed_form": closed,
            "numerical": num,
            "relative_error": ((num - closed) / closed).abs(),
        })
    };
    Ok(json!({ "left": entry(tl, nl), "right": entry(tr, nr) }))
}

/// Admissible scalar pair with both equilibria and the window well inside
/// the unit interval.
fn random_pair(rng: &mut StdRng) -> (Reduced1D, Reduced1D, TrapWindow1D) {
    let lo: f64 = rng.gen_range(0.1..0.4);
    let hi: f64 = rng.gen_range(0.6..0.9);
    let b1: f64 = rng.gen_range(0.5..3.0);
    let b2: f64 = rng.gen_range(0.5..3.0);
    let gap = hi - lo;
    let w = TrapWindow1D::new(rng.gen_range(0.05..0.4) * gap, rng.gen_range(0.05..0.4) * gap);
    (Reduced1D::new(b1 / lo, b1), Reduced1D::new(b2 / hi, b2), w)
}

fn oracle(cli: &Cli, pair: &PairArgs, random: Option<usize>) -> Outcome {
    let step = cli.step.unwrap_or(1e-4);
    match random {
        None => {
            let (r1, r2, w, _) = pair_from(pair)?;
            Ok(oracle_one(&r1, &r2, &w, step)?)
        }
        Some(n) => {
            let mut rng = StdRng::seed_from_u64(cli.seed);
            let mut worst = 0.0_f64;
            for _ in 0..n {
                let (r1, r2, w) = random_pair(&mut rng);
                let v = oracle_one(&r1, &r2, &w, step)?;
                for side in ["left", "right"] {
                    worst = worst.max(v[side]["relative_error"].as_f64().unwrap_or(f64::NAN));
                }
            }
            Ok(json!({ "instances": n, "seed": cli.seed, "step": step, "max_relative_error": worst }))
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit_json(v: &Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("json")));
}

fn run(cli: &Cli) -> Result<Option<Value>, Failure> {
    match &cli.command {
        Command::Simulate { config } => simulate(cli, config).map(Some),
        Command::Schedule(p) => schedule(p).map(Some),
        Command::Classify { config } => classify(config).map(Some),
        Command::Region { config } => region(cli, config),
        Command::Conserve { config } => conserve(cli, config).map(Some),
        Command::Oracle { pair, random } => oracle(cli, pair, *random).map(Some),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(v)) => {
            emit_json(&v);
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Failure::Untrapped(v)) => {
            emit_json(&v);
            eprintln!("error: trajectory left the asserted region");
            ExitCode::from(EXIT_UNTRAPPED)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            })
        }
    }
}
