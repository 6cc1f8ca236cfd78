//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use replitrap::analytic1d::{
    switch_time_left, switch_time_right, symmetric_period, synthesize_schedule_1d, Phase,
    StartSide,
};
use replitrap::controller::{run_time_policy, verify_trapping, Interval};
use replitrap::dynamics::{
    conservation_drift, integrate_constant, integrate_switched, integrate_until, Threshold,
};
use replitrap::game::{interior_fixed_point, oscillation_condition, reduce_to_1d};
use replitrap::linear2d::{classify_pair, linearize, ConfigurationKind};
use replitrap::{
    BimatrixGame, Env, IntegratorConfig, Reduced1D, Schedule, State2D, SwitchedSystem,
    TrapWindow1D,
};

const SEED: u64 = 0x5eed_2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn non1() -> BimatrixGame {
    BimatrixGame::new([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 3.0]]).unwrap()
}

fn non2() -> BimatrixGame {
    BimatrixGame::new([[1.0, 0.0], [0.0, 1.0]], [[3.0, 0.0], [0.0, 1.0]]).unwrap()
}

fn scalar_pair() -> (Reduced1D, Reduced1D, TrapWindow1D) {
    (
        Reduced1D::new(4.0, 1.0),
        Reduced1D::new(3.0, 2.0),
        TrapWindow1D::new(1.0 / 12.0, 1.0 / 6.0),
    )
}

fn asymmetric_switch_times() -> Outcome {
    let start = Instant::now();
    let (r1, r2, w) = scalar_pair();
    let tl = switch_time_left(&r1, &r2, &w).unwrap();
    let tr = switch_time_right(&r1, &r2, &w).unwrap();
    let el = (tl - 5.0 / 3.0 * LN_2).abs();
    let er = (tr - 0.5 * (27.0f64 / 4.0).ln()).abs();
    let cfg = IntegratorConfig::with_step(1e-4);
    let nl = integrate_until(&r1, w.lower(&r1), Threshold::x(w.upper(&r2)), &cfg).unwrap().t;
    let nr = integrate_until(&r2, w.upper(&r2), Threshold::x(w.lower(&r1)), &cfg).unwrap().t;
    let rl = ((nl - tl) / tl).abs();
    let rr = ((nr - tr) / tr).abs();
    let elapsed = start.elapsed();
    outcome(
        el <= 1e-12 && er <= 1e-12 && rl <= 1e-6 && rr <= 1e-6 && elapsed < Duration::from_secs(1),
        format!(
            "|t_l - 5/3 ln2| = {el:.1e}, |t_r - ln(27/4)/2| = {er:.1e} (tol 1e-12); \
             oracle rel err {rl:.1e}, {rr:.1e} (tol 1e-6); {elapsed:.2?} (limit 1 s)"
        ),
    )
}

fn symmetric_period_shape() -> Outcome {
    let near_zero = symmetric_period(1e-6).unwrap();
    let grid: Vec<f64> = (0..50)
        .map(|i| 0.001 + (0.165 - 0.001) * i as f64 / 49.0)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&e| symmetric_period(e).unwrap()).collect();
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let at_edge = symmetric_period(1.0 / 6.0 - 1e-12).unwrap().abs();
    outcome(
        near_zero > 10.0 && decreasing && at_edge <= 1e-9,
        format!(
            "T(1e-6) = {near_zero:.3} (> 10); strictly decreasing on 50 points: {decreasing}; \
             |T(1/6 - 1e-12)| = {at_edge:.1e} (tol 1e-9)"
        ),
    )
}

fn scalar_trapping_endurance() -> Outcome {
    let start = Instant::now();
    let (r1, r2, w) = scalar_pair();
    let sched = synthesize_schedule_1d(&r1, &r2, &w, StartSide::Lower).unwrap();
    let period = sched.cycle_length();
    let sys = SwitchedSystem::new(r1, r2);
    let x0 = w.lower(&r1);
    let tr = run_time_policy(&sys, &sched, x0, 50.0 * period, &IntegratorConfig::default())
        .unwrap();
    let (lo, hi) = (1.0 / 3.0 - 1e-5, 0.5 + 1e-5);
    let rep = verify_trapping(&tr, &Interval::new(lo, hi));
    let elapsed = start.elapsed();
    let escape = rep
        .first_violation
        .as_ref()
        .map(|(t, s)| format!("; first exit at t = {t:.3} (period {:.1}), x = {:.7}", t / period, s[0]))
        .unwrap_or_default();
    outcome(
        rep.trapped && elapsed < Duration::from_secs(5),
        format!(
            "50 periods in [1/3 - 1e-5, 1/2 + 1e-5]: trapped = {}, min margin {:.1e}{escape}; {elapsed:.2?} (limit 5 s)",
            rep.trapped, rep.min_margin
        ),
    )
}

/// One-sided third-order derivative from four samples spaced `h` apart,
/// ordered outward from the evaluation point.
fn one_sided_slope(f: [f64; 4], h: f64) -> f64 {
    (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * h)
}

fn nonlinear_run() -> Outcome {
    let sys = SwitchedSystem::new(non1(), non2());
    let sched = Schedule::new(
        vec![
            Phase { env: Env::I, duration: 6.15 },
            Phase { env: Env::II, duration: 8.35 },
            Phase { env: Env::I, duration: 4.0 },
            Phase { env: Env::II, duration: 2.0 },
        ],
        false,
    )
    .unwrap();
    let cfg = IntegratorConfig::default();
    let tr = integrate_switched(&sys, &sched, State2D { x: 0.51, y: 0.8 }, 20.5, &cfg).unwrap();
    let interior = tr.samples.iter().all(|s| s.state.is_interior());
    let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    let corner_gap = tr
        .samples
        .iter()
        .flat_map(|s| corners.iter().map(move |c| (s.state.x - c.0).hypot(s.state.y - c.1)))
        .fold(f64::INFINITY, f64::min);
    let h = cfg.step;
    let (mut worst_x, mut least_y) = (0.0_f64, f64::INFINITY);
    for sw in &tr.switches {
        let k = tr.samples.iter().position(|s| s.t == sw.t).unwrap();
        let series = |i: usize| -> (f64, f64) {
            let s = tr.samples[i].state;
            (s.x, s.y)
        };
        let back: Vec<(f64, f64)> = (0..4).map(|j| series(k - j)).collect();
        let fwd: Vec<(f64, f64)> = (0..4).map(|j| series(k + j)).collect();
        let left = |pick: fn(&(f64, f64)) -> f64| {
            -one_sided_slope([pick(&back[0]), pick(&back[1]), pick(&back[2]), pick(&back[3])], h)
        };
        let right = |pick: fn(&(f64, f64)) -> f64| {
            one_sided_slope([pick(&fwd[0]), pick(&fwd[1]), pick(&fwd[2]), pick(&fwd[3])], h)
        };
        worst_x = worst_x.max((right(|p| p.0) - left(|p| p.0)).abs());
        least_y = least_y.min((right(|p| p.1) - left(|p| p.1)).abs());
    }
    outcome(
        interior && corner_gap > 0.05 && worst_x < 1e-6 && least_y > 0.1 && tr.switches.len() == 3,
        format!(
            "strictly interior: {interior}; corner distance {corner_gap:.3} (> 0.05); \
             slope jump x {worst_x:.1e} (< 1e-6), y {least_y:.3} (> 0.1) over {} switches",
            tr.switches.len()
        ),
    )
}

fn conservation() -> Outcome {
    let g = non1();
    let s0 = State2D { x: 0.6, y: 0.6 };
    let drift = |h: f64| {
        let tr = integrate_constant(&g, s0, 20.0, &IntegratorConfig::with_step(h)).unwrap();
        conservation_drift(&g, &tr).unwrap()
    };
    let (d1, d2) = (drift(1e-3), drift(5e-4));
    let ratio = d1 / d2;
    outcome(
        d1 < 1e-6 && ratio >= 8.0,
        format!("drift {d1:.2e} (< 1e-6); halving the step reduces it {ratio:.1}x (>= 8)"),
    )
}

/// Eigen-slope `sqrt(β/α)` of the interior saddle, straight from the payoff
/// entries.
fn raw_slope(g: &BimatrixGame) -> (f64, f64, f64) {
    let (a, b) = (&g.a, &g.b);
    let p = a[0][0] - a[0][1] - a[1][0] + a[1][1];
    let q = a[1][1] - a[0][1];
    let u = b[0][0] - b[0][1] - b[1][0] + b[1][1];
    let v = b[1][1] - b[1][0];
    let (bs, as_) = (v / u, q / p);
    let alpha = bs * (1.0 - bs) * p;
    let beta = as_ * (1.0 - as_) * u;
    (bs, as_, (beta / alpha).sqrt())
}

/// Saddle game centered at `(cx, cy)` with payoffs shifted by random
/// column and row offsets so the matrices are not diagonal.
fn random_saddle(rng: &mut StdRng) -> BimatrixGame {
    let (cx, cy) = (rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let p = sign * rng.gen_range(0.5..5.0);
    let u = sign * rng.gen_range(0.5..5.0);
    let (q, v) = (cy * p, cx * u);
    let (c1, c2, r1, r2): (f64, f64, f64, f64) = (
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
    );
    BimatrixGame::new(
        [[p - q + c1, c2], [c1, q + c2]],
        [[u - v + r1, r1], [r2, v + r2]],
    )
    .unwrap()
}

fn classification() -> Outcome {
    let (l1, l2) = (linearize(&non1()).unwrap(), linearize(&non2()).unwrap());
    let c = classify_pair(&l1, &l2).unwrap();
    let m = (8.0f64 / 3.0).sqrt();
    let worked = c.kind == ConfigurationKind::LeftRight
        && (c.slope_first - m).abs() <= 1e-12
        && (c.slope_second - m).abs() <= 1e-12;

    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut checked, mut agree, mut banded) = (0, 0, 0);
    let mut counts = [0usize; 3];
    while checked + banded < 1000 {
        let (g1, g2) = (random_saddle(&mut rng), random_saddle(&mut rng));
        let (x1, y1, m1) = raw_slope(&g1);
        let (x2, y2, m2) = raw_slope(&g2);
        let (dx, dy) = ((x2 - x1).abs(), (y2 - y1).abs());
        if dx == 0.0 && dy == 0.0 {
            continue;
        }
        let near = |m: f64| (dy - m * dx).abs() <= 1e-6 * m * dx.max(dy);
        if near(m1) || near(m2) {
            banded += 1;
            continue;
        }
        let below = [dy < m1 * dx, dy < m2 * dx];
        let expect = match below {
            [true, true] => ConfigurationKind::LeftRight,
            [false, false] => ConfigurationKind::UpDown,
            _ => ConfigurationKind::Mixed,
        };
        let got = classify_pair(&linearize(&g1).unwrap(), &linearize(&g2).unwrap())
            .unwrap()
            .kind;
        counts[match expect {
            ConfigurationKind::LeftRight => 0,
            ConfigurationKind::UpDown => 1,
            _ => 2,
        }] += 1;
        checked += 1;
        if got == expect {
            agree += 1;
        }
    }
    outcome(
        worked && agree == checked,
        format!(
            "worked pair {:?}, slopes {:.15}, {:.15} (sqrt(8/3) within 1e-12); \
             random pairs {agree}/{checked} agree (LR {}, UD {}, mixed {}; {banded} in band)",
            c.kind, c.slope_first, c.slope_second, counts[0], counts[1], counts[2]
        ),
    )
}

fn reduction_consistency() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 7);
    let cfg = IntegratorConfig::default();
    let mut worst = 0.0_f64;
    let mut games = 0;
    while games < 100 {
        let a = [
            [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
            [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
        ];
        let g = BimatrixGame::new(a, [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]).unwrap();
        let r = reduce_to_1d(&g).unwrap();
        let eq = r.b / r.a;
        if !(eq > 0.0 && eq < 1.0) {
            continue;
        }
        games += 1;
        let x0 = rng.gen_range(0.05..0.95);
        let planar = integrate_constant(&g, State2D { x: x0, y: x0 }, 5.0, &cfg).unwrap();
        let scalar = integrate_constant(&r, x0, 5.0, &cfg).unwrap();
        for (p, s) in planar.samples.iter().zip(&scalar.samples) {
            worst = worst
                .max((p.state.x - s.state).abs())
                .max((p.state.y - s.state).abs());
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{games} games, max pointwise deviation {worst:.1e} (tol 1e-10)"),
    )
}

fn random_center(rng: &mut StdRng) -> BimatrixGame {
    let gap = |rng: &mut StdRng| rng.gen_range(0.2..5.0);
    let base = |rng: &mut StdRng| rng.gen_range(-2.0..2.0);
    let (a21, a12, b12, b21) = (base(rng), base(rng), base(rng), base(rng));
    BimatrixGame::new(
        [[a21 - gap(rng), a12], [a21, a12 - gap(rng)]],
        [[b12 + gap(rng), b12], [b21, b21 + gap(rng)]],
    )
    .unwrap()
}

fn closed_orbits() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 11);
    let cfg = IntegratorConfig::default();
    let (mut worst_return, mut worst_drift) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let g = random_center(&mut rng);
        assert!(oscillation_condition(&g));
        let c = interior_fixed_point(&g).unwrap();
        let alpha = c.x * (1.0 - c.x) * g.p();
        let beta = c.y * (1.0 - c.y) * g.u();
        let period = 2.0 * PI / (-alpha * beta).sqrt();
        let room = c.x.min(1.0 - c.x).min(c.y).min(1.0 - c.y);
        let s0 = State2D { x: c.x + 0.01 * room, y: c.y };
        let tr = integrate_constant(&g, s0, period, &cfg).unwrap();
        let end = tr.final_state();
        worst_return = worst_return.max((end.x - s0.x).hypot(end.y - s0.y));
        worst_drift = worst_drift.max(conservation_drift(&g, &tr).unwrap());
    }
    outcome(
        worst_return <= 1e-3 && worst_drift < 1e-6,
        format!(
            "100 games, worst return distance {worst_return:.1e} (tol 1e-3), worst drift {worst_drift:.1e} (< 1e-6)"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 asymmetric switch times", asymmetric_switch_times),
        ("2 symmetric dwell time", symmetric_period_shape),
        ("3 scalar trapping over 50 periods", scalar_trapping_endurance),
        ("4 nonlinear switched run", nonlinear_run),
        ("5 conservation", conservation),
        ("6 classification", classification),
        ("7 reduction consistency", reduction_consistency),
        ("8 closed orbits", closed_orbits),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} [{name}] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
