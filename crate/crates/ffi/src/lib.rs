//! C ABI over the `replitrap` library.
//!
//! Games and trajectories are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! [`RtStatus`]; on failure [`rt_last_error_message`] describes the error.
//! Strings returned by the library are released with [`rt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use replitrap::analytic1d::{
    switch_time_left, switch_time_right, symmetric_period, Phase, Schedule, TrapWindow1D,
};
use replitrap::dynamics::{constant_of_motion, integrate_switched, IntegratorConfig, Trajectory};
use replitrap::game::{interior_fixed_point, replicator_rhs};
use replitrap::io::emit_trajectory_csv;
use replitrap::linear2d::{classify_pair, linearize, ConfigurationKind};
use replitrap::{BimatrixGame, Env, Error, Reduced1D, State2D, SwitchedSystem};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Precondition = 3,
    Integration = 4,
    Timeout = 5,
    Geometry = 6,
    Config = 7,
    OutOfRange = 8,
    Panic = 9,
}

/// Relative position of two saddles.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtConfiguration {
    LeftRight = 0,
    UpDown = 1,
    SharedStableManifold = 2,
    SharedUnstableManifold = 3,
    Mixed = 4,
}

/// Environment identifier: 0 for environment I, 1 for environment II.
pub type RtEnv = u8;

/// One phase of a switching schedule.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RtPhase {
    pub env: RtEnv,
    pub duration: f64,
}

/// Opaque bimatrix game.
pub struct RtGame(BimatrixGame);

/// Opaque planar trajectory.
pub struct RtTrajectory(Trajectory<State2D>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RtStatus {
    match e {
        Error::Domain(_) => RtStatus::Domain,
        Error::Precondition(_) => RtStatus::Precondition,
        Error::Integration { .. } => RtStatus::Integration,
        Error::Timeout { .. } => RtStatus::Timeout,
        Error::Geometry(_) => RtStatus::Geometry,
        Error::Config { .. } => RtStatus::Config,
    }
}

fn fail(status: RtStatus, msg: impl Into<String>) -> RtStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), RtStatus>) -> RtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(RtStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: replitrap::Result<T>) -> Result<T, RtStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), RtStatus> {
    if p.is_null() {
        Err(fail(RtStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

fn env_of(id: RtEnv) -> Result<Env, RtStatus> {
    match id {
        0 => Ok(Env::I),
        1 => Ok(Env::II),
        _ => Err(fail(RtStatus::OutOfRange, format!("unknown environment {id}"))),
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a game from row-major payoff matrices `a` and `b` (4 entries
/// each: `x11, x12, x21, x22`).
///
/// # Safety
/// `a` and `b` must point to 4 readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_game_new(a: *const f64, b: *const f64, out: *mut *mut RtGame) -> RtStatus {
    guard(|| {
        non_null(a, "a")?;
        non_null(b, "b")?;
        non_null(out, "out")?;
        let (a, b) = (std::slice::from_raw_parts(a, 4), std::slice::from_raw_parts(b, 4));
        let game = lib(BimatrixGame::new(
            [[a[0], a[1]], [a[2], a[3]]],
            [[b[0], b[1]], [b[2], b[3]]],
        ))?;
        *out = Box::into_raw(Box::new(RtGame(game)));
        Ok(())
    })
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` must come from [`rt_game_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rt_game_free(game: *mut RtGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Velocity of the replicator system at `(x, y)`.
///
/// # Safety
/// `game` must be a live handle; `dx` and `dy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_game_rhs(
    game: *const RtGame,
    x: f64,
    y: f64,
    dx: *mut f64,
    dy: *mut f64,
) -> RtStatus {
    guard(|| {
        non_null(game, "game")?;
        non_null(dx, "dx")?;
        non_null(dy, "dy")?;
        let (vx, vy) = lib(replicator_rhs(&(*game).0, State2D { x, y }))?;
        *dx = vx;
        *dy = vy;
        Ok(())
    })
}

/// Interior fixed point. `exists` is set to 0 when there is none, in which
/// case `x` and `y` are left untouched.
///
/// # Safety
/// `game` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_game_fixed_point(
    game: *const RtGame,
    exists: *mut i32,
    x: *mut f64,
    y: *mut f64,
) -> RtStatus {
    guard(|| {
        non_null(game, "game")?;
        non_null(exists, "exists")?;
        non_null(x, "x")?;
        non_null(y, "y")?;
        match interior_fixed_point(&(*game).0) {
            Some(s) => {
                *exists = 1;
                *x = s.x;
                *y = s.y;
            }
            None => *exists = 0,
        }
        Ok(())
    })
}

/// Value of the constant of motion at an interior point.
///
/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_constant_of_motion(
    game: *const RtGame,
    x: f64,
    y: f64,
    out: *mut f64,
) -> RtStatus {
    guard(|| {
        non_null(game, "game")?;
        non_null(out, "out")?;
        *out = lib(constant_of_motion(&(*game).0, State2D { x, y }))?;
        Ok(())
    })
}

/// Closed-form dwell times of the scalar pair `(a1, b1)`, `(a2, b2)` with
/// window offsets `eps` and `delta`.
///
/// # Safety
/// `t_left` and `t_right` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_switch_times(
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    eps: f64,
    delta: f64,
    t_left: *mut f64,
    t_right: *mut f64,
) -> RtStatus {
    guard(|| {
        non_null(t_left, "t_left")?;
        non_null(t_right, "t_right")?;
        let (r1, r2) = (Reduced1D::new(a1, b1), Reduced1D::new(a2, b2));
        let w = TrapWindow1D::new(eps, delta);
        let (l, r) = (lib(switch_time_left(&r1, &r2, &w))?, lib(switch_time_right(&r1, &r2, &w))?);
        *t_left = l;
        *t_right = r;
        Ok(())
    })
}

/// Dwell time of the symmetric pair for window offset `eps`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_symmetric_period(eps: f64, out: *mut f64) -> RtStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lib(symmetric_period(eps))?;
        Ok(())
    })
}

/// Integrates the switched system over `[0, t_end]` following `phases`.
/// A `step` of 0 selects the default step.
///
/// # Safety
/// `env_i` and `env_ii` must be live handles; `phases` must point to
/// `n_phases` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_integrate_switched(
    env_i: *const RtGame,
    env_ii: *const RtGame,
    phases: *const RtPhase,
    n_phases: usize,
    repeat: bool,
    x0: f64,
    y0: f64,
    t_end: f64,
    step: f64,
    out: *mut *mut RtTrajectory,
) -> RtStatus {
    guard(|| {
        non_null(env_i, "env_i")?;
        non_null(env_ii, "env_ii")?;
        non_null(phases, "phases")?;
        non_null(out, "out")?;
        let raw = std::slice::from_raw_parts(phases, n_phases);
        let phases = raw
            .iter()
            .map(|p| {
                Ok(Phase {
                    env: env_of(p.env)?,
                    duration: p.duration,
                })
            })
            .collect::<Result<Vec<_>, RtStatus>>()?;
        let sched = lib(Schedule::new(phases, repeat))?;
        let sys = SwitchedSystem::new((*env_i).0, (*env_ii).0);
        let cfg = if step == 0.0 {
            IntegratorConfig::default()
        } else {
            IntegratorConfig::with_step(step)
        };
        let tr = lib(integrate_switched(&sys, &sched, State2D { x: x0, y: y0 }, t_end, &cfg))?;
        *out = Box::into_raw(Box::new(RtTrajectory(tr)));
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rt_trajectory_len(traj: *const RtTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Number of environment switches; 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rt_trajectory_switch_count(traj: *const RtTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.switches.len())
}

/// Sample `index` as time, state and environment.
///
/// # Safety
/// `traj` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_trajectory_sample(
    traj: *const RtTrajectory,
    index: usize,
    t: *mut f64,
    x: *mut f64,
    y: *mut f64,
    env: *mut RtEnv,
) -> RtStatus {
    guard(|| {
        non_null(traj, "traj")?;
        for (p, n) in [(t, "t"), (x, "x"), (y, "y")] {
            non_null(p, n)?;
        }
        non_null(env, "env")?;
        let samples = &(*traj).0.samples;
        let s = samples.get(index).ok_or_else(|| {
            fail(
                RtStatus::OutOfRange,
                format!("index {index} out of range for {} samples", samples.len()),
            )
        })?;
        *t = s.t;
        *x = s.state.x;
        *y = s.state.y;
        *env = match s.env {
            Env::I => 0,
            Env::II => 1,
        };
        Ok(())
    })
}

/// The trajectory as CSV text. Release with [`rt_string_free`].
///
/// # Safety
/// `traj` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_trajectory_csv(traj: *const RtTrajectory, out: *mut *mut c_char) -> RtStatus {
    guard(|| {
        non_null(traj, "traj")?;
        non_null(out, "out")?;
        let csv = emit_trajectory_csv(&(*traj).0);
        *out = CString::new(csv).expect("csv has no nul").into_raw();
        Ok(())
    })
}

/// Releases a trajectory. Null is ignored.
///
/// # Safety
/// `traj` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rt_trajectory_free(traj: *mut RtTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Classifies the interior saddles of two games.
///
/// # Safety
/// `first` and `second` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_classify_pair(
    first: *const RtGame,
    second: *const RtGame,
    out: *mut RtConfiguration,
) -> RtStatus {
    guard(|| {
        non_null(first, "first")?;
        non_null(second, "second")?;
        non_null(out, "out")?;
        let c = lib(classify_pair(
            &lib(linearize(&(*first).0))?,
            &lib(linearize(&(*second).0))?,
        ))?;
        *out = match c.kind {
            ConfigurationKind::LeftRight => RtConfiguration::LeftRight,
            ConfigurationKind::UpDown => RtConfiguration::UpDown,
            ConfigurationKind::SharedStableManifold => RtConfiguration::SharedStableManifold,
            ConfigurationKind::SharedUnstableManifold => RtConfiguration::SharedUnstableManifold,
            ConfigurationKind::Mixed => RtConfiguration::Mixed,
        };
        Ok(())
    })
}

/// Copies the last error message into an owned Rust string (test helper).
#[doc(hidden)]
pub fn last_error() -> Option<String> {
    let p = rt_last_error_message();
    if p.is_null() {
        None
    } else {
        // SAFETY: the pointer comes from a live thread-local CString.
        Some(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }
}
