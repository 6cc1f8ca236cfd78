use std::ffi::CStr;
use std::ptr;

use replitrap_ffi::*;

const NON1_A: [f64; 4] = [1.0, 0.0, 0.0, 1.0];
const NON1_B: [f64; 4] = [1.0, 0.0, 0.0, 3.0];
const NON2_B: [f64; 4] = [3.0, 0.0, 0.0, 1.0];

fn game(a: &[f64; 4], b: &[f64; 4]) -> *mut RtGame {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { rt_game_new(a.as_ptr(), b.as_ptr(), &mut g) }, RtStatus::Ok);
    g
}

#[test]
fn game_queries() {
    let g = game(&NON1_A, &NON1_B);
    let (mut dx, mut dy) = (0.0, 0.0);
    assert_eq!(unsafe { rt_game_rhs(g, 0.5, 0.5, &mut dx, &mut dy) }, RtStatus::Ok);
    assert_eq!((dx, dy), (0.0, -0.25));
    let (mut e, mut x, mut y) = (0, 0.0, 0.0);
    assert_eq!(unsafe { rt_game_fixed_point(g, &mut e, &mut x, &mut y) }, RtStatus::Ok);
    assert_eq!((e, x, y), (1, 0.75, 0.5));
    let mut v = 0.0;
    assert_eq!(unsafe { rt_constant_of_motion(g, 0.5, 0.5, &mut v) }, RtStatus::Ok);
    assert!((v - 0.25).abs() < 1e-15);
    unsafe { rt_game_free(g) };
}

#[test]
fn errors_set_status_and_message() {
    let g = game(&NON1_A, &NON1_B);
    let mut v = 0.0;
    assert_eq!(unsafe { rt_constant_of_motion(g, 0.0, 0.5, &mut v) }, RtStatus::Domain);
    assert!(last_error().unwrap().contains("interior"));
    let (mut dx, mut dy) = (0.0, 0.0);
    assert_eq!(unsafe { rt_game_rhs(g, f64::NAN, 0.5, &mut dx, &mut dy) }, RtStatus::Domain);
    assert_eq!(
        unsafe { rt_game_rhs(ptr::null(), 0.5, 0.5, &mut dx, &mut dy) },
        RtStatus::NullPointer
    );
    let msg = unsafe { CStr::from_ptr(rt_last_error_message()) };
    assert!(msg.to_str().unwrap().contains("game"));
    let bad = [f64::NAN, 0.0, 0.0, 1.0];
    let mut out = ptr::null_mut();
    assert_ne!(unsafe { rt_game_new(bad.as_ptr(), NON1_B.as_ptr(), &mut out) }, RtStatus::Ok);
    assert!(out.is_null());
    unsafe { rt_game_free(g) };
}

#[test]
fn switch_times_and_period() {
    let (mut l, mut r) = (0.0, 0.0);
    let s = unsafe { rt_switch_times(4.0, 1.0, 3.0, 2.0, 1.0 / 12.0, 1.0 / 6.0, &mut l, &mut r) };
    assert_eq!(s, RtStatus::Ok);
    assert!((l - 5.0 / 3.0 * 2f64.ln()).abs() < 1e-12);
    assert!((r - 0.5 * (27.0f64 / 4.0).ln()).abs() < 1e-12);
    let s = unsafe { rt_switch_times(4.0, 1.0, 3.0, 2.0, 0.3, 0.3, &mut l, &mut r) };
    assert_eq!(s, RtStatus::Precondition);
    let mut t = 0.0;
    assert_eq!(unsafe { rt_symmetric_period(1.0 / 12.0, &mut t) }, RtStatus::Ok);
    assert!((t - (1.5 * 3f64.ln() + 0.5 * (5.0f64 / 7.0).ln())).abs() < 1e-12);
}

#[test]
fn switched_run_round_trip() {
    let g1 = game(&NON1_A, &NON1_B);
    let g2 = game(&NON1_A, &NON2_B);
    let phases = [
        RtPhase { env: 0, duration: 6.15 },
        RtPhase { env: 1, duration: 8.35 },
        RtPhase { env: 0, duration: 4.0 },
        RtPhase { env: 1, duration: 2.0 },
    ];
    let mut tr = ptr::null_mut();
    let s = unsafe {
        rt_integrate_switched(g1, g2, phases.as_ptr(), phases.len(), false, 0.51, 0.8, 20.5, 0.0, &mut tr)
    };
    assert_eq!(s, RtStatus::Ok);
    assert_eq!(unsafe { rt_trajectory_len(tr) }, 20501);
    assert_eq!(unsafe { rt_trajectory_switch_count(tr) }, 3);
    let (mut t, mut x, mut y, mut env) = (0.0, 0.0, 0.0, 9u8);
    assert_eq!(unsafe { rt_trajectory_sample(tr, 0, &mut t, &mut x, &mut y, &mut env) }, RtStatus::Ok);
    assert_eq!((t, x, y, env), (0.0, 0.51, 0.8, 0));
    assert_eq!(
        unsafe { rt_trajectory_sample(tr, 20501, &mut t, &mut x, &mut y, &mut env) },
        RtStatus::OutOfRange
    );
    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { rt_trajectory_csv(tr, &mut csv) }, RtStatus::Ok);
    let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    assert!(text.starts_with("t,x,y,env\n0,0.51,0.8,I\n"));
    unsafe {
        rt_string_free(csv);
        rt_trajectory_free(tr);
    }

    let bad = [RtPhase { env: 7, duration: 1.0 }];
    let s = unsafe { rt_integrate_switched(g1, g2, bad.as_ptr(), 1, false, 0.5, 0.5, 1.0, 0.0, &mut tr) };
    assert_eq!(s, RtStatus::OutOfRange);

    let mut kind = RtConfiguration::Mixed;
    assert_eq!(unsafe { rt_classify_pair(g1, g2, &mut kind) }, RtStatus::Ok);
    assert_eq!(kind, RtConfiguration::LeftRight);
    unsafe {
        rt_game_free(g1);
        rt_game_free(g2);
        rt_trajectory_free(ptr::null_mut());
        rt_string_free(ptr::null_mut());
    }
}
