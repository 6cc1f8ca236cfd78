//! Trajectory CSV with `%.12g`-style numbers.

use std::fmt::Write;

use crate::dynamics::{PhaseState, Trajectory};

/// Formats `v` like C's `%.{sig}g`: `sig` significant digits, trailing
/// zeros dropped, exponent form outside `1e-4 <= |v| < 10^sig`.
pub fn format_g(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One row per sample: `t,x,env` for the scalar reduction and `t,x,y,env`
/// for the plane.
pub fn emit_trajectory_csv<S: PhaseState>(traj: &Trajectory<S>) -> String {
    let dims = traj.samples.first().map_or(2, |s| s.state.coords().len());
    let mut out = String::from(if dims == 1 { "t,x,env\n" } else { "t,x,y,env\n" });
    for s in &traj.samples {
        out.push_str(&format_g(s.t, 12));
        for c in s.state.coords() {
            out.push(',');
            out.push_str(&format_g(c, 12));
        }
        let _ = writeln!(out, ",{}", s.env);
    }
    out
}
