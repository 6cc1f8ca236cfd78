//! The generated header must parse as C and C++.

use std::path::Path;
use std::process::Command;

fn check(compiler: &str, lang: &str) {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/replitrap.h");
    assert!(header.exists(), "header was not generated");
    let Ok(out) = Command::new(compiler)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
        .arg(&header)
        .output()
    else {
        eprintln!("{compiler} not available, skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn header_parses_as_c() {
    check("cc", "c");
}

#[test]
fn header_parses_as_cxx() {
    check("c++", "c++");
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/replitrap.h"))
        .unwrap();
    for name in [
        "rt_game_new",
        "rt_game_free",
        "rt_integrate_switched",
        "rt_trajectory_csv",
        "rt_classify_pair",
        "rt_last_error_message",
        "typedef struct RtGame RtGame",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}
