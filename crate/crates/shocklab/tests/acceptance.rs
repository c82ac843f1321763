//! Full acceptance run. The suite runs twice into the same directory so the
//! second pass can check that every CSV is reproduced byte for byte.

use std::io::Write;
use std::sync::OnceLock;

use shocklab::criteria::{self, Status, VerifyReport};

struct Runs {
    _dir: tempfile::TempDir,
    first: VerifyReport,
    second: VerifyReport,
}

fn runs() -> &'static Runs {
    static RUNS: OnceLock<Runs> = OnceLock::new();
    RUNS.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let out = dir.path().join("verify");
        let first = criteria::verify(&out, 0, &[]).expect("first verify run");
        let second = criteria::verify(&out, 0, &[]).expect("second verify run");
        Runs { _dir: dir, first, second }
    })
}

// Written to the process stderr directly so the lines appear even when the
// harness captures test output.
fn show(text: &str) {
    let _ = std::io::stderr().lock().write_all(text.as_bytes());
}

fn check(id: u8) {
    let runs = runs();
    let o = runs.first.get(id).expect("criterion ran");
    let mut text = o.line() + "\n";
    for c in &o.checks {
        let mark = if c.passed { "ok" } else { "FAILED" };
        text += &format!("    {:<36} {:>14.6e}  {:<12} {mark}\n", c.name, c.value, c.target);
    }
    show(&text);
    assert_eq!(o.status, Status::Pass, "{}", o.line());
    let again = runs.second.get(id).expect("criterion reran");
    assert_eq!(again.status, Status::Pass, "rerun: {}", again.line());
}

#[test]
fn criterion_1_profiles() {
    check(1);
}

#[test]
fn criterion_2_spectral() {
    check(2);
}

#[test]
fn criterion_3_evans() {
    check(3);
}

#[test]
fn criterion_4_manifold() {
    check(4);
}

#[test]
fn criterion_5_dichotomy() {
    check(5);
}

#[test]
fn criterion_6_decay() {
    check(6);
}

#[test]
fn criterion_7_templates() {
    check(7);
}

#[test]
fn criterion_8_determinism() {
    let runs = runs();
    let first = runs.first.get(8).expect("criterion 8 ran");
    assert_eq!(first.status, Status::Pending);
    let o = runs.second.get(8).expect("criterion 8 reran");
    show(&(o.line() + "\n"));
    assert_eq!(o.status, Status::Pass, "{}", o.line());
}
