use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn shocklab(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shocklab"));
    cmd.args(args).env_remove("SHOCKLAB_OUT");
    if let Some(p) = env_out {
        cmd.env("SHOCKLAB_OUT", p);
    }
    cmd.output().expect("spawn shocklab")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const BURGERS: &str = "schema = 1\nmodel = \"burgers\"\n\n[grid]\nhalf_width = 20.0\nnodes = 401\n";

#[test]
fn unknown_model_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "schema = 1\nmodel = \"no_such_model\"\n");
    let out = shocklab(&["--out", tmp.path().to_str().unwrap(), "profile", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no_such_model"), "{err}");
}

#[test]
fn unknown_field_and_bad_flags_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "schema = 1\nmodel = \"burgers\"\nbogus = 3\n");
    assert_eq!(shocklab(&["profile", &cfg], Some(tmp.path())).status.code(), Some(2));
    assert_eq!(shocklab(&["profile", "--no-such-flag"], None).status.code(), Some(2));
    assert_eq!(shocklab(&["verify", "--only", "9"], Some(tmp.path())).status.code(), Some(2));
}

#[test]
fn profile_writes_stamped_reproducible_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), BURGERS);
    let root = tmp.path().join("out");
    let run = || {
        let out = shocklab(&["--out", root.to_str().unwrap(), "profile", &cfg], None);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(root.join("profile/profile.csv")).unwrap()
    };
    let first = run();
    for stamp in ["config.toml", "meta.json", "summary.json"] {
        assert!(root.join("profile").join(stamp).is_file(), "missing {stamp}");
    }
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(root.join("profile/meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "profile");
    assert_eq!(meta["model"], "burgers");
    assert_eq!(run(), first);
}

#[test]
fn env_var_sets_output_root() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), BURGERS);
    let root = tmp.path().join("from-env");
    let out = shocklab(&["profile", &cfg], Some(&root));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(root.join("profile/profile.csv").is_file());

    let flag = tmp.path().join("from-flag");
    let out = shocklab(&["--out", flag.to_str().unwrap(), "profile", &cfg], Some(&root));
    assert_eq!(out.status.code(), Some(0));
    assert!(flag.join("profile/profile.csv").is_file());
}

#[test]
fn report_aggregates_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), BURGERS);
    assert_eq!(shocklab(&["profile", &cfg], Some(tmp.path())).status.code(), Some(0));
    assert_eq!(shocklab(&["spectrum", &cfg], Some(tmp.path())).status.code(), Some(0));
    let out = shocklab(&["report"], Some(tmp.path()));
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("sup_error") && table.contains("spectrum"), "{table}");
    assert!(tmp.path().join("report/summary.csv").is_file());
}
