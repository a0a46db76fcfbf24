use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hphs() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hphs"));
    cmd.env_remove("HPHS_CONFIG");
    cmd
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// 30x30 room with one interior wall stub.
fn small_map(dir: &Path) -> PathBuf {
    let mut text = String::from("; small test room\n");
    for y in 0..30 {
        let row: String = (0..30)
            .map(|x| {
                let border = x == 0 || y == 0 || x == 29 || y == 29;
                if border || (x == 15 && y < 18) {
                    '#'
                } else if (x, y) == (5, 25) {
                    'S'
                } else {
                    '.'
                }
            })
            .collect();
        text.push_str(&row);
        text.push('\n');
    }
    let path = dir.join("room.txt");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn explore_writes_all_artifacts() {
    let dir = TempDir::new().unwrap();
    let map = small_map(dir.path());
    let out_dir = dir.path().join("out");
    let saved = dir.path().join("run.jsonl");
    let out = hphs()
        .args(["explore", "--map"])
        .arg(&map)
        .arg("--out-dir")
        .arg(&out_dir)
        .arg("--save-run")
        .arg(&saved)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let steps = fs::read_to_string(out_dir.join("steps.csv")).unwrap();
    assert!(steps.lines().count() > 2);
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    assert!(summary.contains("room"));
    let svg = fs::read_to_string(out_dir.join("trajectory.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(stderr(&out).contains("complete"));

    let rendered = dir.path().join("again.svg");
    let out = hphs().arg("render").arg("--run").arg(&saved).arg("--out").arg(&rendered).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(rendered).unwrap(), svg);
}

#[test]
fn missing_map_names_the_path() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nowhere.txt");
    let out = hphs().arg("explore").arg("--map").arg(&missing).arg("--out-dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nowhere.txt"), "{}", stderr(&out));
    assert!(!dir.path().join("steps.csv").exists());
}

#[test]
fn step_budget_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let out = hphs()
        .args(["explore", "--max-steps", "10", "--map", "maze", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let steps = fs::read_to_string(dir.path().join("steps.csv")).unwrap();
    assert_eq!(steps.lines().count(), 1 + 11);
}

#[test]
fn config_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let map = small_map(dir.path());
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "scan.beams = 90\nno.such_key = 1\n").unwrap();
    let out = hphs()
        .env("HPHS_CONFIG", &cfg)
        .arg("explore")
        .arg("--map")
        .arg(&map)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no.such_key"), "{}", stderr(&out));
}

#[test]
fn bench_is_independent_of_job_count() {
    let dir = TempDir::new().unwrap();
    let map = small_map(dir.path());
    let mut outputs = Vec::new();
    for jobs in ["1", "2"] {
        let path = dir.path().join(format!("bench{jobs}.csv"));
        let out = hphs()
            .args(["bench", "--seeds", "0-2", "--jobs", jobs, "--maps"])
            .arg(&map)
            .arg("--out")
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        outputs.push(fs::read(path).unwrap());
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn usage_errors_exit_with_one() {
    let out = hphs().args(["explore", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = hphs().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = hphs().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
