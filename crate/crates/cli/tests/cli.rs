use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use auv_planner::render::{render_svg, SceneLayers};
use auv_planner::scenario::load_scenario;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_auv-plan"))
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn plan(args: &[&str]) -> Output {
    bin().arg("plan").args(args).output().unwrap()
}

const SMALL: &str = r#"
start = [100.0, 100.0, 20.0]
goal = [800.0, 700.0, 40.0]

[map.synthetic]
width = 100
height = 100
blobs = 0

[de]
pop_size = 12
iter_max = 5
"#;

#[test]
fn feasible_run_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.toml");
    fs::write(&scenario, SMALL).unwrap();
    let out = dir.path().join("out");
    let log = dir.path().join("candidates.csv");
    let o = plan(&[
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--candidate-log",
        log.to_str().unwrap(),
        "--time-mode",
        "literal",
        "--donor",
        "rand1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "convergence.csv", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(!out.join("scene.svg").exists());
    assert_eq!(fs::read_to_string(out.join("trajectory.csv")).unwrap().lines().count(), 201);
    assert_eq!(fs::read_to_string(out.join("convergence.csv")).unwrap().lines().count(), 7);
    // header plus every member of the initial and five evolved populations
    assert_eq!(fs::read_to_string(&log).unwrap().lines().count(), 1 + 12 * 6);
}

#[test]
fn blocked_start_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.toml");
    let body = format!(
        "{SMALL}\n[[obstacles]]\nkind = \"static_uncertain\"\ncenter = [100.0, 100.0, 0.0]\nbase_radius = 50.0\nradius_sigma = 0.0\nradius_bounds = [50.0, 50.0]\n"
    );
    fs::write(&scenario, body).unwrap();
    let o = plan(&[scenario.to_str().unwrap(), "--out", dir.path().join("out").to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["feasible"], false);
}

#[test]
fn errors_exit_one() {
    let o = plan(&["/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scenario.toml"));

    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.toml");
    fs::write(&scenario, SMALL.replace("blobs = 0", "blobs = 0\nbogus = 1")).unwrap();
    let o = plan(&[scenario.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn terrain_round_trips_through_a_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("t.pgm");
    let o = bin().args(["terrain", pgm.to_str().unwrap(), "--width", "80", "--height", "60", "--seed", "3"]).output().unwrap();
    assert!(o.status.success());
    let bytes = fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n80 60\n255\n"));
    assert_eq!(bytes.len(), "P5\n80 60\n255\n".len() + 80 * 60);
}

#[test]
fn reference_scene_renders_within_budget() {
    let s = load_scenario(scenarios().join("reference.toml")).unwrap();
    let env = s.build_environment().unwrap();
    let realized = env.obstacles.realize(0, 0);
    let layers = SceneLayers {
        map: &env.map,
        field: &env.field,
        obstacles: &env.obstacles,
        realized: &realized,
        trajectory: None,
        start: s.start,
        goal: s.goal,
    };
    let started = Instant::now();
    let svg = render_svg(&layers);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "{elapsed} s");
    assert!(svg.len() < 2_000_000, "{} bytes", svg.len());
    assert_eq!(svg, render_svg(&layers));
}
