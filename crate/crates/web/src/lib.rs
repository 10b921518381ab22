//! Browser bindings for the planner demo in `www/`.
//!
//! Scenarios arrive as TOML text. Only synthetic maps work in the browser,
//! since there is no file system to read a PGM from.

use std::path::Path;

use auv_planner::geo_env::CurrentField;
use auv_planner::planner::{plan_observed, Summary};
use auv_planner::render::{render_svg, SceneLayers};
use auv_planner::scenario::{Environment, Scenario};
use auv_planner::Result;
use wasm_bindgen::prelude::*;

fn parse(toml: &str) -> Result<Scenario> {
    Scenario::parse(toml, Path::new("."))
}

fn scene_svg(scenario: &Scenario, env: &Environment) -> String {
    let realized = env.obstacles.realize(scenario.de.seed, 0);
    render_svg(&SceneLayers {
        map: &env.map,
        field: &env.field,
        obstacles: &env.obstacles,
        realized: &realized,
        trajectory: None,
        start: scenario.start,
        goal: scenario.goal,
    })
}

pub fn scene(toml: &str) -> Result<String> {
    let scenario = parse(toml)?;
    let env = scenario.build_environment()?;
    Ok(scene_svg(&scenario, &env))
}

/// Current field of one scenario, built once and queried per pointer move.
#[wasm_bindgen]
pub struct CurrentProbe {
    field: CurrentField,
}

impl CurrentProbe {
    pub fn build(toml: &str) -> Result<Self> {
        let scenario = parse(toml)?;
        let map = scenario.build_map()?;
        Ok(Self { field: scenario.build_field(&map)? })
    }
}

#[wasm_bindgen]
impl CurrentProbe {
    #[wasm_bindgen(constructor)]
    pub fn new(toml: &str) -> std::result::Result<CurrentProbe, JsError> {
        Self::build(toml).map_err(js_err)
    }

    /// Current `[u, v]` in m/s at world position `(x, y)`.
    pub fn at(&self, x: f64, y: f64) -> Vec<f64> {
        self.field.sample([x, y]).to_vec()
    }
}

/// Result of one planning run, read from JavaScript through the getters.
#[wasm_bindgen]
pub struct PlanResult {
    svg: String,
    convergence_csv: String,
    summary_json: String,
    feasible: bool,
}

#[wasm_bindgen]
impl PlanResult {
    #[wasm_bindgen(getter)]
    pub fn svg(&self) -> String {
        self.svg.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn convergence_csv(&self) -> String {
        self.convergence_csv.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn summary_json(&self) -> String {
        self.summary_json.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn feasible(&self) -> bool {
        self.feasible
    }
}

pub fn run_plan(toml: &str, seed: u64, iters: usize) -> Result<PlanResult> {
    let mut scenario = parse(toml)?;
    scenario.de.seed = seed;
    scenario.de.iter_max = iters;
    let env = scenario.build_environment()?;
    let outcome = plan_observed(&scenario, &env, |_, _| {})?;
    let svg = render_svg(&SceneLayers {
        map: &env.map,
        field: &env.field,
        obstacles: &outcome.obstacles,
        realized: &outcome.realized,
        trajectory: Some(&outcome.trajectory),
        start: scenario.start,
        goal: scenario.goal,
    });
    let mut csv = Vec::new();
    outcome.trace.write_csv(&mut csv)?;
    let summary = Summary::new(&scenario, &outcome);
    Ok(PlanResult {
        svg,
        convergence_csv: String::from_utf8(csv).expect("csv is ASCII"),
        summary_json: serde_json::to_string(&summary).expect("summary serializes"),
        feasible: outcome.feasible(),
    })
}

fn js_err(e: auv_planner::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// SVG of map, current and obstacles for a scenario, without a path.
#[wasm_bindgen(js_name = renderScene)]
pub fn render_scene(toml: &str) -> std::result::Result<String, JsError> {
    scene(toml).map_err(js_err)
}

/// Plans with the given seed and generation budget.
#[wasm_bindgen(js_name = planPath)]
pub fn plan_path(toml: &str, seed: u32, iters: u32) -> std::result::Result<PlanResult, JsError> {
    run_plan(toml, seed as u64, iters as usize).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
start = [100.0, 100.0, 20.0]
goal = [800.0, 700.0, 40.0]

[map.synthetic]
width = 100
height = 100
blobs = 3
seed = 2

[current]
background = [0.2, 0.0]

[[current.vortices]]
center = [400.0, 400.0]
circulation = 800.0
core_radius = 120.0
"#;

    #[test]
    fn scene_has_no_path() {
        let svg = scene(SMALL).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(!svg.contains("id=\"path\""));
        assert!(svg.contains("id=\"current\""));
    }

    #[test]
    fn plan_returns_svg_and_trace() {
        let r = run_plan(SMALL, 1, 20).unwrap();
        assert!(r.svg.contains("id=\"path\""));
        assert_eq!(r.convergence_csv.lines().count(), 22);
        let v: serde_json::Value = serde_json::from_str(&r.summary_json).unwrap();
        assert_eq!(v["seed"], 1);
        assert_eq!(v["feasible"], r.feasible);
    }

    #[test]
    fn current_includes_background() {
        let v = auv_planner::geo_env::LambVortex::new([400.0, 400.0], 800.0, 120.0).unwrap().velocity([5.0, 995.0]);
        let got = CurrentProbe::build(SMALL).unwrap().at(5.0, 995.0);
        assert!((got[0] - 0.2 - v[0]).abs() < 1e-12 && (got[1] - v[1]).abs() < 1e-12, "{got:?}");
        assert!(CurrentProbe::build("start = [").is_err());
    }
}
