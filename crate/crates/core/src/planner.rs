//! End-to-end planning: scenario -> environment -> DE over spline control
//! points -> best trajectory and artifacts.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cost_model::{total_cost, CostBreakdown, CostContext, ViolationTerms};
use crate::de_engine::{run_observed, Bounds, ConvergenceTrace, Objective, Population};
use crate::error::Result;
use crate::geo_env::{ObstacleSet, RealizedObstacle};
use crate::render::{render_svg, SceneLayers};
use crate::scenario::{Environment, Scenario};
use crate::spline_path::{distance, SplineSampler, Trajectory};

/// Gene bounds for the free control points: the start-goal box inflated on
/// every axis by `margin` times the start-goal distance. Genes are laid out
/// `x, y, z` per point.
pub fn control_bounds(start: [f64; 3], goal: [f64; 3], free_points: usize, margin: f64) -> Result<Bounds> {
    let pad = margin * distance(start, goal);
    let axis: Vec<[f64; 2]> = (0..3).map(|a| [start[a].min(goal[a]) - pad, start[a].max(goal[a]) + pad]).collect();
    Bounds::new((0..free_points).flat_map(|_| axis.iter().copied()).collect())
}

/// Control polygon `[start, free..., goal]` from a gene vector.
pub fn control_points(start: [f64; 3], goal: [f64; 3], genes: &[f64]) -> Vec<[f64; 3]> {
    let mut pts = Vec::with_capacity(genes.len() / 3 + 2);
    pts.push(start);
    pts.extend(genes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]));
    pts.push(goal);
    pts
}

/// Scores gene vectors against one environment epoch at a time. Moving
/// obstacles advance once per epoch and radii are redrawn per epoch.
pub struct PathObjective<'a> {
    scenario: &'a Scenario,
    env: &'a Environment,
    sampler: SplineSampler,
    obstacles: ObstacleSet,
    realized: Vec<RealizedObstacle>,
    epoch: u64,
}

impl<'a> PathObjective<'a> {
    pub fn new(scenario: &'a Scenario, env: &'a Environment) -> Result<Self> {
        let sampler = SplineSampler::new(scenario.spline.free_points + 2, scenario.spline.order, scenario.spline.samples)?;
        let realized = env.obstacles.realize(scenario.de.seed, 0);
        Ok(Self { scenario, env, sampler, obstacles: env.obstacles.clone(), realized, epoch: 0 })
    }

    pub fn realized(&self) -> &[RealizedObstacle] {
        &self.realized
    }

    pub fn obstacles(&self) -> &ObstacleSet {
        &self.obstacles
    }

    pub fn trajectory(&self, genes: &[f64]) -> Trajectory {
        let pts = control_points(self.scenario.start, self.scenario.goal, genes);
        let mut pos = Vec::with_capacity(self.sampler.samples());
        self.sampler.positions_into(&pts, &mut pos);
        Trajectory::from_positions(self.sampler.params(), &pos)
    }

    pub fn breakdown(&self, genes: &[f64]) -> CostBreakdown {
        let traj = self.trajectory(genes);
        let ctx = CostContext {
            speed: self.scenario.vehicle.speed,
            field: &self.env.field,
            map: &self.env.map,
            obstacles: &self.realized,
            limits: &self.env.limits,
            weights: &self.scenario.weights,
            mode: self.scenario.time_mode,
        };
        total_cost(&traj, &ctx)
    }
}

impl Objective for PathObjective<'_> {
    fn begin_epoch(&mut self, epoch: u64) -> bool {
        while self.epoch < epoch {
            let m = self.scenario.obstacle_motion;
            self.obstacles = self.obstacles.advance(&self.env.field, m.epoch_dt, m.growth_gain);
            self.epoch += 1;
        }
        let next = self.obstacles.realize(self.scenario.de.seed, epoch);
        let changed = next != self.realized;
        self.realized = next;
        changed
    }

    fn cost(&self, genes: &[f64]) -> f64 {
        self.breakdown(genes).total
    }

    fn violations(&self, genes: &[f64]) -> Option<ViolationTerms> {
        Some(self.breakdown(genes).violations)
    }
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub trajectory: Trajectory,
    pub breakdown: CostBreakdown,
    pub trace: ConvergenceTrace,
    pub best_genes: Vec<f64>,
    /// Obstacle state of the final epoch.
    pub obstacles: ObstacleSet,
    pub realized: Vec<RealizedObstacle>,
    pub evaluations: usize,
    pub wall_time: f64,
}

impl PlanOutcome {
    pub fn feasible(&self) -> bool {
        !self.breakdown.collision_indicator
    }

    /// First generation whose best member is collision-free, if any.
    pub fn first_collision_free_generation(&self) -> Option<usize> {
        self.trace.records.iter().find(|r| r.collision_violation == 0.0).map(|r| r.generation)
    }
}

/// Plans with an optional per-generation hook that sees the population and
/// the objective (for candidate logging).
pub fn plan_observed<F>(scenario: &Scenario, env: &Environment, mut observe: F) -> Result<PlanOutcome>
where
    F: FnMut(&Population, &PathObjective<'_>),
{
    let started = Clock::start();
    let sp = scenario.spline;
    let bounds = control_bounds(scenario.start, scenario.goal, sp.free_points, sp.margin)?;
    let mut objective = PathObjective::new(scenario, env)?;
    let result = run_observed(&scenario.de, &bounds, &mut objective, |p, o| observe(p, o))?;
    let trajectory = objective.trajectory(&result.best);
    let breakdown = objective.breakdown(&result.best);
    Ok(PlanOutcome {
        trajectory,
        breakdown,
        trace: result.trace,
        best_genes: result.best,
        obstacles: objective.obstacles().clone(),
        realized: objective.realized().to_vec(),
        evaluations: result.evaluations,
        wall_time: started.seconds(),
    })
}

/// Wall clock for the summary; browsers have no `Instant`, so wasm reports 0.
struct Clock(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Clock {
    fn start() -> Self {
        Clock(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        return 0.0;
    }
}

pub fn plan(scenario: &Scenario) -> Result<PlanOutcome> {
    let env = scenario.build_environment()?;
    plan_observed(scenario, &env, |_, _| {})
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub feasible: bool,
    pub best_cost: f64,
    pub time: f64,
    pub path_length: f64,
    pub violations: ViolationTerms,
    pub collision_fraction: f64,
    pub unnavigable_segments: usize,
    pub generations: usize,
    pub evaluations: usize,
    pub first_collision_free_generation: Option<usize>,
    pub wall_time: f64,
}

impl Summary {
    pub fn new(scenario: &Scenario, outcome: &PlanOutcome) -> Self {
        Self {
            seed: scenario.de.seed,
            feasible: outcome.feasible(),
            best_cost: outcome.breakdown.total,
            time: outcome.breakdown.time,
            path_length: crate::spline_path::path_length(&outcome.trajectory),
            violations: outcome.breakdown.violations,
            collision_fraction: outcome.breakdown.collision_fraction,
            unnavigable_segments: outcome.breakdown.unnavigable_segments,
            generations: outcome.trace.records.len().saturating_sub(1),
            evaluations: outcome.evaluations,
            first_collision_free_generation: outcome.first_collision_free_generation(),
            wall_time: outcome.wall_time,
        }
    }
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub trajectory: PathBuf,
    pub convergence: PathBuf,
    pub summary: PathBuf,
    pub scene: Option<PathBuf>,
}

/// Writes `trajectory.csv`, `convergence.csv`, `summary.json` and, when
/// `render` is set, `scene.svg` into `dir`.
pub fn write_outputs(
    dir: &Path,
    scenario: &Scenario,
    env: &Environment,
    outcome: &PlanOutcome,
    render: bool,
) -> Result<OutputFiles> {
    fs::create_dir_all(dir)?;
    let files = OutputFiles {
        trajectory: dir.join("trajectory.csv"),
        convergence: dir.join("convergence.csv"),
        summary: dir.join("summary.json"),
        scene: render.then(|| dir.join("scene.svg")),
    };
    outcome.trajectory.write_csv(BufWriter::new(fs::File::create(&files.trajectory)?))?;
    outcome.trace.write_csv(BufWriter::new(fs::File::create(&files.convergence)?))?;
    let summary = Summary::new(scenario, outcome);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&files.summary, json + "\n")?;
    if let Some(path) = &files.scene {
        let layers = SceneLayers {
            map: &env.map,
            field: &env.field,
            obstacles: &outcome.obstacles,
            realized: &outcome.realized,
            trajectory: Some(&outcome.trajectory),
            start: scenario.start,
            goal: scenario.goal,
        };
        fs::write(path, render_svg(&layers))?;
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::de_engine::DeConfig;
    use crate::geo_env::SyntheticTerrain;
    use crate::scenario::MapSpec;
    use crate::spline_path::path_length;

    fn open_scenario(start: [f64; 3], goal: [f64; 3]) -> Scenario {
        let terrain = SyntheticTerrain { width: 100, height: 100, blobs: 0, blob_radius: [1.0, 2.0], coast: 0, seed: 0 };
        let mut s = Scenario::minimal(MapSpec::synthetic(terrain), start, goal);
        s.de = DeConfig { seed: 3, ..Default::default() };
        s
    }

    #[test]
    fn bounds_inflate_the_endpoint_box() {
        let b = control_bounds([0.0, 0.0, 0.0], [300.0, 400.0, 0.0], 2, 0.25).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b.get(0), [-125.0, 425.0]);
        assert_eq!(b.get(1), [-125.0, 525.0]);
        assert_eq!(b.get(2), [-125.0, 125.0]);
        assert_eq!(b.get(3), b.get(0));
    }

    #[test]
    fn genes_map_to_polygon() {
        let pts = control_points([0.0; 3], [9.0; 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(pts, vec![[0.0; 3], [1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [9.0; 3]]);
    }

    #[test]
    fn goal_equal_start_is_zero_length() {
        let p = [500.0, 500.0, 40.0];
        let s = open_scenario(p, p);
        let out = plan(&s).unwrap();
        assert_eq!(path_length(&out.trajectory), 0.0);
        assert_eq!(out.breakdown.time, 0.0);
        assert!(out.feasible());
        assert!(out.trajectory.samples.iter().all(|x| x.position == p));
    }

    #[test]
    fn open_water_path_is_nearly_straight() {
        let s = open_scenario([100.0, 100.0, 50.0], [900.0, 700.0, 80.0]);
        let out = plan(&s).unwrap();
        let straight = distance(s.start, s.goal);
        assert!(out.feasible());
        assert!(path_length(&out.trajectory) < straight * 1.01, "{} vs {straight}", path_length(&out.trajectory));
        assert_eq!(out.trajectory.start(), s.start);
        assert_eq!(out.trajectory.end(), s.goal);
    }

    #[test]
    fn epochs_move_obstacles() {
        let mut s = open_scenario([100.0, 100.0, 50.0], [900.0, 700.0, 80.0]);
        s.obstacles.push(crate::geo_env::Obstacle::moving([500.0, 400.0, 0.0], 40.0, [40.0, 60.0], [1.0, 0.0], false));
        let env = s.build_environment().unwrap();
        let mut obj = PathObjective::new(&s, &env).unwrap();
        assert!(obj.begin_epoch(1));
        assert_eq!(obj.obstacles().obstacles[0].center[0], 501.0);
        obj.begin_epoch(4);
        assert_eq!(obj.obstacles().obstacles[0].center[0], 504.0);
    }
}
