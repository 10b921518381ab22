//! Scenario files: a strict TOML description of one planning problem.
//!
//! ```toml
//! start = [300.0, 300.0, 50.0]
//! goal = [2200.0, 2150.0, 120.0]
//!
//! [map.synthetic]
//! width = 250
//! height = 250
//! seed = 4
//! ```
//!
//! Every other table is optional and falls back to the defaults documented on
//! each field. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost_model::{ConstraintLimits, PenaltyWeights, TimeMode};
use crate::de_engine::DeConfig;
use crate::error::{Error, Result};
use crate::geo_env::{
    cluster_map, current_magnitude_stats, read_pgm, CurrentField, GridMap, LambVortex, Obstacle, ObstacleKind, ObstacleSet,
    Raster, SyntheticTerrain, DEFAULT_CELL_SIZE, DEFAULT_RADIUS_SIGMA,
};
use crate::rng::{Purpose, Stream};
use crate::spline_path::{DEFAULT_ORDER, DEFAULT_SAMPLES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub map: MapSpec,
    #[serde(default)]
    pub current: CurrentSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<Obstacle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_obstacles: Option<RandomObstacles>,
    #[serde(default)]
    pub obstacle_motion: ObstacleMotion,
    pub start: [f64; 3],
    pub goal: [f64; 3],
    #[serde(default)]
    pub vehicle: VehicleSpec,
    #[serde(default)]
    pub spline: SplineSpec,
    /// Defaults to [`ConstraintLimits::for_vehicle`] with the strongest current on the map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<ConstraintLimits>,
    #[serde(default)]
    pub weights: PenaltyWeights,
    #[serde(default)]
    pub de: DeConfig,
    #[serde(default)]
    pub time_mode: TimeMode,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Exactly one of `pgm` or `synthetic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pgm: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticTerrain>,
    /// Meters per cell side; default 10.
    #[serde(default = "default_cell_size")]
    pub cell_size: f64,
    /// Lloyd iterations for the land/water clustering; default 50.
    #[serde(default = "default_kmeans_iters")]
    pub kmeans_iters: usize,
    #[serde(default)]
    pub kmeans_seed: u64,
    /// Synthetic maps keep this many meters of water around start and goal; default 60.
    #[serde(default = "default_clear_radius")]
    pub clear_radius: f64,
}

fn default_cell_size() -> f64 {
    DEFAULT_CELL_SIZE
}
fn default_kmeans_iters() -> usize {
    50
}
fn default_clear_radius() -> f64 {
    60.0
}

impl MapSpec {
    pub fn synthetic(terrain: SyntheticTerrain) -> Self {
        Self {
            pgm: None,
            synthetic: Some(terrain),
            cell_size: DEFAULT_CELL_SIZE,
            kmeans_iters: default_kmeans_iters(),
            kmeans_seed: 0,
            clear_radius: default_clear_radius(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurrentSpec {
    /// Uniform flow added everywhere, m/s.
    #[serde(default)]
    pub background: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vortices: Vec<LambVortex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomVortices>,
}

/// Seeded vortices with centers spread over the whole map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomVortices {
    pub count: usize,
    /// Circulation magnitude range, m²/s; the sign is drawn.
    #[serde(default = "default_circulation")]
    pub circulation: [f64; 2],
    #[serde(default = "default_core_radius")]
    pub core_radius: [f64; 2],
    #[serde(default)]
    pub seed: u64,
}

fn default_circulation() -> [f64; 2] {
    [600.0, 1500.0]
}
fn default_core_radius() -> [f64; 2] {
    [100.0, 250.0]
}

/// Obstacles scattered with Gaussian offsets around points of the
/// start-goal segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomObstacles {
    #[serde(default)]
    pub fixed: usize,
    #[serde(default)]
    pub moving: usize,
    /// Standard deviation of the offset from the segment, m.
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default = "default_base_radius")]
    pub base_radius: [f64; 2],
    #[serde(default = "default_sigma")]
    pub radius_sigma: f64,
    /// Upper radius bound as a multiple of the base radius.
    #[serde(default = "default_growth_cap")]
    pub growth_cap: f64,
    /// Speed of moving obstacles, m/s, in a drawn direction.
    #[serde(default = "default_obstacle_speed")]
    pub speed: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_spread() -> f64 {
    150.0
}
fn default_base_radius() -> [f64; 2] {
    [40.0, 80.0]
}
fn default_sigma() -> f64 {
    DEFAULT_RADIUS_SIGMA
}
fn default_growth_cap() -> f64 {
    1.6
}
fn default_obstacle_speed() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObstacleMotion {
    /// Seconds moving obstacles advance per optimizer generation; default 1.
    pub epoch_dt: f64,
    /// Radius growth per (m/s of current × s); default 0.05.
    pub growth_gain: f64,
}

impl Default for ObstacleMotion {
    fn default() -> Self {
        Self { epoch_dt: 1.0, growth_gain: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleSpec {
    /// Water-referenced speed, m/s; default 3.
    pub speed: f64,
}

impl Default for VehicleSpec {
    fn default() -> Self {
        Self { speed: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplineSpec {
    /// Optimized control points between the fixed start and goal; default 5.
    pub free_points: usize,
    /// B-spline order K; default 3.
    pub order: usize,
    /// Samples along the curve; default 200.
    pub samples: usize,
    /// Search-box inflation as a fraction of the start-goal distance; default 0.25.
    pub margin: f64,
}

impl Default for SplineSpec {
    fn default() -> Self {
        Self { free_points: 5, order: DEFAULT_ORDER, samples: DEFAULT_SAMPLES, margin: 0.25 }
    }
}

/// Concrete world built from a scenario.
#[derive(Debug, Clone)]
pub struct Environment {
    pub map: GridMap,
    pub field: CurrentField,
    pub obstacles: ObstacleSet,
    pub limits: ConstraintLimits,
}

impl Scenario {
    /// A scenario with every optional section at its default.
    pub fn minimal(map: MapSpec, start: [f64; 3], goal: [f64; 3]) -> Self {
        Self {
            map,
            current: CurrentSpec::default(),
            obstacles: Vec::new(),
            random_obstacles: None,
            obstacle_motion: ObstacleMotion::default(),
            start,
            goal,
            vehicle: VehicleSpec::default(),
            spline: SplineSpec::default(),
            limits: None,
            weights: PenaltyWeights::default(),
            de: DeConfig::default(),
            time_mode: TimeMode::default(),
            output_dir: default_output_dir(),
        }
    }

    /// Parses TOML text; relative PGM paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| Error::ScenarioParse(e.to_string()))?;
        if let Some(p) = &s.map.pgm {
            if p.is_relative() {
                s.map.pgm = Some(base_dir.join(p));
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ScenarioParse(e.to_string()))
    }

    /// Checks every field, builds the map, and confirms the endpoints are in water.
    pub fn validate(&self) -> Result<()> {
        match (&self.map.pgm, &self.map.synthetic) {
            (Some(_), Some(_)) => return Err(Error::invalid("map", "give either `pgm` or `synthetic`, not both")),
            (None, None) => return Err(Error::invalid("map", "needs a `pgm` path or a `synthetic` table")),
            (Some(p), None) if !p.exists() => {
                return Err(Error::invalid("map.pgm", format!("file {} does not exist", p.display())))
            }
            _ => {}
        }
        if !(self.map.cell_size > 0.0 && self.map.cell_size.is_finite()) {
            return Err(Error::invalid("map.cell_size", "must be positive"));
        }
        if self.map.kmeans_iters == 0 {
            return Err(Error::invalid("map.kmeans_iters", "must be at least 1"));
        }
        if !(self.vehicle.speed > 0.0 && self.vehicle.speed.is_finite()) {
            return Err(Error::invalid("vehicle.speed", "must be positive"));
        }
        let sp = &self.spline;
        if sp.order < 1 || sp.free_points + 2 < sp.order {
            return Err(Error::invalid(
                "spline",
                format!("order {} needs at least {} control points, have {}", sp.order, sp.order, sp.free_points + 2),
            ));
        }
        if sp.samples < 2 {
            return Err(Error::invalid("spline.samples", "must be at least 2"));
        }
        if !(sp.margin >= 0.0 && sp.margin.is_finite()) {
            return Err(Error::invalid("spline.margin", "must be non-negative"));
        }
        if let Some(l) = &self.limits {
            l.validate().map_err(|e| Error::invalid("limits", e.to_string()))?;
        }
        self.weights.validate().map_err(|e| Error::invalid("weights", e.to_string()))?;
        self.de.validate().map_err(|e| Error::invalid("de", e.to_string()))?;
        for (i, o) in self.obstacles.iter().enumerate() {
            o.validate().map_err(|e| Error::invalid(format!("obstacles[{i}]"), e.to_string()))?;
        }
        for v in &self.current.vortices {
            v.validate().map_err(|e| Error::invalid("current.vortices", e.to_string()))?;
        }
        let m = self.obstacle_motion;
        if !(m.epoch_dt > 0.0 && m.growth_gain >= 0.0) {
            return Err(Error::invalid("obstacle_motion", "epoch_dt must be positive and growth_gain non-negative"));
        }
        if !self.start.iter().chain(&self.goal).all(|v| v.is_finite()) {
            return Err(Error::invalid("start", "start and goal must be finite"));
        }

        let map = self.build_map()?;
        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            if map.is_forbidden([p[0], p[1]]) {
                return Err(Error::invalid(name, format!("{p:?} lies inside a forbidden cell or off the map")));
            }
        }
        Ok(())
    }

    fn raster(&self) -> Result<Raster> {
        if let Some(path) = &self.map.pgm {
            return read_pgm(&std::fs::read(path)?);
        }
        let terrain = self.map.synthetic.as_ref().ok_or_else(|| Error::invalid("map", "no map source"))?;
        let cs = self.map.cell_size;
        let clear = self.map.clear_radius / cs;
        let keep = [([self.start[0] / cs, self.start[1] / cs], clear), ([self.goal[0] / cs, self.goal[1] / cs], clear)];
        terrain.raster(&keep)
    }

    pub fn build_map(&self) -> Result<GridMap> {
        let raster = self.raster()?;
        let k = 2;
        let map = match cluster_map(&raster, k, self.map.kmeans_iters, self.map.kmeans_seed) {
            Ok(m) => m,
            // a single intensity means there is no land to separate
            Err(Error::DegenerateClustering { .. }) => GridMap::open(raster.width, raster.height, DEFAULT_CELL_SIZE)?,
            Err(e) => return Err(e),
        };
        map.with_cell_size(self.map.cell_size)
    }

    pub fn build_field(&self, map: &GridMap) -> Result<CurrentField> {
        let mut vortices = self.current.vortices.clone();
        if let Some(r) = &self.current.random {
            let [w, h] = map.extent();
            let extra = CurrentField::random(r.count, [0.0, 0.0, w, h], r.circulation, r.core_radius, [0.0, 0.0], r.seed)?;
            vortices.extend(extra.vortices);
        }
        CurrentField::new(vortices, self.current.background)
    }

    pub fn build_obstacles(&self) -> Result<ObstacleSet> {
        let mut all = self.obstacles.clone();
        if let Some(r) = &self.random_obstacles {
            let mut rng = Stream::for_purpose(r.seed, Purpose::Obstacles, &[]);
            let total = r.fixed + r.moving;
            for i in 0..total {
                // anchor along the start-goal segment, away from the endpoints
                let s = (i as f64 + 1.0) / (total as f64 + 1.0);
                let anchor: Vec<f64> = (0..3).map(|a| self.start[a] + s * (self.goal[a] - self.start[a])).collect();
                let center = [anchor[0] + r.spread * rng.normal(), anchor[1] + r.spread * rng.normal(), anchor[2]];
                let base = rng.uniform_in(r.base_radius[0], r.base_radius[1]);
                let bounds = [base, base * r.growth_cap.max(1.0)];
                let o = if i < r.fixed {
                    Obstacle::fixed(center, base, bounds)
                } else {
                    let heading = rng.uniform_in(-std::f64::consts::PI, std::f64::consts::PI);
                    let v = [r.speed * heading.cos(), r.speed * heading.sin()];
                    Obstacle::moving(center, base, bounds, v, true)
                };
                all.push(o.with_sigma(r.radius_sigma));
            }
        }
        ObstacleSet::new(all)
    }

    pub fn build_environment(&self) -> Result<Environment> {
        let map = self.build_map()?;
        let field = self.build_field(&map)?;
        let obstacles = self.build_obstacles()?;
        let limits = match self.limits {
            Some(l) => l,
            None => {
                let max_current = current_magnitude_stats(&field, &map).map(|s| s.max).unwrap_or(0.0);
                ConstraintLimits::for_vehicle(self.vehicle.speed, max_current)
            }
        };
        let field = field.cached_on(&map);
        Ok(Environment { map, field, obstacles, limits })
    }

    /// Same scenario with every obstacle fixed in place and of fixed radius.
    pub fn frozen_obstacles(&self) -> Result<Self> {
        let mut s = self.clone();
        let mut set = self.build_obstacles()?.obstacles;
        for o in &mut set {
            o.kind = ObstacleKind::StaticUncertain;
            o.radius_sigma = 0.0;
            o.velocity = [0.0, 0.0];
            o.current_coupled = false;
        }
        s.obstacles = set;
        s.random_obstacles = None;
        Ok(s)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Scenario::parse(&text, base)
}
