//! Trajectory scoring: travel time plus weighted constraint violations.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo_env::{CurrentField, GridMap, RealizedObstacle};
use crate::kinematics::{compose_velocity, norm3, wrap_angle, CurrentVector};
use crate::spline_path::{path_length, Trajectory};

/// Ground speed never drops below this fraction of the water-referenced speed.
pub const SPEED_FLOOR_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    /// Sampled length over water-referenced speed; ignores the current.
    Literal,
    /// Per-segment ground speed including the local current.
    #[default]
    CurrentAware,
}

/// One value per violation term.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViolationTerms {
    pub z_under: f64,
    pub z_over: f64,
    pub surge: f64,
    pub sway: f64,
    pub pitch: f64,
    pub yaw_rate: f64,
    pub collision: f64,
}

impl ViolationTerms {
    pub const NAMES: [&'static str; 7] = ["z_under", "z_over", "surge", "sway", "pitch", "yaw_rate", "collision"];

    pub fn splat(v: f64) -> Self {
        Self { z_under: v, z_over: v, surge: v, sway: v, pitch: v, yaw_rate: v, collision: v }
    }

    pub fn to_array(&self) -> [f64; 7] {
        [self.z_under, self.z_over, self.surge, self.sway, self.pitch, self.yaw_rate, self.collision]
    }

    pub fn all_zero(&self) -> bool {
        self.to_array().iter().all(|&v| v == 0.0)
    }
}

/// Depth band (Down-positive) and kinematic maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintLimits {
    pub z_min: f64,
    pub z_max: f64,
    pub u_max: f64,
    pub v_max: f64,
    /// Radians.
    pub pitch_max: f64,
    /// Radians per second.
    pub yaw_rate_max: f64,
}

impl ConstraintLimits {
    /// Defaults: depth band [0, 1000] m, 45° pitch, 0.5 rad/s yaw rate, and
    /// surge/sway limits of vehicle speed plus the strongest current.
    pub fn for_vehicle(speed: f64, max_current: f64) -> Self {
        Self {
            z_min: 0.0,
            z_max: 1000.0,
            u_max: speed + max_current,
            v_max: speed + max_current,
            pitch_max: PI / 4.0,
            yaw_rate_max: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_min < self.z_max) {
            return Err(Error::Config(format!("z_min {} must be below z_max {}", self.z_min, self.z_max)));
        }
        for (name, v) in
            [("u_max", self.u_max), ("v_max", self.v_max), ("pitch_max", self.pitch_max), ("yaw_rate_max", self.yaw_rate_max)]
        {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Inner (`epsilon`) and outer (`q`) weight per term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyWeights {
    pub epsilon: ViolationTerms,
    pub q: ViolationTerms,
}

pub const DEFAULT_Q: f64 = 100.0;
/// Outer weight on the collision term. One colliding sample out of 200 costs
/// 500 s, more than any detour inside the search box can save.
pub const DEFAULT_COLLISION_Q: f64 = 1e5;

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            epsilon: ViolationTerms::splat(1.0),
            q: ViolationTerms { collision: DEFAULT_COLLISION_Q, ..ViolationTerms::splat(DEFAULT_Q) },
        }
    }
}

impl PenaltyWeights {
    pub fn zero() -> Self {
        Self { epsilon: ViolationTerms::splat(0.0), q: ViolationTerms::splat(0.0) }
    }

    pub fn uniform(epsilon: f64, q: f64) -> Self {
        Self { epsilon: ViolationTerms::splat(epsilon), q: ViolationTerms::splat(q) }
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.epsilon.to_array().into_iter().chain(self.q.to_array());
        if all.into_iter().any(|w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::Config("penalty weights must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// `Σ q·ε·value`.
    pub fn penalty(&self, v: &ViolationTerms) -> f64 {
        let (e, q, v) = (self.epsilon.to_array(), self.q.to_array(), v.to_array());
        (0..7).map(|i| q[i] * e[i] * v[i]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TravelTime {
    pub seconds: f64,
    /// Segments whose ground speed fell to the floor.
    pub unnavigable: usize,
}

/// Travel time along the trajectory at water-referenced `speed`.
pub fn travel_time(traj: &Trajectory, speed: f64, field: &CurrentField, mode: TimeMode) -> TravelTime {
    match mode {
        TimeMode::Literal => TravelTime { seconds: path_length(traj) / speed, unnavigable: 0 },
        TimeMode::CurrentAware => {
            let floor = SPEED_FLOOR_FRACTION * speed;
            let mut seconds = 0.0;
            let mut unnavigable = 0;
            for w in traj.samples.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if a.segment_length == 0.0 {
                    continue;
                }
                let mid = [0.5 * (a.position[0] + b.position[0]), 0.5 * (a.position[1] + b.position[1])];
                let current = CurrentVector::from_planar(field.lookup(mid));
                let ground = norm3(compose_velocity(speed, a.pitch, a.yaw, current));
                let ground = if ground <= floor {
                    unnavigable += 1;
                    floor
                } else {
                    ground
                };
                seconds += a.segment_length / ground;
            }
            TravelTime { seconds, unnavigable }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collision {
    pub indicator: bool,
    pub fraction: f64,
}

/// A sample collides when it is on land, off the map, or inside any obstacle
/// cylinder.
pub fn collision_violation(traj: &Trajectory, map: &GridMap, obstacles: &[RealizedObstacle]) -> Collision {
    let hits = traj
        .samples
        .iter()
        .filter(|s| {
            let p = [s.position[0], s.position[1]];
            map.is_forbidden(p) || obstacles.iter().any(|o| o.contains_xy(p))
        })
        .count();
    Collision { indicator: hits > 0, fraction: hits as f64 / traj.samples.len().max(1) as f64 }
}

/// Worst excess of each kinematic term along the trajectory. The collision
/// field of the result is left at 0.
pub fn kinodynamic_violation(traj: &Trajectory, speed: f64, field: &CurrentField, limits: &ConstraintLimits) -> ViolationTerms {
    let mut z_lo = f64::INFINITY;
    let mut z_hi = f64::NEG_INFINITY;
    let mut u_hi = f64::NEG_INFINITY;
    let mut v_hi: f64 = 0.0;
    let mut pitch_hi = f64::NEG_INFINITY;
    let mut yaw_rate_hi: f64 = 0.0;
    let n = traj.samples.len();
    for (j, s) in traj.samples.iter().enumerate() {
        let z = s.position[2];
        z_lo = z_lo.min(z);
        z_hi = z_hi.max(z);
        let current = CurrentVector::from_planar(field.lookup([s.position[0], s.position[1]]));
        let [u, v, _] = compose_velocity(speed, s.pitch, s.yaw, current);
        u_hi = u_hi.max(u);
        v_hi = v_hi.max(v.abs());
        pitch_hi = pitch_hi.max(s.pitch);
        if j + 1 < n && s.segment_length > 0.0 {
            let dt = s.segment_length / speed;
            let dpsi = wrap_angle(traj.samples[j + 1].yaw - s.yaw);
            yaw_rate_hi = yaw_rate_hi.max(dpsi.abs() / dt);
        }
    }
    ViolationTerms {
        z_under: (limits.z_min - z_lo).max(0.0),
        z_over: (z_hi - limits.z_max).max(0.0),
        surge: (u_hi - limits.u_max).max(0.0),
        sway: (v_hi - limits.v_max).max(0.0),
        pitch: (pitch_hi - limits.pitch_max).max(0.0),
        yaw_rate: (yaw_rate_hi - limits.yaw_rate_max).max(0.0),
        collision: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBreakdown {
    /// Travel time, seconds.
    pub time: f64,
    /// Raw (unweighted) term values; `collision` is indicator × fraction.
    pub violations: ViolationTerms,
    pub collision_indicator: bool,
    pub collision_fraction: f64,
    pub unnavigable_segments: usize,
    pub total: f64,
}

impl CostBreakdown {
    pub fn feasible(&self) -> bool {
        self.violations.all_zero()
    }

    pub const CSV_HEADER: &'static str =
        "iteration,candidate,time,z_under,z_over,surge,sway,pitch,yaw_rate,collision,collision_fraction,total";

    pub fn write_csv_row<W: Write>(&self, mut w: W, iteration: usize, candidate: usize) -> std::io::Result<()> {
        let v = &self.violations;
        writeln!(
            w,
            "{iteration},{candidate},{},{},{},{},{},{},{},{},{},{}",
            self.time,
            v.z_under,
            v.z_over,
            v.surge,
            v.sway,
            v.pitch,
            v.yaw_rate,
            v.collision,
            self.collision_fraction,
            self.total
        )
    }
}

/// Everything needed to score a trajectory in one environment epoch.
#[derive(Debug, Clone, Copy)]
pub struct CostContext<'a> {
    pub speed: f64,
    pub field: &'a CurrentField,
    pub map: &'a GridMap,
    pub obstacles: &'a [RealizedObstacle],
    pub limits: &'a ConstraintLimits,
    pub weights: &'a PenaltyWeights,
    pub mode: TimeMode,
}

/// Time plus the weighted penalty of every violation term.
pub fn total_cost(traj: &Trajectory, ctx: &CostContext<'_>) -> CostBreakdown {
    let time = travel_time(traj, ctx.speed, ctx.field, ctx.mode);
    let collision = collision_violation(traj, ctx.map, ctx.obstacles);
    let mut violations = kinodynamic_violation(traj, ctx.speed, ctx.field, ctx.limits);
    violations.collision = if collision.indicator { collision.fraction } else { 0.0 };
    CostBreakdown {
        time: time.seconds,
        violations,
        collision_indicator: collision.indicator,
        collision_fraction: collision.fraction,
        unnavigable_segments: time.unnavigable,
        total: penalized(time.seconds, ctx.weights.penalty(&violations)),
    }
}

/// `time + penalty`, bumped to the next float when a positive penalty would
/// vanish in rounding so that `total == time` holds only for zero penalty.
pub fn penalized(time: f64, penalty: f64) -> f64 {
    let total = time + penalty;
    if penalty > 0.0 && total <= time {
        time.next_up()
    } else {
        total
    }
}
