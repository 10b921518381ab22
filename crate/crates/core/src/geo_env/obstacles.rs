//! Uncertain circular obstacles and their per-epoch realizations.

use serde::{Deserialize, Serialize};

use super::current::CurrentField;
use crate::error::{Error, Result};
use crate::rng::{Purpose, Stream};

pub const DEFAULT_RADIUS_SIGMA: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    StaticUncertain,
    MovingUncertain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub kind: ObstacleKind,
    pub center: [f64; 3],
    pub base_radius: f64,
    #[serde(default = "default_sigma")]
    pub radius_sigma: f64,
    pub radius_bounds: [f64; 2],
    #[serde(default)]
    pub velocity: [f64; 2],
    #[serde(default)]
    pub current_coupled: bool,
}

fn default_sigma() -> f64 {
    DEFAULT_RADIUS_SIGMA
}

impl Obstacle {
    pub fn fixed(center: [f64; 3], base_radius: f64, radius_bounds: [f64; 2]) -> Self {
        Self {
            kind: ObstacleKind::StaticUncertain,
            center,
            base_radius,
            radius_sigma: DEFAULT_RADIUS_SIGMA,
            radius_bounds,
            velocity: [0.0, 0.0],
            current_coupled: false,
        }
    }

    pub fn moving(
        center: [f64; 3],
        base_radius: f64,
        radius_bounds: [f64; 2],
        velocity: [f64; 2],
        current_coupled: bool,
    ) -> Self {
        Self { kind: ObstacleKind::MovingUncertain, velocity, current_coupled, ..Self::fixed(center, base_radius, radius_bounds) }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.radius_sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.radius_bounds;
        if !(self.base_radius > 0.0 && self.base_radius.is_finite()) {
            return Err(Error::Config(format!("obstacle base_radius must be positive, got {}", self.base_radius)));
        }
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!("obstacle radius_bounds [{lo}, {hi}] must satisfy 0 < min <= max")));
        }
        if !(self.radius_sigma >= 0.0 && self.radius_sigma.is_finite()) {
            return Err(Error::Config(format!("obstacle radius_sigma must be >= 0, got {}", self.radius_sigma)));
        }
        if !self.center.iter().chain(&self.velocity).all(|v| v.is_finite()) {
            return Err(Error::Config("obstacle center and velocity must be finite".into()));
        }
        Ok(())
    }

    fn clamp_radius(&self, r: f64) -> f64 {
        r.clamp(self.radius_bounds[0], self.radius_bounds[1])
    }
}

/// A concrete circle valid for one evaluation epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealizedObstacle {
    pub center: [f64; 3],
    pub radius: f64,
}

impl RealizedObstacle {
    /// Obstacles are vertical cylinders, so only the horizontal distance matters.
    #[inline]
    pub fn contains_xy(&self, p: [f64; 2]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObstacleSet {
    pub obstacles: Vec<Obstacle>,
}

impl ObstacleSet {
    pub fn new(obstacles: Vec<Obstacle>) -> Result<Self> {
        for o in &obstacles {
            o.validate()?;
        }
        Ok(Self { obstacles })
    }

    pub fn len(&self) -> usize {
        self.obstacles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obstacles.is_empty()
    }

    pub fn has_moving(&self) -> bool {
        self.obstacles.iter().any(|o| o.kind == ObstacleKind::MovingUncertain)
    }

    pub fn is_deterministic(&self) -> bool {
        !self.has_moving() && self.obstacles.iter().all(|o| o.radius_sigma == 0.0)
    }

    /// One radius draw per obstacle: `clamp(base + |N(0, sigma²)|, bounds)`,
    /// addressed by `(seed, epoch, index)` so every caller in one epoch sees
    /// the same circles.
    pub fn realize(&self, seed: u64, epoch: u64) -> Vec<RealizedObstacle> {
        self.obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let deviate = if o.radius_sigma > 0.0 {
                    let mut s = Stream::for_purpose(seed, Purpose::ObstacleRadius, &[epoch, i as u64]);
                    (s.normal() * o.radius_sigma).abs()
                } else {
                    0.0
                };
                RealizedObstacle { center: o.center, radius: o.clamp_radius(o.base_radius + deviate) }
            })
            .collect()
    }

    /// Moves moving obstacles by `dt` seconds. Current-coupled ones drift with
    /// the local current, and every moving obstacle's base radius grows with
    /// the current speed at its center.
    pub fn advance(&self, field: &CurrentField, dt: f64, growth_gain: f64) -> ObstacleSet {
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| {
                let mut o = o.clone();
                if o.kind == ObstacleKind::MovingUncertain {
                    let c = field.sample([o.center[0], o.center[1]]);
                    let (mut vx, mut vy) = (o.velocity[0], o.velocity[1]);
                    if o.current_coupled {
                        vx += c[0];
                        vy += c[1];
                    }
                    o.center[0] += vx * dt;
                    o.center[1] += vy * dt;
                    o.base_radius = o.clamp_radius(o.base_radius + c[0].hypot(c[1]) * dt * growth_gain);
                }
                o
            })
            .collect();
        ObstacleSet { obstacles }
    }
}
