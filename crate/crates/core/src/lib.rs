//! Time-optimal, collision-free 3-D path planning for an autonomous
//! underwater vehicle.
//!
//! Candidate paths are clamped B-splines over a handful of free control
//! points. Differential Evolution searches the control points against a cost
//! of travel time plus weighted penalties for land, obstacle, depth and
//! kinematic violations, in a current field made of Lamb–Oseen vortices.

pub mod cost_model;
pub mod de_engine;
pub mod error;
pub mod geo_env;
pub mod kinematics;
pub mod planner;
pub mod render;
pub mod rng;
pub mod scenario;
pub mod spline_path;

pub use error::{Error, Result};
