//! Vehicle state conventions (NED, Down-positive depth) and velocity
//! composition with the ambient current.

use std::f64::consts::PI;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Position and attitude in the North-East-Down frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NedState {
    pub x: f64,
    pub y: f64,
    /// Depth, positive below the surface.
    pub z: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl NedState {
    pub fn new(position: [f64; 3], roll: f64, pitch: f64, yaw: f64) -> Self {
        Self {
            x: position[0],
            y: position[1],
            z: position[2],
            roll: wrap_angle(roll),
            pitch: wrap_angle(pitch),
            yaw: wrap_angle(yaw),
        }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_submerged(&self) -> bool {
        self.z >= 0.0
    }
}

/// Body-frame linear (surge, sway, heave) and angular rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyVelocity {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BodyVelocity {
    pub fn linear(&self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }
}

pub type Matrix3 = [[f64; 3]; 3];

/// Body-to-NED rotation from pitch and yaw. Roll does not enter this matrix.
pub fn rotation_ned_from_body(pitch: f64, yaw: f64) -> Matrix3 {
    let (st, ct) = pitch.sin_cos();
    let (sp, cp) = yaw.sin_cos();
    [[cp * ct, -sp, cp * st], [sp * ct, cp, sp * st], [-st, 0.0, ct]]
}

pub fn mat_vec(m: &Matrix3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

/// NED position rates for a body velocity at the given attitude.
pub fn ned_rates(state: &NedState, body: &BodyVelocity) -> [f64; 3] {
    mat_vec(&rotation_ned_from_body(state.pitch, state.yaw), body.linear())
}

/// Current expressed as speed and direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurrentVector {
    pub speed: f64,
    /// Horizontal direction.
    pub heading: f64,
    /// Vertical direction; the planar current model always yields 0.
    pub elevation: f64,
}

impl CurrentVector {
    pub fn from_planar(uv: [f64; 2]) -> Self {
        let speed = uv[0].hypot(uv[1]);
        let heading = if speed > 0.0 { uv[1].atan2(uv[0]) } else { 0.0 };
        Self { speed, heading, elevation: 0.0 }
    }
}

/// Vehicle velocity `(u, v, w)` from constant water-referenced speed, path
/// attitude and current. The current has no vertical component.
pub fn compose_velocity(speed: f64, pitch: f64, yaw: f64, current: CurrentVector) -> [f64; 3] {
    let (st, ct) = pitch.sin_cos();
    let (sp, cp) = yaw.sin_cos();
    let horizontal_current = current.speed * current.elevation.cos();
    [
        speed * ct * cp + horizontal_current * current.heading.cos(),
        speed * ct * sp + horizontal_current * current.heading.sin(),
        speed * st,
    ]
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
