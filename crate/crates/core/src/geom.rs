//! Small planar geometry helpers shared by the simulator, renderer and planners.

use serde::{Deserialize, Serialize};

pub type Vec2 = nalgebra::Vector2<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;

/// Planar pose: position plus heading in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Maps a point expressed in this pose's frame into the world frame.
    pub fn to_world(&self, local: Vec2) -> Vec2 {
        self.position() + rotate(local, self.theta)
    }

    /// Maps a world point into this pose's frame.
    pub fn to_local(&self, world: Vec2) -> Vec2 {
        rotate(world - self.position(), -self.theta)
    }
}

pub fn rotate(v: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

pub fn cross2(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

pub fn xy(v: &Vec3) -> Vec2 {
    Vec2::new(v.x, v.y)
}

pub fn lift(v: Vec2, z: f64) -> Vec3 {
    Vec3::new(v.x, v.y, z)
}

/// Unit vector along `v`, or `fallback` when `v` is (numerically) zero.
pub fn unit_or(v: Vec3, fallback: Vec3) -> Vec3 {
    let n = v.norm();
    if n > 1e-12 {
        v / n
    } else {
        fallback
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r > std::f64::consts::PI {
        r -= two_pi;
    } else if r < -std::f64::consts::PI {
        r += two_pi;
    }
    r
}

/// Axis-aligned rectangle in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self {
            min: [min.x, min.y],
            max: [max.x, max.y],
        }
    }

    pub fn centered(center: Vec2, half_extent: f64) -> Self {
        let h = Vec2::new(half_extent, half_extent);
        Self::new(center - h, center + h)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min[0] && p.x <= self.max[0] && p.y >= self.min[1] && p.y <= self.max[1]
    }

    pub fn min_corner(&self) -> Vec2 {
        Vec2::new(self.min[0], self.min[1])
    }

    pub fn max_corner(&self) -> Vec2 {
        Vec2::new(self.max[0], self.max[1])
    }
}
