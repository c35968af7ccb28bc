use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Pose2;

pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDims {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
}

impl BoxDims {
    pub fn new(width: f64, depth: f64, height: f64) -> Self {
        Self {
            width,
            depth,
            height,
        }
    }
}

/// Everything needed to build a world deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub arena_half_extent: f64,
    /// One pose per agent; the agent count is `agent_poses.len()`.
    pub agent_poses: Vec<Pose2>,
    /// Rope length per agent (m).
    pub rope_lengths: Vec<f64>,
    pub particles_per_rope: usize,
    pub box_dims: BoxDims,
    pub box_init_pose: Pose2,
    pub box_friction_coeff: f64,
    pub box_mass: f64,
    /// Axial rope stiffness (N/m); only sets the tiny stretch at which the box starts sliding.
    pub rope_stiffness: f64,
    /// Box rotation per metre of attachment travel (rad/m), capped by the lever-arm misalignment.
    pub rotation_rate: f64,
    pub max_reach: f64,
    pub grasp_height: f64,
    pub grasp_radius: f64,
    pub ee_speed_cap: f64,
    pub dt: f64,
    pub settle_tolerance: f64,
    pub max_settle_iterations: usize,
    /// Heading amplitude (rad) of the sinusoidal wiggle used to lay ropes out slightly slack.
    pub initial_wiggle: f64,
    pub rng_seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            arena_half_extent: 4.0,
            agent_poses: vec![
                Pose2::new(-2.0, 0.0, 0.0),
                Pose2::new(2.0, 0.0, std::f64::consts::PI),
            ],
            rope_lengths: vec![3.0, 3.0],
            particles_per_rope: 50,
            box_dims: BoxDims::new(0.15, 0.12, 0.08),
            box_init_pose: Pose2::new(0.0, 0.0, 0.0),
            box_friction_coeff: 0.4,
            box_mass: 1.0,
            rope_stiffness: 1.0e6,
            rotation_rate: 1.0,
            max_reach: 0.85,
            grasp_height: 0.0,
            grasp_radius: 0.05,
            ee_speed_cap: 0.1,
            dt: 0.05,
            settle_tolerance: 1e-4,
            max_settle_iterations: 10_000,
            initial_wiggle: 0.15,
            rng_seed: 0,
        }
    }
}

impl WorldConfig {
    pub fn n_agents(&self) -> usize {
        self.agent_poses.len()
    }

    /// Largest gripper displacement allowed per physics step.
    pub fn max_step(&self) -> f64 {
        self.ee_speed_cap * self.dt
    }

    /// Rope stretch at which tension equals the box's static friction.
    pub fn friction_stretch(&self) -> f64 {
        self.box_friction_coeff * self.box_mass * GRAVITY / self.rope_stiffness
    }

    pub fn segment_rest_length(&self, agent: usize) -> f64 {
        self.rope_lengths[agent] / (self.particles_per_rope - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.agent_poses.is_empty() {
            return fail("at least one agent is required".into());
        }
        if self.rope_lengths.len() != self.agent_poses.len() {
            return fail(format!(
                "{} rope lengths for {} agents",
                self.rope_lengths.len(),
                self.agent_poses.len()
            ));
        }
        if self.particles_per_rope < 10 {
            return fail(format!(
                "particles_per_rope must be >= 10, got {}",
                self.particles_per_rope
            ));
        }
        let positive = [
            ("arena_half_extent", self.arena_half_extent),
            ("box width", self.box_dims.width),
            ("box depth", self.box_dims.depth),
            ("box height", self.box_dims.height),
            ("box_mass", self.box_mass),
            ("rope_stiffness", self.rope_stiffness),
            ("max_reach", self.max_reach),
            ("grasp_radius", self.grasp_radius),
            ("ee_speed_cap", self.ee_speed_cap),
            ("dt", self.dt),
            ("settle_tolerance", self.settle_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        for (i, &l) in self.rope_lengths.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return fail(format!("rope {i} length must be positive, got {l}"));
            }
        }
        if self.box_friction_coeff < 0.0 || self.rotation_rate < 0.0 || self.grasp_height < 0.0 {
            return fail("friction, rotation rate and grasp height must be non-negative".into());
        }
        if self.max_settle_iterations == 0 {
            return fail("max_settle_iterations must be positive".into());
        }
        Ok(())
    }
}
