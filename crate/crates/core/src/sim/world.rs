use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{BoxDims, WorldConfig};
use super::solver::settle;
use crate::error::{Error, Result};
use crate::geom::{cross2, lift, rotate, wrap_angle, xy, Pose2, Vec2, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RopeState {
    pub particles: Vec<Vec3>,
    pub segment_rest_length: f64,
    /// Particle pinned to the box attachment point.
    pub attachment_index: usize,
    /// Particle currently held by the owning agent's gripper.
    pub grasped_index: Option<usize>,
}

impl RopeState {
    pub fn rest_length(&self) -> f64 {
        self.segment_rest_length * (self.particles.len().saturating_sub(1)) as f64
    }

    /// Index of the free end (the particle farthest from the attachment along the chain).
    pub fn free_end_index(&self) -> usize {
        if self.attachment_index == 0 {
            self.particles.len() - 1
        } else {
            0
        }
    }

    /// Rope length between the attachment and particle `index`.
    pub fn rest_length_to(&self, index: usize) -> f64 {
        self.segment_rest_length * index.abs_diff(self.attachment_index) as f64
    }

    /// Nearest particle to `p` in the ground plane (ties go to the lower index).
    pub fn nearest_particle(&self, p: Vec2) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, q) in self.particles.iter().enumerate() {
            let d = (xy(q) - p).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

/// Sum of inter-particle distances.
pub fn rope_arclength(rope: &RopeState) -> f64 {
    rope.particles.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidBody {
    pub pose: Pose2,
    pub dims: BoxDims,
    /// Body-frame attachment point of each rope, on the box perimeter.
    pub attachment_points: Vec<Vec2>,
    /// Body-frame position indicator (top-surface centre).
    pub indicator_point: Vec2,
}

impl RigidBody {
    pub fn new(pose: Pose2, dims: BoxDims, agent_positions: &[Vec2]) -> Self {
        let attachment_points = agent_positions
            .iter()
            .map(|&a| perimeter_point(&dims, pose.to_local(a)))
            .collect();
        Self {
            pose,
            dims,
            attachment_points,
            indicator_point: Vec2::zeros(),
        }
    }

    pub fn center(&self) -> Vec2 {
        self.pose.position()
    }

    pub fn indicator_world(&self) -> Vec2 {
        self.pose.to_world(self.indicator_point)
    }

    pub fn attachment_world(&self, rope: usize) -> Vec2 {
        self.pose.to_world(self.attachment_points[rope])
    }

    /// Whether a world point lies inside the box footprint.
    pub fn contains(&self, p: Vec2) -> bool {
        let l = self.pose.to_local(p);
        l.x.abs() <= self.dims.width / 2.0 && l.y.abs() <= self.dims.depth / 2.0
    }

    /// Drags the box so that attachment `rope` translates by `delta`; the heading
    /// turns toward the pull by at most `rotation_rate * |delta|`. Returns the
    /// largest point displacement (attachment or centre).
    pub(crate) fn drag(&mut self, rope: usize, delta: Vec2, rotation_rate: f64) -> f64 {
        let lever = rotate(self.attachment_points[rope], self.pose.theta);
        let attach_new = self.center() + lever + delta;
        let dist = delta.norm();
        let misalignment = cross2(lever, delta).atan2(lever.dot(&delta));
        let dtheta = if lever.norm() > 1e-12 && dist > 0.0 {
            misalignment.signum() * (rotation_rate * dist).min(misalignment.abs())
        } else {
            0.0
        };
        let theta = wrap_angle(self.pose.theta + dtheta);
        let center = attach_new - rotate(self.attachment_points[rope], theta);
        let moved = (center - self.center()).norm().max(dist);
        self.pose = Pose2::new(center.x, center.y, theta);
        moved
    }
}

/// Intersection of the ray from the box centre along `dir` with the box boundary.
fn perimeter_point(dims: &BoxDims, dir: Vec2) -> Vec2 {
    let (hx, hy) = (dims.width / 2.0, dims.depth / 2.0);
    if dir.norm() < 1e-12 {
        return Vec2::new(hx, 0.0);
    }
    let tx = if dir.x.abs() > 1e-12 { hx / dir.x.abs() } else { f64::INFINITY };
    let ty = if dir.y.abs() > 1e-12 { hy / dir.y.abs() } else { f64::INFINITY };
    dir * tx.min(ty)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub config: WorldConfig,
    pub ropes: Vec<RopeState>,
    pub body: RigidBody,
    pub agents: Vec<Pose2>,
    /// Gripper position per agent while it holds its rope.
    pub grippers: Vec<Option<Vec3>>,
    pub time_step: u64,
}

impl WorldState {
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    /// Object position as seen by the position indicator.
    pub fn object_position(&self) -> Vec2 {
        self.body.indicator_world()
    }

    pub fn attachment(&self, rope: usize) -> Vec3 {
        lift(self.body.attachment_world(rope), 0.0)
    }

    pub fn agent_position(&self, agent: usize) -> Vec2 {
        self.agents[agent].position()
    }
}

/// Builds a world from `config`: ropes are laid from each box attachment toward
/// the owning agent as slightly slack wiggles, then the world is settled.
pub fn create_world(config: WorldConfig) -> Result<WorldState> {
    config.validate()?;
    let agents = config.agent_poses.clone();
    let agent_positions: Vec<Vec2> = agents.iter().map(|a| a.position()).collect();
    let body = RigidBody::new(config.box_init_pose, config.box_dims, &agent_positions);
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let mut ropes = Vec::with_capacity(agents.len());
    for (i, agent) in agent_positions.iter().enumerate() {
        let attach = body.attachment_world(i);
        let length = config.rope_lengths[i];
        let gap = (agent - attach).norm();
        if length < gap {
            return Err(Error::Config(format!(
                "rope {i} ({length:.3} m) is shorter than the agent-object gap ({gap:.3} m)"
            )));
        }
        let along = if gap > 1e-9 { (agent - attach) / gap } else { Vec2::new(1.0, 0.0) };
        let across = Vec2::new(-along.y, along.x);
        let n = config.particles_per_rope;
        let rest = config.segment_rest_length(i);
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let cycles = 2.0;
        let mut particles = Vec::with_capacity(n);
        let mut p = attach;
        particles.push(lift(p, 0.0));
        for k in 1..n {
            let s = k as f64 / (n - 1) as f64;
            let heading = config.initial_wiggle * (std::f64::consts::TAU * cycles * s + phase).sin();
            p += rest * (heading.cos() * along + heading.sin() * across);
            particles.push(lift(p, 0.0));
        }
        ropes.push(RopeState {
            particles,
            segment_rest_length: rest,
            attachment_index: 0,
            grasped_index: None,
        });
    }

    let mut world = WorldState {
        grippers: vec![None; agents.len()],
        config,
        ropes,
        body,
        agents,
        time_step: 0,
    };
    settle(&mut world)?;
    Ok(world)
}
