//! JSON world snapshots: `{config, particles, body_pose, grippers, time_step}`.
//!
//! `particles` is the flat list of `[x, y, z]` triples, rope after rope, each
//! rope holding `config.particles_per_rope` entries. Attachment points and rest
//! lengths are rebuilt from the config.

use serde::{Deserialize, Serialize};

use super::config::WorldConfig;
use super::world::{RigidBody, RopeState, WorldState};
use crate::error::{Error, Result};
use crate::geom::{Pose2, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperSnapshot {
    pub position: [f64; 3],
    pub particle: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSnapshot {
    pub config: WorldConfig,
    pub particles: Vec<[f64; 3]>,
    pub body_pose: [f64; 3],
    pub grippers: Vec<Option<GripperSnapshot>>,
    #[serde(default)]
    pub time_step: u64,
}

impl WorldState {
    pub fn to_snapshot(&self) -> WorldSnapshot {
        let particles = self
            .ropes
            .iter()
            .flat_map(|r| r.particles.iter().map(|p| [p.x, p.y, p.z]))
            .collect();
        let grippers = self
            .grippers
            .iter()
            .zip(&self.ropes)
            .map(|(g, r)| match (g, r.grasped_index) {
                (Some(p), Some(i)) => Some(GripperSnapshot {
                    position: [p.x, p.y, p.z],
                    particle: i,
                }),
                _ => None,
            })
            .collect();
        let p = self.body.pose;
        WorldSnapshot {
            config: self.config.clone(),
            particles,
            body_pose: [p.x, p.y, p.theta],
            grippers,
            time_step: self.time_step,
        }
    }

    pub fn from_snapshot(snap: WorldSnapshot) -> Result<Self> {
        let cfg = snap.config;
        cfg.validate()?;
        let n = cfg.n_agents();
        let per = cfg.particles_per_rope;
        if snap.particles.len() != n * per {
            return Err(Error::Config(format!(
                "snapshot holds {} particles, expected {}",
                snap.particles.len(),
                n * per
            )));
        }
        if snap.grippers.len() != n {
            return Err(Error::Config(format!(
                "snapshot holds {} grippers for {n} agents",
                snap.grippers.len()
            )));
        }
        let positions: Vec<_> = cfg.agent_poses.iter().map(|a| a.position()).collect();
        let mut body = RigidBody::new(cfg.box_init_pose, cfg.box_dims, &positions);
        body.pose = Pose2::new(snap.body_pose[0], snap.body_pose[1], snap.body_pose[2]);
        let mut grippers = Vec::with_capacity(n);
        let ropes = snap
            .particles
            .chunks(per)
            .zip(&snap.grippers)
            .enumerate()
            .map(|(i, (chunk, g))| {
                grippers.push(g.as_ref().map(|g| Vec3::from(g.position)));
                RopeState {
                    particles: chunk.iter().map(|p| Vec3::from(*p)).collect(),
                    segment_rest_length: cfg.segment_rest_length(i),
                    attachment_index: 0,
                    grasped_index: g.as_ref().map(|g| g.particle),
                }
            })
            .collect();
        Ok(WorldState {
            agents: cfg.agent_poses.clone(),
            config: cfg,
            ropes,
            body,
            grippers,
            time_step: snap.time_step,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_snapshot()).expect("snapshot serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_snapshot(serde_json::from_str(s)?)
    }
}
