use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::{rotate, Pose2, Vec2};
use crate::sim::{create_world, BoxDims, WorldConfig, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TaskKind {
    GoalReach,
    DistantAcq,
    FixedPos,
}

impl std::str::FromStr for TaskKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "GOAL_REACH" => Ok(TaskKind::GoalReach),
            "DISTANT_ACQ" => Ok(TaskKind::DistantAcq),
            "FIXED_POS" => Ok(TaskKind::FixedPos),
            _ => Err(crate::Error::Unknown {
                kind: "task",
                name: s.to_string(),
            }),
        }
    }
}

/// Sampling ranges for scene randomisation (all `[low, high]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskRanges {
    pub rope_length: [f64; 2],
    pub box_width: [f64; 2],
    pub box_depth: [f64; 2],
    pub box_height: [f64; 2],
    /// Object offset from the origin, per axis.
    pub object_offset: [f64; 2],
    /// Agent distance from the object (goal reaching).
    pub agent_distance: [f64; 2],
    /// Deviation of the second agent from the exactly opposite bearing (rad).
    pub agent_spread: f64,
    pub target_distance: [f64; 2],
    /// Half-width (rad) of the cone around an agent's bearing the target direction is drawn from.
    pub target_cone: f64,
    /// Multiplier applied to distant-acquisition distances.
    pub arena_scale: f64,
    /// Rope kept beyond the agent-object gap in distant acquisition.
    pub distant_rope_margin: f64,
}

impl Default for TaskRanges {
    fn default() -> Self {
        Self {
            rope_length: [2.5, 4.0],
            box_width: [0.10, 0.20],
            box_depth: [0.10, 0.15],
            box_height: [0.05, 0.10],
            object_offset: [-0.3, 0.3],
            agent_distance: [1.6, 2.2],
            agent_spread: 0.3,
            target_distance: [0.3, 1.0],
            target_cone: 35f64.to_radians(),
            arena_scale: 0.32,
            distant_rope_margin: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub success_radius: f64,
    pub terminate_radius: f64,
    pub max_steps: usize,
    #[serde(default)]
    pub ranges: TaskRanges,
    /// World parameters not randomised by the task (reach, tolerances, ...).
    #[serde(default)]
    pub world: WorldConfig,
}

/// A sampled scene: the initial world and the target position.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub world: WorldState,
    pub target: Vec2,
}

fn uniform<R: Rng>(rng: &mut R, r: [f64; 2]) -> f64 {
    if r[1] > r[0] {
        rng.random_range(r[0]..r[1])
    } else {
        r[0]
    }
}

fn facing(pos: Vec2, toward: Vec2) -> Pose2 {
    let d = toward - pos;
    Pose2::new(pos.x, pos.y, d.y.atan2(d.x))
}

impl TaskSpec {
    pub fn new(kind: TaskKind) -> Self {
        let (success_radius, terminate_radius) = match kind {
            TaskKind::GoalReach | TaskKind::FixedPos => (0.2, 0.1),
            TaskKind::DistantAcq => (0.5, 0.5),
        };
        Self {
            kind,
            success_radius,
            terminate_radius,
            max_steps: 20,
            ranges: TaskRanges::default(),
            world: WorldConfig::default(),
        }
    }

    /// Distance between agent and object in distant-acquisition episode `index` (1-based).
    pub fn distant_distance(&self, index: usize) -> f64 {
        self.ranges.arena_scale * (4.5 + index as f64 * 0.5)
    }

    /// Samples the scene for episode `index` from `seed`; the same pair always
    /// yields the same scene.
    pub fn sample_scene(&self, seed: u64, index: usize) -> Result<Scene> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = &self.ranges;
        let dims = BoxDims::new(uniform(&mut rng, r.box_width), uniform(&mut rng, r.box_depth), uniform(&mut rng, r.box_height));
        let box_theta = rng.random_range(-PI..PI);
        let wiggle_seed: u64 = rng.random();

        let (object, agents, ropes, target) = match self.kind {
            TaskKind::GoalReach | TaskKind::FixedPos => {
                let (object, positions) = if self.kind == TaskKind::GoalReach {
                    let object = Vec2::new(uniform(&mut rng, r.object_offset), uniform(&mut rng, r.object_offset));
                    let a = rng.random_range(-PI..PI);
                    let b = a + PI + rng.random_range(-r.agent_spread..=r.agent_spread);
                    let d0 = uniform(&mut rng, r.agent_distance);
                    let d1 = uniform(&mut rng, r.agent_distance);
                    (
                        object,
                        vec![object + rotate(Vec2::x(), a) * d0, object + rotate(Vec2::x(), b) * d1],
                    )
                } else {
                    let object = Vec2::new(uniform(&mut rng, r.object_offset), uniform(&mut rng, r.object_offset));
                    (object, vec![Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0)])
                };
                let agents: Vec<Pose2> = if self.kind == TaskKind::GoalReach {
                    positions.iter().map(|p| facing(*p, object)).collect()
                } else {
                    positions.iter().map(|p| facing(*p, Vec2::zeros())).collect()
                };
                let ropes = positions.iter().map(|_| uniform(&mut rng, r.rope_length)).collect();
                let side = rng.random_range(0..positions.len());
                let bearing = positions[side] - object;
                let angle = bearing.y.atan2(bearing.x) + rng.random_range(-r.target_cone..=r.target_cone);
                let target = object + rotate(Vec2::x(), angle) * uniform(&mut rng, r.target_distance);
                (object, agents, ropes, target)
            }
            TaskKind::DistantAcq => {
                let heading = rng.random_range(-PI..PI);
                let agent = Pose2::new(0.0, 0.0, heading);
                let dir = rotate(Vec2::x(), heading);
                let gap = self.distant_distance(index.max(1));
                let object = dir * gap;
                let rope = uniform(&mut rng, r.rope_length).max(gap + r.distant_rope_margin);
                (object, vec![agent], vec![rope], dir * 0.1)
            }
        };

        let world = create_world(WorldConfig {
            agent_poses: agents,
            rope_lengths: ropes,
            box_dims: dims,
            box_init_pose: Pose2::new(object.x, object.y, box_theta),
            rng_seed: wiggle_seed,
            ..self.world.clone()
        })?;
        Ok(Scene { world, target })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_parse() {
        assert_eq!("goal-reach".parse::<TaskKind>().unwrap(), TaskKind::GoalReach);
        assert_eq!("DISTANT_ACQ".parse::<TaskKind>().unwrap(), TaskKind::DistantAcq);
        assert_eq!(" fixed_pos".parse::<TaskKind>().unwrap(), TaskKind::FixedPos);
        assert!("reach".parse::<TaskKind>().is_err());
    }

    #[test]
    fn defaults_follow_task_kind() {
        let g = TaskSpec::new(TaskKind::GoalReach);
        assert_eq!((g.terminate_radius, g.success_radius), (0.1, 0.2));
        let d = TaskSpec::new(TaskKind::DistantAcq);
        assert_eq!((d.terminate_radius, d.success_radius), (0.5, 0.5));
    }

    #[test]
    fn scenes_are_reproducible_and_in_range() {
        let t = TaskSpec::new(TaskKind::GoalReach);
        for seed in 0..20 {
            let a = t.sample_scene(seed, 0).unwrap();
            let b = t.sample_scene(seed, 0).unwrap();
            assert_eq!(a.world, b.world);
            assert_eq!(a.world.n_agents(), 2);
            let l = (a.target - a.world.object_position()).norm();
            assert!((0.3..=1.0).contains(&l));
            for len in &a.world.config.rope_lengths {
                assert!((2.5..=4.0).contains(len));
            }
        }
    }

    #[test]
    fn fixed_position_keeps_agents() {
        let t = TaskSpec::new(TaskKind::FixedPos);
        for seed in 0..5 {
            let s = t.sample_scene(seed, 0).unwrap();
            assert_eq!(s.world.agent_position(0), Vec2::new(-2.0, 0.0));
            assert_eq!(s.world.agent_position(1), Vec2::new(2.0, 0.0));
        }
    }

    #[test]
    fn distant_scene_distance_and_target() {
        let t = TaskSpec::new(TaskKind::DistantAcq);
        let s = t.sample_scene(3, 4).unwrap();
        let gap = (s.world.object_position() - s.world.agent_position(0)).norm();
        assert!((gap - 0.32 * 6.5).abs() < 1e-9);
        assert!((s.target - s.world.agent_position(0)).norm() - 0.1 < 1e-12);
    }
}
