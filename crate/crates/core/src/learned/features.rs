use serde::{Deserialize, Serialize};

use crate::geom::{rotate, xy, Vec2, Vec3};
use crate::sim::WorldState;

pub const FEATURE_DIM: usize = 9;

/// Compact agent-frame description of a grasp situation:
/// `[object x, object y, subgoal x, subgoal y, grasp x, grasp y, slack, rope dir x, rope dir y]`.
///
/// `slack` is the rope length between the attachment and the grasped particle
/// minus the straight-line gap between them. `rope dir` is the unit tangent at
/// the grasped particle pointing toward the object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn compute(world: &WorldState, agent_id: usize, subgoal: Vec2, grasp: Vec3) -> Self {
        let frame = world.agents[agent_id];
        let rope = &world.ropes[agent_id];
        let (index, _) = rope.nearest_particle(xy(&grasp));
        let attach = xy(&world.attachment(agent_id));
        let slack = rope.rest_length_to(index) - (xy(&grasp) - attach).norm();
        let toward = if index > 0 {
            xy(&rope.particles[index - 1]) - xy(&rope.particles[index])
        } else {
            attach - xy(&grasp)
        };
        let dir = if toward.norm() > 1e-12 {
            rotate(toward / toward.norm(), -frame.theta)
        } else {
            Vec2::zeros()
        };
        let o = frame.to_local(world.object_position());
        let s = frame.to_local(subgoal);
        let g = frame.to_local(xy(&grasp));
        Self([o.x, o.y, s.x, s.y, g.x, g.y, slack, dir.x, dir.y])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Features followed by the agent-frame pull destination.
    pub fn with_pull(&self, world: &WorldState, agent_id: usize, pull: Vec3) -> Vec<f64> {
        let e = world.agents[agent_id].to_local(xy(&pull));
        let mut v = self.0.to_vec();
        v.extend([e.x, e.y]);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;
    use crate::sim::{create_world, WorldConfig};

    #[test]
    fn straight_rope_has_no_slack() {
        let w = create_world(WorldConfig {
            agent_poses: vec![Pose2::new(0.0, 0.0, 0.0)],
            rope_lengths: vec![3.0],
            box_init_pose: Pose2::new(2.0, 0.0, 0.0),
            initial_wiggle: 0.0,
            ..WorldConfig::default()
        })
        .unwrap();
        let g = w.ropes[0].particles[20];
        let f = FeatureVector::compute(&w, 0, Vec2::new(1.5, 0.0), g);
        assert!(f.0[6].abs() < 1e-9);
        assert!((f.0[7] - 1.0).abs() < 1e-9);
        assert!(f.0.iter().all(|v| v.is_finite()));
    }
}
