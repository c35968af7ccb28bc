use serde::{Deserialize, Serialize};

use crate::geom::{xy, Vec2, Vec3};

/// One grasp-pull action: grasp the rope at `grasp`, then move linearly to `pull`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IgpAction {
    pub agent_id: usize,
    pub grasp: Vec3,
    pub pull: Vec3,
}

impl IgpAction {
    pub fn new(agent_id: usize, grasp: Vec3, pull: Vec3) -> Self {
        Self {
            agent_id,
            grasp,
            pull,
        }
    }

    /// Planar pull vector `pull - grasp`.
    pub fn pull_vector(&self) -> Vec2 {
        xy(&self.pull) - xy(&self.grasp)
    }
}

/// Grasp followed by an arbitrary polyline of gripper waypoints (used by the
/// tension-driven baselines, which lift the rope before pulling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PullCommand {
    pub agent_id: usize,
    pub grasp: Vec3,
    pub waypoints: Vec<Vec3>,
}

impl From<IgpAction> for PullCommand {
    fn from(a: IgpAction) -> Self {
        Self {
            agent_id: a.agent_id,
            grasp: a.grasp,
            waypoints: vec![a.pull],
        }
    }
}
