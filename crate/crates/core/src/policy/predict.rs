use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{rotate, Vec2};
use crate::learned::{FeatureVector, LearnedModels};
use crate::sim::{execute_igp, IgpAction, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PredictorKind {
    /// Execute the action on a copy of the world.
    RolloutOracle,
    Learned,
}

/// Predicted planar offset of the object after `action`. `subgoal` only feeds
/// the learned model's feature vector.
pub fn predict_outcome(
    world: &WorldState,
    action: &IgpAction,
    subgoal: Vec2,
    kind: PredictorKind,
    models: Option<&LearnedModels>,
) -> Result<Vec2> {
    match kind {
        PredictorKind::RolloutOracle => Ok(execute_igp(world, action)?.1.displacement),
        PredictorKind::Learned => {
            if action.pull_vector().norm() < 1e-12 {
                return Ok(Vec2::zeros());
            }
            let model = models
                .and_then(|m| m.outcome.as_ref())
                .ok_or_else(|| Error::Config("learned predictor requested without an OUTCOME model".into()))?;
            let agent = action.agent_id;
            let f = FeatureVector::compute(world, agent, subgoal, action.grasp);
            let out = model.forward(&f.with_pull(world, agent, action.pull))?;
            Ok(rotate(Vec2::new(out[0], out[1]), world.agents[agent].theta))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{lift, Pose2};
    use crate::sim::{create_world, WorldConfig};

    #[test]
    fn oracle_matches_execution_and_zero_pull_is_zero() {
        let w = create_world(WorldConfig {
            agent_poses: vec![Pose2::new(0.0, 0.0, 0.0)],
            rope_lengths: vec![3.0],
            box_init_pose: Pose2::new(2.0, 0.0, 0.0),
            initial_wiggle: 0.0,
            ..WorldConfig::default()
        })
        .unwrap();
        let g = lift(Vec2::new(0.7, 0.0), 0.0);
        let a = IgpAction::new(0, g, lift(Vec2::new(0.3, 0.1), 0.0));
        let p = predict_outcome(&w, &a, Vec2::zeros(), PredictorKind::RolloutOracle, None).unwrap();
        assert_eq!(p, execute_igp(&w, &a).unwrap().1.displacement);
        let z = IgpAction::new(0, g, g);
        for kind in [PredictorKind::RolloutOracle, PredictorKind::Learned] {
            let models = LearnedModels::default();
            assert_eq!(predict_outcome(&w, &z, Vec2::zeros(), kind, Some(&models)).unwrap(), Vec2::zeros());
        }
    }
}
