use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{lift, xy, Vec2, Vec3};
use crate::learned::{FeatureVector, LearnedModels};
use crate::perception::{Grid, ObservationSet};
use crate::sim::WorldState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scorer {
    Heuristic,
    Learned,
    Random,
}

/// Weights of the heuristic grasp score (logit = terms / temperature).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspHeuristic {
    /// Reward for grasping far from the agent (normalised by reach).
    pub reach_weight: f64,
    /// Penalty on rope length between the attachment and the grasp (normalised by rope length).
    pub arclength_weight: f64,
    /// Reward for the attachment-to-grasp direction agreeing with the desired object motion.
    pub alignment_weight: f64,
    pub temperature: f64,
}

impl Default for GraspHeuristic {
    fn default() -> Self {
        Self {
            reach_weight: 1.0,
            arclength_weight: 1.0,
            alignment_weight: 1.0,
            temperature: 0.1,
        }
    }
}

/// A graspable cell with the world point the gripper would aim for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspCell {
    pub cell: (usize, usize),
    pub point: Vec3,
}

/// Probability over grasp cells; zero outside the support.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspMap {
    pub grid: Grid<f64>,
    pub cells: Vec<GraspCell>,
    pub probabilities: Vec<f64>,
}

/// Reachable rope cells whose centre lies within grasp radius of the agent's own rope.
pub fn graspable_cells(obs: &ObservationSet, world: &WorldState) -> Vec<GraspCell> {
    let rope = &world.ropes[obs.agent_id];
    let radius = world.config.grasp_radius;
    obs.reach_cells()
        .into_iter()
        .filter_map(|(row, col)| {
            let q = obs.frame.cell_center_world(row, col);
            (rope.nearest_particle(q).1 <= radius).then(|| GraspCell {
                cell: (row, col),
                point: lift(q, world.config.grasp_height),
            })
        })
        .collect()
}

/// Heuristic logit of grasping at `q` when the object should move toward `subgoal`.
pub fn heuristic_logit(world: &WorldState, agent: usize, subgoal: Vec2, q: Vec2, h: &GraspHeuristic) -> f64 {
    let rope = &world.ropes[agent];
    let reach = world.config.max_reach;
    let attach = xy(&world.attachment(agent));
    let reach_term = (q - world.agent_position(agent)).norm() / reach;
    let (index, _) = rope.nearest_particle(q);
    let arc_term = rope.rest_length_to(index) / rope.rest_length();
    let want = subgoal - world.object_position();
    let lever = q - attach;
    let align = if want.norm() > 1e-9 && lever.norm() > 1e-9 {
        want.dot(&lever) / (want.norm() * lever.norm())
    } else {
        0.0
    };
    (h.reach_weight * reach_term - h.arclength_weight * arc_term + h.alignment_weight * align) / h.temperature
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

pub fn grasp_map(
    obs: &ObservationSet,
    world: &WorldState,
    subgoal: Vec2,
    scorer: Scorer,
    heuristic: &GraspHeuristic,
    models: Option<&LearnedModels>,
) -> Result<GraspMap> {
    let agent = obs.agent_id;
    let cells = graspable_cells(obs, world);
    if cells.is_empty() {
        return Err(Error::NoGraspableRope(agent));
    }
    let probabilities = match scorer {
        Scorer::Random => vec![1.0 / cells.len() as f64; cells.len()],
        Scorer::Heuristic => {
            let logits: Vec<f64> = cells
                .iter()
                .map(|c| heuristic_logit(world, agent, subgoal, xy(&c.point), heuristic))
                .collect();
            softmax(&logits)
        }
        Scorer::Learned => {
            let model = models
                .and_then(|m| m.grasp.as_ref())
                .ok_or_else(|| Error::Config("learned grasp scorer requested without a GRASP_SCORE model".into()))?;
            let mut logits = Vec::with_capacity(cells.len());
            for c in &cells {
                let f = FeatureVector::compute(world, agent, subgoal, c.point);
                logits.push(model.forward(f.as_slice())?[0]);
            }
            softmax(&logits)
        }
    };
    let mut grid = Grid::filled(obs.frame.w, 0.0);
    for (c, p) in cells.iter().zip(&probabilities) {
        grid.set(c.cell.0, c.cell.1, *p);
    }
    Ok(GraspMap {
        grid,
        cells,
        probabilities,
    })
}

/// Builds the grasp map and samples a grasp point from it.
#[allow(clippy::too_many_arguments)]
pub fn propose_grasp<R: Rng>(
    obs: &ObservationSet,
    world: &WorldState,
    subgoal: Vec2,
    scorer: Scorer,
    heuristic: &GraspHeuristic,
    models: Option<&LearnedModels>,
    rng: &mut R,
) -> Result<(GraspMap, Vec3)> {
    let map = grasp_map(obs, world, subgoal, scorer, heuristic, models)?;
    let pick = WeightedIndex::new(&map.probabilities)
        .map(|d| d.sample(rng))
        .unwrap_or(0);
    let point = map.cells[pick].point;
    Ok((map, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;
    use crate::perception::{render_observation, ObservationConfig};
    use crate::sim::{create_world, WorldConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w0() -> WorldState {
        create_world(WorldConfig {
            agent_poses: vec![Pose2::new(0.0, 0.0, 0.0)],
            rope_lengths: vec![3.0],
            box_init_pose: Pose2::new(2.0, 0.0, 0.0),
            initial_wiggle: 0.0,
            ..WorldConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn random_scorer_is_uniform_on_support() {
        let w = w0();
        let sub = Vec2::new(1.5, 0.0);
        let obs = render_observation(&w, 0, sub, &ObservationConfig::default());
        let map = grasp_map(&obs, &w, sub, Scorer::Random, &GraspHeuristic::default(), None).unwrap();
        let k = map.cells.len() as f64;
        assert!(map.probabilities.iter().all(|p| (p - 1.0 / k).abs() < 1e-15));
        for ((r, c), p) in map.grid.iter_cells() {
            if p > 0.0 {
                assert_eq!(obs.r.get(r, c), 1);
            }
        }
    }

    #[test]
    fn sampled_grasps_stay_on_support() {
        let w = w0();
        let sub = Vec2::new(1.5, 0.0);
        let obs = render_observation(&w, 0, sub, &ObservationConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (_, g) = propose_grasp(&obs, &w, sub, Scorer::Heuristic, &GraspHeuristic::default(), None, &mut rng).unwrap();
            let (r, c) = obs.frame.world_to_cell(xy(&g)).unwrap();
            assert_eq!(obs.r.get(r, c), 1);
        }
    }

    #[test]
    fn learned_scorer_without_model_is_a_config_error() {
        let w = w0();
        let obs = render_observation(&w, 0, Vec2::new(1.5, 0.0), &ObservationConfig::default());
        let err = grasp_map(&obs, &w, Vec2::new(1.5, 0.0), Scorer::Learned, &GraspHeuristic::default(), None);
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
