use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{lift, rotate, xy, Vec2, Vec3};
use crate::learned::{FeatureVector, LearnedModels};
use crate::sim::{IgpAction, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Proposer {
    Heuristic,
    Learned,
}

/// Projects `p` onto the disc of radius `reach` around `agent`.
pub fn clamp_to_reach(agent: Vec2, p: Vec2, reach: f64) -> Vec2 {
    let d = p - agent;
    let n = d.norm();
    if n > reach {
        agent + d * (reach / n)
    } else {
        p
    }
}

/// Distance `t >= 0` one can travel from `start` along unit `dir` while staying
/// within `reach` of `agent` (0 when `start` is already outside).
pub fn travel_within_reach(start: Vec2, dir: Vec2, agent: Vec2, reach: f64) -> f64 {
    let f = start - agent;
    let b = f.dot(&dir);
    let c = f.norm_squared() - reach * reach;
    let disc = b * b - c;
    if disc < 0.0 {
        return 0.0;
    }
    (-b + disc.sqrt()).max(0.0)
}

/// Rope slack between the attachment and the particle nearest to `grasp`.
pub fn grasp_slack(world: &WorldState, agent: usize, grasp: Vec2) -> f64 {
    let rope = &world.ropes[agent];
    let (index, _) = rope.nearest_particle(grasp);
    (rope.rest_length_to(index) - (grasp - xy(&world.attachment(agent))).norm()).max(0.0)
}

/// Pull destination for grasp `grasp` so the object heads toward `subgoal`.
///
/// The heuristic moves the grasp along the object-to-subgoal direction by the
/// rope slack plus the remaining object-to-subgoal distance, stopping at the
/// edge of the reach disc.
pub fn propose_pull(
    world: &WorldState,
    agent: usize,
    grasp: Vec3,
    subgoal: Vec2,
    proposer: Proposer,
    models: Option<&LearnedModels>,
) -> Result<Vec3> {
    let base = world.agent_position(agent);
    let reach = world.config.max_reach;
    let z = world.config.grasp_height;
    let g = xy(&grasp);
    let want = subgoal - world.object_position();
    match proposer {
        Proposer::Heuristic => {
            let advance = want.norm();
            if advance < 1e-12 {
                return Ok(grasp);
            }
            let dir = want / advance;
            let length = grasp_slack(world, agent, g) + advance;
            let t = length.min(travel_within_reach(g, dir, base, reach));
            Ok(lift(g + dir * t, z))
        }
        Proposer::Learned => {
            let model = models
                .and_then(|m| m.pull.as_ref())
                .ok_or_else(|| Error::Config("learned pull proposer requested without a PULL model".into()))?;
            if want.norm() < 1e-12 {
                return Ok(grasp);
            }
            let f = FeatureVector::compute(world, agent, subgoal, grasp);
            let out = model.forward(f.as_slice())?;
            let v = rotate(Vec2::new(out[0], out[1]), world.agents[agent].theta);
            Ok(lift(clamp_to_reach(base, g + v, reach), z))
        }
    }
}

/// Unclamped per-axis Gaussian offsets with the given variance.
pub fn gaussian_offsets<R: Rng>(n: usize, variance: f64, rng: &mut R) -> Vec<Vec2> {
    if variance <= 0.0 {
        return vec![Vec2::zeros(); n];
    }
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite variance");
    (0..n).map(|_| Vec2::new(normal.sample(rng), normal.sample(rng))).collect()
}

/// Returns `base` followed by `m` variants sharing its grasp whose pull point is
/// perturbed per axis by N(0, variance), clamped to the agent's reach.
pub fn sample_actions<R: Rng>(
    base: &IgpAction,
    m: usize,
    variance: f64,
    agent: Vec2,
    reach: f64,
    rng: &mut R,
) -> Vec<IgpAction> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(*base);
    for offset in gaussian_offsets(m, variance, rng) {
        let p = clamp_to_reach(agent, xy(&base.pull) + offset, reach);
        out.push(IgpAction::new(base.agent_id, base.grasp, lift(p, base.pull.z)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;
    use crate::sim::{create_world, execute_igp, WorldConfig};
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
    fn zero_demand_gives_zero_pull() {
        let w = w0();
        let g = w.ropes[0].particles[30];
        let eta = propose_pull(&w, 0, g, w.object_position(), Proposer::Heuristic, None).unwrap();
        assert_eq!(eta, g);
    }

    #[test]
    fn taut_pull_toward_agent_by_advance() {
        let w = w0();
        let g = lift(Vec2::new(0.7, 0.0), 0.0);
        let sub = Vec2::new(1.7, 0.0);
        let eta = propose_pull(&w, 0, g, sub, Proposer::Heuristic, None).unwrap();
        assert!((eta - lift(Vec2::new(0.4, 0.0), 0.0)).norm() <= 0.05);
        let (_, traj) = execute_igp(&w, &IgpAction::new(0, g, eta)).unwrap();
        assert!((traj.displacement.norm() - 0.3).abs() < 0.05);
    }

    #[test]
    fn pull_stays_within_reach() {
        let w = w0();
        let g = lift(Vec2::new(0.8, 0.0), 0.0);
        for k in 0..16 {
            let a = k as f64 * std::f64::consts::TAU / 16.0;
            let sub = w.object_position() + Vec2::new(a.cos(), a.sin()) * 2.0;
            let eta = propose_pull(&w, 0, g, sub, Proposer::Heuristic, None).unwrap();
            assert!(xy(&eta).norm() <= w.config.max_reach + 1e-12);
        }
    }

    #[test]
    fn sampler_sizes_and_zero_variance() {
        let base = IgpAction::new(1, Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.2, 0.1, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = sample_actions(&base, 10, 0.5, Vec2::zeros(), 0.85, &mut rng);
        assert_eq!(out.len(), 11);
        assert!(out.iter().all(|a| a.grasp == base.grasp && xy(&a.pull).norm() <= 0.85 + 1e-12));
        let same = sample_actions(&base, 5, 0.0, Vec2::zeros(), 0.85, &mut rng);
        assert!(same.iter().all(|a| *a == base));
    }
}
