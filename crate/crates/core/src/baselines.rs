//! Model-based tension-driven baselines and the ablation variants of the IGP pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{lift, xy, Vec2, Vec3};
use crate::policy::{travel_within_reach, PolicyConfig, Scorer};
use crate::sim::{ExecOptions, PullCommand, WorldState};

/// Height the tension-driven baselines lift the rope to before pulling.
pub const LIFT_HEIGHT: f64 = 0.2;
/// Reach kept in reserve when budgeting a pull.
pub const APPROACH_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BaselineKind {
    Tda,
    Gtda,
    IgpNs,
    IgpRg,
    FixedGrasp,
}

impl BaselineKind {
    /// Pipeline configuration of the IGP ablations; `None` for the tension-driven baselines.
    pub fn policy(self, base: &PolicyConfig) -> Option<PolicyConfig> {
        match self {
            BaselineKind::Tda | BaselineKind::Gtda => None,
            BaselineKind::IgpNs => Some(PolicyConfig { m: 0, ..base.clone() }),
            BaselineKind::IgpRg => Some(PolicyConfig {
                scorer: Scorer::Random,
                ..base.clone()
            }),
            BaselineKind::FixedGrasp => Some(PolicyConfig {
                fixed_grasp: true,
                ..base.clone()
            }),
        }
    }
}

/// Puts every rope's free end into its agent's gripper at the agent base, the
/// pre-attached starting condition of the fixed-grasp primitive.
pub fn pregrasp_free_ends(world: &mut WorldState) -> Result<()> {
    for agent in 0..world.n_agents() {
        let rope = &world.ropes[agent];
        let end = rope.particles[rope.free_end_index()];
        let hold = lift(world.agent_position(agent), world.config.grasp_height);
        let command = PullCommand {
            agent_id: agent,
            grasp: lift(xy(&end), world.config.grasp_height),
            waypoints: vec![hold],
        };
        world.apply_command(&command, ExecOptions { enforce_reach: false })?;
    }
    Ok(())
}

fn budget_radius(world: &WorldState) -> f64 {
    world.config.max_reach - APPROACH_MARGIN
}

/// Rope particle of `agent` closest to the agent among those within the reach budget.
pub fn nearest_reachable_grasp(world: &WorldState, agent: usize) -> Result<Vec3> {
    let base = world.agent_position(agent);
    let r = budget_radius(world);
    world.ropes[agent]
        .particles
        .iter()
        .map(|p| (p, (xy(p) - base).norm()))
        .filter(|(_, d)| *d <= r)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, _)| lift(xy(p), world.config.grasp_height))
        .ok_or(Error::NoGraspableRope(agent))
}

fn unit_toward(object: Vec2, target: Vec2) -> Option<Vec2> {
    let d = target - object;
    (d.norm() > 1e-12).then(|| d / d.norm())
}

/// Grasp the nearest reachable rope point, lift it, then pull parallel to the
/// object-to-target vector by that vector's length or the remaining reach budget.
pub fn tda_action(world: &WorldState, agent: usize, target: Vec2) -> Result<PullCommand> {
    let grasp = nearest_reachable_grasp(world, agent)?;
    let start = lift(xy(&grasp), LIFT_HEIGHT);
    let object = world.object_position();
    let end = match unit_toward(object, target) {
        None => start,
        Some(dir) => {
            let budget = travel_within_reach(xy(&grasp), dir, world.agent_position(agent), budget_radius(world));
            let len = (target - object).norm().min(budget);
            lift(xy(&grasp) + dir * len, LIFT_HEIGHT)
        }
    };
    Ok(PullCommand {
        agent_id: agent,
        grasp,
        waypoints: vec![start, end],
    })
}

/// Orthogonal projection of `p` onto the line through `origin` with unit direction `dir`.
pub fn project_on_line(p: Vec2, origin: Vec2, dir: Vec2) -> Vec2 {
    origin + dir * (p - origin).dot(&dir)
}

/// Like TDA, but after lifting the gripper first moves onto the object-to-target
/// line (its orthogonal projection, kept inside the reach budget) and pulls along it.
pub fn gtda_action(world: &WorldState, agent: usize, target: Vec2) -> Result<PullCommand> {
    let grasp = nearest_reachable_grasp(world, agent)?;
    let start = lift(xy(&grasp), LIFT_HEIGHT);
    let object = world.object_position();
    let Some(dir) = unit_toward(object, target) else {
        return Ok(PullCommand {
            agent_id: agent,
            grasp,
            waypoints: vec![start],
        });
    };
    let base = world.agent_position(agent);
    let r = budget_radius(world);
    // parameter along the line, measured from the object
    let s_proj = (xy(&grasp) - object).dot(&dir);
    let s_center = (base - object).dot(&dir);
    let off = (project_on_line(base, object, dir) - base).norm();
    if off > r {
        return Err(Error::Precondition(format!(
            "object-target line passes {off:.2} m from agent {agent}, outside its reach"
        )));
    }
    let half_chord = (r * r - off * off).sqrt();
    let s = s_proj.clamp(s_center - half_chord, s_center + half_chord);
    let on_line = object + dir * s;
    let len = (target - object).norm().min((s_center + half_chord - s).max(0.0));
    Ok(PullCommand {
        agent_id: agent,
        grasp,
        waypoints: vec![start, lift(on_line, LIFT_HEIGHT), lift(on_line + dir * len, LIFT_HEIGHT)],
    })
}

/// Agents ordered by how well pulling toward them moves the object toward the target.
pub fn agents_by_alignment(world: &WorldState, target: Vec2) -> Vec<usize> {
    let object = world.object_position();
    let want = target - object;
    let mut order: Vec<(usize, f64)> = (0..world.n_agents())
        .map(|a| {
            let to_agent = world.agent_position(a) - object;
            (a, to_agent.dot(&want) / (to_agent.norm() * want.norm()).max(1e-12))
        })
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    order.into_iter().map(|(a, _)| a).collect()
}

/// Command of a tension-driven baseline for the best-aligned agent that can act.
pub fn baseline_command(world: &WorldState, kind: BaselineKind, target: Vec2) -> Result<PullCommand> {
    let mut last = Error::NoGraspableRope(0);
    for agent in agents_by_alignment(world, target) {
        let cmd = match kind {
            BaselineKind::Tda => tda_action(world, agent, target),
            BaselineKind::Gtda => gtda_action(world, agent, target),
            _ => return Err(Error::Config(format!("{kind:?} is not a tension-driven baseline"))),
        };
        match cmd {
            Ok(c) => return Ok(c),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose2;
    use crate::sim::{create_world, execute_command, ExecOptions, WorldConfig};

    fn world() -> WorldState {
        create_world(WorldConfig {
            agent_poses: vec![Pose2::new(-2.0, 0.0, 0.0)],
            rope_lengths: vec![3.0],
            initial_wiggle: 0.0,
            ..WorldConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn object_at_target_gives_zero_pull() {
        let w = world();
        let c = tda_action(&w, 0, w.object_position()).unwrap();
        assert_eq!(c.waypoints[0], c.waypoints[1]);
    }

    #[test]
    fn tda_pull_is_parallel_and_budgeted() {
        let w = world();
        let target = Vec2::new(-1.0, 0.0);
        let c = tda_action(&w, 0, target).unwrap();
        let pull = xy(&c.waypoints[1]) - xy(&c.waypoints[0]);
        assert!(pull.y.abs() < 1e-12 && pull.x < 0.0);
        let budget = travel_within_reach(xy(&c.grasp), Vec2::new(-1.0, 0.0), w.agent_position(0), 0.8);
        assert!((pull.norm() - budget.min(1.0)).abs() < 1e-12);
        let (_, traj) = execute_command(&w, &c, ExecOptions::default()).unwrap();
        assert!(traj.displacement.x <= 1e-4);
    }

    #[test]
    fn projection_examples() {
        let q = project_on_line(Vec2::new(0.0, 1.0), Vec2::zeros(), Vec2::new(1.0, 0.0));
        assert_eq!(q, Vec2::zeros());
        let on = Vec2::new(0.4, 0.0);
        assert_eq!(project_on_line(on, Vec2::zeros(), Vec2::new(1.0, 0.0)), on);
    }

    #[test]
    fn gtda_pull_lies_on_the_line() {
        let w = world();
        let target = Vec2::new(-0.8, 0.3);
        let c = gtda_action(&w, 0, target).unwrap();
        let o = w.object_position();
        let dir = (target - o).normalize();
        for p in &c.waypoints[1..] {
            assert!(crate::geom::cross2(xy(p) - o, dir).abs() < 1e-9);
            assert!((xy(p) - w.agent_position(0)).norm() <= w.config.max_reach);
        }
    }

    #[test]
    fn ablations_change_one_knob() {
        let base = PolicyConfig::default();
        assert_eq!(BaselineKind::IgpNs.policy(&base).unwrap().m, 0);
        assert_eq!(BaselineKind::IgpRg.policy(&base).unwrap().scorer, Scorer::Random);
        assert!(BaselineKind::FixedGrasp.policy(&base).unwrap().fixed_grasp);
        assert!(BaselineKind::Tda.policy(&base).is_none());
    }
}
