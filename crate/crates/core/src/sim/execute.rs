use serde::{Deserialize, Serialize};

use super::action::{IgpAction, PullCommand};
use super::solver::settle;
use super::world::WorldState;
use crate::error::{Error, Result};
use crate::geom::{lift, xy, Pose2, Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub gripper: Vec3,
    pub body: Pose2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<TrajectoryPoint>,
    /// Final planar displacement of the object (indicator).
    pub displacement: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExecOptions {
    /// Reject grasp/pull points outside the agent's `max_reach`.
    pub enforce_reach: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self {
            enforce_reach: true,
        }
    }
}

/// Executes one grasp-pull action on a copy of `world`.
pub fn execute_igp(world: &WorldState, action: &IgpAction) -> Result<(WorldState, Trajectory)> {
    execute_command(world, &PullCommand::from(*action), ExecOptions::default())
}

/// Executes a grasp followed by linear moves through `command.waypoints`.
///
/// The gripper closes on the rope particle nearest to the grasp point and then
/// travels along the waypoints shifted by the same grasp offset, in increments
/// no longer than `ee_speed_cap * dt`, settling after every increment. The
/// rope is released (and dropped to the ground) at the end.
pub fn execute_command(
    world: &WorldState,
    command: &PullCommand,
    opts: ExecOptions,
) -> Result<(WorldState, Trajectory)> {
    execute_command_observed(world, command, opts, &mut |_| {})
}

/// [`execute_command`] that hands the world to `observer` after every settle
/// (each gripper increment, then the release).
pub fn execute_command_observed(
    world: &WorldState,
    command: &PullCommand,
    opts: ExecOptions,
    observer: &mut dyn FnMut(&WorldState),
) -> Result<(WorldState, Trajectory)> {
    let agent = command.agent_id;
    if agent >= world.n_agents() {
        return Err(Error::Precondition(format!("no agent {agent}")));
    }
    let cfg = &world.config;
    let base = world.agent_position(agent);
    let grasp = xy(&command.grasp);
    if opts.enforce_reach {
        let reach = cfg.max_reach + 1e-9;
        if (grasp - base).norm() > reach {
            return Err(Error::Precondition(format!(
                "grasp point is {:.3} m from agent {agent}, beyond reach {:.3}",
                (grasp - base).norm(),
                cfg.max_reach
            )));
        }
        for w in &command.waypoints {
            if (xy(w) - base).norm() > reach {
                return Err(Error::Precondition(format!(
                    "pull point is {:.3} m from agent {agent}, beyond reach {:.3}",
                    (xy(w) - base).norm(),
                    cfg.max_reach
                )));
            }
        }
    }
    let (index, dist) = world.ropes[agent].nearest_particle(grasp);
    if dist > cfg.grasp_radius {
        return Err(Error::GraspMiss {
            agent,
            x: grasp.x,
            y: grasp.y,
            radius: cfg.grasp_radius,
        });
    }

    let mut next = world.clone();
    let start_object = next.object_position();
    let mut gripper = next.ropes[agent].particles[index];
    let offset = xy(&gripper) - grasp;
    let step = next.config.max_step();
    next.ropes[agent].grasped_index = Some(index);
    next.grippers[agent] = Some(gripper);
    let mut waypoints = vec![TrajectoryPoint {
        gripper,
        body: next.body.pose,
    }];

    for target in &command.waypoints {
        let goal = lift(xy(target) + offset, target.z.max(0.0));
        let travel = goal - gripper;
        let increments = (travel.norm() / step).ceil() as usize;
        let from = gripper;
        for k in 1..=increments {
            gripper = from + travel * (k as f64 / increments as f64);
            next.grippers[agent] = Some(gripper);
            settle(&mut next)?;
            observer(&next);
            waypoints.push(TrajectoryPoint {
                gripper,
                body: next.body.pose,
            });
        }
    }

    release(&mut next, agent);
    settle(&mut next)?;
    observer(&next);
    next.time_step += 1;
    let displacement = next.object_position() - start_object;
    Ok((
        next,
        Trajectory {
            waypoints,
            displacement,
        },
    ))
}

/// Opens the gripper; a lifted rope drops onto the ground and is re-spaced
/// outward from its attachment.
fn release(world: &mut WorldState, agent: usize) {
    world.grippers[agent] = None;
    let rope = &mut world.ropes[agent];
    rope.grasped_index = None;
    if rope.particles.iter().any(|p| p.z > 0.0) {
        for p in rope.particles.iter_mut() {
            p.z = 0.0;
        }
        let rest = rope.segment_rest_length;
        let mut last = Vec2::new(1.0, 0.0);
        for i in 1..rope.particles.len() {
            let d = xy(&rope.particles[i]) - xy(&rope.particles[i - 1]);
            let dir = if d.norm() > 1e-12 { d / d.norm() } else { last };
            rope.particles[i] = lift(xy(&rope.particles[i - 1]) + dir * rest, 0.0);
            last = dir;
        }
    }
}

impl WorldState {
    /// In-place variant of [`execute_igp`]; the world is left unchanged on error.
    pub fn apply_igp(&mut self, action: &IgpAction) -> Result<Trajectory> {
        let (next, traj) = execute_igp(self, action)?;
        *self = next;
        Ok(traj)
    }

    pub fn apply_command(&mut self, command: &PullCommand, opts: ExecOptions) -> Result<Trajectory> {
        let (next, traj) = execute_command(self, command, opts)?;
        *self = next;
        Ok(traj)
    }
}
