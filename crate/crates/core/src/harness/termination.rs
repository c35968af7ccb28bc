use serde::{Deserialize, Serialize};

use super::task::TaskSpec;
use crate::geom::{xy, Vec2};
use crate::sim::WorldState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TerminalStatus {
    Reached,
    Stalled,
    RopeLost,
    MaxSteps,
    /// The simulation failed (e.g. did not settle); see the record's diagnostic.
    Error,
}

/// Number of trailing distances that must all exceed the earlier minimum.
pub const STALL_WINDOW: usize = 3;

/// True when each of the last three distances is above the lowest distance
/// recorded before them.
pub fn stalled(history: &[f64]) -> bool {
    if history.len() <= STALL_WINDOW {
        return false;
    }
    let split = history.len() - STALL_WINDOW;
    let best = history[..split].iter().cloned().fold(f64::INFINITY, f64::min);
    history[split..].iter().all(|&l| l > best)
}

/// Whether any particle of `agent`'s rope lies within `view_radius` of the agent.
pub fn rope_visible(world: &WorldState, agent: usize, view_radius: f64) -> bool {
    let base = world.agent_position(agent);
    world.ropes[agent].particles.iter().any(|p| (xy(p) - base).norm() <= view_radius)
}

/// Rope-loss rule: all ropes out of view terminates; when only some are out of
/// view the episode ends if, for every agent still seeing its rope, the object
/// is already closer to that agent than the target is (ropes cannot push).
pub fn rope_lost(world: &WorldState, target: Vec2, view_radius: f64) -> bool {
    let visible: Vec<usize> = (0..world.n_agents()).filter(|&a| rope_visible(world, a, view_radius)).collect();
    if visible.is_empty() {
        return true;
    }
    if visible.len() == world.n_agents() {
        return false;
    }
    let object = world.object_position();
    visible.iter().all(|&a| {
        let p = world.agent_position(a);
        (object - p).norm() < (target - p).norm()
    })
}

/// Evaluates the termination conditions in order: proximity, rope loss, stall.
/// `history` holds the object-target distance before the first action followed
/// by the distance after every action.
pub fn check_termination(
    history: &[f64],
    world: &WorldState,
    target: Vec2,
    task: &TaskSpec,
    view_radius: f64,
) -> Option<TerminalStatus> {
    let l = *history.last()?;
    if l < task.terminate_radius {
        return Some(TerminalStatus::Reached);
    }
    if rope_lost(world, target, view_radius) {
        return Some(TerminalStatus::RopeLost);
    }
    if stalled(history) {
        return Some(TerminalStatus::Stalled);
    }
    if history.len() > task.max_steps {
        return Some(TerminalStatus::MaxSteps);
    }
    None
}
