use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grasp::{propose_grasp, GraspHeuristic, Scorer};
use super::predict::{predict_outcome, PredictorKind};
use super::pull::{propose_pull, sample_actions, Proposer};
use super::select::{select_best, Candidate};
use crate::error::{Error, Result};
use crate::geom::{lift, xy, Vec2};
use crate::learned::LearnedModels;
use crate::perception::{render_observation, ObservationConfig};
use crate::sim::{IgpAction, WorldState};
use crate::subgoal::{gip_subgoal, lgp_subgoal, planning_window, Subgoal, DEFAULT_GRID_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PlannerKind {
    Gip,
    Lgp,
    /// Use the target itself.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyConfig {
    pub planner: PlannerKind,
    pub scorer: Scorer,
    pub proposer: Proposer,
    pub predictor: PredictorKind,
    /// Extra sampled actions per agent.
    pub m: usize,
    /// Per-axis variance of the pull-point perturbation (m^2).
    pub variance: f64,
    pub grasp: GraspHeuristic,
    /// Always grasp the rope's free end.
    pub fixed_grasp: bool,
    pub obs: ObservationConfig,
    pub grid_step: f64,
    /// Agents the policy may move; all agents when `None`.
    pub agents: Option<Vec<usize>>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            planner: PlannerKind::Gip,
            scorer: Scorer::Heuristic,
            proposer: Proposer::Heuristic,
            predictor: PredictorKind::RolloutOracle,
            m: 10,
            variance: 0.5,
            grasp: GraspHeuristic::default(),
            fixed_grasp: false,
            obs: ObservationConfig::default(),
            grid_step: DEFAULT_GRID_STEP,
            agents: None,
        }
    }
}

impl PolicyConfig {
    pub fn subgoal(&self, world: &WorldState, agent: usize, target: Vec2) -> Subgoal {
        let object = world.object_position();
        let window = planning_window(object, &self.obs);
        match self.planner {
            PlannerKind::Gip => gip_subgoal(
                world.agent_position(agent),
                object,
                target,
                world.config.max_reach,
                &window,
                self.grid_step,
            ),
            PlannerKind::Lgp => lgp_subgoal(object, target, &window),
            PlannerKind::Raw => Subgoal::raw(target),
        }
    }
}

/// Why an agent contributed no candidates this step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub agent_id: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    /// Surviving candidates after prediction, in (agent, index) order.
    pub candidates: Vec<Candidate>,
    /// Position of the selected candidate in `candidates`.
    pub chosen: usize,
    pub subgoals: Vec<Subgoal>,
    /// Common point every prediction is scored against.
    pub reference: Vec2,
    /// Candidates generated before discarding failed predictions.
    pub sampled: usize,
    pub skipped: Vec<Skip>,
}

impl StepPlan {
    pub fn action(&self) -> &IgpAction {
        &self.candidates[self.chosen].action
    }
}

/// Proposal of one agent: its unperturbed action, or the reason there is none.
pub fn propose_for_agent<R: Rng>(
    world: &WorldState,
    agent: usize,
    subgoal: &Subgoal,
    cfg: &PolicyConfig,
    models: Option<&LearnedModels>,
    rng: &mut R,
) -> Result<IgpAction> {
    let base = world.agent_position(agent);
    let reach = world.config.max_reach;
    let grasp = if cfg.fixed_grasp {
        let rope = &world.ropes[agent];
        let end = xy(&rope.particles[rope.free_end_index()]);
        if (end - base).norm() > reach {
            return Err(Error::Precondition(format!(
                "rope end of agent {agent} is {:.2} m away, beyond reach",
                (end - base).norm()
            )));
        }
        lift(end, world.config.grasp_height)
    } else {
        let obs = render_observation(world, agent, subgoal.position, &cfg.obs);
        propose_grasp(&obs, world, subgoal.position, cfg.scorer, &cfg.grasp, models, rng)?.1
    };
    let pull = propose_pull(world, agent, grasp, subgoal.position, cfg.proposer, models)?;
    Ok(IgpAction::new(agent, grasp, pull))
}

/// One decision of the multi-agent workflow: per agent, subgoal, grasp and
/// pull proposal plus `m` sampled variants; every candidate's outcome is
/// predicted and the one ending closest to the reference is chosen.
pub fn plan_step<R: Rng>(
    world: &WorldState,
    target: Vec2,
    cfg: &PolicyConfig,
    models: Option<&LearnedModels>,
    rng: &mut R,
) -> Result<StepPlan> {
    let object = world.object_position();
    let reference = lgp_subgoal(object, target, &planning_window(object, &cfg.obs)).position;
    let mut subgoals = Vec::with_capacity(world.n_agents());
    let mut proposals = Vec::new();
    let mut skipped = Vec::new();
    for agent in 0..world.n_agents() {
        let subgoal = cfg.subgoal(world, agent, target);
        subgoals.push(subgoal);
        if cfg.agents.as_ref().is_some_and(|a| !a.contains(&agent)) {
            continue;
        }
        match propose_for_agent(world, agent, &subgoal, cfg, models, rng) {
            Ok(action) => {
                let base = world.agent_position(agent);
                let actions = sample_actions(&action, cfg.m, cfg.variance, base, world.config.max_reach, rng);
                proposals.extend(actions.into_iter().enumerate().map(|(i, a)| (i, a, subgoal.position)));
            }
            Err(e @ (Error::NoGraspableRope(_) | Error::Precondition(_))) => skipped.push(Skip {
                agent_id: agent,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    if proposals.is_empty() {
        return Err(Error::NoGraspableRope(skipped.first().map_or(0, |s| s.agent_id)));
    }
    let sampled = proposals.len();
    let predictions: Vec<Result<Vec2>> = proposals
        .par_iter()
        .map(|(_, a, sub)| predict_outcome(world, a, *sub, cfg.predictor, models))
        .collect();
    let mut candidates = Vec::with_capacity(sampled);
    for ((index, action, _), pred) in proposals.into_iter().zip(predictions) {
        match pred {
            Ok(offset) => candidates.push(Candidate::new(action, index, offset)),
            Err(e) => log::debug!("discarding candidate {index} of agent {}: {e}", action.agent_id),
        }
    }
    let chosen = select_best(&mut candidates, object, reference)?;
    Ok(StepPlan {
        candidates,
        chosen,
        subgoals,
        reference,
        sampled,
        skipped,
    })
}
