//! Action proposal, sampling, outcome prediction and selection.

mod grasp;
mod pipeline;
mod predict;
mod pull;
mod select;

pub use grasp::{graspable_cells, grasp_map, heuristic_logit, propose_grasp, GraspCell, GraspHeuristic, GraspMap, Scorer};
pub use pipeline::{plan_step, propose_for_agent, PlannerKind, PolicyConfig, Skip, StepPlan};
pub use predict::{predict_outcome, PredictorKind};
pub use pull::{clamp_to_reach, gaussian_offsets, grasp_slack, propose_pull, sample_actions, travel_within_reach, Proposer};
pub use select::{argmin_by_l, select_best, write_candidate_log, Candidate};
