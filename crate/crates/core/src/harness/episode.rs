use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::task::{Scene, TaskSpec};
use super::termination::{check_termination, TerminalStatus};
use crate::baselines::{baseline_command, pregrasp_free_ends, BaselineKind};
use crate::error::{Error, Result};
use crate::learned::LearnedModels;
use crate::policy::{plan_step, write_candidate_log, PlannerKind, PolicyConfig, PredictorKind};
use crate::sim::{ExecOptions, PullCommand, WorldState};
use crate::subgoal::Subgoal;

/// Methods of the comparison suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Gip,
    Lgp,
    /// GIP pipeline without sampling.
    Ns,
    /// GIP pipeline with a random grasp scorer.
    Rg,
    Tda,
    Gtda,
    FixedGrasp,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Gip,
        Method::Lgp,
        Method::Ns,
        Method::Rg,
        Method::Tda,
        Method::Gtda,
        Method::FixedGrasp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gip => "GIP",
            Method::Lgp => "LGP",
            Method::Ns => "NS",
            Method::Rg => "RG",
            Method::Tda => "TDA",
            Method::Gtda => "GTDA",
            Method::FixedGrasp => "FIXED_GRASP",
        }
    }

    /// Pipeline configuration for IGP-based methods, `None` for TDA / G-TDA.
    pub fn policy(self, base: &PolicyConfig) -> Option<PolicyConfig> {
        match self {
            Method::Gip => Some(PolicyConfig {
                planner: PlannerKind::Gip,
                ..base.clone()
            }),
            Method::Lgp => Some(PolicyConfig {
                planner: PlannerKind::Lgp,
                ..base.clone()
            }),
            Method::Ns => BaselineKind::IgpNs.policy(base),
            Method::Rg => BaselineKind::IgpRg.policy(base),
            Method::FixedGrasp => BaselineKind::FixedGrasp.policy(base),
            Method::Tda | Method::Gtda => None,
        }
    }

    fn baseline(self) -> Option<BaselineKind> {
        match self {
            Method::Tda => Some(BaselineKind::Tda),
            Method::Gtda => Some(BaselineKind::Gtda),
            _ => None,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        let norm = norm.strip_prefix("IGP_").unwrap_or(&norm);
        Method::ALL
            .into_iter()
            .find(|m| m.name() == norm || (norm == "FIXED" && *m == Method::FixedGrasp))
            .ok_or_else(|| Error::Unknown {
                kind: "method",
                name: s.to_string(),
            })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Executed,
    GraspMiss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub agent_id: usize,
    pub command: PullCommand,
    pub l_before: f64,
    pub l_after: f64,
    pub outcome: StepOutcome,
    /// Per-agent subgoals (IGP methods only).
    #[serde(default)]
    pub subgoals: Vec<Subgoal>,
    #[serde(default)]
    pub predicted_l: Option<f64>,
    #[serde(default)]
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub method: Method,
    pub predictor: Option<PredictorKind>,
    pub seed: u64,
    pub config_hash: String,
    pub target: [f64; 2],
    /// Object-target distance before the first action, then after every action.
    pub l_history: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub status: TerminalStatus,
    pub success: bool,
    #[serde(default)]
    pub diagnostic: Option<String>,
}

impl EpisodeRecord {
    pub fn shortest_offset(&self) -> f64 {
        self.l_history.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn final_offset(&self) -> f64 {
        *self.l_history.last().expect("history holds the initial distance")
    }
}

/// Everything an episode needs besides the scene.
#[derive(Debug, Clone, Default)]
pub struct EpisodeOptions {
    pub policy: PolicyConfig,
    pub models: Option<LearnedModels>,
}

pub fn config_hash(task: &TaskSpec, method: Method, policy: &PolicyConfig) -> String {
    let blob = serde_json::json!({"task": task, "method": method, "policy": policy});
    hex::encode(Sha256::digest(blob.to_string().as_bytes()))
}

/// Agent-view radius used by the rope-loss rule.
fn view_radius(policy: &PolicyConfig) -> f64 {
    policy.obs.w as f64 * policy.obs.resolution / 2.0
}

/// Runs one episode from `scene`; step decisions draw randomness from `seed`.
/// Candidates of every IGP step are written to `log` as JSON lines when given.
pub fn run_episode_on(
    task: &TaskSpec,
    scene: Scene,
    method: Method,
    seed: u64,
    opts: &EpisodeOptions,
    mut log: Option<&mut dyn Write>,
) -> EpisodeRecord {
    let Scene { mut world, target } = scene;
    let policy = method.policy(&opts.policy);
    let setup = match method {
        Method::FixedGrasp => pregrasp_free_ends(&mut world).err(),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1a9f_0000_0000);
    let distance = |w: &WorldState| (w.object_position() - target).norm();
    let mut record = EpisodeRecord {
        method,
        predictor: policy.as_ref().map(|p| p.predictor),
        seed,
        config_hash: config_hash(task, method, &opts.policy),
        target: [target.x, target.y],
        l_history: vec![distance(&world)],
        steps: Vec::new(),
        status: TerminalStatus::MaxSteps,
        success: false,
        diagnostic: None,
    };
    let radius = view_radius(&opts.policy);
    if let Some(e) = setup {
        record.diagnostic = Some(e.to_string());
        record.status = TerminalStatus::Error;
        return record;
    }

    let mut status = check_termination(&record.l_history, &world, target, task, radius);
    while status.is_none() {
        let step = record.steps.len();
        let l_before = *record.l_history.last().unwrap();
        let decision = match &policy {
            Some(cfg) => plan_step(&world, target, cfg, opts.models.as_ref(), &mut rng).map(|plan| {
                if let Some(out) = log.as_deref_mut() {
                    if let Err(e) = write_candidate_log(out, &plan.candidates, plan.chosen, Some(step)) {
                        log::warn!("candidate log: {e}");
                    }
                }
                let chosen = &plan.candidates[plan.chosen];
                (PullCommand::from(chosen.action), plan.subgoals.clone(), Some(chosen.predicted_l), plan.candidates.len())
            }),
            None => baseline_command(&world, method.baseline().expect("baseline method"), target).map(|c| (c, Vec::new(), None, 1)),
        };
        let (command, subgoals, predicted_l, candidates) = match decision {
            Ok(d) => d,
            Err(Error::NoGraspableRope(_) | Error::EmptyCandidates | Error::Precondition(_)) => {
                status = Some(TerminalStatus::RopeLost);
                break;
            }
            Err(e) => {
                record.diagnostic = Some(e.to_string());
                status = Some(TerminalStatus::Error);
                break;
            }
        };
        let outcome = match world.apply_command(&command, ExecOptions::default()) {
            Ok(_) => StepOutcome::Executed,
            Err(Error::GraspMiss { .. }) => StepOutcome::GraspMiss,
            Err(e) => {
                record.diagnostic = Some(e.to_string());
                status = Some(TerminalStatus::Error);
                break;
            }
        };
        let l_after = distance(&world);
        record.l_history.push(l_after);
        record.steps.push(StepRecord {
            step,
            agent_id: command.agent_id,
            command,
            l_before,
            l_after,
            outcome,
            subgoals,
            predicted_l,
            candidates,
        });
        status = check_termination(&record.l_history, &world, target, task, radius);
    }
    record.status = status.expect("loop exits with a status");
    record.success = record.status != TerminalStatus::Error && record.final_offset() < task.success_radius;
    record
}

/// Samples the scene for `seed` and runs `method` on it.
pub fn run_episode(task: &TaskSpec, method: Method, seed: u64, index: usize, opts: &EpisodeOptions) -> Result<EpisodeRecord> {
    let scene = task.sample_scene(seed, index)?;
    Ok(run_episode_on(task, scene, method, seed, opts, None))
}
