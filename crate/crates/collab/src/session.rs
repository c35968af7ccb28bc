use std::sync::Arc;

use igp_core::geom::{lift, Vec2};
use igp_core::harness::{check_termination, StepOutcome, StepRecord, TaskKind, TaskSpec, TerminalStatus};
use igp_core::learned::LearnedModels;
use igp_core::policy::{plan_step, PolicyConfig};
use igp_core::sim::{ExecOptions, PullCommand, WorldState};
use igp_core::subgoal::Subgoal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::wire::WireMessage;

pub const DEFAULT_TIMEOUT_MS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    WaitHuman,
    RobotActing,
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub task: TaskKind,
    pub seed: u64,
    pub scene_index: usize,
    /// Idle time after which the robot acts.
    pub timeout_ms: u64,
    /// Agent slot driven by the human; its reach is not enforced.
    pub human_agent: usize,
    pub policy: PolicyConfig,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            task: TaskKind::GoalReach,
            seed: 0,
            scene_index: 0,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            human_agent: 0,
            policy: PolicyConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("the robot is acting; wait for the next state update")]
    Busy,
    #[error("the session has ended")]
    Finished,
    #[error("point ({x:.3}, {y:.3}) lies outside the arena")]
    OutOfArena { x: f64, y: f64 },
    #[error("invalid session configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] igp_core::Error),
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Busy => "busy",
            SessionError::Finished => "finished",
            SessionError::OutOfArena { .. } => "out_of_arena",
            SessionError::Config(_) => "config",
            SessionError::Sim(_) => "simulation",
        }
    }

    pub fn to_wire(&self) -> WireMessage {
        WireMessage::error(self.code(), self.to_string())
    }
}

/// Everything the robot needs to plan and execute one step off the session.
pub struct RobotJob {
    world: WorldState,
    target: Vec2,
    policy: PolicyConfig,
    models: Option<Arc<LearnedModels>>,
    rng: ChaCha8Rng,
}

/// Result of a robot step.
#[derive(Debug, Clone)]
pub struct RobotMove {
    pub command: PullCommand,
    pub predicted_l: f64,
    pub candidates: usize,
    pub subgoals: Vec<Subgoal>,
    /// World after the pull; `None` when the grasp missed.
    pub world: Option<WorldState>,
}

impl RobotJob {
    pub fn run(mut self) -> igp_core::Result<RobotMove> {
        let plan = plan_step(&self.world, self.target, &self.policy, self.models.as_deref(), &mut self.rng)?;
        let chosen = plan.candidates[plan.chosen];
        let command = PullCommand::from(chosen.action);
        let world = match self.world.apply_command(&command, ExecOptions::default()) {
            Ok(_) => Some(self.world),
            Err(igp_core::Error::GraspMiss { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(RobotMove {
            command,
            predicted_l: chosen.predicted_l,
            candidates: plan.candidates.len(),
            subgoals: plan.subgoals,
            world,
        })
    }
}

/// Sampled ropes may run past the configured arena; grow it so the human can
/// reach everything on screen.
fn widen_arena(world: &mut WorldState, target: Vec2) {
    const MARGIN: f64 = 0.5;
    let mut extent = target.abs().max();
    for rope in &world.ropes {
        for p in &rope.particles {
            extent = extent.max(p.x.abs()).max(p.y.abs());
        }
    }
    for a in 0..world.n_agents() {
        extent = extent.max(world.agent_position(a).abs().max());
    }
    world.config.arena_half_extent = world.config.arena_half_extent.max(extent + MARGIN);
}

/// Turn-taking state machine. Time is passed in as milliseconds since the
/// session started so the rules can be driven by any clock.
pub struct Session {
    id: Uuid,
    config: SessionConfig,
    task: TaskSpec,
    world: WorldState,
    target: Vec2,
    phase: Phase,
    last_action_ms: u64,
    l_history: Vec<f64>,
    steps: Vec<StepRecord>,
    status: Option<TerminalStatus>,
    models: Option<Arc<LearnedModels>>,
    rng: ChaCha8Rng,
}

impl Session {
    pub fn new(config: SessionConfig, models: Option<Arc<LearnedModels>>) -> Result<Self, SessionError> {
        if config.timeout_ms == 0 {
            return Err(SessionError::Config("timeout_ms must be positive".into()));
        }
        let task = TaskSpec::new(config.task);
        let mut scene = task.sample_scene(config.seed, config.scene_index)?;
        widen_arena(&mut scene.world, scene.target);
        let n = scene.world.n_agents();
        if config.human_agent >= n {
            return Err(SessionError::Config(format!("human agent {} but the scene has {n} agents", config.human_agent)));
        }
        if n < 2 {
            return Err(SessionError::Config("collaboration needs a robot agent besides the human".into()));
        }
        let mut policy = config.policy.clone();
        policy.agents = Some((0..n).filter(|&a| a != config.human_agent).collect());
        let l0 = (scene.world.object_position() - scene.target).norm();
        let mut session = Self {
            id: Uuid::new_v4(),
            rng: ChaCha8Rng::seed_from_u64(config.seed ^ 0xc011_ab00),
            config: SessionConfig { policy, ..config },
            task,
            world: scene.world,
            target: scene.target,
            phase: Phase::WaitHuman,
            last_action_ms: 0,
            l_history: vec![l0],
            steps: Vec::new(),
            status: None,
            models,
        };
        session.update_status();
        Ok(session)
    }

    pub fn id(&self) -> Uuid {
        self.id
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn target(&self) -> Vec2 {
        self.target
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    pub fn l_history(&self) -> &[f64] {
        &self.l_history
    }

    pub fn status(&self) -> Option<TerminalStatus> {
        self.status
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    fn distance(&self) -> f64 {
        (self.world.object_position() - self.target).norm()
    }

    pub fn state_update(&self, now_ms: u64) -> WireMessage {
        let robot_in_ms = match self.phase {
            Phase::WaitHuman => (self.last_action_ms + self.config.timeout_ms).saturating_sub(now_ms),
            _ => 0,
        };
        WireMessage::StateUpdate {
            session_id: self.id,
            phase: self.phase,
            world: self.world.to_snapshot(),
            target: self.target.into(),
            l: self.distance(),
            steps: self.steps.len(),
            human_agent: self.config.human_agent,
            timeout_ms: self.config.timeout_ms,
            robot_in_ms,
            success_radius: self.task.success_radius,
        }
    }

    fn terminal_message(&self) -> WireMessage {
        let fo = *self.l_history.last().expect("initial distance recorded");
        let status = self.status.expect("terminal session has a status");
        WireMessage::Terminal {
            status,
            success: status != TerminalStatus::Error && fo < self.task.success_radius,
            fo,
            so: self.l_history.iter().cloned().fold(f64::INFINITY, f64::min),
            sc: self.steps.len(),
        }
    }

    fn update_status(&mut self) {
        let radius = self.config.policy.obs.w as f64 * self.config.policy.obs.resolution / 2.0;
        if let Some(s) = check_termination(&self.l_history, &self.world, self.target, &self.task, radius) {
            self.status = Some(s);
            self.phase = Phase::Terminal;
        }
    }

    fn end(&mut self, status: TerminalStatus, now_ms: u64) -> Vec<WireMessage> {
        self.status = Some(status);
        self.phase = Phase::Terminal;
        vec![self.state_update(now_ms), self.terminal_message()]
    }

    /// Records an executed (or missed) action and returns the resulting messages.
    fn record(&mut self, command: PullCommand, outcome: StepOutcome, subgoals: Vec<Subgoal>, predicted_l: Option<f64>, candidates: usize, now_ms: u64) -> Vec<WireMessage> {
        let l_before = *self.l_history.last().unwrap();
        let l_after = self.distance();
        self.l_history.push(l_after);
        self.steps.push(StepRecord {
            step: self.steps.len(),
            agent_id: command.agent_id,
            command,
            l_before,
            l_after,
            outcome,
            subgoals,
            predicted_l,
            candidates,
        });
        self.last_action_ms = now_ms;
        self.phase = Phase::WaitHuman;
        self.update_status();
        let mut out = vec![self.state_update(now_ms)];
        if self.phase == Phase::Terminal {
            out.push(self.terminal_message());
        }
        out
    }

    fn guard(&self) -> Result<(), SessionError> {
        match self.phase {
            Phase::WaitHuman => Ok(()),
            Phase::RobotActing => Err(SessionError::Busy),
            Phase::Terminal => Err(SessionError::Finished),
        }
    }

    pub fn submit_human_action(&mut self, grasp: Vec2, pull: Vec2, now_ms: u64) -> Result<Vec<WireMessage>, SessionError> {
        self.guard()?;
        let half = self.world.config.arena_half_extent;
        for p in [grasp, pull] {
            if !(p.x.abs() <= half && p.y.abs() <= half) {
                return Err(SessionError::OutOfArena { x: p.x, y: p.y });
            }
        }
        let h = self.world.config.grasp_height;
        let command = PullCommand {
            agent_id: self.config.human_agent,
            grasp: lift(grasp, h),
            waypoints: vec![lift(pull, h)],
        };
        let mut out = Vec::new();
        let outcome = match self.world.apply_command(&command, ExecOptions { enforce_reach: false }) {
            Ok(_) => StepOutcome::Executed,
            Err(e @ igp_core::Error::GraspMiss { .. }) => {
                out.push(WireMessage::error("grasp_miss", e.to_string()));
                StepOutcome::GraspMiss
            }
            Err(e) => return Err(e.into()),
        };
        out.extend(self.record(command, outcome, Vec::new(), None, 0, now_ms));
        Ok(out)
    }

    /// Starts the robot's turn when the human has been idle for the timeout.
    pub fn begin_robot_turn(&mut self, now_ms: u64) -> Option<RobotJob> {
        if self.phase != Phase::WaitHuman || now_ms < self.last_action_ms + self.config.timeout_ms {
            return None;
        }
        self.phase = Phase::RobotActing;
        let seed = rand::Rng::random(&mut self.rng);
        Some(RobotJob {
            world: self.world.clone(),
            target: self.target,
            policy: self.config.policy.clone(),
            models: self.models.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn finish_robot_turn(&mut self, result: igp_core::Result<RobotMove>, now_ms: u64) -> Vec<WireMessage> {
        debug_assert_eq!(self.phase, Phase::RobotActing);
        match result {
            Ok(m) => {
                let notice = WireMessage::RobotActionNotice {
                    agent_id: m.command.agent_id,
                    grasp: m.command.grasp.into(),
                    pull: (*m.command.waypoints.last().expect("pull waypoint")).into(),
                    predicted_l: Some(m.predicted_l),
                    candidates: m.candidates,
                };
                let outcome = match m.world {
                    Some(w) => {
                        self.world = w;
                        StepOutcome::Executed
                    }
                    None => StepOutcome::GraspMiss,
                };
                let mut out = vec![notice];
                out.extend(self.record(m.command, outcome, m.subgoals, Some(m.predicted_l), m.candidates, now_ms));
                out
            }
            // the robot has nothing to grasp: with no human input the session could never end
            Err(igp_core::Error::NoGraspableRope(_) | igp_core::Error::EmptyCandidates | igp_core::Error::Precondition(_)) => {
                self.end(TerminalStatus::RopeLost, now_ms)
            }
            Err(e) => {
                log::warn!("session {}: robot step failed: {e}", self.id);
                let mut out = vec![WireMessage::error("simulation", e.to_string())];
                out.extend(self.end(TerminalStatus::Error, now_ms));
                out
            }
        }
    }

    /// Synchronous robot turn: plan, execute and record in one call.
    pub fn tick(&mut self, now_ms: u64) -> Vec<WireMessage> {
        match self.begin_robot_turn(now_ms) {
            Some(job) => {
                let result = job.run();
                self.finish_robot_turn(result, now_ms)
            }
            None => Vec::new(),
        }
    }
}
